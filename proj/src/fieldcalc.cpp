#include "crlab/fieldcalc.hpp"

#include <bit>

namespace crlab {

FieldExpr::FieldExpr(std::string name, Arity arity, int dim, int components, Eval eval, Domain domain, int degree)
    : name_(std::move(name)),
      arity_(arity),
      dim_(dim),
      components_(components),
      degree_(degree),
      eval_(std::move(eval)),
      domain_(std::move(domain)) {}

std::vector<CJet> FieldExpr::at(std::span<const double> p, int order) const {
  if (static_cast<int>(p.size()) != dim_) throw std::invalid_argument(name_ + ": point has wrong dimension");
  if (!contains(p)) throw DomainError(name_ + ": point outside the field's domain");
  auto x = seed(p, order);
  return eval_(x);
}

ScalarField::ScalarField(std::string name, int dim, Eval eval, Domain domain)
    : name_(std::move(name)), dim_(dim), eval_(std::move(eval)), domain_(std::move(domain)) {}

RJet ScalarField::at(std::span<const double> p, int order) const {
  if (static_cast<int>(p.size()) != dim_) throw std::invalid_argument(name_ + ": point has wrong dimension");
  if (!contains(p)) throw DomainError(name_ + ": point outside the field's domain");
  auto x = seed(p, order);
  return eval_(x);
}

FieldExpr ScalarField::as_field() const {
  auto ev = eval_;
  return FieldExpr(
      name_, Arity::Scalar, dim_, 1, [ev](std::span<const RJet> x) { return std::vector<CJet>{to_complex(ev(x))}; },
      domain_);
}

Jet jet_eval(const FieldExpr& f, const Point& p, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("jet_eval supports orders 0..2");
  auto comps = f.at(p.x, order);
  int d = p.dim();
  Jet j;
  j.order = order;
  for (const auto& c : comps) {
    j.value.push_back(c.value());
    if (order >= 1) {
      Vec g(d);
      for (int i = 0; i < d; ++i) g[i] = c.d1(i);
      j.d1.push_back(g);
    }
    if (order >= 2) {
      Eigen::MatrixXcd h(d, d);
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) h(i, k) = c.d2(i, k);
      j.d2.push_back(h);
    }
  }
  return j;
}

Jet fd_jet(const FieldExpr& f, const Point& p, int order, double h) {
  int d = p.dim();
  auto val = [&](const std::vector<double>& q) { return values(f.at(q, 0)); };
  std::vector<double> step(d);
  for (int i = 0; i < d; ++i) step[i] = h * std::max(1.0, std::abs(p.x[i]));
  Jet j;
  j.order = order;
  Vec v0 = val(p.x);
  j.value.assign(v0.begin(), v0.end());
  int m = static_cast<int>(v0.size());
  auto shifted = [&](int i, double si, int k, double sk) {
    auto q = p.x;
    q[i] += si * step[i];
    if (k >= 0) q[k] += sk * step[k];
    return val(q);
  };
  if (order >= 1) {
    j.d1.assign(m, Vec::Zero(d));
    for (int i = 0; i < d; ++i) {
      Vec g = (shifted(i, 1, -1, 0) - shifted(i, -1, -1, 0)) / (2 * step[i]);
      for (int c = 0; c < m; ++c) j.d1[c][i] = g[c];
    }
  }
  if (order >= 2) {
    j.d2.assign(m, Eigen::MatrixXcd::Zero(d, d));
    for (int i = 0; i < d; ++i) {
      for (int k = i; k < d; ++k) {
        Vec hv;
        if (i == k) {
          hv = (shifted(i, 1, -1, 0) - 2.0 * v0 + shifted(i, -1, -1, 0)) / (step[i] * step[i]);
        } else {
          hv = (shifted(i, 1, k, 1) - shifted(i, 1, k, -1) - shifted(i, -1, k, 1) + shifted(i, -1, k, -1)) /
               (4 * step[i] * step[k]);
        }
        for (int c = 0; c < m; ++c) j.d2[c](i, k) = j.d2[c](k, i) = hv[c];
      }
    }
  }
  return j;
}

int wedge_sign(unsigned single, unsigned mask) {
  if (single & mask) return 0;
  return std::popcount(mask & (single - 1)) % 2 ? -1 : 1;
}

int wedge_sign_masks(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    unsigned bit = rest & (~rest + 1);
    swaps += std::popcount(a & ~((bit << 1) - 1));
  }
  return swaps % 2 ? -1 : 1;
}

AltForm::AltForm(int dim, int degree) : dim_(dim), degree_(degree), c_(std::size_t{1} << dim, cplx{}) {}

AltForm AltForm::covector(std::span<const cplx> comps) {
  AltForm f(static_cast<int>(comps.size()), 1);
  for (std::size_t i = 0; i < comps.size(); ++i) f.c_[1u << i] = comps[i];
  return f;
}

AltForm AltForm::covector(const Vec& comps) {
  std::vector<cplx> c(comps.begin(), comps.end());
  return covector(c);
}

AltForm& AltForm::operator+=(const AltForm& o) {
  if (o.degree_ != degree_ || o.dim_ != dim_) throw std::invalid_argument("adding forms of different shape");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

AltForm& AltForm::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

AltForm AltForm::interior(const Vec& v) const {
  if (degree_ == 0) throw std::invalid_argument("interior product of a 0-form");
  AltForm r(dim_, degree_ - 1);
  for (unsigned mask = 0; mask < c_.size(); ++mask) {
    if (c_[mask] == cplx{} || std::popcount(mask) != degree_) continue;
    for (int i = 0; i < dim_; ++i) {
      unsigned bit = 1u << i;
      if (!(mask & bit)) continue;
      double s = std::popcount(mask & (bit - 1)) % 2 ? -1.0 : 1.0;
      r.c_[mask ^ bit] += s * v[i] * c_[mask];
    }
  }
  return r;
}

cplx AltForm::evaluate(std::span<const Vec> vectors) const {
  if (static_cast<int>(vectors.size()) != degree_) throw std::invalid_argument("form evaluated on wrong number of vectors");
  if (degree_ == 0) return c_[0];
  AltForm cur = interior(vectors[0]);
  for (std::size_t k = 1; k < vectors.size(); ++k) cur = cur.interior(vectors[k]);
  return cur.c_[0];
}

AltForm wedge(const AltForm& a, const AltForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge of forms on different spaces");
  AltForm r(a.dim(), a.degree() + b.degree());
  unsigned n = 1u << a.dim();
  for (unsigned i = 0; i < n; ++i) {
    if (a[i] == cplx{}) continue;
    for (unsigned j = 0; j < n; ++j) {
      if (b[j] == cplx{}) continue;
      int s = wedge_sign_masks(i, j);
      if (s) r[i | j] += static_cast<double>(s) * a[i] * b[j];
    }
  }
  return r;
}

AltForm wedge_power(const AltForm& a, int k) {
  AltForm r(a.dim(), 0);
  r[0] = 1.0;
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

FieldExpr make_form(std::string name, int dim, int degree, std::function<std::vector<CJet>(std::span<const RJet>)> eval,
                    Domain domain) {
  return FieldExpr(std::move(name), Arity::Form, dim, 1 << dim, std::move(eval), std::move(domain), degree);
}

FieldExpr covector_field(std::string name, int dim, std::function<std::vector<CJet>(std::span<const RJet>)> comps,
                         Domain domain) {
  auto ev = [dim, comps](std::span<const RJet> x) {
    auto c = comps(x);
    std::vector<CJet> out(std::size_t{1} << dim, c[0].constant_like(0.0));
    for (int i = 0; i < dim; ++i) out[1u << i] = c[i];
    return out;
  };
  return make_form(std::move(name), dim, 1, ev, std::move(domain));
}

std::vector<CJet> exterior_derivative_jets(std::span<const CJet> form, int dim, int degree) {
  CJet zero = form[0].constant_like(0.0).truncated(form[0].order() - 1);
  std::vector<CJet> out(std::size_t{1} << dim, zero);
  for (unsigned mask = 0; mask < out.size(); ++mask) {
    if (std::popcount(mask) != degree + 1) continue;
    CJet acc = zero;
    for (int j = 0; j < dim; ++j) {
      unsigned bit = 1u << j;
      if (!(mask & bit)) continue;
      int s = wedge_sign(bit, mask ^ bit);
      CJet dj = form[mask ^ bit].derivative(j);
      if (s > 0) acc += dj;
      else acc -= dj;
    }
    out[mask] = acc;
  }
  return out;
}

FieldExpr exterior_derivative(const FieldExpr& form) {
  if (form.arity() != Arity::Form) throw std::invalid_argument("exterior derivative of a non-form");
  int dim = form.dim(), deg = form.degree();
  auto ev = [form, dim, deg](std::span<const RJet> x) { return exterior_derivative_jets(form(x), dim, deg); };
  return make_form("d(" + form.name() + ")", dim, deg + 1, ev, [form](std::span<const double> p) {
    return form.contains(p);
  });
}

FieldExpr wedge(const FieldExpr& a, const FieldExpr& b) {
  int dim = a.dim();
  auto ev = [a, b, dim](std::span<const RJet> x) {
    auto fa = a(x), fb = b(x);
    int order = std::min(fa[0].order(), fb[0].order());
    std::vector<CJet> out(std::size_t{1} << dim, CJet(dim, order));
    for (unsigned i = 0; i < out.size(); ++i) {
      if (std::popcount(i) != a.degree()) continue;
      for (unsigned j = 0; j < out.size(); ++j) {
        if (std::popcount(j) != b.degree()) continue;
        int s = wedge_sign_masks(i, j);
        if (s) out[i | j] += fa[i] * fb[j] * static_cast<double>(s);
      }
    }
    return out;
  };
  return make_form(a.name() + "^" + b.name(), dim, a.degree() + b.degree(), ev, [a, b](std::span<const double> p) {
    return a.contains(p) && b.contains(p);
  });
}

AltForm form_value(const FieldExpr& form, const Point& p) {
  auto comps = form.at(p.x, 0);
  AltForm f(form.dim(), form.degree());
  for (unsigned m = 0; m < comps.size(); ++m)
    if (std::popcount(m) == form.degree()) f[m] = comps[m].value();
  return f;
}

cplx exterior_derivative(const FieldExpr& form, const Point& p, std::span<const Vec> vectors) {
  FieldExpr d = exterior_derivative(form);
  if (!d.contains(p.x)) throw DomainError(form.name() + ": point outside the field's domain");
  auto x = seed(p.x, 1);
  auto comps = d(x);
  AltForm f(form.dim(), form.degree() + 1);
  for (unsigned m = 0; m < comps.size(); ++m)
    if (std::popcount(m) == form.degree() + 1) f[m] = comps[m].value();
  return f.evaluate(vectors);
}

namespace {

// pointwise evaluation of a form field on vector fields, as jets
CJet form_on_fields(std::span<const CJet> form, int dim, int degree, const std::vector<std::vector<CJet>>& fields) {
  CJet acc = form[0].constant_like(0.0);
  for (unsigned mask = 0; mask < form.size(); ++mask) {
    if (std::popcount(mask) != degree) continue;
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    // determinant over permutations; degree is small
    std::vector<int> perm(degree);
    for (int i = 0; i < degree; ++i) perm[i] = i;
    do {
      int inv = 0;
      for (int a = 0; a < degree; ++a)
        for (int b = a + 1; b < degree; ++b)
          if (perm[a] > perm[b]) ++inv;
      CJet term = form[mask];
      for (int a = 0; a < degree; ++a) term = term * fields[a][idx[perm[a]]];
      if (inv % 2) acc -= term;
      else acc += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return acc;
}

}  // namespace

cplx exterior_derivative(const FieldExpr& form, const Point& p, std::span<const FieldExpr> fields) {
  int k = form.degree();
  if (static_cast<int>(fields.size()) != k + 1) throw std::invalid_argument("exterior derivative needs k+1 fields");
  auto x = seed(p.x, 2);
  if (!form.contains(p.x)) throw DomainError(form.name() + ": point outside the field's domain");
  auto w = form(x);
  std::vector<std::vector<CJet>> F;
  for (const auto& f : fields) F.push_back(f(x));
  cplx total = 0;
  for (int i = 0; i <= k; ++i) {
    std::vector<std::vector<CJet>> rest;
    for (int j = 0; j <= k; ++j)
      if (j != i) rest.push_back(F[j]);
    CJet val = form_on_fields(w, form.dim(), k, rest);
    total += (i % 2 ? -1.0 : 1.0) * directional(F[i], val).value();
  }
  for (int i = 0; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      std::vector<std::vector<CJet>> args{bracket_jets(F[i], F[j])};
      for (int l = 0; l <= k; ++l)
        if (l != i && l != j) args.push_back(F[l]);
      total += ((i + j) % 2 ? -1.0 : 1.0) * form_on_fields(w, form.dim(), k, args).value();
    }
  }
  return total;
}

cplx wedge_eval(const FieldExpr& a, const FieldExpr& b, const Point& p, std::span<const Vec> vectors) {
  return wedge(form_value(a, p), form_value(b, p)).evaluate(vectors);
}

CJet directional(std::span<const CJet> X, const CJet& f) {
  CJet acc = f.derivative(0) * X[0];
  for (std::size_t j = 1; j < X.size(); ++j) acc += f.derivative(static_cast<int>(j)) * X[j];
  return acc;
}

std::vector<CJet> bracket_jets(std::span<const CJet> X, std::span<const CJet> Y) {
  std::vector<CJet> out;
  out.reserve(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) out.push_back(directional(X, Y[k]) - directional(Y, X[k]));
  return out;
}

Vec lie_bracket(const FieldExpr& X, const FieldExpr& Y, const Point& p) {
  auto x = X.at(p.x, 1);
  auto y = Y.at(p.x, 1);
  return values(bracket_jets(x, y));
}

Vec values(std::span<const CJet> comps) {
  Vec v(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) v[i] = comps[i].value();
  return v;
}

}  // namespace crlab
