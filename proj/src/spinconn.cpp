#include "crlab/spinconn.hpp"

#include <random>
#include <stdexcept>

#include "crlab/heisenberg.hpp"

namespace crlab {

namespace {

using JVec = std::vector<CJet>;
using Mat = Eigen::MatrixXcd;

JVec mat_apply(const Mat& M, const JVec& v) {
  JVec out;
  for (int i = 0; i < M.rows(); ++i) {
    CJet acc = v[0] * M(i, 0);
    for (int j = 1; j < M.cols(); ++j)
      if (M(i, j) != cplx(0)) acc += v[j] * M(i, j);
    out.push_back(acc);
  }
  return out;
}

JVec axpy(const JVec& a, const JVec& b, cplx s = 1.0) {
  JVec out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i] * s;
  return out;
}

Spinor to_spinor(int n, const JVec& v) {
  Spinor s = Spinor::zero(n);
  for (std::size_t i = 0; i < v.size(); ++i) s.c[i] = v[i].value();
  return s;
}

// everything needed to differentiate spinor fields at one point
struct SpinFrame {
  int n, D, S;
  FrameJets F;
  ConnectionJets C;
  std::vector<CJet> Cb;
  const std::vector<Mat>& E;
  std::vector<Mat> EE;                // (1/4) E_a E_b at [(a-1)*2n + b-1]
  std::vector<std::vector<CJet>> Om;  // Om[c][i*S + j]

  SpinFrame(const CoframeModel& model, const Point& p, int order)
      : n(model.n()),
        D(2 * model.n() + 1),
        S(1 << model.n()),
        F(frame_jets(model, p, order)),
        C(connection_jets(F)),
        Cb(frame_bracket_jets(F)),
        E(generators(model.n())) {
    int H = 2 * n;
    for (int a = 1; a <= H; ++a)
      for (int b = 1; b <= H; ++b) EE.push_back(0.25 * E[a] * E[b]);
    const CJet& like = C.Gamma[0];
    for (int c = 0; c < D; ++c) {
      std::vector<CJet> m(S * S, like.constant_like(0.0));
      for (int a = 1; a <= H; ++a)
        for (int b = 1; b <= H; ++b) {
          const Mat& w = EE[(a - 1) * H + b - 1];
          const CJet& g = C.gamma(a, b, c);
          for (int i = 0; i < S; ++i)
            for (int j = 0; j < S; ++j)
              if (w(i, j) != cplx(0)) m[i * S + j] += g * w(i, j);
        }
      Om.push_back(std::move(m));
    }
  }

  JVec omega_apply(int c, const JVec& psi) const {
    JVec out;
    for (int i = 0; i < S; ++i) {
      CJet acc = Om[c][i * S] * psi[0];
      for (int j = 1; j < S; ++j) acc += Om[c][i * S + j] * psi[j];
      out.push_back(acc);
    }
    return out;
  }
  // nabla_{E_c} psi
  JVec cov(int c, const JVec& psi) const {
    JVec out = omega_apply(c, psi);
    for (int i = 0; i < S; ++i) out[i] += directional(F.real_frame[c], psi[i]);
    return out;
  }
  JVec cov(const Vec& X, const JVec& psi) const {
    JVec out;
    for (int c = 0; c < D; ++c) {
      if (X[c] == cplx(0)) continue;
      JVec t = cov(c, psi);
      if (out.empty()) {
        for (auto& v : t) v *= X[c];
        out = std::move(t);
      } else {
        out = axpy(out, t, X[c]);
      }
    }
    if (out.empty()) {
      out = cov(0, psi);
      for (auto& v : out) v *= 0.0;
    }
    return out;
  }
  JVec dirac(const JVec& psi) const {
    JVec out = mat_apply(E[1], cov(1, psi));
    for (int a = 2; a <= 2 * n; ++a) out = axpy(out, mat_apply(E[a], cov(a, psi)));
    return out;
  }
  // nabla^* nabla psi = -sum_a (nabla_a nabla_a - nabla_{nabla_a e_a}) psi
  JVec rough(const JVec& psi) const {
    JVec out;
    for (int a = 1; a <= 2 * n; ++a) {
      JVec first = cov(a, psi);
      JVec t = cov(a, first);
      for (int c = 1; c <= 2 * n; ++c) {
        JVec d = cov(c, psi);
        for (int i = 0; i < S; ++i) t[i] -= C.gamma(a, c, a) * d[i];
      }
      out = out.empty() ? t : axpy(out, t);
    }
    for (auto& v : out) v *= -1.0;
    return out;
  }
  Mat omega_value(int c) const {
    Mat m(S, S);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j) m(i, j) = Om[c][i * S + j].value();
    return m;
  }
  // E_c(Om_d) - E_d(Om_c) + [Om_c, Om_d] - C_cd^e Om_e
  Mat curvature(int c, int d) const {
    Mat m(S, S);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j)
        m(i, j) = directional(F.real_frame[c], Om[d][i * S + j]).value() -
                  directional(F.real_frame[d], Om[c][i * S + j]).value();
    Mat oc = omega_value(c), od = omega_value(d);
    m += oc * od - od * oc;
    for (int e = 0; e < D; ++e) m -= Cb[(c * D + d) * D + e].value() * omega_value(e);
    return m;
  }
};

JVec field_jets(const SpinorField& psi, const Point& p, int order) {
  if (static_cast<int>(p.x.size()) != 2 * psi.n() + 1) throw std::invalid_argument("spinor field has wrong rank");
  if (!psi.contains(p.x)) throw DomainError(psi.name() + ": point outside the field's domain");
  return psi(seed(p.x, order));
}

void check_rank(const SpinConnection& conn, const SpinorField& psi) {
  if (conn.n() != psi.n()) throw std::invalid_argument("spinor field and model have different rank");
}

}  // namespace

SpinorField::SpinorField(std::string name, int n, Eval eval, Domain domain)
    : name_(std::move(name)), n_(n), eval_(std::move(eval)), domain_(std::move(domain)) {
  if (n < 1 || 2 * n + 1 > MonomialTable::kMaxDim) throw std::invalid_argument("unsupported rank");
}

FieldExpr SpinorField::as_field() const {
  return FieldExpr(name_, Arity::Spinor, 2 * n_ + 1, size(), eval_, domain_);
}

SpinorField constant_spinor(const Spinor& s) {
  Eigen::VectorXcd c = s.c;
  return SpinorField("const", s.n, [c](std::span<const RJet> x) {
    JVec out;
    for (int i = 0; i < c.size(); ++i) out.push_back(to_complex(x[0].constant_like(0.0)) + c[i]);
    return out;
  });
}

SpinorField scalar_spinor(const ScalarField& f, const Spinor& s) {
  Eigen::VectorXcd c = s.c;
  return SpinorField(
      f.name() + "*spinor", s.n,
      [f, c](std::span<const RJet> x) {
        CJet v = to_complex(f(x));
        JVec out;
        for (int i = 0; i < c.size(); ++i) out.push_back(v * c[i]);
        return out;
      },
      [f](std::span<const double> p) { return f.contains(p); });
}

SpinorField seeded_spinor_field(int n, std::uint64_t seed, std::optional<Parity> parity, double sigma) {
  struct Term {
    std::vector<int> vars;
    cplx coeff;
  };
  int dim = 2 * n + 1, S = 1 << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick(0, dim - 1), degree(0, 3);
  std::vector<std::vector<Term>> comps(S);
  for (int i = 0; i < S; ++i) {
    bool odd = std::popcount(static_cast<unsigned>(i)) % 2;
    bool keep = !parity || (*parity == Parity::Odd) == odd;
    for (int k = 0; k < 6; ++k) {
      Term t;
      int d = degree(rng);
      for (int j = 0; j < d; ++j) t.vars.push_back(pick(rng));
      t.coeff = {g(rng), g(rng)};
      if (keep) comps[i].push_back(t);
    }
  }
  return SpinorField("seeded" + std::to_string(seed), n, [comps, n, sigma](std::span<const RJet> x) {
    RJet env = exp(rho4_jet(n, x) * (-1.0 / sigma));
    JVec out;
    for (const auto& terms : comps) {
      CJet acc = to_complex(x[0].constant_like(0.0));
      for (const auto& t : terms) {
        RJet m = x[0].constant_like(1.0);
        for (int v : t.vars) m = m * x[v];
        acc += to_complex(m) * t.coeff;
      }
      out.push_back(acc * env);
    }
    return out;
  });
}

Eigen::MatrixXcd SpinConnection::action(FrameSlot X, const Point& p) const {
  SpinFrame sf(model_, p, 1);
  Vec c = X.coeffs(n());
  Mat m = Mat::Zero(sf.S, sf.S);
  for (int k = 0; k < sf.D; ++k) m += c[k] * sf.omega_value(k);
  return m;
}

Spinor spin_covariant_derivative(const SpinConnection& conn, FrameSlot X, const SpinorField& psi, const Point& p) {
  check_rank(conn, psi);
  SpinFrame sf(conn.model(), p, 1);
  return to_spinor(conn.n(), sf.cov(X.coeffs(conn.n()), field_jets(psi, p, 1)));
}

Spinor dirac(const SpinConnection& conn, const SpinorField& psi, const Point& p) {
  check_rank(conn, psi);
  SpinFrame sf(conn.model(), p, 1);
  return to_spinor(conn.n(), sf.dirac(field_jets(psi, p, 1)));
}

WeitzenbockTerms weitzenbock(const SpinConnection& conn, const SpinorField& psi, const Point& p,
                             std::optional<double> W) {
  check_rank(conn, psi);
  int n = conn.n();
  SpinFrame sf(conn.model(), p, 2);
  JVec v = field_jets(psi, p, 2);
  double w = W ? *W : curvature(conn.model(), p).W;
  WeitzenbockTerms t;
  t.dirac_squared = to_spinor(n, sf.dirac(sf.dirac(v)));
  t.rough = to_spinor(n, sf.rough(v));
  t.scalar = to_spinor(n, v);
  t.scalar.c *= w;
  Eigen::VectorXcd grad_t = to_spinor(n, sf.cov(0, v)).c;
  t.reeb = Spinor::zero(n);
  for (int b = 1; b <= n; ++b) t.reeb.c -= 2.0 * (sf.E[b] * (sf.E[n + b] * grad_t));
  for (const auto& c : v) t.field_scale = std::max(t.field_scale, max_abs(c));
  double scale = t.field_scale > 0 ? t.field_scale : 1.0;
  t.residual = (t.dirac_squared.c - t.rough.c - t.scalar.c - t.reeb.c).norm() / scale;
  t.reduced = (t.dirac_squared.c - t.rough.c).norm() / scale;
  return t;
}

double weitzenbock_residual(const SpinConnection& conn, const SpinorField& psi, const Point& p) {
  return weitzenbock(conn, psi, p).residual;
}

double leibniz_residual(const SpinConnection& conn, FrameSlot X, int b, const SpinorField& psi, const Point& p) {
  check_rank(conn, psi);
  int n = conn.n();
  if (b < 1 || b > 2 * n) throw std::out_of_range("frame index out of range");
  SpinFrame sf(conn.model(), p, 1);
  JVec v = field_jets(psi, p, 1);
  Vec x = X.coeffs(n);
  Eigen::VectorXcd lhs = to_spinor(n, sf.cov(x, mat_apply(sf.E[b], v))).c;
  Eigen::VectorXcd rhs = sf.E[b] * to_spinor(n, sf.cov(x, v)).c;
  Eigen::VectorXcd val = to_spinor(n, v).c;
  for (int c = 1; c <= 2 * n; ++c) {
    cplx g = 0;
    for (int k = 0; k < sf.D; ++k) g += x[k] * sf.C.gamma(b, c, k).value();
    rhs += g * (sf.E[c] * val);
  }
  return (lhs - rhs).norm();
}

Eigen::MatrixXcd spin_curvature(const SpinConnection& conn, int c, int d, const Point& p) {
  SpinFrame sf(conn.model(), p, 2);
  if (c < 0 || d < 0 || c >= sf.D || d >= sf.D) throw std::out_of_range("frame index out of range");
  return sf.curvature(c, d);
}

double curvature_representation_residual(const SpinConnection& conn, const Point& p) {
  SpinFrame sf(conn.model(), p, 2);
  std::vector<double> R = real_curvature(conn.model(), p);
  int H = 2 * sf.n, D = sf.D;
  double worst = 0;
  for (int c = 0; c < D; ++c)
    for (int d = c + 1; d < D; ++d) {
      Mat want = Mat::Zero(sf.S, sf.S);
      for (int a = 1; a <= H; ++a)
        for (int b = 1; b <= H; ++b) want += R[((c * D + d) * H + a - 1) * H + b - 1] * sf.EE[(a - 1) * H + b - 1];
      worst = std::max(worst, (sf.curvature(c, d) - want).cwiseAbs().maxCoeff());
    }
  return worst;
}

Eigen::MatrixXcd weitzenbock_curvature_term(const SpinConnection& conn, const Point& p) {
  SpinFrame sf(conn.model(), p, 2);
  Mat K = Mat::Zero(sf.S, sf.S);
  for (int a = 1; a <= 2 * sf.n; ++a)
    for (int b = 1; b <= 2 * sf.n; ++b)
      if (a != b) K += 0.5 * sf.E[a] * sf.E[b] * sf.curvature(a, b);
  return K;
}

BoundaryOperator witten_boundary_operator(const SpinConnection& conn, int i, const SpinorField& psi,
                                          const Point& p) {
  check_rank(conn, psi);
  int n = conn.n();
  if (i < 1 || i > 2 * n) throw std::out_of_range("frame index out of range");
  SpinFrame sf(conn.model(), p, 1);
  JVec v = field_jets(psi, p, 1);
  BoundaryOperator L;
  L.i = i;
  Eigen::VectorXcd d = to_spinor(n, sf.dirac(v)).c;
  L.via_dirac = to_spinor(n, sf.cov(i, v));
  L.via_dirac.c += sf.E[i] * d;
  L.via_commutator = Spinor::zero(n);
  for (int j = 1; j <= 2 * n; ++j) {
    Mat comm = 0.5 * (sf.E[i] * sf.E[j] - sf.E[j] * sf.E[i]);
    L.via_commutator.c += comm * to_spinor(n, sf.cov(j, v)).c;
  }
  return L;
}

}  // namespace crlab
