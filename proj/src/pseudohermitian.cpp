#include "crlab/pseudohermitian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "crlab/heisenberg.hpp"

namespace crlab {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kMaxCondition = 1e8;

using JVec = std::vector<CJet>;
using JMat = std::vector<std::vector<CJet>>;

CJet zero_of(const CJet& like, int order) { return like.constant_like(0.0).truncated(order); }

CJet contract(const JVec& form, const JVec& v) {
  CJet acc = form[0] * v[0];
  for (std::size_t k = 1; k < form.size(); ++k) acc += form[k] * v[k];
  return acc;
}

JMat matmul(const JMat& a, const JMat& b) {
  std::size_t r = a.size(), m = b.size(), c = b[0].size();
  JMat out(r, JVec(c));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      CJet acc = a[i][0] * b[0][j];
      for (std::size_t k = 1; k < m; ++k) acc += a[i][k] * b[k][j];
      out[i][j] = acc;
    }
  return out;
}

// Neumann series around the value matrix; exact to the jet order
JMat inverse_jets(const JMat& M, const Eigen::MatrixXcd& inv0) {
  int D = static_cast<int>(M.size());
  int order = M[0][0].order();
  const CJet& like = M[0][0];
  JMat B(D, JVec(D)), R(D, JVec(D));
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) B[i][j] = like.constant_like(inv0(i, j));
  JMat BM = matmul(B, M);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) R[i][j] = like.constant_like(i == j ? 1.0 : 0.0) - BM[i][j];
  JMat X = B, term = B;
  for (int k = 1; k <= order; ++k) {
    term = matmul(R, term);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) X[i][j] += term[i][j];
  }
  return X;
}

// unknowns of the connection system, all real:
//   P(a,g,b) re/im, S as an anti-hermitian matrix (n^2 reals), A(g,a) re/im
struct Layout {
  int n;
  int oS, oA, N;
  explicit Layout(int n_) : n(n_), oS(2 * n_ * n_ * n_), oA(oS + n_ * n_), N(oA + 2 * n_ * n_) {}
  int pr(int a, int g, int b) const { return 2 * ((a * n + g) * n + b); }
  int pair(int a, int g) const {
    // index of a < g among upper off-diagonal pairs
    int k = 0;
    for (int i = 0; i < a; ++i) k += n - 1 - i;
    return k + (g - a - 1);
  }
};

using LinForm = std::vector<std::pair<int, cplx>>;

LinForm P_form(const Layout& L, int a, int g, int b, cplx c, bool conjugate = false) {
  int i = L.pr(a, g, b);
  return {{i, c}, {i + 1, c * (conjugate ? cplx(0, -1) : cplx(0, 1))}};
}

LinForm S_form(const Layout& L, int a, int g, cplx c) {
  if (a == g) return {{L.oS + a, c * cplx(0, 1)}};
  if (a < g) {
    int i = L.oS + L.n + 2 * L.pair(a, g);
    return {{i, c}, {i + 1, c * cplx(0, 1)}};
  }
  int i = L.oS + L.n + 2 * L.pair(g, a);
  return {{i, -c}, {i + 1, c * cplx(0, 1)}};
}

LinForm A_form(const Layout& L, int g, int a, cplx c) {
  int i = L.oA + 2 * (g * L.n + a);
  return {{i, c}, {i + 1, c * cplx(0, 1)}};
}

LinForm operator+(LinForm a, const LinForm& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Equation {
  int bracket;   // index into System::brackets
  int row;       // complex coframe row
  LinForm lhs;   // empty for pure checks
  cplx expected = 0;
};

struct System {
  int n = 1;
  std::vector<std::pair<int, int>> brackets;  // complex frame indices
  std::vector<Equation> eqs;
  std::vector<int> real_rows;  // (eq, part) flattened as eq*2 + part, in solve order
  Eigen::MatrixXd pinv;
};

System build_system(int n, unsigned shuffle) {
  Layout L(n);
  System s;
  s.n = n;
  auto row_z = [](int g) { return 1 + g; };
  int nn = n;
  auto row_zb = [nn](int g) { return 1 + nn + g; };
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be) {
      int br = static_cast<int>(s.brackets.size());
      s.brackets.push_back({1 + n + be, 1 + al});  // [Zbar_be, Z_al]
      s.eqs.push_back({br, 0, {}, al == be ? cplx(0, 1) : cplx(0)});
      for (int g = 0; g < n; ++g) {
        s.eqs.push_back({br, row_z(g), P_form(L, g, al, be, -1.0, true)});
        s.eqs.push_back({br, row_zb(g), P_form(L, g, be, al, 1.0)});
      }
    }
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < al; ++be) {
      int br = static_cast<int>(s.brackets.size());
      s.brackets.push_back({1 + be, 1 + al});  // [Z_be, Z_al]
      s.eqs.push_back({br, 0, {}, 0.0});
      for (int g = 0; g < n; ++g) {
        s.eqs.push_back({br, row_z(g), P_form(L, al, g, be, 1.0) + P_form(L, be, g, al, -1.0)});
        s.eqs.push_back({br, row_zb(g), {}, 0.0});
      }
    }
  for (int al = 0; al < n; ++al) {
    int br = static_cast<int>(s.brackets.size());
    s.brackets.push_back({1 + al, 0});  // [Z_al, T]
    s.eqs.push_back({br, 0, {}, 0.0});
    for (int g = 0; g < n; ++g) {
      s.eqs.push_back({br, row_z(g), S_form(L, al, g, -1.0)});
      s.eqs.push_back({br, row_zb(g), A_form(L, g, al, 1.0)});
    }
  }
  for (int e = 0; e < static_cast<int>(s.eqs.size()); ++e)
    if (!s.eqs[e].lhs.empty()) {
      s.real_rows.push_back(2 * e);
      s.real_rows.push_back(2 * e + 1);
    }
  if (shuffle != 0) {
    std::mt19937_64 rng(shuffle);
    std::shuffle(s.real_rows.begin(), s.real_rows.end(), rng);
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<int>(s.real_rows.size()), L.N);
  for (int r = 0; r < M.rows(); ++r) {
    const Equation& eq = s.eqs[s.real_rows[r] / 2];
    bool imag = s.real_rows[r] % 2;
    for (const auto& [idx, c] : eq.lhs) M(r, idx) += imag ? c.imag() : c.real();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-12 * sv.maxCoeff()) throw RankError("connection system is rank deficient");
  s.pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return s;
}

const System& system_for(int n, unsigned shuffle) {
  static std::mutex mu;
  static std::map<std::pair<int, unsigned>, System> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, shuffle);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_system(n, shuffle)).first;
  return it->second;
}

// vector fields expanded on the real frame (T, e_1..e_2n)
struct Geometry {
  const FrameJets& F;
  const ConnectionJets& C;
  int n, D;
  std::vector<CJet> Cb;  // [E_c, E_d] = Cb(c,d,e) E_e

  Geometry(const FrameJets& f, const ConnectionJets& c)
      : F(f), C(c), n(f.n), D(2 * f.n + 1), Cb(frame_bracket_jets(f)) {}
  const CJet& bracket_coeff(int c, int d, int e) const { return Cb[(c * D + d) * D + e]; }

  JVec constant(const Vec& coeffs) const {
    JVec v;
    for (int i = 0; i < D; ++i) v.push_back(F.real_frame[0][0].constant_like(coeffs[i]));
    return v;
  }
  CJet apply(const JVec& X, const CJet& f) const {
    CJet acc = X[0] * directional(F.real_frame[0], f);
    for (int c = 1; c < D; ++c) acc += X[c] * directional(F.real_frame[c], f);
    return acc;
  }
  JVec cov(const JVec& X, const JVec& V) const {
    JVec out;
    for (int f = 0; f < D; ++f) {
      CJet acc = apply(X, V[f]);
      if (f > 0)
        for (int b = 1; b < D; ++b)
          for (int c = 0; c < D; ++c) acc += V[b] * X[c] * C.gamma(b, f, c);
      out.push_back(acc);
    }
    return out;
  }
  JVec bracket(const JVec& X, const JVec& Y) const {
    JVec out;
    for (int e = 0; e < D; ++e) {
      CJet acc = apply(X, Y[e]) - apply(Y, X[e]);
      for (int c = 0; c < D; ++c)
        for (int d = 0; d < D; ++d) acc += X[c] * Y[d] * bracket_coeff(c, d, e);
      out.push_back(acc);
    }
    return out;
  }
  JVec torsion(const JVec& X, const JVec& Y) const {
    JVec a = cov(X, Y), b = cov(Y, X), c = bracket(X, Y);
    for (int e = 0; e < D; ++e) a[e] = a[e] - b[e] - c[e];
    return a;
  }
  JVec curv(const JVec& X, const JVec& Y, const JVec& Z) const {
    JVec a = cov(X, cov(Y, Z)), b = cov(Y, cov(X, Z)), c = cov(bracket(X, Y), Z);
    for (int e = 0; e < D; ++e) a[e] = a[e] - b[e] - c[e];
    return a;
  }
  JVec J(const JVec& v) const {
    JVec out(D, zero_of(v[0], v[0].order()));
    for (int b = 1; b <= n; ++b) {
      out[b] = -v[n + b];
      out[n + b] = v[b];
    }
    return out;
  }
};

void add(JVec& a, const JVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

double max_value(const JVec& v) {
  double m = 0;
  for (const auto& c : v) m = std::max(m, std::abs(c.value()));
  return m;
}

}  // namespace

std::vector<CJet> frame_bracket_jets(const FrameJets& F) {
  int D = 2 * F.n + 1;
  std::vector<CJet> Cb(D * D * D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      JVec br = bracket_jets(F.real_frame[a], F.real_frame[b]);
      for (int e = 0; e < D; ++e) Cb[(a * D + b) * D + e] = contract(F.real_coframe[e], br);
    }
  return Cb;
}

Vec FrameSlot::coeffs(int n) const {
  Vec v = Vec::Zero(2 * n + 1);
  switch (kind) {
    case Kind::Reeb:
      v[0] = 1;
      break;
    case Kind::Holo:
    case Kind::AntiHolo:
      if (index < 1 || index > n) throw std::out_of_range("frame slot index out of range");
      v[index] = 0.5;
      v[n + index] = cplx(0, kind == Kind::Holo ? -0.5 : 0.5);
      break;
    case Kind::Real:
      if (index < 1 || index > 2 * n) throw std::out_of_range("frame slot index out of range");
      v[index] = 1;
      break;
  }
  return v;
}

std::string FrameSlot::label() const {
  switch (kind) {
    case Kind::Reeb:
      return "T";
    case Kind::Holo:
      return "Z" + std::to_string(index);
    case Kind::AntiHolo:
      return "Zbar" + std::to_string(index);
    case Kind::Real:
      break;
  }
  return "e" + std::to_string(index);
}

CoframeModel CoframeModel::flat(int n) {
  if (n < 1 || 2 * n + 1 > MonomialTable::kMaxDim) throw std::invalid_argument("unsupported rank");
  CoframeModel m;
  m.n_ = n;
  m.name_ = "flat";
  return m;
}

CoframeModel CoframeModel::conformal(int n, ScalarField u, std::string name) {
  CoframeModel m = flat(n);
  if (u.dim() != 2 * n + 1) throw std::invalid_argument("conformal factor has the wrong dimension");
  m.name_ = name.empty() ? "conformal(" + u.name() + ")" : std::move(name);
  m.u_ = std::move(u);
  return m;
}

bool CoframeModel::contains(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  if (!u_) return true;
  return u_->contains(p) && u_->value(p) > 0;
}

std::vector<std::vector<CJet>> CoframeModel::coframe(std::span<const RJet> x) const {
  int n = n_, D = dim();
  CJet zero = to_complex(x[0].constant_like(0.0));
  JVec theta(D, zero);
  for (int k = 0; k < n; ++k) {
    theta[k] = to_complex(-2.0 * x[n + k]);
    theta[n + k] = to_complex(2.0 * x[k]);
  }
  theta[2 * n] = zero + 1.0;
  std::vector<JVec> rows{theta};
  for (int al = 0; al < n; ++al) {
    JVec r(D, zero);
    r[al] = zero + kSqrt2;
    r[n + al] = zero + cplx(0, kSqrt2);
    rows.push_back(r);
  }
  if (!u_) return rows;

  RJet u = (*u_)(x);
  if (!(u.value() > 0)) throw DomainError(u_->name() + ": conformal factor must be positive");
  RJet v = pow(u, 1.0 / n);
  CJet f = to_complex(log(u) * (1.0 / n));
  CJet v2 = to_complex(v * v), vc = to_complex(v);
  std::vector<JVec> out;
  JVec th;
  for (const auto& c : rows[0]) th.push_back(c * v2);
  out.push_back(th);
  for (int al = 0; al < n; ++al) {
    // Zbar0_al f
    auto e = frame_components(n, al + 1, x), je = frame_components(n, n + al + 1, x);
    JVec zb;
    for (int k = 0; k < D; ++k) zb.push_back(e[k] * cplx(0.5) + je[k] * cplx(0, 0.5));
    CJet fb = directional(zb, f);
    JVec r;
    for (int k = 0; k < D; ++k) r.push_back(vc * (rows[1 + al][k] + rows[0][k] * fb * cplx(0, 2)));
    out.push_back(r);
  }
  return out;
}

FrameJets frame_jets(const CoframeModel& model, const Point& p, int order) {
  if (!model.contains(p.x)) throw DomainError(model.name() + ": point outside the model's domain");
  int n = model.n(), D = model.dim();
  auto x = seed(p.x, order + 1);
  auto rows = model.coframe(x);
  FrameJets F;
  F.n = n;
  F.order = order;
  for (auto& r : rows)
    for (auto& c : r) c = c.truncated(order);
  F.coframe = rows;
  for (int al = 1; al <= n; ++al) {
    JVec c;
    for (const auto& v : rows[al]) c.push_back(conj(v));
    F.coframe.push_back(c);
  }
  Eigen::MatrixXcd M0(D, D);
  for (int r = 0; r < D; ++r)
    for (int k = 0; k < D; ++k) M0(r, k) = F.coframe[r][k].value();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M0);
  auto sv = svd.singularValues();
  F.condition = sv.minCoeff() > 0 ? sv.maxCoeff() / sv.minCoeff() : INFINITY;
  if (!(F.condition <= kMaxCondition)) throw ConditioningError(model.name() + ": coframe ill-conditioned at point");
  JMat inv = inverse_jets(F.coframe, M0.inverse());
  F.frame.assign(D, JVec(D));
  for (int c = 0; c < D; ++c)
    for (int k = 0; k < D; ++k) F.frame[c][k] = inv[k][c];
  F.real_frame.push_back(F.frame[0]);
  for (int al = 1; al <= n; ++al) {
    JVec e;
    for (int k = 0; k < D; ++k) e.push_back(F.frame[al][k] + F.frame[n + al][k]);
    F.real_frame.push_back(e);
  }
  for (int al = 1; al <= n; ++al) {
    JVec e;
    for (int k = 0; k < D; ++k) e.push_back((F.frame[al][k] - F.frame[n + al][k]) * cplx(0, 1));
    F.real_frame.push_back(e);
  }
  F.real_coframe.push_back(F.coframe[0]);
  for (int al = 1; al <= n; ++al) {
    JVec w;
    for (const auto& c : F.coframe[al]) w.push_back(real_part(c));
    F.real_coframe.push_back(w);
  }
  for (int al = 1; al <= n; ++al) {
    JVec w;
    for (const auto& c : F.coframe[al]) w.push_back(imag_part(c));
    F.real_coframe.push_back(w);
  }
  return F;
}

const CJet& ConnectionJets::complex_coeff(int a, int g, int c) const {
  if (c == 0) return s(a, g);
  if (c <= n) return p(a, g, c - 1);
  return q(a, g, c - n - 1);
}

ConnectionJets connection_jets(const FrameJets& F, unsigned shuffle) {
  if (F.order < 1) throw std::invalid_argument("connection needs frame jets of order >= 1");
  int n = F.n;
  const System& sys = system_for(n, shuffle);
  Layout L(n);

  // coframe components of every bracket
  std::vector<JVec> comps;
  for (auto [i, j] : sys.brackets) {
    JVec br = bracket_jets(F.frame[i], F.frame[j]);
    JVec c;
    for (const auto& row : F.coframe) c.push_back(contract(row, br));
    comps.push_back(c);
  }
  const CJet& like = comps[0][0];
  int ncoef = like.size();
  int R = static_cast<int>(sys.real_rows.size());
  Eigen::MatrixXd B(R, ncoef);
  for (int r = 0; r < R; ++r) {
    const Equation& eq = sys.eqs[sys.real_rows[r] / 2];
    bool imag = sys.real_rows[r] % 2;
    const CJet& b = comps[eq.bracket][eq.row];
    for (int k = 0; k < ncoef; ++k) B(r, k) = imag ? b.coeff(k).imag() : b.coeff(k).real();
  }
  Eigen::MatrixXd X = sys.pinv * B;

  ConnectionJets C;
  C.n = n;
  C.order = like.order();
  auto unknown = [&](const LinForm& form) {
    CJet j = zero_of(like, like.order());
    for (int k = 0; k < ncoef; ++k) {
      cplx s = 0;
      for (const auto& [idx, c] : form) s += c * X(idx, k);
      j.coeff(k) = s;
    }
    return j;
  };
  for (int a = 0; a < n; ++a)
    for (int g = 0; g < n; ++g)
      for (int b = 0; b < n; ++b) C.P.push_back(unknown(P_form(L, a, g, b, 1.0)));
  for (int a = 0; a < n; ++a)
    for (int g = 0; g < n; ++g)
      for (int b = 0; b < n; ++b) C.Q.push_back(unknown(P_form(L, g, a, b, -1.0, true)));
  for (int a = 0; a < n; ++a)
    for (int g = 0; g < n; ++g) C.S.push_back(unknown(S_form(L, a, g, 1.0)));
  for (int g = 0; g < n; ++g)
    for (int a = 0; a < n; ++a) C.A.push_back(unknown(A_form(L, g, a, 1.0)));

  // residual over every coframe component of every bracket, values only
  double scale = 1, worst = 0;
  for (const auto& c : comps)
    for (const auto& v : c) scale = std::max(scale, std::abs(v.value()));
  for (const auto& eq : sys.eqs) {
    cplx lhs = eq.expected;
    for (const auto& [idx, c] : eq.lhs) lhs += c * X(idx, 0);
    worst = std::max(worst, std::abs(lhs - comps[eq.bracket][eq.row].value()));
  }
  C.residual = worst / scale;

  int D = 2 * n + 1;
  C.Gamma.assign(4 * n * n * D, zero_of(like, like.order()));
  auto slot = [&](int A_, int B_, int c) -> CJet& { return C.Gamma[((A_ - 1) * 2 * n + (B_ - 1)) * D + c]; };
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be)
      for (int c = 0; c < D; ++c) {
        CJet th;
        if (c == 0) th = C.s(al, be);
        else if (c <= n) th = C.p(al, be, c - 1) + C.q(al, be, c - 1);
        else th = (C.p(al, be, c - n - 1) - C.q(al, be, c - n - 1)) * cplx(0, 1);
        CJet re = real_part(th), im = imag_part(th);
        slot(al + 1, be + 1, c) = re;
        slot(al + 1, n + be + 1, c) = im;
        slot(n + al + 1, be + 1, c) = -im;
        slot(n + al + 1, n + be + 1, c) = re;
      }
  return C;
}

cplx ConnectionData::theta(int a, int g, int c) const {
  if (c == 0) return S[a * n + g];
  if (c <= n) return P[(a * n + g) * n + c - 1];
  return Q[(a * n + g) * n + c - n - 1];
}

ConnectionData solve_connection(const CoframeModel& model, const Point& p, unsigned shuffle) {
  FrameJets F = frame_jets(model, p, 1);
  ConnectionJets C = connection_jets(F, shuffle);
  ConnectionData d;
  d.n = C.n;
  d.residual = C.residual;
  d.condition = F.condition;
  for (const auto& v : C.P) d.P.push_back(v.value());
  for (const auto& v : C.Q) d.Q.push_back(v.value());
  for (const auto& v : C.S) d.S.push_back(v.value());
  for (const auto& v : C.A) d.A.push_back(v.value());
  for (const auto& v : C.Gamma) d.Gamma.push_back(v.value().real());
  return d;
}

CurvatureData curvature(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 2);
  ConnectionJets C = connection_jets(F);
  int n = F.n, D = 2 * n + 1;
  CurvatureData out;
  out.n = n;
  out.riem.assign(n * n * n * n, 0.0);
  out.ricci = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      const JVec& Zr = F.frame[1 + r];
      const JVec& Zs = F.frame[1 + n + s];
      JVec br = bracket_jets(Zr, Zs);
      std::vector<cplx> bc;
      for (int c = 0; c < D; ++c) bc.push_back(contract(F.coframe[c], br).value());
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          cplx v = directional(Zr, C.q(a, b, s)).value() - directional(Zs, C.p(a, b, r)).value();
          for (int c = 0; c < D; ++c) v -= bc[c] * C.complex_coeff(a, b, c).value();
          for (int g = 0; g < n; ++g)
            v -= C.p(a, g, r).value() * C.q(g, b, s).value() - C.q(a, g, s).value() * C.p(g, b, r).value();
          out.riem[((a * n + b) * n + r) * n + s] = v;
          out.scale = std::max(out.scale, std::abs(v));
          if (a == b) out.ricci(r, s) += v;
        }
    }
  cplx W = out.ricci.trace();
  out.W = W.real();
  out.W_imag = W.imag();

  Geometry G(F, C);
  double R = 0;
  for (int a = 1; a < D; ++a)
    for (int b = 1; b < D; ++b) {
      JVec ea = G.constant(FrameSlot::e(a).coeffs(n)), eb = G.constant(FrameSlot::e(b).coeffs(n));
      R -= G.curv(ea, eb, ea)[b].value().real();
    }
  out.R_real = R;
  out.scale = std::max(out.scale, std::abs(R));
  return out;
}

std::vector<double> real_curvature(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 2);
  ConnectionJets C = connection_jets(F);
  Geometry G(F, C);
  int n = F.n, D = 2 * n + 1, H = 2 * n;
  std::vector<JVec> basis;
  for (int c = 0; c < D; ++c) {
    Vec v = Vec::Zero(D);
    v[c] = 1;
    basis.push_back(G.constant(v));
  }
  std::vector<double> out(D * D * H * H, 0.0);
  for (int c = 0; c < D; ++c)
    for (int d = c + 1; d < D; ++d)
      for (int a = 1; a <= H; ++a) {
        JVec r = G.curv(basis[c], basis[d], basis[a]);
        for (int b = 1; b <= H; ++b) {
          double v = r[b].value().real();
          out[((c * D + d) * H + a - 1) * H + b - 1] = v;
          out[((d * D + c) * H + a - 1) * H + b - 1] = -v;
        }
      }
  return out;
}

double conformal_W_oracle(const ScalarField& u, const Point& p, int n) {
  if (!u.contains(p.x)) throw DomainError(u.name() + ": point outside the field's domain");
  double v = u.value(p.x);
  if (!(v > 0)) throw DomainError(u.name() + ": conformal factor must be positive");
  return b_const(n) * sublaplacian_real(u, p) / std::pow(v, 1 + 2.0 / n);
}

Vec torsion_tensor(const CoframeModel& model, FrameSlot X, FrameSlot Y, const Point& p) {
  FrameJets F = frame_jets(model, p, 1);
  ConnectionJets C = connection_jets(F);
  Geometry G(F, C);
  int n = F.n, D = 2 * n + 1;
  JVec t = G.torsion(G.constant(X.coeffs(n)), G.constant(Y.coeffs(n)));
  Vec out = Vec::Zero(D);
  for (int e = 0; e < D; ++e) out += t[e].value() * values(F.real_frame[e]);
  return out;
}

double bianchi_residual(const CoframeModel& model, FrameSlot X, FrameSlot Y, FrameSlot Z, const Point& p,
                        bool mod_T) {
  FrameJets F = frame_jets(model, p, 2);
  ConnectionJets C = connection_jets(F);
  Geometry G(F, C);
  int n = F.n, D = 2 * n + 1;
  std::vector<JVec> v{G.constant(X.coeffs(n)), G.constant(Y.coeffs(n)), G.constant(Z.coeffs(n))};
  JVec lhs = G.curv(v[0], v[1], v[2]);
  JVec rhs = G.torsion(v[0], G.bracket(v[1], v[2]));
  double scale = 1;
  for (int k = 0; k < 3; ++k) {
    const JVec &a = v[k], &b = v[(k + 1) % 3], &c = v[(k + 2) % 3];
    if (k > 0) {
      add(lhs, G.curv(a, b, c));
      add(rhs, G.torsion(a, G.bracket(b, c)));
    }
    JVec t = G.torsion(b, c);
    scale = std::max(scale, max_value(t));
    add(rhs, G.cov(a, t));
  }
  scale = std::max({scale, max_value(lhs), max_value(rhs)});
  double worst = 0;
  for (int e = mod_T ? 1 : 0; e < D; ++e) worst = std::max(worst, std::abs(lhs[e].value() - rhs[e].value()));
  return worst / scale;
}

std::vector<double> real_connection(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 1);
  int n = F.n, D = 2 * n + 1;
  // bracket coefficients on the real frame
  std::vector<double> Cb(D * D * D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      JVec br = bracket_jets(F.real_frame[a], F.real_frame[b]);
      for (int e = 0; e < D; ++e) Cb[(a * D + b) * D + e] = contract(F.real_coframe[e], br).value().real();
    }
  auto Cf = [&](int a, int b, int e) { return Cb[(a * D + b) * D + e]; };
  std::vector<double> out(4 * n * n * D);
  for (int b = 1; b < D; ++b)
    for (int c = 1; c < D; ++c) {
      double* row = &out[((b - 1) * 2 * n + (c - 1)) * D];
      row[0] = 0.5 * (Cf(0, b, c) - Cf(0, c, b));
      for (int a = 1; a < D; ++a) row[a] = 0.5 * (Cf(a, b, c) - Cf(b, c, a) + Cf(c, a, b));
    }
  return out;
}

double duality_residual(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 0);
  int D = model.dim();
  double worst = 0;
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c)
      worst = std::max(worst, std::abs(contract(F.coframe[r], F.frame[c]).value() - (r == c ? 1.0 : 0.0)));
  return worst;
}

double levi_residual(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 1);
  int n = F.n, D = 2 * n + 1;
  std::vector<CJet> form(std::size_t{1} << D, zero_of(F.coframe[0][0], 1));
  for (int k = 0; k < D; ++k) form[1u << k] = F.coframe[0][k];
  auto dth = exterior_derivative_jets(form, D, 1);
  AltForm lhs(D, 2);
  for (std::size_t m = 0; m < dth.size(); ++m) lhs[static_cast<unsigned>(m)] = dth[m].value();
  AltForm rhs(D, 2);
  for (int al = 1; al <= n; ++al)
    rhs += wedge(AltForm::covector(values(F.coframe[al])), AltForm::covector(values(F.coframe[n + al]))) * cplx(0, 1);
  double worst = 0, scale = 1;
  for (unsigned m = 0; m < (1u << D); ++m) {
    worst = std::max(worst, std::abs(lhs[m] - rhs[m]));
    scale = std::max(scale, std::abs(lhs[m]));
  }
  return worst / scale;
}

double structure_residual(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 1);
  ConnectionJets C = connection_jets(F);
  int n = F.n, D = 2 * n + 1;
  std::vector<Vec> fr;
  for (int c = 0; c < D; ++c) fr.push_back(values(F.frame[c]));
  double worst = 0, scale = 1;
  for (int be = 0; be < n; ++be) {
    std::vector<CJet> form(std::size_t{1} << D, zero_of(F.coframe[0][0], 1));
    for (int k = 0; k < D; ++k) form[1u << k] = F.coframe[1 + be][k];
    auto d = exterior_derivative_jets(form, D, 1);
    AltForm dth(D, 2);
    for (std::size_t m = 0; m < d.size(); ++m) dth[static_cast<unsigned>(m)] = d[m].value();
    for (int c = 0; c < D; ++c)
      for (int e = c + 1; e < D; ++e) {
        std::vector<Vec> args{fr[c], fr[e]};
        cplx lhs = dth.evaluate(args);
        cplx rhs = 0;
        // theta^a ^ theta_a^b
        for (int al = 0; al < n; ++al) {
          if (c == 1 + al) rhs += C.complex_coeff(al, be, e).value();
          if (e == 1 + al) rhs -= C.complex_coeff(al, be, c).value();
        }
        // theta ^ tau^b with tau^b = conj(A(b, g)) theta^gbar
        auto tau = [&](int k) -> cplx { return k > n ? std::conj(C.torsion(be, k - n - 1).value()) : cplx(0); };
        if (c == 0) rhs += tau(e);
        if (e == 0) rhs -= tau(c);
        worst = std::max(worst, std::abs(lhs - rhs));
        scale = std::max(scale, std::abs(lhs));
      }
  }
  return worst / scale;
}

double lie_derivative_residual(const CoframeModel& model, const Point& p) {
  FrameJets F = frame_jets(model, p, 1);
  ConnectionJets C = connection_jets(F);
  Geometry G(F, C);
  int n = F.n, D = 2 * n + 1;
  JVec T = G.constant(FrameSlot::T().coeffs(n));
  double worst = 0, scale = 1;
  for (int al = 1; al <= n; ++al)
    for (bool bar : {false, true}) {
      FrameSlot s = bar ? FrameSlot::Zbar(al) : FrameSlot::Z(al);
      JVec X = G.constant(s.coeffs(n));
      JVec lhs = G.bracket(T, G.J(X));
      JVec b = G.J(G.bracket(T, X));
      Vec want = Vec::Zero(D);
      for (int be = 1; be <= n; ++be) {
        cplx A = C.torsion(be - 1, al - 1).value();  // A^bebar_al
        if (bar) want += cplx(0, 2) * std::conj(A) * FrameSlot::Z(be).coeffs(n);
        else want += cplx(0, -2) * A * FrameSlot::Zbar(be).coeffs(n);
      }
      for (int e = 0; e < D; ++e) {
        cplx got = lhs[e].value() - b[e].value();
        worst = std::max(worst, std::abs(got - want[e]));
        scale = std::max(scale, std::abs(want[e]));
      }
    }
  return worst / scale;
}

ScalarField mass_factor(int n, double A) {
  auto eval = [n, A](std::span<const RJet> x) { return 1.0 + A * pow(rho4_jet(n, x), -0.5 * n); };
  Domain dom = [n](std::span<const double> p) {
    double s = 0;
    for (int k = 0; k <= 2 * n; ++k) s += p[k] * p[k];
    return s > 0;
  };
  return ScalarField("1+A*rho^-2n", 2 * n + 1, eval, dom);
}

ScalarField bump_factor(int n) {
  auto eval = [n](std::span<const RJet> x) {
    return 1.0 + 0.4 * exp(-0.25 * rho4_jet(n, x) + 0.3 * x[0] - 0.2 * x[2 * n]);
  };
  return ScalarField("bump", 2 * n + 1, eval);
}

std::vector<CoframeModel> model_catalog(int n) {
  return {CoframeModel::flat(n), CoframeModel::conformal(n, mass_factor(n, 1.0), "mass"),
          CoframeModel::conformal(n, jl_extremal({1.0, n}), "sphere"),
          CoframeModel::conformal(n, bump_factor(n), "bump")};
}

}  // namespace crlab
