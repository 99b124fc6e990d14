#pragma once

// Coframe models on charts of H_n and the pointwise Tanaka-Webster geometry
// (connection, torsion, curvature) extracted from them through jets.
//
// Index conventions.  Complex frame (T, Z_1..Z_n, Zbar_1..Zbar_n) dual to
// (theta, theta^1..theta^n, conj).  Real frame E_0 = T, E_a = e_a with
// e_alpha = Z_alpha + Zbar_alpha and e_{n+alpha} = i (Z_alpha - Zbar_alpha);
// real coframe omega^alpha = Re theta^alpha, omega^{n+alpha} = Im theta^alpha.
// Real connection coefficients are stored as Gamma(A, B, c) = omega_A^B(E_c)
// with A, B in 1..2n and c in 0..2n, so that nabla_{E_c} e_A = Gamma(A, B, c) e_B.

#include <optional>
#include <string>
#include <vector>

#include "crlab/fieldcalc.hpp"

namespace crlab {

// a constant complex combination of the real frame (T, e_1..e_2n)
struct FrameSlot {
  enum class Kind { Reeb, Holo, AntiHolo, Real };
  Kind kind = Kind::Reeb;
  int index = 0;

  static FrameSlot T() { return {Kind::Reeb, 0}; }
  static FrameSlot Z(int alpha) { return {Kind::Holo, alpha}; }
  static FrameSlot Zbar(int alpha) { return {Kind::AntiHolo, alpha}; }
  static FrameSlot e(int a) { return {Kind::Real, a}; }
  Vec coeffs(int n) const;
  std::string label() const;
};

class CoframeModel {
 public:
  static CoframeModel flat(int n);
  // theta = u^(2/n) theta0, theta^alpha = u^(1/n) (theta0^alpha + 2i (log u^(1/n))_alphabar theta0)
  static CoframeModel conformal(int n, ScalarField u, std::string name = {});

  int n() const { return n_; }
  int dim() const { return 2 * n_ + 1; }
  const std::string& name() const { return name_; }
  const std::optional<ScalarField>& factor() const { return u_; }
  bool contains(std::span<const double> p) const;
  // rows theta, theta^1..theta^n as coordinate components; one order below x for conformal models
  std::vector<std::vector<CJet>> coframe(std::span<const RJet> x) const;

 private:
  int n_ = 1;
  std::string name_;
  std::optional<ScalarField> u_;
};

struct FrameJets {
  int n = 1;
  int order = 0;
  double condition = 1;
  std::vector<std::vector<CJet>> coframe;       // theta, theta^alpha, theta^alphabar
  std::vector<std::vector<CJet>> frame;         // T, Z_alpha, Zbar_alpha
  std::vector<std::vector<CJet>> real_frame;    // T, e_1..e_2n
  std::vector<std::vector<CJet>> real_coframe;  // theta, omega^1..omega^2n
};

// frame data with jets of the given order at p; throws ConditioningError past 1e8
FrameJets frame_jets(const CoframeModel& model, const Point& p, int order);

struct ConnectionJets {
  int n = 1;
  int order = 0;
  // P(a,g,b) = theta_a^g(Z_b), Q(a,g,b) = theta_a^g(Zbar_b), S(a,g) = theta_a^g(T), A(g,a) = A^gbar_a
  std::vector<CJet> P, Q, S, A;
  std::vector<CJet> Gamma;  // real coefficients, see header comment
  double residual = 0;      // bracket reconstruction residual at p, relative

  const CJet& p(int a, int g, int b) const { return P[(a * n + g) * n + b]; }
  const CJet& q(int a, int g, int b) const { return Q[(a * n + g) * n + b]; }
  const CJet& s(int a, int g) const { return S[a * n + g]; }
  const CJet& torsion(int g, int a) const { return A[g * n + a]; }
  // theta_a^g on frame vector c of (T, Z, Zbar)
  const CJet& complex_coeff(int a, int g, int c) const;
  const CJet& gamma(int A_, int B, int c) const { return Gamma[((A_ - 1) * 2 * n + (B - 1)) * (2 * n + 1) + c]; }
};

// solve the commutator relations for the connection; `shuffle` permutes equation rows
ConnectionJets connection_jets(const FrameJets& F, unsigned shuffle = 0);

struct ConnectionData {
  int n = 1;
  std::vector<cplx> P, Q, S, A;  // values, layout as ConnectionJets
  std::vector<double> Gamma;
  double residual = 0;
  double condition = 1;

  cplx theta(int a, int g, int c) const;  // c indexes (T, Z_1.., Zbar_1..)
  double gamma(int A_, int B, int c) const { return Gamma[((A_ - 1) * 2 * n + (B - 1)) * (2 * n + 1) + c]; }
};

ConnectionData solve_connection(const CoframeModel& model, const Point& p, unsigned shuffle = 0);

struct CurvatureData {
  int n = 1;
  std::vector<cplx> riem;  // R_a^b_{r sbar} at [((a*n+b)*n + r)*n + s]
  Eigen::MatrixXcd ricci;  // R_{r sbar}
  double W = 0;
  double W_imag = 0;
  double R_real = 0;
  double scale = 0;  // max |component|, for relative tolerances
};

CurvatureData curvature(const CoframeModel& model, const Point& p);
double conformal_W_oracle(const ScalarField& u, const Point& p, int n);

// coordinate components of the torsion T(X, Y)
Vec torsion_tensor(const CoframeModel& model, FrameSlot X, FrameSlot Y, const Point& p);
// full identity when mod_T is false, horizontal part otherwise
double bianchi_residual(const CoframeModel& model, FrameSlot X, FrameSlot Y, FrameSlot Z, const Point& p,
                        bool mod_T = false);

// [E_c, E_d] = C(c,d,e) E_e on the real frame, at [(c*D + d)*D + e], one order below F
std::vector<CJet> frame_bracket_jets(const FrameJets& F);
// <R(E_c, E_d) e_a, e_b> at [((c*D + d)*2n + a-1)*2n + b-1], c, d in 0..2n, a, b in 1..2n
std::vector<double> real_curvature(const CoframeModel& model, const Point& p);

// horizontal Levi-Civita type route (Koszul formula on the real frame); independent of solve_connection
std::vector<double> real_connection(const CoframeModel& model, const Point& p);

// consistency diagnostics
double duality_residual(const CoframeModel& model, const Point& p);
double levi_residual(const CoframeModel& model, const Point& p);
// max |d theta^b - theta^a ^ theta_a^b - theta ^ tau^b| over frame pairs, relative
double structure_residual(const CoframeModel& model, const Point& p);
// max |(L_T J)(X) - predicted| over X in {Z_a, Zbar_a}
double lie_derivative_residual(const CoframeModel& model, const Point& p);

// named models used by checks
std::vector<CoframeModel> model_catalog(int n);
ScalarField mass_factor(int n, double A);  // 1 + A rho^(-2n)
ScalarField bump_factor(int n);            // smooth positive, non-pluriharmonic

}  // namespace crlab
