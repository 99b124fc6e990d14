#pragma once

// Spinor fields in the frame trivialization of a coframe model, the spin
// connection omega_sigma(X) = (1/4) sum_{a,b} omega_a^b(X) E_a E_b, the
// contact Dirac operator D = sum_a E_a nabla_{e_a} and the Weitzenbock terms.

#include <cstdint>
#include <optional>

#include "crlab/clifford.hpp"
#include "crlab/pseudohermitian.hpp"

namespace crlab {

class SpinorField {
 public:
  using Eval = std::function<std::vector<CJet>(std::span<const RJet>)>;

  SpinorField(std::string name, int n, Eval eval, Domain domain = {});

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int size() const { return 1 << n_; }
  bool contains(std::span<const double> p) const { return !domain_ || domain_(p); }
  std::vector<CJet> operator()(std::span<const RJet> x) const { return eval_(x); }
  FieldExpr as_field() const;

 private:
  std::string name_;
  int n_;
  Eval eval_;
  Domain domain_;
};

SpinorField constant_spinor(const Spinor& s);
// f times a constant spinor
SpinorField scalar_spinor(const ScalarField& f, const Spinor& s);
// random polynomials of degree <= 3 times exp(-rho^4 / sigma) per component
SpinorField seeded_spinor_field(int n, std::uint64_t seed, std::optional<Parity> parity = {}, double sigma = 4.0);

class SpinConnection {
 public:
  explicit SpinConnection(CoframeModel model) : model_(std::move(model)) {}
  const CoframeModel& model() const { return model_; }
  int n() const { return model_.n(); }
  // omega_sigma(X) at p
  Eigen::MatrixXcd action(FrameSlot X, const Point& p) const;

 private:
  CoframeModel model_;
};

Spinor spin_covariant_derivative(const SpinConnection& conn, FrameSlot X, const SpinorField& psi, const Point& p);
Spinor dirac(const SpinConnection& conn, const SpinorField& psi, const Point& p);

struct WeitzenbockTerms {
  Spinor dirac_squared;   // D^2 psi
  Spinor rough;           // nabla^* nabla psi
  Spinor scalar;          // W psi
  Spinor reeb;            // -2 sum_b E_b E_{n+b} nabla_T psi
  double field_scale = 0; // largest jet coefficient of psi
  double residual = 0;    // |D^2 - rough - scalar - reeb| / field_scale
  double reduced = 0;     // |D^2 - rough| / field_scale
};

// W defaults to the Tanaka-Webster curvature of the model at p
WeitzenbockTerms weitzenbock(const SpinConnection& conn, const SpinorField& psi, const Point& p,
                             std::optional<double> W = {});
double weitzenbock_residual(const SpinConnection& conn, const SpinorField& psi, const Point& p);

// |nabla_X(e_b psi) - (nabla_X e_b) psi - e_b nabla_X psi|
double leibniz_residual(const SpinConnection& conn, FrameSlot X, int b, const SpinorField& psi, const Point& p);

// spin curvature R^sigma(E_c, E_d) from the connection matrices, c, d in 0..2n
Eigen::MatrixXcd spin_curvature(const SpinConnection& conn, int c, int d, const Point& p);
// max over c, d of |R^sigma(E_c, E_d) - (1/4) sum <R(E_c, E_d) e_a, e_b> E_a E_b|
double curvature_representation_residual(const SpinConnection& conn, const Point& p);
// (1/2) sum_{a,b} E_a E_b R^sigma(e_a, e_b)
Eigen::MatrixXcd weitzenbock_curvature_term(const SpinConnection& conn, const Point& p);

// L_i = nabla_i + E_i D and (1/2) sum_j [E_i, E_j] nabla_j
struct BoundaryOperator {
  int i = 1;
  Spinor via_dirac;
  Spinor via_commutator;
};
BoundaryOperator witten_boundary_operator(const SpinConnection& conn, int i, const SpinorField& psi,
                                          const Point& p);

}  // namespace crlab
