#pragma once

// The flat Heisenberg group H_n in coordinates (x_1..x_n, y_1..y_n, t).

#include <complex>
#include <span>
#include <vector>

#include "crlab/fieldcalc.hpp"
#include "crlab/quadrature.hpp"

namespace crlab {

struct HeisPoint {
  std::vector<cplx> z;
  double t = 0;

  int n() const { return static_cast<int>(z.size()); }
  double z2() const;
  double rho() const;
  cplx omega() const { return {t, z2()}; }
  Point to_point() const;
  static HeisPoint from_point(const Point& p);
};

struct ExtremalParams {
  double beta = 1;
  int n = 1;
};

inline int rank_of(int dim) { return (dim - 1) / 2; }
inline double b_const(int n) { return 2.0 + 2.0 / n; }

HeisPoint group_mul(const HeisPoint& p, const HeisPoint& q);
HeisPoint group_inverse(const HeisPoint& p);
HeisPoint dilation(double a, const HeisPoint& p);

// a in 1..2n for e_a, a = 0 for T
FieldExpr frame_vector(int n, int a);
// Z_alpha (conj = false) or Zbar_alpha, alpha in 1..n
FieldExpr complex_frame_vector(int n, int alpha, bool conj);
// the same fields as plain jet vectors at given coordinate jets
std::vector<CJet> frame_components(int n, int a, std::span<const RJet> x);

// coordinate jets helpers
RJet z2_jet(int n, std::span<const RJet> x);
RJet rho4_jet(int n, std::span<const RJet> x);

ScalarField rho_power(int n, double power);
ScalarField jl_extremal(const ExtremalParams& params);

// complex form -sum(Z Zbar + Zbar Z) u
double sublaplacian(const ScalarField& u, const Point& p);
// real form -(1/2) sum e_a e_a u
double sublaplacian_real(const ScalarField& u, const Point& p);
// real form on jets; result is two orders lower
RJet sublaplacian_jet(int n, const RJet& u, std::span<const RJet> x);
// (1/2) sum_a (e_a f)(e_a g), one order lower
RJet horizontal_inner(int n, const RJet& f, const RJet& g, std::span<const RJet> x);

struct RatioStats {
  double mean = 0;
  double stdev = 0;
  std::size_t count = 0;
};
RatioStats yamabe_ratio(const ExtremalParams& params, std::span<const Point> points);

struct GreenConstant {
  int n = 1;
  double a_n = 0;
  std::vector<double> radii;
  std::vector<double> flux;  // integral of the flat sublaplacian of rho^(-2n) over B_radius
  double spread = 0;         // max relative deviation across radii
};
GreenConstant green_constant(int n, std::span<const double> radii, const HeisSphere& rule = {}, double tol = 1e-6,
                             int workers = 1);

}  // namespace crlab
