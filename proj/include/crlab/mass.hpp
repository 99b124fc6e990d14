#pragma once

// Boundary integrals over Heisenberg spheres S_L = {|z|^4 + t^2 = L^4}: the
// p-mass, its real-frame variant and the n = 2 four-index spinor sum, with
// the closed-form constants they are compared against.

#include <string>
#include <vector>

#include <json.hpp>

#include "crlab/clifford.hpp"
#include "crlab/pseudohermitian.hpp"
#include "crlab/quadrature.hpp"

namespace crlab {

// Wallis recursion from alpha_1 = 2, alpha_2 = pi/2
double alpha(int n);
// int_{-1}^{1} (1 - t^2)^((n-1)/2) dt by Gauss-Legendre after t = sin s
double alpha_quadrature(int n, int nodes = 64);
// volume of the unit ball of C^n
double omega(int n);

struct SphereIdentity {
  int n = 1;
  double radius = 1;
  cplx quadrature;
  double closed_form = 0;  // 2^(2n) n! alpha_n Omega_n
  double gap = 0;          // relative
};

// integral of rho^-(2n+4) sum_b (zbar_b wbar dz^b + z_b w dzbar^b) ^ theta0 ^ (d theta0)^(n-1), w = t + i|z|^2
SphereIdentity unit_sphere_identity(int n, double radius = 1.0, HeisSphere rule = {}, int workers = 1);

struct MassQuadrature {
  HeisSphere rule{1, 1.0, 24, 6, 4};  // n and radius are overwritten per call
  int workers = 1;
};

// the three boundary integrands share one connection solve per node
struct BoundarySums {
  double lambda = 0;
  cplx pmass;      // n i sum_g theta_g^g ^ theta ^ (d theta)^(n-1)
  cplx real_mass;  // sum_{j,k} omega_j^k(e_j) e_k -| dV
  cplx pmt7;       // n = 2 only, zero otherwise
  double max_residual = 0;
};

BoundarySums boundary_sums(const CoframeModel& model, double lambda, const MassQuadrature& q = {});
cplx pmass_quadrature(const CoframeModel& model, double lambda, const MassQuadrature& q = {});
cplx real_mass_quadrature(const CoframeModel& model, double lambda, const MassQuadrature& q = {});
// sum over pairwise distinct (i,k,l,m) of (1/4) omega_l^m(e_k) Re<psi0, E_i E_k E_l E_m psi0> e_i -| dV
double pmt7_boundary_sum(const CoframeModel& model, double lambda, const MassQuadrature& q = {});

double pmass_closed_form(int n, double A, double c, double c_tilde);
double real_mass_closed_form(int n, double A, double c, double c_tilde);
double pmt7_closed_form(double A, double c2, double c_tilde2);
// 16 [(2 sqrt2 + 1) c + (sqrt2 - 1) c~] alpha_2 Omega_2 A
double wtf_constant(double A, double c2, double c_tilde2);

// rho^(-2n) coefficients of theta / theta0 and theta^a / (sqrt2 dz^a), divided by A
struct AsymptoticCoefficients {
  double c = 0;
  double c_tilde = 0;
  double spread = 0;  // largest relative disagreement between sample directions
  std::vector<double> radii;
};
AsymptoticCoefficients measure_asymptotics(const CoframeModel& model, double A,
                                           std::vector<double> radii = {10, 20, 40});

// leading term of sum_g theta_g^g: -i (n^2 c~ + n c) A sum_b (zbar_b wbar dz^b + z_b w dzbar^b) / rho^(2n+4)
// returns max |solved - leading| / max |leading| over coordinate components
double trace_leading_gap(const CoframeModel& model, double A, const AsymptoticCoefficients& k, const Point& p);

// m(L) = m_inf + c L^-1, Richardson on the last two radii; exponent from the last three
struct Extrapolation {
  double value = 0;
  double exponent = 0;  // NaN when the differences are below roundoff
};
Extrapolation richardson(const std::vector<double>& lambdas, const std::vector<double>& values);

enum class MassKind { PMass, RealMass, Pmt7 };
std::string to_string(MassKind k);

struct MassReport {
  MassKind kind = MassKind::PMass;
  std::string model;
  int n = 1;
  double A = 0;
  std::vector<double> lambdas;
  std::vector<cplx> quadrature;
  double extrapolated = 0;
  double exponent = 0;
  double closed_form = 0;
  double gap = 0;
  AsymptoticCoefficients coefficients;
};

struct MassSeries {
  std::vector<BoundarySums> sums;
  AsymptoticCoefficients coefficients;
};
MassSeries mass_series(const CoframeModel& model, double A, const std::vector<double>& lambdas,
                       const MassQuadrature& q = {});
MassReport mass_report(MassKind kind, const CoframeModel& model, double A, const MassSeries& series);

nlohmann::json to_json(const MassReport& r);
// header n,Lambda,m_quad_re,m_quad_im,m_closed,rel_gap
std::string to_csv(const MassReport& r, bool header = true);

}  // namespace crlab
