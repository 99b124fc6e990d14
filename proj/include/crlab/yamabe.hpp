#pragma once

// Test functions built from the Heisenberg extremals u_beta, the level sets
// where they are cut off, and the energy scan that compares their quotient
// with the flat one when the contact form is h^(2/n) theta0.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "crlab/heisenberg.hpp"
#include "crlab/pseudohermitian.hpp"

namespace crlab {

struct LevelSetSpec {
  int n = 1;
  double beta = 1;
  double R = 4;

  LevelSetSpec() = default;
  LevelSetSpec(int n, double beta, double R = 4);  // throws DomainError unless beta, R > 0
  double epsilon() const { return R / (beta * beta); }
  // (1 + eps)^(2/n) - 1, the threshold for f_beta
  double threshold() const;
  // value of the test function off U_beta(inf): beta^-n (1 + eps)^-1
  double cap() const;
};

// (t/b^2)^2 + 2|z/b|^2 + |z/b|^4
double level_function(const LevelSetSpec& spec, const HeisPoint& p);
// p lies in U_beta(inf)
bool level_set_contains(const LevelSetSpec& spec, const HeisPoint& p);

// constants bracketing the threshold: beta^-2 R g1 <= threshold <= beta^-2 R g2
struct LevelGammas {
  double g1 = 0;
  double g2 = 0;
};
LevelGammas level_gammas(int n);

struct BinomialBounds {
  double lower = 0;
  double value = 0;
  double upper = 0;
  bool holds() const { return lower <= value && value <= upper; }
};
// throws DomainError when beta < sqrt(R)
BinomialBounds binomial_bounds(int n, double beta, double R);

// smallest rho^2 on U_beta(inf), reached at t = 0: beta^2 (sqrt(1 + threshold) - 1)
double inner_rho2(const LevelSetSpec& spec);

struct ContainmentReport {
  std::size_t points = 0;
  std::size_t inside = 0;           // points landing in U_beta(inf)
  std::size_t first_violations = 0;  // |z|^2 > R g2 / 2 but outside U
  std::size_t second_violations = 0;  // inside U but rho^2 < R g1 / 2
  std::size_t exact_violations = 0;  // inside U but rho^2 < inner_rho2
  double min_inside_rho2 = std::numeric_limits<double>::infinity();
};
// half of the points uniform in a box around the cut, half within 5% of it
ContainmentReport check_containment(const LevelSetSpec& spec, std::size_t count, std::uint64_t seed);

struct TestFunctionValue {
  double value = 0;
  std::vector<double> gradient;  // e_a phi, a = 1..2n
  bool inside = false;
};
TestFunctionValue test_function(const LevelSetSpec& spec, const HeisPoint& p);

// volume rule on the Heisenberg ball of the given radius (infinite: mapped
// rho = scale * w / (1 - w)); angular nodes from the sphere rule
struct VolumeRule {
  HeisSphere angular{1, 1.0, 32, 4, 1};
  int radial = 48;
  double radius = std::numeric_limits<double>::infinity();
  double scale = 1;
  int workers = 1;
};

// (int b_n |grad_b v|^2 + W v^2 dV) / (int v^(2+2/n) dV)^(n/(n+1))
double energy_quotient(const ScalarField& v, const CoframeModel& model, const VolumeRule& region = {});

// 32 pi / (b_n 4^n n^2 pi^n alpha_n), the flux normalization of rho^-2n
double green_constant_closed(int n);

// integrals of u_1 over the whole of H_n by the reduced (rho, sigma) rule
struct ExtremalIntegrals {
  int n = 1;
  double K_s = 0;     // int u^s dV
  double energy = 0;  // int b_n |grad_b u|^2 dV
  double Y = 0;       // energy / K_s^(2/s)
  double K = 0;       // K_s^(1/s)
  double lambda = 0;  // b_n sublap u / u^(s-1), constant
};
const ExtremalIntegrals& extremal_integrals(int n);

struct EnergyPoint {
  double beta = 0;
  double E = 0;
  double norm_s = 0;
  double bulk = 0;      // int (b_n sublap u) u h^2
  double crucial = 0;   // int u <grad u, grad h^2>
  double boundary = 0;  // flux through the inner level set
  double D = 0;         // Y ||phi||^2 - E
  double split_residual = 0;  // |E - (bulk - b_n crucial + boundary)| / E
};

struct PowerFit {
  double exponent = std::nan("");  // value ~ coeff * beta^-exponent
  double coeff = std::nan("");
};

struct EnergyReport {
  int n = 2;
  double A_p = 0;
  double R = 4;
  double a_n = 0;
  double kappa = 0;  // a_n A_p / (2 pi)
  ExtremalIntegrals extremal;
  std::vector<EnergyPoint> points;
  PowerFit deficit_fit;      // log-log fit of D
  double deficit_coeff = 0;  // c in beta^2n D = c + d / beta + e / beta^2
  PowerFit crucial_fit;
  PowerFit boundary_fit;
};

struct ScanQuadrature {
  int sigma = 48;   // per panel in sigma
  int radial = 40;  // per panel in rho
  int workers = 1;
};

// geometric, 8 sqrt(R) .. 128 sqrt(R)
std::vector<double> default_beta_grid(double R, int count = 5);
EnergyPoint energy_point(int n, double A_p, double beta, double R, const ScanQuadrature& q = {});
EnergyReport energy_scan(int n, double A_p, const std::vector<double>& betas, double R = 4,
                         const ScanQuadrature& q = {});
// least squares of log|v| against log beta; NaN when a value vanishes
PowerFit power_fit(const std::vector<double>& betas, const std::vector<double>& values);

nlohmann::json to_json(const EnergyReport& r);
// n,A_p,beta,E,norm_s,bulk,crucial,boundary,D,fit_exponent,fit_coeff
std::string to_csv(const EnergyReport& r, bool header = true);

}  // namespace crlab
