#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "crlab/heisenberg.hpp"
#include "crlab/quadrature.hpp"
#include "crlab/yamabe.hpp"
#include "doctest.h"

using namespace crlab;
using std::numbers::pi;

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

// dV = 4^n n! dLeb, and for functions of (|z|^2, t) dLeb = |S^(2n-1)| (1/2) s^(n-1) ds dt
double half_measure(int n) { return std::pow(4.0, n) * fact(n) * (2 * std::pow(pi, n) / fact(n - 1)) / 2; }

// int_R (t^2 + b^2)^-(n+1) dt = b^-(2n+1) sqrt(pi) Gamma(n + 1/2) / Gamma(n + 1)
double t_integral(int n) { return std::sqrt(pi) * std::tgamma(n + 0.5) / std::tgamma(n + 1.0); }
double beta_fn(double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); }

// int u_1^s dV and int b_n |grad u_1|^2 dV with |grad u|^2 = n^2 s P^-(2n+2)
double Ks_oracle(int n) { return half_measure(n) * t_integral(n) * beta_fn(n, n + 1); }
double energy_oracle(int n) { return b_const(n) * n * n * half_measure(n) * t_integral(n) * beta_fn(n + 1, n); }

// b_n sublap F for F(r, t) = (t^2 + (r^2 + 1)^2)^(-n/2) by centered differences of
// -(1/4)(F_rr + (2n - 1) F_r / r + 4 r^2 F_tt)
double lambda_oracle(int n, double r, double t) {
  auto F = [n](double rr, double tt) { return std::pow(tt * tt + (rr * rr + 1) * (rr * rr + 1), -0.5 * n); };
  double h = 1e-4;
  double Frr = (F(r + h, t) - 2 * F(r, t) + F(r - h, t)) / (h * h);
  double Fr = (F(r + h, t) - F(r - h, t)) / (2 * h);
  double Ftt = (F(r, t + h) - 2 * F(r, t) + F(r, t - h)) / (h * h);
  double lap = -0.25 * (Frr + (2 * n - 1) * Fr / r + 4 * r * r * Ftt);
  return b_const(n) * lap / std::pow(F(r, t), 1 + 2.0 / n);
}

struct Oracle {
  double E = 0, N = 0, bulk = 0, crucial = 0;
};

// the same integrals in coordinates (P, phi): t = P cos phi, |z|^2 + 1 = P sin phi,
// where u_1 = P^-n and the cut set is exactly P^2 > 1 + delta
Oracle scan_oracle(int n, double A, double beta, double R) {
  const double s = b_const(n), lam = 2.0 * n * (n + 1);
  const double eps = R / (beta * beta), delta = std::pow(1 + eps, 2.0 / n) - 1;
  const double alpha_n = std::sqrt(pi) * std::tgamma((n + 1) / 2.0) / std::tgamma(n / 2.0 + 1);
  const double a_n = 32 * pi / (b_const(n) * std::pow(4.0, n) * n * n * std::pow(pi, n) * alpha_n);
  const double k = a_n * A / (2 * pi) * std::pow(beta, -2.0 * n);
  const double P0 = std::sqrt(1 + delta);
  GaussRule g = gauss_legendre(60, 0, 1);
  long double E = 0, N = 0, bulk = 0, cru = 0, core = 0;
  auto line = [&](double P, double wP, bool inside) {
    double half = std::acos(1 / P);  // phi - pi/2 ranges over [-half, half]
    // phi = pi/2 + half sin(pi x / 2) clusters nodes near phi = pi/2, where rho is smallest
    for (int side : {-1, 1})
      for (int j = 0; j < 60; ++j) {
        double x = g.nodes[j];
        double phi = pi / 2 + side * half * std::sin(pi * x / 2);
        double w = wP * half * (pi / 2) * std::cos(pi * x / 2) * g.weights[j];
        double ss = P * std::sin(phi) - 1, t = P * std::cos(phi);
        if (ss <= 0) continue;
        double dv = half_measure(n) * std::pow(ss, n - 1) * P * w;
        if (!inside) {
          core += dv;
          continue;
        }
        double rho4 = ss * ss + t * t, r2n = std::pow(rho4, -0.5 * n);
        double h = 1 + k * r2n, us = std::pow(P, -2.0 * n - 2);
        E += dv * b_const(n) * n * n * ss * us * h * h;
        N += dv * us * std::pow(h, s);
        bulk += dv * lam * us * h * h;
        cru += dv * 2 * h * k * n * n * ss * us * std::pow(rho4, -0.5 * n - 1) * (rho4 + ss);
      }
  };
  // P - 1 log-graded from (P0 - 1) to 2, then P = 3 / w
  double lo = std::log(P0 - 1), hi = std::log(2.0);
  int panels = 12;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 60; ++i) {
      double e = lo + (hi - lo) * (p + g.nodes[i]) / panels;
      line(1 + std::exp(e), std::exp(e) * (hi - lo) / panels * g.weights[i], true);
    }
  for (int i = 0; i < 60; ++i) line(3 / g.nodes[i], 3 / (g.nodes[i] * g.nodes[i]) * g.weights[i], true);
  // core: 1 < P < P0
  for (int p = 0; p < 4; ++p)
    for (int i = 0; i < 60; ++i) {
      double a = std::log(P0 - 1) - 30, b = std::log(P0 - 1);
      double e = a + (b - a) * (p + g.nodes[i]) / 4;
      line(1 + std::exp(e), std::exp(e) * (b - a) / 4 * g.weights[i], false);
    }
  Oracle o;
  o.E = static_cast<double>(E);
  o.N = static_cast<double>(N + std::pow(1 + eps, -s) * core);
  o.bulk = static_cast<double>(bulk);
  o.crucial = static_cast<double>(cru);
  return o;
}

HeisPoint on_ray(int n, double scale, double t, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  HeisPoint p;
  double norm = 0;
  std::vector<double> v(2 * n);
  for (auto& x : v) {
    x = gauss(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (int k = 0; k < n; ++k) p.z.push_back({scale * v[k] / norm, scale * v[n + k] / norm});
  p.t = t;
  return p;
}

const EnergyReport& scan(double A) {
  static std::map<double, EnergyReport> cache;
  auto it = cache.find(A);
  if (it == cache.end()) it = cache.emplace(A, energy_scan(2, A, default_beta_grid(4))).first;
  return it->second;
}

}  // namespace

TEST_CASE("level set spec and thresholds") {
  LevelSetSpec s2(2, 20, 4);
  CHECK(s2.epsilon() == doctest::Approx(0.01));
  CHECK(s2.threshold() == s2.epsilon());
  LevelSetSpec s1(1, 20, 4);
  CHECK(s1.threshold() == doctest::Approx(2 * 0.01 + 0.01 * 0.01).epsilon(1e-14));
  LevelSetSpec s3(3, 7, 2);
  CHECK(s3.threshold() == doctest::Approx(std::cbrt(std::pow(1 + 2.0 / 49, 2)) - 1).epsilon(1e-13));
  CHECK(s3.cap() == doctest::Approx(std::pow(7.0, -3) / (1 + 2.0 / 49)).epsilon(1e-15));
  CHECK_THROWS_AS(LevelSetSpec(2, 0.0, 4), DomainError);
  CHECK_THROWS_AS(LevelSetSpec(2, 1.0, -1), DomainError);
  HeisPoint origin{{0, 0}, 0};
  CHECK_FALSE(level_set_contains(s2, origin));
  CHECK(level_function(s2, origin) == 0.0);
}

TEST_CASE("binomial bounds") {
  for (int n = 1; n <= 5; ++n)
    for (double R : {4.0, 1.0})
      for (double b : {10.0, 20.0, 40.0, 10 * std::sqrt(R), 40 * std::sqrt(R), std::sqrt(R)}) {
        BinomialBounds bb = binomial_bounds(n, b, R);
        double eps = R / (b * b);
        CHECK(bb.value == doctest::Approx(std::pow(1 + eps, 2.0 / n) - 1).epsilon(1e-12));
        CHECK_MESSAGE(bb.holds(), n);
      }
  BinomialBounds b2 = binomial_bounds(2, 16, 4);
  CHECK(b2.value == 4.0 / 256);
  CHECK(b2.lower == b2.value);
  BinomialBounds b1 = binomial_bounds(1, 16, 4);
  CHECK(b1.value == 2 * (4.0 / 256) + (4.0 / 256) * (4.0 / 256));
  CHECK_THROWS_AS(binomial_bounds(3, 1.9, 4), DomainError);
}

TEST_CASE("the cut is the level set of u_beta at the cap value") {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 3; ++n)
    for (double beta : {2.0, 20.0}) {
      LevelSetSpec spec(n, beta, 4);
      for (int k = 0; k < 20; ++k) {
        // bisection along a ray for f_beta = threshold
        double t = beta * beta * (2.0 * k / 19 - 1) * 0.9 * std::sqrt(spec.threshold());
        HeisPoint dir = on_ray(n, 1, t, rng);
        double lo = 0, hi = 10 * beta;
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          HeisPoint p = dir;
          for (auto& z : p.z) z *= mid;
          (level_function(spec, p) > spec.threshold() ? hi : lo) = mid;
        }
        HeisPoint in = dir, out = dir;
        for (auto& z : in.z) z *= hi;
        for (auto& z : out.z) z *= lo;
        TestFunctionValue a = test_function(spec, in), b = test_function(spec, out);
        CHECK(a.inside);
        CHECK_FALSE(b.inside);
        CHECK(std::abs(a.value - b.value) < 1e-12 * b.value);
        for (double g : b.gradient) CHECK(g == 0.0);
      }
    }
}

TEST_CASE("test function is u_beta inside with its horizontal gradient") {
  LevelSetSpec spec(2, 3, 4);
  ScalarField u = jl_extremal(ExtremalParams{3, 2});
  HeisPoint p{{{2.0, -1.0}, {0.5, 1.5}}, 30};
  REQUIRE(level_set_contains(spec, p));
  TestFunctionValue v = test_function(spec, p);
  Point q = p.to_point();
  CHECK(v.value == doctest::Approx(u(seed(q.x, 0)).value()).epsilon(1e-14));
  // e_b = (d_x + 2 y d_t)/sqrt2, e_(n+b) = (d_y - 2 x d_t)/sqrt2 by differences
  auto at = [&](std::vector<double> x) { return u(seed(x, 0)).value(); };
  double h = 1e-6;
  for (int a = 0; a < 4; ++a) {
    std::vector<double> dir(5, 0.0);
    int b = a % 2;
    if (a < 2) {
      dir[b] = 1;
      dir[4] = 2 * q[2 + b];
    } else {
      dir[2 + b] = 1;
      dir[4] = -2 * q[b];
    }
    std::vector<double> xp = q.x, xm = q.x;
    for (int c = 0; c < 5; ++c) {
      xp[c] += h * dir[c];
      xm[c] -= h * dir[c];
    }
    double fd = (at(xp) - at(xm)) / (2 * h) / std::sqrt(2.0);
    CHECK(v.gradient[a] == doctest::Approx(fd).epsilon(1e-6));
  }
  // positivity everywhere
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    HeisPoint r = on_ray(2, 10 * std::abs(std::normal_distribution<double>()(rng)), 30 * (k % 7 - 3.0), rng);
    CHECK(test_function(spec, r).value > 0);
  }
}

TEST_CASE("first containment and the exact inner radius hold on seeded points") {
  for (int n = 1; n <= 3; ++n)
    for (double m : {10.0, 20.0, 40.0}) {
      LevelSetSpec spec(n, m * 2, 4);
      ContainmentReport r = check_containment(spec, 10000, 0xC0FFEE + n);
      CHECK(r.points == 10000);
      CHECK(r.inside > 1000);
      CHECK(r.first_violations == 0);
      CHECK(r.exact_violations == 0);
      CHECK(r.min_inside_rho2 >= inner_rho2(spec));
      if (n != 2) CHECK(r.second_violations == 0);
    }
}

TEST_CASE("second containment at finite beta, n = 2") {
  // with g1 = 1 the cut meets t = 0 at rho^2 = beta^2 (sqrt(1 + eps) - 1) < R/2
  for (double beta : {20.0, 40.0, 80.0}) {
    LevelSetSpec spec(2, beta, 4);
    double r2 = inner_rho2(spec);
    CHECK(r2 < 2.0);
    CHECK(2.0 - r2 == doctest::Approx(4.0 * 4 / (8 * beta * beta)).epsilon(0.02));
    HeisPoint p{{std::sqrt(r2 * (1 + 1e-9)), 0.0}, 0.0};
    CHECK(level_set_contains(spec, p));
    CHECK(p.rho() * p.rho() < 2.0);
  }
  // the gap closes like beta^-2, so the violating shell shrinks
  ContainmentReport a = check_containment(LevelSetSpec(2, 20, 4), 10000, 1);
  ContainmentReport b = check_containment(LevelSetSpec(2, 80, 4), 10000, 1);
  CHECK(b.second_violations <= a.second_violations);
  CHECK(a.exact_violations + b.exact_violations == 0);
}

TEST_CASE("extremal integrals against closed forms") {
  for (int n = 1; n <= 3; ++n) {
    const ExtremalIntegrals& e = extremal_integrals(n);
    CHECK(e.K_s == doctest::Approx(Ks_oracle(n)).epsilon(1e-12));
    CHECK(e.energy == doctest::Approx(energy_oracle(n)).epsilon(1e-12));
    CHECK(e.lambda == doctest::Approx(lambda_oracle(n, 0.7, 0.4)).epsilon(1e-6));
    // integration by parts: energy = lambda K_s
    CHECK(e.energy == doctest::Approx(e.lambda * e.K_s).epsilon(1e-12));
    CHECK(e.Y == doctest::Approx(e.lambda * std::pow(e.K_s, 1 - 2 / b_const(n))).epsilon(1e-12));
    CHECK(e.K == doctest::Approx(std::pow(Ks_oracle(n), 1 / b_const(n))).epsilon(1e-12));
  }
}

TEST_CASE("Green constant closed form matches the flux") {
  CHECK(green_constant_closed(1) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> radii{1.0, 2.0};
  CHECK(green_constant_closed(2) == doctest::Approx(green_constant(2, radii, HeisSphere{2, 1, 24, 6, 2}).a_n).epsilon(1e-8));
  CHECK(green_constant_closed(2) == doctest::Approx(1 / (3 * pi * pi)).epsilon(1e-14));
}

TEST_CASE("energy quotient: dilation and scaling invariance") {
  for (int n = 1; n <= 2; ++n) {
    VolumeRule rule;
    rule.angular = HeisSphere{n, 1, 32, 6, 1};
    rule.radial = 64;
    double Y = extremal_integrals(n).Y;
    std::vector<double> q;
    for (double beta : {0.5, 1.0, 2.0}) q.push_back(energy_quotient(jl_extremal(ExtremalParams{beta, n}), CoframeModel::flat(n), rule));
    for (double v : q) CHECK_MESSAGE(std::abs(v / Y - 1) < 1e-4, n);
    ScalarField u = jl_extremal(ExtremalParams{1.0, n});
    ScalarField u3("3u", 2 * n + 1, [u](std::span<const RJet> x) { return 3.0 * u(x); });
    CHECK(std::abs(energy_quotient(u3, CoframeModel::flat(n), rule) / q[1] - 1) < 1e-10);
  }
  // on a ball of radius 50 the quotient is finite, positive and near the whole-space value
  VolumeRule ball;
  ball.angular = HeisSphere{1, 1, 32, 6, 1};
  ball.radius = 50;
  ball.radial = 200;
  double qb = energy_quotient(jl_extremal(ExtremalParams{1.0, 1}), CoframeModel::flat(1), ball);
  CHECK(qb > 0);
  CHECK(std::abs(qb / extremal_integrals(1).Y - 1) < 1e-2);
  // a non-extremal competitor sits above the flat value
  ScalarField g("gauss", 3, [](std::span<const RJet> x) { return exp(-0.5 * rho4_jet(1, x)); });
  VolumeRule r1;
  r1.angular = HeisSphere{1, 1, 32, 6, 1};
  r1.radial = 64;
  CHECK(energy_quotient(g, CoframeModel::flat(1), r1) > extremal_integrals(1).Y);
  ScalarField zero("0", 3, [](std::span<const RJet> x) { return 0.0 * x[0]; });
  CHECK_THROWS_AS(energy_quotient(zero, CoframeModel::flat(1), r1), QuadratureError);
}

TEST_CASE("energy quotient on a conformal model includes W") {
  // theta = u^(2/n) theta0 gives Q_theta(v) = Q_theta0(u v) for the conformal sublaplacian
  ScalarField u("1+0.3 exp", 3, [](std::span<const RJet> x) { return 1.0 + 0.3 * exp(-rho4_jet(1, x)); });
  ScalarField v("ext", 3, [](std::span<const RJet> x) { return 1.0 / sqrt(x[2] * x[2] + pow(z2_jet(1, x) + 1.0, 2)); });
  ScalarField uv("u/..", 3, [u, v](std::span<const RJet> x) { return v(x) * u(x); });
  // u - 1 is below roundoff past rho = 6, so the boundary terms drop out there
  VolumeRule r;
  r.angular = HeisSphere{1, 1, 48, 4, 1};
  r.radial = 80;
  r.radius = 6;
  double a = energy_quotient(v, CoframeModel::conformal(1, u), r);
  double b = energy_quotient(uv, CoframeModel::flat(1), r);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("energy scan against an independent parametrization") {
  for (double A : {0.0, 1.0})
    for (double beta : {16.0, 64.0}) {
      EnergyPoint p = energy_point(2, A, beta, 4);
      Oracle o = scan_oracle(2, A, beta, 4);
      CHECK(p.E == doctest::Approx(o.E).epsilon(1e-10));
      CHECK(std::pow(p.norm_s, b_const(2)) == doctest::Approx(o.N).epsilon(1e-10));
      CHECK(p.bulk == doctest::Approx(o.bulk).epsilon(1e-10));
      if (A != 0) CHECK(p.crucial == doctest::Approx(o.crucial).epsilon(1e-8));
      else CHECK(p.crucial == 0.0);
    }
  // n = 1 and n = 3 on one beta each
  for (int n : {1, 3}) {
    EnergyPoint p = energy_point(n, 1.0, 20, 4);
    Oracle o = scan_oracle(n, 1.0, 20, 4);
    CHECK(p.E == doctest::Approx(o.E).epsilon(1e-10));
    CHECK(p.crucial == doctest::Approx(o.crucial).epsilon(1e-8));
  }
}

TEST_CASE("divergence split closes") {
  for (int n = 1; n <= 3; ++n)
    for (double A : {0.0, 1.0, -0.5}) {
      EnergyPoint p = energy_point(n, A, 24, 4);
      CHECK(p.split_residual < 1e-12);
    }
}

TEST_CASE("energy scan, n = 2, A_p = 1") {
  const EnergyReport& r = scan(1.0);
  REQUIRE(r.points.size() == 5);
  CHECK(r.points.front().beta == doctest::Approx(16));
  CHECK(r.points.back().beta == doctest::Approx(256));
  double Y = r.extremal.Y;
  for (const auto& p : r.points) {
    CHECK(p.E > 0);
    CHECK(p.norm_s > 0);
    CHECK(p.D > 0);
    CHECK(p.crucial > 0);
    // Hoelder: the bulk term is below Y ||phi||^2
    CHECK(p.bulk < Y * p.norm_s * p.norm_s);
  }
  CHECK(std::abs(r.deficit_fit.exponent / 4 - 1) < 0.1);
  CHECK(r.deficit_coeff > 0);
  CHECK(std::abs(r.crucial_fit.exponent / 4 - 1) < 0.1);
  CHECK(r.boundary_fit.exponent >= 4.5);
  // to leading order the deficit is b_n times the crucial term
  CHECK(r.points.back().D / (b_const(2) * r.points.back().crucial) == doctest::Approx(1).epsilon(1e-3));
}

TEST_CASE("deficit is linear in A_p and flips sign with it") {
  double c1 = scan(1.0).deficit_coeff;
  CHECK(std::abs(scan(0.5).deficit_coeff / (0.5 * c1) - 1) < 0.1);
  CHECK(std::abs(scan(2.0).deficit_coeff / (2 * c1) - 1) < 0.1);
  const EnergyReport& neg = scan(-1.0);
  CHECK(neg.deficit_coeff < 0);
  for (const auto& p : neg.points) {
    CHECK(p.crucial < 0);
    CHECK(p.D < 0);
  }
}

TEST_CASE("A_p = 0: the Sobolev inequality makes the deficit slightly negative") {
  const EnergyReport& r = scan(0.0);
  const EnergyReport& one = scan(1.0);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    CHECK(r.points[i].D <= 0);
    CHECK(std::abs(r.points[i].D) < 0.5 * one.points[i].D);
  }
  CHECK(std::abs(r.deficit_coeff) < 0.02 * one.deficit_coeff);
  // decays faster than beta^-(2n+1)
  PowerFit f = power_fit(default_beta_grid(4), [&] {
    std::vector<double> v;
    for (const auto& p : r.points) v.push_back(-p.D);
    return v;
  }());
  CHECK(f.exponent > 5);
}

TEST_CASE("scan quadrature is converged and worker independent") {
  ScanQuadrature fine;
  fine.sigma = 96;
  fine.radial = 80;
  ScanQuadrature threads;
  threads.workers = 3;
  for (double beta : {16.0, 100.0}) {
    EnergyPoint a = energy_point(2, 1.0, beta, 4), b = energy_point(2, 1.0, beta, 4, fine);
    EnergyPoint c = energy_point(2, 1.0, beta, 4, threads);
    CHECK(a.D == doctest::Approx(b.D).epsilon(1e-9));
    CHECK(a.boundary == doctest::Approx(b.boundary).epsilon(1e-9));
    CHECK(a.D == c.D);
    CHECK(a.E == c.E);
  }
}

TEST_CASE("power fit and scan errors") {
  std::vector<double> b{1, 2, 4, 8};
  PowerFit f = power_fit(b, {3, 3.0 / 8, 3.0 / 64, 3.0 / 512});
  CHECK(f.exponent == doctest::Approx(3));
  CHECK(f.coeff == doctest::Approx(3));
  PowerFit g = power_fit(b, {-2, -1, -0.5, -0.25});
  CHECK(g.coeff == doctest::Approx(-2));
  CHECK(std::isnan(power_fit(b, {1, -1, 1, 1}).exponent));
  CHECK_THROWS(energy_scan(2, 1.0, {16, 32, 64, 128}));
  std::vector<double> grid = default_beta_grid(4);
  CHECK(grid.size() == 5);
  CHECK(grid[2] == doctest::Approx(64));
}

TEST_CASE("report serialization") {
  const EnergyReport& r = scan(1.0);
  std::string csv = to_csv(r);
  CHECK(csv.rfind("n,A_p,beta,E,norm_s,bulk,crucial,boundary,D,fit_exponent,fit_coeff\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.find('"') == std::string::npos);
  nlohmann::json j = to_json(r);
  CHECK(j["points"].size() == 5);
  CHECK(j["Y_num"].get<double>() == r.extremal.Y);
  CHECK(j["coeff_sign"].get<int>() == 1);
  CHECK(j["K_n"].get<double>() > 0);
}
