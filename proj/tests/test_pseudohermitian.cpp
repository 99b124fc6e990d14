#include <cmath>
#include <random>

#include "crlab/heisenberg.hpp"
#include "crlab/pseudohermitian.hpp"
#include "doctest.h"

using namespace crlab;

namespace {

Point random_point(int n, std::mt19937_64& rng, double scale = 0.8) {
  std::normal_distribution<double> g;
  Point p;
  for (int k = 0; k <= 2 * n; ++k) p.x.push_back(scale * g(rng));
  return p;
}

Point at_radius(int n, std::mt19937_64& rng, double r) {
  HeisPoint h = HeisPoint::from_point(random_point(n, rng));
  return dilation(r / h.rho(), h).to_point();
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<FrameSlot> all_slots(int n) {
  std::vector<FrameSlot> s{FrameSlot::T()};
  for (int a = 1; a <= n; ++a) {
    s.push_back(FrameSlot::Z(a));
    s.push_back(FrameSlot::Zbar(a));
  }
  return s;
}

}  // namespace

TEST_CASE("flat coframe is theta0 and sqrt(2) dz") {
  auto x = seed(std::vector<double>{0.3, -0.7, 1.1, 0.2, 0.5}, 0);
  auto rows = CoframeModel::flat(2).coframe(x);
  CHECK(rows[0][0].value() == cplx(-2 * 1.1));
  CHECK(rows[0][2].value() == cplx(2 * 0.3));
  CHECK(rows[0][4].value() == cplx(1.0));
  CHECK(std::abs(rows[1][0].value() - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(rows[1][2].value() - cplx(0, std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(rows[2][1].value() - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("u = 1 reproduces the flat model") {
  ScalarField one("one", 5, [](std::span<const RJet> x) { return x[0].constant_like(1.0); });
  std::mt19937_64 rng(21);
  Point p = random_point(2, rng);
  FrameJets a = frame_jets(CoframeModel::flat(2), p, 2);
  FrameJets b = frame_jets(CoframeModel::conformal(2, one), p, 2);
  double worst = 0;
  for (int r = 0; r < 5; ++r)
    for (int k = 0; k < 5; ++k) worst = std::max(worst, max_abs(a.frame[r][k] - b.frame[r][k]));
  CHECK(worst < 1e-14);
}

TEST_CASE("duality and Levi equation across the catalog") {
  std::mt19937_64 rng(22);
  double dual = 0, levi = 0;
  for (int n = 1; n <= 3; ++n)
    for (const auto& m : model_catalog(n))
      for (int i = 0; i < 20; ++i) {
        Point p = random_point(n, rng);
        dual = std::max(dual, duality_residual(m, p));
        levi = std::max(levi, levi_residual(m, p));
      }
  CHECK(dual < 1e-10);
  CHECK(levi < 1e-10);
}

TEST_CASE("mass model on an annulus") {
  CoframeModel m = CoframeModel::conformal(2, mass_factor(2, 1.0));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> r(0.5, 10);
  double worst = 0;
  for (int i = 0; i < 50; ++i) worst = std::max(worst, levi_residual(m, at_radius(2, rng, r(rng))));
  CHECK(worst < 1e-9);
  CHECK_THROWS_AS(frame_jets(m, Point{{0, 0, 0, 0, 0}}, 1), DomainError);
}

TEST_CASE("non-positive factor is rejected") {
  ScalarField neg("neg", 3, [](std::span<const RJet> x) { return x[2] - 1.0; });
  CoframeModel m = CoframeModel::conformal(1, neg);
  CHECK_FALSE(m.contains(std::vector<double>{0, 0, 0}));
  CHECK_THROWS_AS(solve_connection(m, Point{{0, 0, 0}}), DomainError);
  CHECK_NOTHROW(solve_connection(m, Point{{0, 0, 2}}));
}

TEST_CASE("degenerate coframe raises a conditioning error") {
  // u^(2/n) spans ~18 orders of magnitude between theta and theta^alpha
  ScalarField huge("huge", 3, [](std::span<const RJet> x) { return x[0].constant_like(1e9); });
  CHECK_THROWS_AS(frame_jets(CoframeModel::conformal(1, huge), Point{{0.1, 0.2, 0.3}}, 1), ConditioningError);
}

TEST_CASE("flat connection vanishes") {
  std::mt19937_64 rng(24);
  for (int n = 1; n <= 3; ++n) {
    ConnectionData d = solve_connection(CoframeModel::flat(n), random_point(n, rng));
    double m = 0;
    for (auto v : d.P) m = std::max(m, std::abs(v));
    for (auto v : d.S) m = std::max(m, std::abs(v));
    for (auto v : d.A) m = std::max(m, std::abs(v));
    CHECK(m < 1e-14);
    CHECK(d.residual < 1e-14);
  }
}

TEST_CASE("connection invariants on conformal models") {
  std::mt19937_64 rng(25);
  double skew = 0, sym = 0, res = 0, uniq = 0, torsion_size = 0;
  for (int n = 1; n <= 3; ++n)
    for (const auto& m : model_catalog(n))
      for (int i = 0; i < 10; ++i) {
        Point p = random_point(n, rng);
        ConnectionData d = solve_connection(m, p);
        ConnectionData e = solve_connection(m, p, 1234 + i);
        res = std::max(res, d.residual);
        uniq = std::max({uniq, max_abs_diff(d.P, e.P), max_abs_diff(d.S, e.S), max_abs_diff(d.A, e.A)});
        for (int a = 0; a < n; ++a)
          for (int g = 0; g < n; ++g) {
            // theta_a^g + conj(theta_g^a) = 0 as forms on real vectors
            for (int c = 1; c <= 2 * n; ++c) {
              cplx on_e = c <= n ? d.theta(a, g, c) + d.theta(a, g, c + n)
                                 : cplx(0, 1) * (d.theta(a, g, c - n) - d.theta(a, g, c));
              cplx on_e_t = c <= n ? d.theta(g, a, c) + d.theta(g, a, c + n)
                                   : cplx(0, 1) * (d.theta(g, a, c - n) - d.theta(g, a, c));
              skew = std::max(skew, std::abs(on_e + std::conj(on_e_t)));
            }
            skew = std::max(skew, std::abs(d.theta(a, g, 0) + std::conj(d.theta(g, a, 0))));
            sym = std::max(sym, std::abs(d.A[a * n + g] - d.A[g * n + a]));
            torsion_size = std::max(torsion_size, std::abs(d.A[a * n + g]));
          }
      }
  CHECK(res < 1e-8);
  CHECK(skew < 1e-9);
  CHECK(sym < 1e-9);
  CHECK(uniq < 1e-10);
  CHECK(torsion_size > 1e-3);
}

TEST_CASE("structure equations are reconstructed at 100 points per model") {
  std::mt19937_64 rng(0xC0FFEE);
  for (int n = 1; n <= 2; ++n)
    for (const auto& m : model_catalog(n)) {
      double worst = 0;
      for (int i = 0; i < 100; ++i) worst = std::max(worst, structure_residual(m, random_point(n, rng)));
      CHECK_MESSAGE(worst < 1e-8, m.name());
    }
}

TEST_CASE("real connection: Koszul route matches the complex solve") {
  std::mt19937_64 rng(26);
  for (int n = 1; n <= 3; ++n)
    for (const auto& m : model_catalog(n))
      for (int i = 0; i < 5; ++i) {
        Point p = random_point(n, rng);
        ConnectionData d = solve_connection(m, p);
        std::vector<double> k = real_connection(m, p);
        double diff = 0, anti = 0, block = 0;
        int D = 2 * n + 1;
        for (std::size_t j = 0; j < k.size(); ++j) diff = std::max(diff, std::abs(k[j] - d.Gamma[j]));
        for (int A = 1; A <= 2 * n; ++A)
          for (int B = 1; B <= 2 * n; ++B)
            for (int c = 0; c < D; ++c) anti = std::max(anti, std::abs(d.gamma(A, B, c) + d.gamma(B, A, c)));
        for (int a = 1; a <= n; ++a)
          for (int b = 1; b <= n; ++b)
            for (int c = 0; c < D; ++c) {
              block = std::max(block, std::abs(d.gamma(a, n + b, c) + d.gamma(n + a, b, c)));
              block = std::max(block, std::abs(d.gamma(a, b, c) - d.gamma(n + a, n + b, c)));
            }
        CHECK(diff < 1e-10);
        CHECK(anti < 1e-10);
        CHECK(block < 1e-10);
        if (m.name() == "flat")
          for (double v : k) CHECK(std::abs(v) < 1e-14);
      }
}

TEST_CASE("torsion tensor") {
  Point p{{0.4, -0.3, 0.9}};
  Vec t = torsion_tensor(CoframeModel::flat(1), FrameSlot::e(1), FrameSlot::e(2), p);
  CHECK(std::abs(t[0]) < 1e-15);
  CHECK(std::abs(t[1]) < 1e-15);
  CHECK(std::abs(t[2] - 2.0) < 1e-15);
  CHECK(torsion_tensor(CoframeModel::flat(1), FrameSlot::Z(1), FrameSlot::T(), p).norm() < 1e-15);

  std::mt19937_64 rng(27);
  for (int n = 1; n <= 2; ++n) {
    CoframeModel m = CoframeModel::conformal(n, bump_factor(n));
    Point q = random_point(n, rng);
    FrameJets F = frame_jets(m, q, 1);
    ConnectionData d = solve_connection(m, q);
    Vec T = values(F.frame[0]);
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b) {
        CHECK(torsion_tensor(m, FrameSlot::Z(a), FrameSlot::Z(b), q).norm() < 1e-9);
        Vec want = a == b ? Vec(cplx(0, 1) * T) : Vec(Vec::Zero(2 * n + 1));
        CHECK((torsion_tensor(m, FrameSlot::Z(a), FrameSlot::Zbar(b), q) - want).norm() < 1e-9);
      }
    for (int a = 1; a <= n; ++a) {
      Vec want = Vec::Zero(2 * n + 1);
      for (int b = 1; b <= n; ++b) want -= d.A[(b - 1) * n + a - 1] * values(F.frame[n + b]);
      CHECK((torsion_tensor(m, FrameSlot::Z(a), FrameSlot::T(), q) - want).norm() < 1e-9);
    }
    // real version: T(e_b, e_{n+b}) = 2T
    for (int b = 1; b <= n; ++b)
      CHECK((torsion_tensor(m, FrameSlot::e(b), FrameSlot::e(n + b), q) - 2.0 * T).norm() < 1e-9);
  }
}

TEST_CASE("curvature: flat, hermitian Ricci, oracle and real scalar curvature") {
  CurvatureData flat = curvature(CoframeModel::flat(2), Point{{0.1, 0.2, 0.3, 0.4, 0.5}});
  CHECK(flat.scale == 0.0);
  CHECK(flat.W == 0.0);

  std::mt19937_64 rng(28);
  for (int n = 1; n <= 3; ++n)
    for (const auto& m : model_catalog(n)) {
      if (!m.factor()) continue;
      for (int i = 0; i < 10; ++i) {
        Point p = random_point(n, rng, 0.6);
        CurvatureData c = curvature(m, p);
        double oracle = conformal_W_oracle(*m.factor(), p, n);
        double scale = std::max(std::abs(oracle), c.scale);
        CHECK(std::abs(c.W - oracle) <= 1e-6 * scale + 1e-12);
        CHECK(std::abs(c.W - c.R_real / 4) <= 1e-8 * std::max(std::abs(c.W), c.scale) + 1e-12);
        CHECK(std::abs(c.W_imag) <= 1e-9 * std::max(1.0, c.scale));
        CHECK((c.ricci - c.ricci.adjoint()).norm() < 1e-9 * std::max(1.0, c.scale));
      }
    }
  // standard sphere: W = 2n(n+1) for beta = 1
  for (int n = 1; n <= 3; ++n) {
    Point p = random_point(n, rng);
    CHECK(curvature(model_catalog(n)[2], p).W == doctest::Approx(2.0 * n * (n + 1)).epsilon(1e-9));
  }
}

TEST_CASE("W oracle on harmonic factors") {
  for (int n = 1; n <= 3; ++n) {
    ScalarField one("one", 2 * n + 1, [](std::span<const RJet> x) { return x[0].constant_like(1.0); });
    std::mt19937_64 rng(30 + n);
    CHECK(conformal_W_oracle(one, random_point(n, rng), n) == 0.0);
    for (double rho : {5.0, 10.0, 20.0}) {
      Point q = at_radius(n, rng, rho);
      // tolerance: roundoff on the size of a single second derivative term
      double u = std::pow(rho, -2.0 * n);
      double term = std::pow(rho, -2.0 * n - 2) / std::pow(u, 1 + 2.0 / n);
      CHECK(std::abs(conformal_W_oracle(rho_power(n, -2.0 * n), q, n)) < 1e-9 * term);
      // 1 + rho^(-2n) is harmonic as well, so W vanishes instead of decaying like rho^(-2n-2)
      CHECK(std::abs(conformal_W_oracle(mass_factor(n, 1.0), q, n)) < 1e-8 * std::pow(rho, -2.0 * n - 2));
    }
  }
  ScalarField neg("neg", 3, [](std::span<const RJet> x) { return x[0].constant_like(-1.0); });
  CHECK_THROWS_AS(conformal_W_oracle(neg, Point{{0, 0, 0}}, 1), DomainError);
}

TEST_CASE("Bianchi identities") {
  std::mt19937_64 rng(31);
  for (int n = 1; n <= 2; ++n)
    for (const auto& m : model_catalog(n)) {
      auto slots = all_slots(n);
      double full = 0, horiz = 0;
      Point p = random_point(n, rng);
      for (const auto& X : slots)
        for (const auto& Y : slots)
          for (const auto& Z : slots) full = std::max(full, bianchi_residual(m, X, Y, Z, p));
      for (int a = 1; a <= 2 * n; ++a)
        for (int b = 1; b <= 2 * n; ++b)
          for (int c = 1; c <= 2 * n; ++c)
            horiz = std::max(horiz, bianchi_residual(m, FrameSlot::e(a), FrameSlot::e(b), FrameSlot::e(c), p, true));
      CHECK_MESSAGE(full < 1e-6, m.name());
      CHECK_MESSAGE(horiz < 1e-6, m.name());
      if (m.name() == "flat") CHECK(full < 1e-15);
    }
}

TEST_CASE("Lie derivative of J along T") {
  std::mt19937_64 rng(32);
  for (int n = 1; n <= 3; ++n) {
    CHECK(lie_derivative_residual(CoframeModel::flat(n), random_point(n, rng)) == 0.0);
    CoframeModel bump = CoframeModel::conformal(n, bump_factor(n));
    for (int i = 0; i < 10; ++i) CHECK(lie_derivative_residual(bump, random_point(n, rng)) < 1e-8);
  }
}

TEST_CASE("frame slots") {
  Vec z = FrameSlot::Z(1).coeffs(2);
  CHECK(z[1] == cplx(0.5));
  CHECK(z[3] == cplx(0, -0.5));
  CHECK(FrameSlot::Zbar(2).label() == "Zbar2");
  CHECK_THROWS(FrameSlot::e(5).coeffs(2));
  CHECK_THROWS(FrameSlot::Z(0).coeffs(2));
}
