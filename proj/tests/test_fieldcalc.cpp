#include <cmath>
#include <numbers>
#include <random>

#include "crlab/fieldcalc.hpp"
#include "crlab/quadrature.hpp"
#include "doctest.h"

using namespace crlab;
using std::numbers::pi;

namespace {

// x^2 y + 3 sin(x) on R^2
FieldExpr poly2() {
  return FieldExpr("poly2", Arity::Scalar, 2, 1, [](std::span<const RJet> x) {
    return std::vector<CJet>{to_complex(x[0] * x[0] * x[1] + 3.0 * sin(x[0]))};
  });
}

FieldExpr mixed5() {
  return FieldExpr("mixed5", Arity::Scalar, 5, 1, [](std::span<const RJet> x) {
    RJet r2 = x[0] * x[0] + x[2] * x[2] + 0.5 * x[4] * x[4];
    CJet v = to_complex(exp(-0.3 * r2) * pow(1.0 + x[1] * x[1], 1.5) + log(2.0 + x[3] * x[3]));
    return std::vector<CJet>{v + cplx(0, 1) * to_complex(cos(x[2] * x[4]))};
  });
}

}  // namespace

TEST_CASE("jet of a polynomial matches hand derivatives") {
  Point p{{1.0, 2.0}};
  Jet j = jet_eval(poly2(), p, 2);
  CHECK(j.value[0].real() == doctest::Approx(2.0 + 3 * std::sin(1.0)));
  CHECK(j.d1[0][0].real() == doctest::Approx(4.0 + 3 * std::cos(1.0)));
  CHECK(j.d1[0][1].real() == doctest::Approx(1.0));
  CHECK(j.d2[0](0, 0).real() == doctest::Approx(4.0 - 3 * std::sin(1.0)));
  CHECK(j.d2[0](0, 1).real() == doctest::Approx(2.0));
  CHECK(j.d2[0](1, 1).real() == doctest::Approx(0.0));
}

TEST_CASE("elementary functions against closed-form derivatives") {
  double a = 0.37;
  RJet x = RJet::variable(1, 4, a, 0);
  auto check = [](const RJet& f, std::array<double, 4> d) {
    // c_k = f^(k)/k!
    double fact[] = {1, 1, 2, 6, 24};
    for (int k = 0; k < 4; ++k) CHECK(f.coeff(k) * fact[k] == doctest::Approx(d[k]).epsilon(1e-12));
  };
  check(exp(x), {std::exp(a), std::exp(a), std::exp(a), std::exp(a)});
  check(log(x), {std::log(a), 1 / a, -1 / (a * a), 2 / (a * a * a)});
  check(sin(x), {std::sin(a), std::cos(a), -std::sin(a), -std::cos(a)});
  check(cos(x), {std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)});
  check(pow(x, 2.5), {std::pow(a, 2.5), 2.5 * std::pow(a, 1.5), 3.75 * std::pow(a, 0.5), 1.875 * std::pow(a, -0.5)});
  check(reciprocal(x), {1 / a, -1 / (a * a), 2 / std::pow(a, 3), -6 / std::pow(a, 4)});
  double s = 1 - a * a;
  check(asin(x), {std::asin(a), 1 / std::sqrt(s), a / std::pow(s, 1.5), (1 + 2 * a * a) / std::pow(s, 2.5)});
}

TEST_CASE("d2 is symmetric and truncation is a prefix") {
  Point p{{0.3, -0.7, 1.1, 0.2, -0.4}};
  Jet j = jet_eval(mixed5(), p, 2);
  CHECK((j.d2[0] - j.d2[0].transpose()).norm() == doctest::Approx(0.0));
  auto full = mixed5().at(p.x, 3);
  auto low = mixed5().at(p.x, 1);
  for (int i = 0; i < low[0].size(); ++i) CHECK(std::abs(full[0].truncated(1).coeff(i) - low[0].coeff(i)) < 1e-14);
}

TEST_CASE("finite differences converge at second order to the exact jet") {
  Point p{{0.3, -0.7, 1.1, 0.2, -0.4}};
  Jet exact = jet_eval(mixed5(), p, 2);
  auto err = [&](double h) {
    Jet fd = fd_jet(mixed5(), p, 2, h);
    return std::pair{(fd.d1[0] - exact.d1[0]).norm(), (fd.d2[0] - exact.d2[0]).norm()};
  };
  auto [e1a, e2a] = err(2e-3);
  auto [e1b, e2b] = err(1e-3);
  double o1 = std::log2(e1a / e1b), o2 = std::log2(e2a / e2b);
  CHECK(o1 > 1.8);
  CHECK(o1 < 2.2);
  CHECK(o2 > 1.8);
  CHECK(o2 < 2.2);
  auto [e1, e2] = err(1e-5);
  CHECK(e1 < 1e-8);
  CHECK(e2 < 1e-4);
}

TEST_CASE("public jet order is capped and domains are enforced") {
  Point p{{1.0, 2.0}};
  CHECK_THROWS(jet_eval(poly2(), p, 3));
  FieldExpr inv("inv", Arity::Scalar, 2, 1,
                [](std::span<const RJet> x) { return std::vector<CJet>{to_complex(reciprocal(x[0]))}; },
                [](std::span<const double> q) { return q[0] != 0.0; });
  CHECK_THROWS_AS(inv.at(std::vector<double>{0.0, 1.0}, 1), DomainError);
  CHECK_NOTHROW(inv.at(std::vector<double>{0.5, 1.0}, 1));
}

TEST_CASE("lie bracket of d/dx and x d/dy is d/dy") {
  FieldExpr X("dx", Arity::Vector, 2, 2, [](std::span<const RJet> x) {
    return std::vector<CJet>{to_complex(x[0].constant_like(1.0)), to_complex(x[0].constant_like(0.0))};
  });
  FieldExpr Y("xdy", Arity::Vector, 2, 2, [](std::span<const RJet> x) {
    return std::vector<CJet>{to_complex(x[0].constant_like(0.0)), to_complex(x[0])};
  });
  Vec b = lie_bracket(X, Y, Point{{0.4, -2.0}});
  CHECK(std::abs(b[0]) < 1e-15);
  CHECK(std::abs(b[1] - 1.0) < 1e-15);
}

TEST_CASE("wedge follows the determinant convention and is antisymmetric") {
  AltForm dx = AltForm::covector(Vec::Unit(3, 0));
  AltForm dy = AltForm::covector(Vec::Unit(3, 1));
  AltForm w = wedge(dx, dy);
  std::vector<Vec> vw{Vec::Unit(3, 0), Vec::Unit(3, 1)};
  std::vector<Vec> wv{Vec::Unit(3, 1), Vec::Unit(3, 0)};
  CHECK(w.evaluate(vw) == cplx(1.0));
  CHECK(w.evaluate(wv) == cplx(-1.0));
  CHECK(wedge(dy, dx).evaluate(vw) == cplx(-1.0));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  auto rv = [&] {
    Vec v(5);
    for (auto& c : v) c = cplx(g(rng), g(rng));
    return v;
  };
  AltForm a = wedge(AltForm::covector(rv()), AltForm::covector(rv()));
  AltForm b = AltForm::covector(rv());
  std::vector<Vec> vs{rv(), rv(), rv()};
  cplx ab = wedge(a, b).evaluate(vs);
  std::swap(vs[0], vs[2]);
  CHECK(std::abs(wedge(a, b).evaluate(vs) + ab) < 1e-12);
  // graded commutativity for a 2-form and a 1-form
  std::swap(vs[0], vs[2]);
  CHECK(std::abs(wedge(b, a).evaluate(vs) - ab) < 1e-12);
}

TEST_CASE("d of d vanishes on a seeded one-form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> coef(15);
  for (auto& c : coef) c = u(rng);
  FieldExpr w = covector_field("w", 5, [coef](std::span<const RJet> x) {
    std::vector<CJet> out;
    RJet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    for (int i = 0; i < 5; ++i) {
      RJet p = coef[3 * i] * x[i] * x[(i + 1) % 5] + coef[3 * i + 1] * x[(i + 2) % 5] * x[(i + 2) % 5] * x[i];
      out.push_back(to_complex(p * exp(-coef[3 * i + 2] * r2)));
    }
    return out;
  });
  FieldExpr ddw = exterior_derivative(exterior_derivative(w));
  auto comps = ddw.at(std::vector<double>{0.2, -0.5, 0.9, 0.3, -1.2}, 2);
  double m = 0, scale = 0;
  for (auto& c : comps) m = std::max(m, std::abs(c.value()));
  for (auto& c : exterior_derivative(w).at(std::vector<double>{0.2, -0.5, 0.9, 0.3, -1.2}, 1))
    scale = std::max(scale, std::abs(c.value()));
  CHECK(scale > 0.1);
  CHECK(m < 1e-12);
}

TEST_CASE("d theta0 on (Z_a, Zbar_b) is i delta by both formulas") {
  const int n = 2, d = 5;
  FieldExpr theta = covector_field("theta0", d, [](std::span<const RJet> x) {
    std::vector<CJet> c(d, to_complex(x[0].constant_like(0.0)));
    c[4] = to_complex(x[0].constant_like(1.0));
    for (int k = 0; k < n; ++k) {
      c[k] = to_complex(-2.0 * x[n + k]);
      c[n + k] = to_complex(2.0 * x[k]);
    }
    return c;
  });
  // Z_a = (d_z + i zbar d_t)/sqrt2, d_z = (d_x - i d_y)/2
  auto Z = [&](int a, bool bar) {
    return FieldExpr("Z", Arity::Vector, d, d, [=](std::span<const RJet> x) {
      double s = bar ? -1.0 : 1.0;
      std::vector<CJet> v(d, to_complex(x[0].constant_like(0.0)));
      v[a] = to_complex(x[0].constant_like(0.5 / std::sqrt(2.0)));
      v[n + a] = to_complex(x[0].constant_like(0.0)) + cplx(0, -0.5 * s / std::sqrt(2.0));
      // i zbar for Z, -i z for Zbar
      CJet zb = to_complex(x[a]) + cplx(0, -1) * x[n + a];
      CJet zz = to_complex(x[a]) + cplx(0, 1) * x[n + a];
      v[4] = bar ? cplx(0, -1) * zz / cplx(std::sqrt(2.0)) : cplx(0, 1) * zb / cplx(std::sqrt(2.0));
      return v;
    });
  };
  Point p{{0.3, -0.2, 0.7, 0.1, 0.5}};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::vector<FieldExpr> fields{Z(a, false), Z(b, true)};
      std::vector<Vec> vecs{values(fields[0].at(p.x, 0)), values(fields[1].at(p.x, 0))};
      cplx inv = exterior_derivative(theta, p, std::span<const FieldExpr>(fields));
      cplx con = exterior_derivative(theta, p, std::span<const Vec>(vecs));
      cplx want = a == b ? cplx(0, 1) : cplx(0);
      CHECK(std::abs(inv - want) < 1e-14);
      CHECK(std::abs(con - want) < 1e-14);
    }
  }
}

TEST_CASE("Gauss-Legendre rules") {
  auto r = gauss_legendre(6, -1, 1);
  double s = 0;
  for (int i = 0; i < 6; ++i) s += r.weights[i] * std::pow(r.nodes[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11).epsilon(1e-14));
  auto e = gauss_legendre(12, 0, 1);
  double ex = 0;
  for (int i = 0; i < 12; ++i) ex += e.weights[i] * std::exp(e.nodes[i]);
  CHECK(std::abs(ex - (std::exp(1.0) - 1)) < 1e-14);
  CHECK(gauss_legendre(1, 0, 2).weights[0] == doctest::Approx(2.0));
}

TEST_CASE("compensated summation keeps small terms") {
  CompensatedSum<double> s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("sphere rule orientation: Stokes for t (d theta0)^n gives the ball volume") {
  // ball volume: 4^n n! * Omega_n * Lambda^(2n+2) * int_{-1}^{1} (1-s^2)^(n/2) ds
  struct Case {
    int n;
    double lam, vol;
  };
  std::vector<Case> cases{{1, 1.3, 4 * pi * (pi / 2) * std::pow(1.3, 4)},
                          {2, 0.8, 32 * (pi * pi / 2) * (4.0 / 3) * std::pow(0.8, 6)}};
  for (auto c : cases) {
    HeisSphere spec{c.n, c.lam, 40, 8, 4};
    cplx v = integrate_surface(spec, [&](const SurfaceNode& nd) {
      AltForm dth(2 * c.n + 1, 2);
      for (int k = 0; k < c.n; ++k) dth[(1u << k) | (1u << (c.n + k))] = 4.0;
      AltForm f = wedge_power(dth, c.n) * cplx(nd.point.x[2 * c.n]);
      return f.evaluate(nd.tangents);
    });
    CHECK(v.real() == doctest::Approx(c.vol).epsilon(1e-10));
  }
}
