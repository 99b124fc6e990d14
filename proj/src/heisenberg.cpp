#include "crlab/heisenberg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crlab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_same_rank(const HeisPoint& p, const HeisPoint& q) {
  if (p.n() != q.n()) throw std::invalid_argument("Heisenberg points of different rank");
}

}  // namespace

double HeisPoint::z2() const {
  double s = 0;
  for (const auto& v : z) s += std::norm(v);
  return s;
}

double HeisPoint::rho() const {
  double a = z2();
  return std::pow(a * a + t * t, 0.25);
}

Point HeisPoint::to_point() const {
  int n = this->n();
  Point p;
  p.x.resize(2 * n + 1);
  for (int k = 0; k < n; ++k) {
    p.x[k] = z[k].real();
    p.x[n + k] = z[k].imag();
  }
  p.x[2 * n] = t;
  return p;
}

HeisPoint HeisPoint::from_point(const Point& p) {
  int n = rank_of(p.dim());
  HeisPoint h;
  for (int k = 0; k < n; ++k) h.z.emplace_back(p.x[k], p.x[n + k]);
  h.t = p.x[2 * n];
  return h;
}

HeisPoint group_mul(const HeisPoint& p, const HeisPoint& q) {
  check_same_rank(p, q);
  HeisPoint r;
  r.t = p.t + q.t;
  for (int k = 0; k < p.n(); ++k) {
    r.z.push_back(p.z[k] + q.z[k]);
    r.t += 2 * (p.z[k].imag() * q.z[k].real() - p.z[k].real() * q.z[k].imag());
  }
  return r;
}

HeisPoint group_inverse(const HeisPoint& p) {
  HeisPoint r;
  for (const auto& v : p.z) r.z.push_back(-v);
  r.t = -p.t;
  return r;
}

HeisPoint dilation(double a, const HeisPoint& p) {
  if (!(a > 0)) throw std::invalid_argument("dilation factor must be positive");
  HeisPoint r;
  for (const auto& v : p.z) r.z.push_back(a * v);
  r.t = a * a * p.t;
  return r;
}

std::vector<CJet> frame_components(int n, int a, std::span<const RJet> x) {
  if (a < 0 || a > 2 * n) throw std::out_of_range("frame index out of range");
  RJet zero = x[0].constant_like(0.0);
  std::vector<CJet> v(2 * n + 1, to_complex(zero));
  if (a == 0) {
    v[2 * n] = to_complex(zero + 1.0);
  } else if (a <= n) {
    v[a - 1] = to_complex(zero + kInvSqrt2);
    v[2 * n] = to_complex(2 * kInvSqrt2 * x[n + a - 1]);
  } else {
    int b = a - n;
    v[n + b - 1] = to_complex(zero + kInvSqrt2);
    v[2 * n] = to_complex(-2 * kInvSqrt2 * x[b - 1]);
  }
  return v;
}

FieldExpr frame_vector(int n, int a) {
  if (n < 1 || a < 0 || a > 2 * n) throw std::out_of_range("frame index out of range");
  std::string name = a == 0 ? "T0" : "e0_" + std::to_string(a);
  return FieldExpr(name, Arity::Vector, 2 * n + 1, 2 * n + 1,
                   [n, a](std::span<const RJet> x) { return frame_components(n, a, x); });
}

FieldExpr complex_frame_vector(int n, int alpha, bool conj) {
  if (n < 1 || alpha < 1 || alpha > n) throw std::out_of_range("frame index out of range");
  cplx s = conj ? cplx(0, 0.5) : cplx(0, -0.5);
  return FieldExpr(conj ? "Zbar0" : "Z0", Arity::Vector, 2 * n + 1, 2 * n + 1, [=](std::span<const RJet> x) {
    auto e = frame_components(n, alpha, x);
    auto je = frame_components(n, n + alpha, x);
    for (int k = 0; k <= 2 * n; ++k) e[k] = e[k] * cplx(0.5) + je[k] * s;
    return e;
  });
}

RJet z2_jet(int n, std::span<const RJet> x) {
  RJet s = x[0] * x[0];
  for (int k = 1; k < 2 * n; ++k) s += x[k] * x[k];
  return s;
}

RJet rho4_jet(int n, std::span<const RJet> x) {
  RJet a = z2_jet(n, x);
  return a * a + x[2 * n] * x[2 * n];
}

ScalarField rho_power(int n, double power) {
  auto eval = [n, power](std::span<const RJet> x) { return pow(rho4_jet(n, x), power / 4); };
  Domain dom;
  if (power < 0)
    dom = [n](std::span<const double> p) {
      double s = 0;
      for (int k = 0; k <= 2 * n; ++k) s += p[k] * p[k];
      return s > 0;
    };
  return ScalarField("rho^" + std::to_string(power), 2 * n + 1, eval, dom);
}

ScalarField jl_extremal(const ExtremalParams& params) {
  if (!(params.beta > 0)) throw std::invalid_argument("extremal needs beta > 0");
  int n = params.n;
  double b = params.beta;
  // u = beta^n |omega + i beta^2|^(-n)
  auto eval = [n, b](std::span<const RJet> x) {
    RJet w = z2_jet(n, x) + b * b;
    RJet s2 = x[2 * n] * x[2 * n] + w * w;
    return std::pow(b, n) * pow(s2, -0.5 * n);
  };
  return ScalarField("u_beta", 2 * n + 1, eval);
}

RJet sublaplacian_jet(int n, const RJet& u, std::span<const RJet> x) {
  RJet acc;
  for (int a = 1; a <= 2 * n; ++a) {
    auto e = frame_components(n, a, x);
    std::vector<RJet> er;
    for (auto& c : e) er.push_back(real_jet(c));
    auto apply = [&](const RJet& f) {
      RJet s = f.derivative(0) * er[0];
      for (int k = 1; k <= 2 * n; ++k) s += f.derivative(k) * er[k];
      return s;
    };
    RJet term = apply(apply(u));
    if (acc.empty()) acc = term;
    else acc += term;
  }
  return acc * -0.5;
}

RJet horizontal_inner(int n, const RJet& f, const RJet& g, std::span<const RJet> x) {
  RJet acc;
  for (int a = 1; a <= 2 * n; ++a) {
    auto e = frame_components(n, a, x);
    RJet ef, eg;
    for (int k = 0; k <= 2 * n; ++k) {
      RJet ek = real_jet(e[k]);
      RJet df = f.derivative(k) * ek, dg = g.derivative(k) * ek;
      if (k == 0) ef = df, eg = dg;
      else ef += df, eg += dg;
    }
    if (acc.empty()) acc = ef * eg;
    else acc += ef * eg;
  }
  return acc * 0.5;
}

double sublaplacian_real(const ScalarField& u, const Point& p) {
  auto x = seed(p.x, 2);
  if (!u.contains(p.x)) throw DomainError(u.name() + ": point outside the field's domain");
  return sublaplacian_jet(rank_of(p.dim()), u(x), x).value();
}

double sublaplacian(const ScalarField& u, const Point& p) {
  int n = rank_of(p.dim());
  if (!u.contains(p.x)) throw DomainError(u.name() + ": point outside the field's domain");
  auto x = seed(p.x, 2);
  CJet uj = to_complex(u(x));
  cplx acc = 0;
  for (int al = 1; al <= n; ++al) {
    auto Z = complex_frame_vector(n, al, false)(x);
    auto Zb = complex_frame_vector(n, al, true)(x);
    acc += directional(Zb, directional(Z, uj)).value() + directional(Z, directional(Zb, uj)).value();
  }
  return -acc.real();
}

RatioStats yamabe_ratio(const ExtremalParams& params, std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("yamabe_ratio needs points");
  ScalarField u = jl_extremal(params);
  int n = params.n;
  std::vector<double> r;
  for (const auto& p : points) {
    auto x = seed(p.x, 2);
    RJet uj = u(x);
    double lap = sublaplacian_jet(n, uj, x).value();
    r.push_back(b_const(n) * lap / std::pow(uj.value(), 1 + 2.0 / n));
  }
  CompensatedSum<double> s;
  for (double v : r) s.add(v);
  RatioStats st;
  st.count = r.size();
  st.mean = s.value() / r.size();
  CompensatedSum<double> q;
  for (double v : r) q.add((v - st.mean) * (v - st.mean));
  st.stdev = std::sqrt(q.value() / r.size());
  return st;
}

GreenConstant green_constant(int n, std::span<const double> radii, const HeisSphere& rule, double tol, int workers) {
  if (radii.empty()) throw std::invalid_argument("green_constant needs radii");
  GreenConstant g;
  g.n = n;
  ScalarField f = rho_power(n, -2.0 * n);
  for (double lam : radii) {
    if (!(lam > 0)) throw std::invalid_argument("radius must be positive");
    HeisSphere spec = rule;
    spec.n = n;
    spec.radius = lam;
    // divergence theorem: int_B sublap f dV = -(1/2) flux of sum_a (e_a f) e_a
    cplx flux = integrate_surface(
        spec,
        [&](const SurfaceNode& nd) {
          auto x = seed(nd.point.x, 1);
          RJet fj = f(x);
          AltForm vol = flat_volume_form(n, nd.point.x);
          cplx s = 0;
          for (int a = 1; a <= 2 * n; ++a) {
            Vec e = values(frame_components(n, a, x));
            cplx ef = 0;
            for (int k = 0; k <= 2 * n; ++k) ef += e[k] * fj.d1(k);
            s += ef * vol.interior(e).evaluate(nd.tangents);
          }
          return -0.5 * s;
        },
        workers);
    g.radii.push_back(lam);
    g.flux.push_back(flux.real());
  }
  double ref = g.flux[0];
  for (double v : g.flux) g.spread = std::max(g.spread, std::abs(v / ref - 1));
  if (g.spread > tol) throw QuadratureError("Green flux varies across radii beyond tolerance");
  g.a_n = 32 * std::numbers::pi / (b_const(n) * ref);
  return g;
}

}  // namespace crlab
