#include "crlab/yamabe.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <optional>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "crlab/mass.hpp"

namespace crlab {

namespace {

constexpr double pi = std::numbers::pi;

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// dV = C_n rho^(2n+1) cos^(n-1)(sigma) d rho d sigma for U(n)-invariant integrands,
// with |z|^2 = rho^2 cos sigma, t = rho^2 sin sigma
double reduced_constant(int n) { return 2 * std::pow(4.0, n) * n * std::pow(pi, n); }

// squared inner radius of the core in the direction sigma: rho^4 + 2 rho^2 c = delta
double core_q(double c, double delta) { return delta / (c + std::sqrt(c * c + delta)); }

struct Sample {
  double s, t, P2, rho;
};

Sample at(double rho, double c, double sn) {
  Sample x;
  x.rho = rho;
  x.s = rho * rho * c;
  x.t = rho * rho * sn;
  x.P2 = rho * rho * rho * rho + 2 * rho * rho * c + 1;
  return x;
}

// one radial line: integrand evaluated on rho nodes with their weights
template <class F>
void radial_panels(double lo, double hi, bool log_map, int nodes, const GaussRule& g01, F&& f) {
  if (!(hi > lo)) return;
  if (!log_map) {
    for (int i = 0; i < nodes; ++i) f(lo + (hi - lo) * g01.nodes[i], (hi - lo) * g01.weights[i]);
    return;
  }
  double span = std::log(hi / lo);
  int panels = std::max(1, static_cast<int>(std::ceil(span / 1.5)));
  double h = span / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < nodes; ++i) {
      double rho = lo * std::exp(h * (p + g01.nodes[i]));
      f(rho, rho * h * g01.weights[i]);
    }
}

// rho = m / w on (m, inf)
template <class F>
void tail_panel(double m, int nodes, const GaussRule& g01, F&& f) {
  for (int i = 0; i < nodes; ++i) {
    double w = g01.nodes[i];
    f(m / w, m / (w * w) * g01.weights[i]);
  }
}

std::vector<std::pair<double, double>> sigma_nodes(double delta, int per_panel) {
  // the core radius changes shape where cos sigma ~ sqrt(delta)
  std::vector<double> cuts{0.0};
  double r = std::sqrt(std::max(delta, 0.0));
  for (double m : {30.0, 3.0})
    if (r > 0 && m * r < pi / 2 && pi / 2 - m * r > cuts.back()) cuts.push_back(pi / 2 - m * r);
  cuts.push_back(pi / 2);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    GaussRule g = gauss_legendre(per_panel, cuts[k], cuts[k + 1]);
    for (int i = 0; i < per_panel; ++i) out.emplace_back(g.nodes[i], g.weights[i]);
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= x.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  double b = sxy / sxx;
  if (intercept) *intercept = my - b * mx;
  return b;
}

ExtremalIntegrals compute_extremal(int n) {
  const double s = b_const(n), bn = b_const(n), Cn = reduced_constant(n);
  GaussRule g01 = gauss_legendre(48, 0, 1);
  CompensatedSum<double> ks, en;
  for (auto [sig, ws] : sigma_nodes(0, 64)) {
    double c = std::cos(sig), sn = std::sin(sig);
    double wang = 2 * Cn * ws * std::pow(c, n - 1);
    auto add = [&](double rho, double w) {
      Sample x = at(rho, c, sn);
      double jac = wang * w * std::pow(rho, 2 * n + 1);
      ks.add(jac * std::pow(x.P2, -(n + 1.0)));
      en.add(jac * bn * n * n * x.s * std::pow(x.P2, -(n + 1.0)));
    };
    radial_panels(0, 1, false, 48, g01, add);
    radial_panels(1, 8, false, 48, g01, add);
    tail_panel(8, 48, g01, add);
  }
  ExtremalIntegrals e;
  e.n = n;
  e.K_s = ks.value();
  e.energy = en.value();
  e.Y = e.energy / std::pow(e.K_s, 2 / s);
  e.K = std::pow(e.K_s, 1 / s);
  std::vector<Point> pts;
  for (int k = 0; k < 4; ++k) {
    Point p;
    for (int j = 0; j <= 2 * n; ++j) p.x.push_back(0.25 * (k + 1) - 0.15 * j);
    pts.push_back(p);
  }
  e.lambda = yamabe_ratio(ExtremalParams{1.0, n}, pts).mean;
  return e;
}

}  // namespace

LevelSetSpec::LevelSetSpec(int n_, double beta_, double R_) : n(n_), beta(beta_), R(R_) {
  if (n < 1) throw RankError("level set needs n >= 1");
  if (!(beta > 0) || !(R > 0)) throw DomainError("level set needs beta > 0 and R > 0");
}

double LevelSetSpec::threshold() const {
  if (n == 2) return epsilon();
  return std::expm1(2.0 / n * std::log1p(epsilon()));
}

double LevelSetSpec::cap() const { return std::pow(beta, -n) / (1 + epsilon()); }

double level_function(const LevelSetSpec& spec, const HeisPoint& p) {
  double b2 = spec.beta * spec.beta;
  double t = p.t / b2, z2 = p.z2() / b2;
  return t * t + 2 * z2 + z2 * z2;
}

bool level_set_contains(const LevelSetSpec& spec, const HeisPoint& p) {
  return level_function(spec, p) > spec.threshold();
}

LevelGammas level_gammas(int n) {
  if (n < 1) throw RankError("level set needs n >= 1");
  if (n == 1) return {2, 3};
  if (n == 2) return {1, 1};
  return {(n + 2.0) / (n * n), 2.0 / n};
}

BinomialBounds binomial_bounds(int n, double beta, double R) {
  if (!(R > 0) || beta < std::sqrt(R)) throw DomainError("binomial bounds need beta >= sqrt(R)");
  LevelSetSpec spec(n, beta, R);
  LevelGammas g = level_gammas(n);
  double eps = spec.epsilon();
  BinomialBounds b;
  b.lower = eps * g.g1;
  b.upper = eps * g.g2;
  b.value = n == 1 ? 2 * eps + eps * eps : spec.threshold();
  return b;
}

double inner_rho2(const LevelSetSpec& spec) {
  return spec.beta * spec.beta * core_q(1.0, spec.threshold());
}

ContainmentReport check_containment(const LevelSetSpec& spec, std::size_t count, std::uint64_t seed) {
  const int n = spec.n;
  LevelGammas g = level_gammas(n);
  std::mt19937_64 rng(seed);
  const double b2 = spec.beta * spec.beta, delta = spec.threshold();
  const double zbox = std::sqrt(2 * spec.R), tbox = 2 * b2 * std::sqrt(delta);
  const double exact = inner_rho2(spec);
  ContainmentReport r;
  r.points = count;
  for (std::size_t i = 0; i < count; ++i) {
    HeisPoint p;
    p.z.resize(n);
    if (i % 2 == 0) {
      for (auto& z : p.z) z = {zbox * (2 * unit_draw(rng) - 1), zbox * (2 * unit_draw(rng) - 1)};
      p.t = tbox * (2 * unit_draw(rng) - 1);
    } else {
      double sig = pi * (unit_draw(rng) - 0.5);
      double rho2 = b2 * core_q(std::cos(sig), delta) * (1 + 0.1 * (unit_draw(rng) - 0.5));
      std::vector<double> dir(2 * n);
      double norm = 0;
      for (auto& d : dir) {
        // Box-Muller on the portable draws
        double u1 = unit_draw(rng), u2 = unit_draw(rng);
        d = std::sqrt(-2 * std::log(1 - u1)) * std::cos(2 * pi * u2);
        norm += d * d;
      }
      norm = std::sqrt(norm);
      double zr = std::sqrt(rho2 * std::cos(sig));
      for (int k = 0; k < n; ++k) p.z[k] = {zr * dir[k] / norm, zr * dir[n + k] / norm};
      p.t = rho2 * std::sin(sig);
    }
    double rho2 = p.rho() * p.rho();
    bool in = level_set_contains(spec, p);
    if (in) {
      ++r.inside;
      r.min_inside_rho2 = std::min(r.min_inside_rho2, rho2);
      if (rho2 < g.g1 * spec.R / 2) ++r.second_violations;
      if (rho2 < exact * (1 - 1e-12)) ++r.exact_violations;
    } else if (p.z2() > g.g2 * spec.R / 2) {
      ++r.first_violations;
    }
  }
  return r;
}

TestFunctionValue test_function(const LevelSetSpec& spec, const HeisPoint& p) {
  const int n = spec.n;
  if (p.n() != n) throw RankError("point rank does not match the level set");
  TestFunctionValue v;
  v.gradient.assign(2 * n, 0.0);
  v.inside = level_set_contains(spec, p);
  if (!v.inside) {
    v.value = spec.cap();
    return v;
  }
  Point pt = p.to_point();
  auto x = seed(pt.x, 1);
  RJet u = jl_extremal(ExtremalParams{spec.beta, n})(x);
  v.value = u.value();
  for (int a = 1; a <= 2 * n; ++a) {
    auto e = frame_components(n, a, x);
    double d = 0;
    for (int k = 0; k <= 2 * n; ++k) d += e[k].value().real() * u.d1(k);
    v.gradient[a - 1] = d;
  }
  return v;
}

double energy_quotient(const ScalarField& v, const CoframeModel& model, const VolumeRule& region) {
  const int n = model.n(), D = model.dim();
  if (v.dim() != D) throw RankError("field dimension does not match the model");
  const bool flat = !model.factor().has_value();
  const double s = b_const(n);
  GaussRule g = std::isinf(region.radius) ? gauss_legendre(region.radial, 0, 1)
                                           : gauss_legendre(region.radial, 0, region.radius);
  CompensatedSum<double> num, den;
  for (int i = 0; i < region.radial; ++i) {
    double rho, wr;
    if (std::isinf(region.radius)) {
      double w = g.nodes[i];
      rho = region.scale * w / (1 - w);
      wr = region.scale / ((1 - w) * (1 - w)) * g.weights[i];
    } else {
      rho = g.nodes[i];
      wr = g.weights[i];
    }
    HeisSphere spec = region.angular;
    spec.n = n;
    spec.radius = rho;
    SurfaceRule rule(spec);
    std::vector<std::pair<double, double>> parts(rule.size());
    parallel_for(rule.size(), region.workers, [&](std::size_t k) {
      SurfaceNode nd = rule.node(k);
      const auto& px = nd.point.x;
      Vec radial(D);
      for (int c = 0; c < 2 * n; ++c) radial[c] = px[c] / rho;
      radial[2 * n] = 2 * px[2 * n] / rho;
      std::vector<Vec> slots{radial};
      slots.insert(slots.end(), nd.tangents.begin(), nd.tangents.end());
      auto x = seed(px, 1);
      RJet vj = v(x);
      double grad2 = 0, vol, W = 0;
      if (flat) {
        vol = flat_volume_form(n, px).evaluate(slots).real();
        for (int a = 1; a <= 2 * n; ++a) {
          auto e = frame_components(n, a, x);
          double d = 0;
          for (int c = 0; c < D; ++c) d += e[c].value().real() * vj.d1(c);
          grad2 += 0.5 * d * d;
        }
      } else {
        FrameJets F = frame_jets(model, nd.point, 1);
        AltForm th(D, 1), dth(D, 2);
        for (int c = 0; c < D; ++c) th[1u << c] = F.coframe[0][c].value();
        for (int j = 0; j < D; ++j)
          for (int c = j + 1; c < D; ++c) dth[(1u << j) | (1u << c)] = F.coframe[0][c].d1(j) - F.coframe[0][j].d1(c);
        vol = wedge(th, wedge_power(dth, n)).evaluate(slots).real();
        for (int a = 1; a <= 2 * n; ++a) {
          cplx d = 0;
          for (int c = 0; c < D; ++c) d += F.real_frame[a][c].value() * vj.d1(c);
          grad2 += 0.5 * std::norm(d);
        }
        W = curvature(model, nd.point).W;
      }
      double w = wr * nd.weight * vol;
      double val = vj.value();
      parts[k] = {w * (s * grad2 + W * val * val), w * std::pow(val, s)};
    });
    for (auto [a, b] : parts) {
      num.add(a);
      den.add(b);
    }
  }
  if (!(den.value() > 0)) throw QuadratureError("vanishing denominator in the energy quotient");
  return num.value() / std::pow(den.value(), 2 / s);
}

double green_constant_closed(int n) {
  return 32 * pi / (b_const(n) * std::pow(4.0, n) * n * n * std::pow(pi, n) * alpha(n));
}

const ExtremalIntegrals& extremal_integrals(int n) {
  static std::mutex mu;
  static std::vector<std::optional<ExtremalIntegrals>> cache;
  if (n < 1) throw RankError("extremal integrals need n >= 1");
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() <= static_cast<std::size_t>(n)) cache.resize(n + 1);
  if (!cache[n]) cache[n] = compute_extremal(n);
  return *cache[n];
}

std::vector<double> default_beta_grid(double R, int count) {
  if (count < 2) throw std::invalid_argument("beta grid needs at least two points");
  std::vector<double> b;
  double lo = 8 * std::sqrt(R), ratio = std::pow(16.0, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) b.push_back(lo * std::pow(ratio, i));
  return b;
}

EnergyPoint energy_point(int n, double A_p, double beta, double R, const ScanQuadrature& q) {
  LevelSetSpec spec(n, beta, R);
  const ExtremalIntegrals& ex = extremal_integrals(n);
  const double s = b_const(n), bn = b_const(n), Cn = reduced_constant(n), lam = ex.lambda;
  const double delta = spec.threshold(), eps = spec.epsilon();
  // everything below is in coordinates dilated by 1/beta, where phi_beta becomes u_1
  const double k = green_constant_closed(n) * A_p / (2 * pi) * std::pow(beta, -2.0 * n);
  GaussRule g01 = gauss_legendre(q.radial, 0, 1);
  auto sig = sigma_nodes(delta, q.sigma);

  struct Acc {
    double core_s = 0, core_E = 0, core_V = 0, IN = 0, IE = 0, Ih2 = 0, cru = 0, bdry = 0;
  };
  std::vector<Acc> acc(sig.size());
  parallel_for(sig.size(), q.workers, [&](std::size_t j) {
    auto [sg, ws] = sig[j];
    double c = std::cos(sg), sn = std::sin(sg);
    double wang = 2 * Cn * ws * std::pow(c, n - 1);
    double qv = core_q(c, delta), rin = std::sqrt(qv);
    CompensatedSum<double> cs, ce, cv, in, ie, ih, cr;
    radial_panels(0, rin, false, q.radial, g01, [&](double rho, double w) {
      Sample x = at(rho, c, sn);
      double jac = wang * w * std::pow(rho, 2 * n + 1);
      double us = std::pow(x.P2, -(n + 1.0));
      cs.add(jac * us);
      ce.add(jac * bn * n * n * x.s * us);
      cv.add(jac);
    });
    auto outer = [&](double rho, double w) {
      Sample x = at(rho, c, sn);
      double jac = wang * w * std::pow(rho, 2 * n + 1);
      double us = std::pow(x.P2, -(n + 1.0));
      double kr = k * std::pow(rho, -2.0 * n);
      double hs1 = std::expm1(s * std::log1p(kr)), h21 = kr * (2 + kr);
      in.add(jac * us * hs1);
      ie.add(jac * bn * n * n * x.s * us * h21);
      ih.add(jac * us * h21);
      // u <grad u, grad rho^-2n> = n^2 |z|^2 P^-(2n+2) rho^-(2n+4) (rho^4 + |z|^2)
      double g = n * n * x.s * us * std::pow(rho, -(2.0 * n + 4)) * (std::pow(rho, 4) + x.s);
      cr.add(jac * 2 * (1 + kr) * k * g);
    };
    double mid = std::max(8.0, 4 * rin);
    radial_panels(rin, mid, true, q.radial, g01, outer);
    tail_panel(mid, q.radial, g01, outer);

    // flux of (b_n/2) u h^2 sum_a (e_a u) e_a through the core boundary, normal out of U
    double dq = (-1 + c / std::sqrt(c * c + delta)) * (-sn);
    double ss = qv * c, tt = qv * sn;
    double ds = dq * c - qv * sn, dt = dq * sn + qv * c;
    double P2 = tt * tt + (ss + 1) * (ss + 1);
    double u = std::pow(P2, -0.5 * n);
    double us_ = -n * std::pow(P2, -0.5 * n - 1) * (ss + 1), ut = -n * std::pow(P2, -0.5 * n - 1) * tt;
    double Vs = 2 * ss * us_, Vt = 2 * ss * ut;
    double rho = std::sqrt(qv);
    double h = 1 + k * std::pow(rho, -2.0 * n);
    double flux = std::pow(ss, n - 1) * (-Vs * dt + Vt * ds);
    Acc a;
    a.core_s = cs.value();
    a.core_E = ce.value();
    a.core_V = cv.value();
    a.IN = in.value();
    a.IE = ie.value();
    a.Ih2 = ih.value();
    a.cru = cr.value();
    a.bdry = 2 * ws * (bn / 2) * (Cn / 2) * u * h * h * flux;
    acc[j] = a;
  });
  CompensatedSum<double> core_s, core_E, core_V, IN, IE, Ih2, cru, bdry;
  for (const auto& a : acc) {
    core_s.add(a.core_s);
    core_E.add(a.core_E);
    core_V.add(a.core_V);
    IN.add(a.IN);
    IE.add(a.IE);
    Ih2.add(a.Ih2);
    cru.add(a.cru);
    bdry.add(a.bdry);
  }
  const double cap_s = std::pow(1 + eps, -s);
  EnergyPoint pt;
  pt.beta = beta;
  pt.E = ex.energy - core_E.value() + IE.value();
  double N = ex.K_s - core_s.value() + IN.value() + cap_s * core_V.value();
  pt.norm_s = std::pow(N, 1 / s);
  pt.bulk = lam * (ex.K_s - core_s.value() + Ih2.value());
  pt.crucial = cru.value();
  pt.boundary = bdry.value();
  // Y N^(2/s) - E without subtracting two O(1) numbers
  double rel = (IN.value() + cap_s * core_V.value() - core_s.value()) / ex.K_s;
  pt.D = ex.energy * std::expm1(2 / s * std::log1p(rel)) + core_E.value() - IE.value();
  pt.split_residual = std::abs(pt.E - (pt.bulk - bn * pt.crucial + pt.boundary)) / pt.E;
  if (!std::isfinite(pt.D) || !std::isfinite(pt.E)) throw QuadratureError("energy quadrature did not converge");
  return pt;
}

PowerFit power_fit(const std::vector<double>& betas, const std::vector<double>& values) {
  if (betas.size() != values.size() || betas.size() < 2) throw std::invalid_argument("power fit needs matching series");
  PowerFit f;
  double sign = values[0] > 0 ? 1 : -1;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(values[i] * sign > 0)) return f;
    lx.push_back(std::log(betas[i]));
    ly.push_back(std::log(values[i] * sign));
  }
  double icpt;
  f.exponent = -fit_slope(lx, ly, &icpt);
  f.coeff = sign * std::exp(icpt);
  return f;
}

EnergyReport energy_scan(int n, double A_p, const std::vector<double>& betas, double R, const ScanQuadrature& q) {
  if (betas.size() < 5) throw std::invalid_argument("energy scan needs at least five betas");
  EnergyReport r;
  r.n = n;
  r.A_p = A_p;
  r.R = R;
  r.a_n = green_constant_closed(n);
  r.kappa = r.a_n * A_p / (2 * pi);
  r.extremal = extremal_integrals(n);
  for (double b : betas) r.points.push_back(energy_point(n, A_p, b, R, q));
  std::vector<double> D, cru, bd;
  for (const auto& p : r.points) {
    D.push_back(p.D);
    cru.push_back(p.crucial);
    bd.push_back(std::abs(p.boundary));
  }
  r.deficit_fit = power_fit(betas, D);
  r.crucial_fit = power_fit(betas, cru);
  r.boundary_fit = power_fit(betas, bd);
  // beta^2n D = c + d / beta + e / beta^2 in least squares; c is the leading coefficient
  const int cols = std::min<int>(3, betas.size() - 1);
  Eigen::MatrixXd M(betas.size(), cols);
  Eigen::VectorXd y(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = std::pow(betas.front() / betas[i], j);
    y(i) = std::pow(betas[i], 2 * n) * D[i];
  }
  r.deficit_coeff = M.colPivHouseholderQr().solve(y)(0);
  return r;
}

nlohmann::json to_json(const EnergyReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"beta", p.beta},
                   {"E", p.E},
                   {"norm_s", p.norm_s},
                   {"bulk", p.bulk},
                   {"crucial", p.crucial},
                   {"boundary", p.boundary},
                   {"D", p.D},
                   {"split_residual", p.split_residual}});
  auto fit = [](const PowerFit& f) {
    return nlohmann::json{{"exponent", std::isfinite(f.exponent) ? nlohmann::json(f.exponent) : nlohmann::json()},
                          {"coeff", std::isfinite(f.coeff) ? nlohmann::json(f.coeff) : nlohmann::json()}};
  };
  return {{"n", r.n},
          {"A_p", r.A_p},
          {"R", r.R},
          {"a_n", r.a_n},
          {"kappa", r.kappa},
          {"Y_num", r.extremal.Y},
          {"K_n", r.extremal.K},
          {"yamabe_constant_ratio", r.extremal.lambda},
          {"truncation", "none: rho > 8 mapped to w = 8 / rho"},
          {"points", pts},
          {"deficit_fit", fit(r.deficit_fit)},
          {"deficit_coeff", r.deficit_coeff},
          {"coeff_sign", r.deficit_coeff > 0 ? 1 : r.deficit_coeff < 0 ? -1 : 0},
          {"crucial_fit", fit(r.crucial_fit)},
          {"boundary_fit", fit(r.boundary_fit)}};
}

std::string to_csv(const EnergyReport& r, bool header) {
  std::ostringstream os;
  if (header) os << "n,A_p,beta,E,norm_s,bulk,crucial,boundary,D,fit_exponent,fit_coeff\n";
  char buf[512];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.A_p,
                  p.beta, p.E, p.norm_s, p.bulk, p.crucial, p.boundary, p.D, r.deficit_fit.exponent, r.deficit_coeff);
    os << buf;
  }
  return os.str();
}

}  // namespace crlab
