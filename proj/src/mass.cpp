#include "crlab/mass.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "crlab/heisenberg.hpp"

namespace crlab {

namespace {

constexpr double pi = std::numbers::pi;

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

AltForm one_form(int D, const std::vector<cplx>& comps) {
  AltForm f(D, 1);
  for (int k = 0; k < D; ++k) f[1u << k] = comps[k];
  return f;
}

AltForm flat_dtheta(int n) {
  AltForm d(2 * n + 1, 2);
  for (int k = 0; k < n; ++k) d[(1u << k) | (1u << (n + k))] = 4.0;
  return d;
}

// (d theta)^(n-1) wedged onto f; wedge_power is not asked for the 0th power
AltForm wedge_dtheta_power(const AltForm& f, const AltForm& dth, int k) {
  return k == 0 ? f : wedge(f, wedge_power(dth, k));
}

// sum_b (zbar_b wbar dz^b + z_b w dzbar^b) in coordinate components
std::vector<cplx> sphere_one_form(int n, std::span<const double> x) {
  double z2 = 0;
  for (int k = 0; k < n; ++k) z2 += x[k] * x[k] + x[n + k] * x[n + k];
  cplx w(x[2 * n], z2);
  std::vector<cplx> c(2 * n + 1, 0.0);
  for (int b = 0; b < n; ++b) {
    cplx z(x[b], x[n + b]);
    cplx hol = std::conj(z) * std::conj(w), anti = z * w;
    c[b] = hol + anti;                       // dx
    c[n + b] = cplx(0, 1) * (hol - anti);    // dy
  }
  return c;
}

double rho_of(int n, std::span<const double> x) {
  double z2 = 0;
  for (int k = 0; k < n; ++k) z2 += x[k] * x[k] + x[n + k] * x[n + k];
  return std::pow(z2 * z2 + x[2 * n] * x[2 * n], 0.25);
}

// Re<psi0, E_i E_k E_l E_m psi0> for the four-index sum, psi0 = 1
std::vector<double> quartic_signs() {
  const auto& E = generators(2);
  Eigen::VectorXcd psi = Spinor::basis(2, 0).c;
  std::vector<double> s(625, 0.0);
  for (int i = 1; i <= 4; ++i)
    for (int k = 1; k <= 4; ++k)
      for (int l = 1; l <= 4; ++l)
        for (int m = 1; m <= 4; ++m)
          s[((i * 5 + k) * 5 + l) * 5 + m] = psi.dot(E[i] * E[k] * E[l] * E[m] * psi).real();
  return s;
}

bool distinct(int i, int k, int l, int m) {
  return i != k && i != l && i != m && k != l && k != m && l != m;
}

struct NodeValues {
  cplx pmass, real_mass, pmt7;
  double residual = 0;
};

NodeValues node_values(const CoframeModel& model, const SurfaceNode& nd, const std::vector<double>& signs) {
  const int n = model.n(), D = model.dim();
  FrameJets F = frame_jets(model, nd.point, 1);
  ConnectionJets C = connection_jets(F);

  std::vector<cplx> th(D), tr(D, 0.0);
  for (int k = 0; k < D; ++k) th[k] = F.coframe[0][k].value();
  AltForm theta = one_form(D, th);
  AltForm dtheta(D, 2);
  for (int j = 0; j < D; ++j)
    for (int k = j + 1; k < D; ++k)
      dtheta[(1u << j) | (1u << k)] = F.coframe[0][k].d1(j) - F.coframe[0][j].d1(k);
  for (int g = 0; g < n; ++g)
    for (int c = 0; c < D; ++c) {
      cplx coef = C.complex_coeff(g, g, c).value();
      for (int k = 0; k < D; ++k) tr[k] += coef * F.coframe[c][k].value();
    }

  NodeValues out;
  out.residual = C.residual;
  AltForm base = wedge_dtheta_power(theta, dtheta, n - 1);
  out.pmass = cplx(0, n) * wedge(one_form(D, tr), base).evaluate(nd.tangents);

  AltForm dV = wedge(theta, wedge_power(dtheta, n)) * cplx(1.0 / (std::pow(2.0, n) * factorial(n)));
  std::vector<cplx> slot(2 * n + 1, 0.0);  // (e_i -| dV)(tangents)
  for (int i = 1; i <= 2 * n; ++i) slot[i] = dV.interior(values(F.real_frame[i])).evaluate(nd.tangents);
  auto G = [&](int a, int b, int c) { return C.gamma(a, b, c).value().real(); };
  for (int k = 1; k <= 2 * n; ++k) {
    double s = 0;
    for (int j = 1; j <= 2 * n; ++j) s += G(j, k, j);
    out.real_mass += s * slot[k];
  }
  if (n == 2) {
    for (int i = 1; i <= 4; ++i)
      for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l)
          for (int m = 1; m <= 4; ++m)
            if (distinct(i, k, l, m))
              out.pmt7 += 0.25 * G(l, m, k) * signs[((i * 5 + k) * 5 + l) * 5 + m] * slot[i];
  }
  return out;
}

}  // namespace

double alpha(int n) {
  if (n < 1) throw RankError("alpha needs n >= 1");
  if (n % 2 == 1) {
    double a = 2;
    for (int k = 1; k <= (n - 1) / 2; ++k) a *= 2.0 * k / (2.0 * k + 1);
    return a;
  }
  double a = pi / 2;
  for (int k = 2; k <= n / 2; ++k) a *= (2.0 * k - 1) / (2.0 * k);
  return a;
}

double alpha_quadrature(int n, int nodes) {
  if (n < 1) throw RankError("alpha needs n >= 1");
  GaussRule g = gauss_legendre(nodes, -pi / 2, pi / 2);
  CompensatedSum<double> s;
  for (int i = 0; i < nodes; ++i) s.add(g.weights[i] * std::pow(std::cos(g.nodes[i]), n));
  return s.value();
}

double omega(int n) {
  if (n < 1) throw RankError("omega needs n >= 1");
  return std::pow(pi, n) / factorial(n);
}

SphereIdentity unit_sphere_identity(int n, double radius, HeisSphere rule, int workers) {
  if (n < 1) throw RankError("sphere identity needs n >= 1");
  rule.n = n;
  rule.radius = radius;
  const AltForm dth = flat_dtheta(n);
  SphereIdentity out;
  out.n = n;
  out.radius = radius;
  out.quadrature = integrate_surface(
      rule,
      [&](const SurfaceNode& nd) {
        const auto& x = nd.point.x;
        AltForm f = wedge(one_form(2 * n + 1, sphere_one_form(n, x)), flat_contact_form(n, x));
        f = wedge_dtheta_power(f, dth, n - 1);
        return f.evaluate(nd.tangents) * std::pow(rho_of(n, x), -(2.0 * n + 4));
      },
      workers);
  out.closed_form = std::pow(4.0, n) * factorial(n) * alpha(n) * omega(n);
  out.gap = std::abs(out.quadrature - out.closed_form) / out.closed_form;
  if (!std::isfinite(out.gap)) throw QuadratureError("sphere identity quadrature did not converge");
  return out;
}

BoundarySums boundary_sums(const CoframeModel& model, double lambda, const MassQuadrature& q) {
  if (!(lambda > 0)) throw DomainError("sphere radius must be positive");
  HeisSphere spec = q.rule;
  spec.n = model.n();
  spec.radius = lambda;
  SurfaceRule rule(spec);
  static const std::vector<double> signs = quartic_signs();
  std::vector<NodeValues> vals(rule.size());
  parallel_for(rule.size(), q.workers, [&](std::size_t i) {
    SurfaceNode nd = rule.node(i);
    NodeValues v = node_values(model, nd, signs);
    v.pmass *= nd.weight;
    v.real_mass *= nd.weight;
    v.pmt7 *= nd.weight;
    vals[i] = v;
  });
  CompensatedSum<cplx> pm, rm, p7;
  BoundarySums out;
  out.lambda = lambda;
  for (const auto& v : vals) {
    pm.add(v.pmass);
    rm.add(v.real_mass);
    p7.add(v.pmt7);
    out.max_residual = std::max(out.max_residual, v.residual);
  }
  out.pmass = pm.value();
  out.real_mass = rm.value();
  out.pmt7 = p7.value();
  return out;
}

cplx pmass_quadrature(const CoframeModel& model, double lambda, const MassQuadrature& q) {
  return boundary_sums(model, lambda, q).pmass;
}

cplx real_mass_quadrature(const CoframeModel& model, double lambda, const MassQuadrature& q) {
  return boundary_sums(model, lambda, q).real_mass;
}

double pmt7_boundary_sum(const CoframeModel& model, double lambda, const MassQuadrature& q) {
  if (model.n() != 2) throw RankError("the four-index boundary sum is defined for n = 2");
  return boundary_sums(model, lambda, q).pmt7.real();
}

double pmass_closed_form(int n, double A, double c, double c_tilde) {
  return factorial(n) * std::pow(4.0, n) * n * n * (n * c_tilde + c) * alpha(n) * omega(n) * A;
}

double real_mass_closed_form(int n, double A, double c, double c_tilde) {
  return std::pow(2.0, n + 1.5) * n * n * (c_tilde + n * c) * alpha(n) * omega(n) * A;
}

double pmt7_closed_form(double A, double c2, double c_tilde2) {
  return 16 * (c2 - c_tilde2) * alpha(2) * omega(2) * A;
}

double wtf_constant(double A, double c2, double c_tilde2) {
  const double r2 = std::sqrt(2.0);
  return 16 * ((2 * r2 + 1) * c2 + (r2 - 1) * c_tilde2) * alpha(2) * omega(2) * A;
}

AsymptoticCoefficients measure_asymptotics(const CoframeModel& model, double A, std::vector<double> radii) {
  if (A == 0) throw std::invalid_argument("asymptotic coefficients need A != 0");
  if (radii.size() < 2) throw std::invalid_argument("need at least two radii");
  const int n = model.n(), D = model.dim();
  AsymptoticCoefficients out;
  out.radii = radii;
  std::vector<double> cs, cts;
  for (double R : radii) {
    SurfaceRule rule(HeisSphere{n, R, 5, 3, 3});
    CompensatedSum<double> sc, sct;
    std::vector<double> local;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      Point p = rule.node(i).point;
      auto x = seed(p.x, 1);
      auto rows = model.coframe(x);
      double scale = std::pow(R, 2 * n) / A;
      double c = (rows[0][2 * n].value().real() - 1) * scale;
      double ct = 0;
      for (int al = 1; al <= n; ++al) {
        auto ea = frame_components(n, al, x), eb = frame_components(n, n + al, x);
        cplx b = 0;
        for (int k = 0; k < D; ++k) b += rows[al][k].value() * 0.5 * (ea[k].value() - cplx(0, 1) * eb[k].value());
        ct += (b.real() - 1) * scale / n;
      }
      sc.add(c);
      sct.add(ct);
      local.push_back(c);
      local.push_back(ct);
    }
    double mc = sc.value() / rule.size(), mct = sct.value() / rule.size();
    cs.push_back(mc);
    cts.push_back(mct);
    if (R == radii.back()) {
      for (std::size_t k = 0; k < local.size(); ++k) {
        double ref = k % 2 ? mct : mc;
        out.spread = std::max(out.spread, std::abs(local[k] - ref) / std::max(std::abs(ref), 1e-300));
      }
    }
  }
  // least squares polynomial in 1/R, at most quadratic
  const int cols = std::min<int>(3, radii.size());
  auto fit = [&](const std::vector<double>& v) {
    Eigen::MatrixXd M(radii.size(), cols);
    Eigen::VectorXd y(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      for (int j = 0; j < cols; ++j) M(i, j) = std::pow(radii[i], -j);
      y(i) = v[i];
    }
    return M.colPivHouseholderQr().solve(y)(0);
  };
  out.c = fit(cs);
  out.c_tilde = fit(cts);
  return out;
}

double trace_leading_gap(const CoframeModel& model, double A, const AsymptoticCoefficients& k, const Point& p) {
  const int n = model.n(), D = model.dim();
  ConnectionData cd = solve_connection(model, p);
  auto x = seed(p.x, 1);
  auto rows = model.coframe(x);
  std::vector<cplx> tr(D, 0.0);
  for (int g = 0; g < n; ++g)
    for (int c = 0; c < D; ++c) {
      const std::vector<CJet>& row = c <= n ? rows[c] : rows[c - n];
      for (int j = 0; j < D; ++j) {
        cplx v = row[j].value();
        tr[j] += cd.theta(g, g, c) * (c <= n ? v : std::conj(v));
      }
    }
  double z2 = 0;
  for (int b = 0; b < n; ++b) z2 += p[b] * p[b] + p[n + b] * p[n + b];
  cplx w(p[2 * n], z2);
  double rho = rho_of(n, p.x);
  cplx K = cplx(0, -1) * (n * n * k.c_tilde + n * k.c) * A / std::pow(rho, 2 * n + 4);
  double worst = 0, size = 0;
  for (int b = 0; b < n; ++b) {
    // dz^b is dual to sqrt2 Z0_b, dzbar^b to sqrt2 Zbar0_b
    auto ea = frame_components(n, b + 1, x), eb = frame_components(n, n + b + 1, x);
    cplx hol = 0, anti = 0;
    for (int j = 0; j < D; ++j) {
      cplx zj = 0.5 * (ea[j].value() - cplx(0, 1) * eb[j].value());
      hol += std::sqrt(2.0) * tr[j] * zj;
      anti += std::sqrt(2.0) * tr[j] * std::conj(zj);
    }
    cplx z(p[b], p[n + b]);
    cplx lh = K * std::conj(z) * std::conj(w), la = K * z * w;
    worst = std::max({worst, std::abs(hol - lh), std::abs(anti - la)});
    size = std::max({size, std::abs(lh), std::abs(la)});
  }
  return worst / size;
}

Extrapolation richardson(const std::vector<double>& L, const std::vector<double>& m) {
  if (L.size() != m.size() || L.size() < 2) throw std::invalid_argument("richardson needs matching series of length >= 2");
  std::size_t k = L.size() - 1;
  Extrapolation out;
  out.value = (L[k] * m[k] - L[k - 1] * m[k - 1]) / (L[k] - L[k - 1]);
  out.exponent = std::nan("");
  if (L.size() >= 3) {
    double d1 = m[k - 2] - m[k - 1], d2 = m[k - 1] - m[k];
    double floor = 1e-11 * std::max(std::abs(m[k]), 1e-300);
    if (std::abs(d1) > floor && std::abs(d2) > floor && d1 * d2 > 0) {
      double target = d1 / d2;
      auto ratio = [&](double p) {
        return (std::pow(L[k - 2], -p) - std::pow(L[k - 1], -p)) / (std::pow(L[k - 1], -p) - std::pow(L[k], -p));
      };
      double lo = 1e-3, hi = 30;
      if ((ratio(lo) - target) * (ratio(hi) - target) <= 0) {
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          if ((ratio(lo) - target) * (ratio(mid) - target) <= 0) hi = mid;
          else lo = mid;
        }
        out.exponent = 0.5 * (lo + hi);
      }
    }
  }
  return out;
}

std::string to_string(MassKind k) {
  switch (k) {
    case MassKind::PMass: return "pmass";
    case MassKind::RealMass: return "real-mass";
    case MassKind::Pmt7: return "pmt7";
  }
  return "?";
}

MassSeries mass_series(const CoframeModel& model, double A, const std::vector<double>& lambdas,
                       const MassQuadrature& q) {
  MassSeries s;
  for (double L : lambdas) s.sums.push_back(boundary_sums(model, L, q));
  if (A != 0) s.coefficients = measure_asymptotics(model, A);
  return s;
}

MassReport mass_report(MassKind kind, const CoframeModel& model, double A, const MassSeries& series) {
  MassReport r;
  r.kind = kind;
  r.model = model.name();
  r.n = model.n();
  r.A = A;
  r.coefficients = series.coefficients;
  std::vector<double> re;
  for (const auto& s : series.sums) {
    cplx v = kind == MassKind::PMass ? s.pmass : kind == MassKind::RealMass ? s.real_mass : s.pmt7;
    r.lambdas.push_back(s.lambda);
    r.quadrature.push_back(v);
    re.push_back(v.real());
  }
  const auto& k = series.coefficients;
  switch (kind) {
    case MassKind::PMass: r.closed_form = pmass_closed_form(r.n, A, k.c, k.c_tilde); break;
    case MassKind::RealMass: r.closed_form = real_mass_closed_form(r.n, A, k.c, k.c_tilde); break;
    case MassKind::Pmt7:
      if (r.n != 2) throw RankError("the four-index boundary sum is defined for n = 2");
      r.closed_form = pmt7_closed_form(A, k.c, k.c_tilde);
      break;
  }
  if (re.size() >= 2) {
    Extrapolation e = richardson(r.lambdas, re);
    r.extrapolated = e.value;
    r.exponent = e.exponent;
  } else if (!re.empty()) {
    r.extrapolated = re.back();
    r.exponent = std::nan("");
  }
  double diff = std::abs(r.extrapolated - r.closed_form);
  r.gap = r.closed_form != 0 ? diff / std::abs(r.closed_form) : diff;
  return r;
}

nlohmann::json to_json(const MassReport& r) {
  nlohmann::json q = nlohmann::json::array();
  for (cplx v : r.quadrature) q.push_back({{"re", v.real()}, {"im", v.imag()}});
  return {{"n", r.n},
          {"A", r.A},
          {"lambdas", r.lambdas},
          {"quadrature", q},
          {"extrapolated", r.extrapolated},
          {"closed_form", r.closed_form},
          {"gap", r.gap}};
}

std::string to_csv(const MassReport& r, bool header) {
  std::ostringstream os;
  if (header) os << "n,Lambda,m_quad_re,m_quad_im,m_closed,rel_gap\n";
  char buf[256];
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
    double diff = std::abs(r.quadrature[i].real() - r.closed_form);
    double gap = r.closed_form != 0 ? diff / std::abs(r.closed_form) : diff;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.lambdas[i], r.quadrature[i].real(),
                  r.quadrature[i].imag(), r.closed_form, gap);
    os << buf;
  }
  return os.str();
}

}  // namespace crlab
