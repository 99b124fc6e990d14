#include "crlab/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace crlab {

GaussRule gauss_legendre(int count, double a, double b) {
  if (count < 1) throw QuadratureError("Gauss rule needs at least one node");
  GaussRule r;
  r.nodes.resize(count);
  r.weights.resize(count);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 1;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int k = 1; k <= count; ++k) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2 * k - 1) * x * p2 - (k - 1) * p3) / k;
      }
      dp = count * (x * p1 - p2) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2 / ((1 - x * x) * dp * dp);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    r.nodes[i] = mid - half * x;
    r.nodes[count - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[count - 1 - i] = half * w;
  }
  return r;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(workers, count);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += nt) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

AltForm flat_contact_form(int n, std::span<const double> p) {
  AltForm f(2 * n + 1, 1);
  f[1u << (2 * n)] = 1.0;
  for (int k = 0; k < n; ++k) {
    f[1u << (n + k)] += 2 * p[k];
    f[1u << k] += -2 * p[n + k];
  }
  return f;
}

AltForm flat_volume_form(int n, std::span<const double> p) {
  AltForm dtheta(2 * n + 1, 2);
  for (int k = 0; k < n; ++k) dtheta[(1u << k) | (1u << (n + k))] = 4.0;
  return wedge(flat_contact_form(n, p), wedge_power(dtheta, n));
}

SurfaceRule::SurfaceRule(const HeisSphere& spec) : spec_(spec) {
  if (spec.n < 1 || spec.radius <= 0 || spec.slices < 1 || spec.polar < 1 || spec.phases < 1)
    throw QuadratureError("invalid Heisenberg sphere rule");
  s_ = gauss_legendre(spec.slices, -std::numbers::pi / 2, std::numbers::pi / 2);
  eta_ = gauss_legendre(spec.polar, 0, std::numbers::pi / 2);
  count_ = spec.slices;
  for (int j = 0; j < spec.n - 1; ++j) count_ *= spec.polar;
  for (int j = 0; j < spec.n; ++j) count_ *= spec.phases;
}

SurfaceNode SurfaceRule::node(std::size_t i) const {
  const int n = spec_.n;
  const int m = 2 * n;  // parameters
  std::vector<double> par(m);
  double weight = 1;
  std::size_t rest = i;
  for (int k = n - 1; k >= 0; --k) {
    int j = static_cast<int>(rest % spec_.phases);
    rest /= spec_.phases;
    par[n + k] = 2 * std::numbers::pi * (j + 0.5) / spec_.phases;
    weight *= 2 * std::numbers::pi / spec_.phases;
  }
  for (int k = n - 2; k >= 0; --k) {
    int j = static_cast<int>(rest % spec_.polar);
    rest /= spec_.polar;
    par[1 + k] = eta_.nodes[j];
    weight *= eta_.weights[j];
  }
  par[0] = s_.nodes[rest];
  weight *= s_.weights[rest];

  auto q = seed(par, 1);
  double R = spec_.radius;
  RJet r = R * sqrt(cos(q[0]));
  RJet t = R * R * sin(q[0]);
  std::vector<RJet> coords(2 * n + 1, q[0].constant_like(0.0));
  RJet prod = q[0].constant_like(1.0);
  for (int k = 0; k < n; ++k) {
    RJet mod = k < n - 1 ? prod * cos(q[1 + k]) : prod;
    if (k < n - 1) prod = prod * sin(q[1 + k]);
    RJet ph = q[n + k];
    coords[k] = r * mod * cos(ph);
    coords[n + k] = r * mod * sin(ph);
  }
  coords[2 * n] = t;

  SurfaceNode node;
  node.point.x.resize(2 * n + 1);
  for (int c = 0; c <= 2 * n; ++c) node.point.x[c] = coords[c].value();
  for (int a = 0; a < m; ++a) {
    Vec v(2 * n + 1);
    for (int c = 0; c <= 2 * n; ++c) v[c] = coords[c].d1(a);
    node.tangents.push_back(v);
  }
  const auto& x = node.point.x;
  double z2 = 0;
  for (int k = 0; k < n; ++k) z2 += x[k] * x[k] + x[n + k] * x[n + k];
  Vec normal(2 * n + 1);
  for (int k = 0; k < n; ++k) {
    normal[k] = 4 * z2 * x[k];
    normal[n + k] = 4 * z2 * x[n + k];
  }
  normal[2 * n] = 2 * x[2 * n];
  std::vector<Vec> frame{normal};
  frame.insert(frame.end(), node.tangents.begin(), node.tangents.end());
  double orient = flat_volume_form(n, x).evaluate(frame).real();
  node.weight = orient >= 0 ? weight : -weight;
  return node;
}

cplx integrate_surface(const HeisSphere& spec, const std::function<cplx(const SurfaceNode&)>& f, int workers) {
  SurfaceRule rule(spec);
  return ordered_sum<cplx>(rule.size(), workers, [&](std::size_t i) {
    SurfaceNode nd = rule.node(i);
    return nd.weight * f(nd);
  });
}

cplx surface_integral(const FieldExpr& form, const HeisSphere& spec, int workers) {
  if (form.arity() != Arity::Form || form.degree() != 2 * spec.n)
    throw std::invalid_argument("surface integral needs a 2n-form");
  return integrate_surface(
      spec, [&](const SurfaceNode& nd) { return form_value(form, nd.point).evaluate(nd.tangents); }, workers);
}

}  // namespace crlab
