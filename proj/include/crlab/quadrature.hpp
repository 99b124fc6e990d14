#pragma once

// Fixed-node product rules, compensated summation and the Heisenberg sphere
// parametrization used by every surface integral.

#include <complex>
#include <functional>
#include <thread>
#include <vector>

#include "crlab/fieldcalc.hpp"

namespace crlab {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int count, double a, double b);

// Neumaier summation
template <class T>
class CompensatedSum {
 public:
  void add(T v) {
    if constexpr (std::is_same_v<T, cplx>) {
      re_.add(v.real());
      im_.add(v.imag());
    } else {
      T t = sum_ + v;
      if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
      else comp_ += (v - t) + sum_;
      sum_ = t;
    }
  }
  T value() const {
    if constexpr (std::is_same_v<T, cplx>) return {re_.value(), im_.value()};
    else return sum_ + comp_;
  }

 private:
  struct Empty {};
  using Part = std::conditional_t<std::is_same_v<T, cplx>, CompensatedSum<double>, Empty>;
  T sum_{};
  T comp_{};
  [[no_unique_address]] Part re_{};
  [[no_unique_address]] Part im_{};
};

// body(i) for i in [0, count) on up to `workers` threads; caller owns ordering
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

// evaluate f on every index in parallel, then sum in index order
template <class T>
T ordered_sum(std::size_t count, int workers, const std::function<T(std::size_t)>& f) {
  std::vector<T> vals(count);
  parallel_for(count, workers, [&](std::size_t i) { vals[i] = f(i); });
  CompensatedSum<T> s;
  for (const auto& v : vals) s.add(v);
  return s.value();
}

// Heisenberg sphere {|z|^4 + t^2 = radius^4}: t = R^2 sin s, |z| = R sqrt(cos s),
// z_k = |z| phi_k with phi on S^(2n-1) in nested angles and phases.
struct HeisSphere {
  int n = 1;
  double radius = 1.0;
  int slices = 48;
  int polar = 8;
  int phases = 8;
};

struct SurfaceNode {
  Point point;
  std::vector<Vec> tangents;  // 2n vectors, ordered so the weight sign fixes orientation
  double weight = 0;          // signed: boundary orientation of the enclosed ball
};

class SurfaceRule {
 public:
  explicit SurfaceRule(const HeisSphere& spec);
  std::size_t size() const { return count_; }
  SurfaceNode node(std::size_t i) const;
  const HeisSphere& spec() const { return spec_; }

 private:
  HeisSphere spec_;
  GaussRule s_, eta_;
  std::size_t count_;
};

// flat contact volume form theta0 ^ (d theta0)^n at a point
AltForm flat_volume_form(int n, std::span<const double> p);
AltForm flat_contact_form(int n, std::span<const double> p);

cplx integrate_surface(const HeisSphere& spec, const std::function<cplx(const SurfaceNode&)>& f, int workers = 1);
cplx surface_integral(const FieldExpr& form, const HeisSphere& spec, int workers = 1);

}  // namespace crlab
