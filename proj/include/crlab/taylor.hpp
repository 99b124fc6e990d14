#pragma once

// Truncated multivariate Taylor polynomials.  A Taylor<T> of order K in d
// variables stores c_a = (d^a f)(p) / a! for every multi-index |a| <= K,
// laid out in a graded order shared by all jets with the same d.  Because the
// layout is graded, truncating to a lower order is a prefix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace crlab {

class MonomialTable {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kMaxDim = 8;

  struct Triple {
    int i, j, k;
  };

  static const MonomialTable& get(int dim);

  int dim() const { return dim_; }
  int size(int order) const { return size_[order]; }
  int degree(int idx) const { return deg_[idx]; }
  const std::vector<int>& exponents(int idx) const { return exps_[idx]; }
  int index(const std::vector<int>& exps) const;
  // index of (monomial idx) * x_var, or -1 past kMaxOrder
  int raise(int idx, int var) const { return raise_[idx * dim_ + var]; }
  int unit(int var) const { return 1 + var; }
  std::span<const Triple> products(int order) const {
    return {prod_.data(), static_cast<std::size_t>(prod_count_[order])};
  }

 private:
  explicit MonomialTable(int dim);

  int dim_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> deg_;
  std::vector<int> size_;
  std::vector<int> raise_;
  std::vector<Triple> prod_;
  std::vector<int> prod_count_;
};

template <class T>
class Taylor {
 public:
  using value_type = T;

  Taylor() = default;
  Taylor(int dim, int order) : Taylor(&MonomialTable::get(dim), order) {}

  static Taylor constant(int dim, int order, T v) {
    Taylor r(dim, order);
    r.c_[0] = v;
    return r;
  }
  static Taylor constant(const MonomialTable* table, int order, T v) {
    Taylor r(table, order);
    r.c_[0] = v;
    return r;
  }
  static Taylor variable(int dim, int order, T v, int var) {
    Taylor r(dim, order);
    r.c_[0] = v;
    if (order >= 1) r.c_[r.table_->unit(var)] = T(1);
    return r;
  }
  // jet with the same shape as this one
  Taylor constant_like(T v) const { return constant(table_, order_, v); }

  bool empty() const { return table_ == nullptr; }
  int dim() const { return table_->dim(); }
  int order() const { return order_; }
  int size() const { return static_cast<int>(c_.size()); }
  const MonomialTable& table() const { return *table_; }

  T value() const { return c_[0]; }
  T& coeff(int idx) { return c_[idx]; }
  const T& coeff(int idx) const { return c_[idx]; }
  std::span<const T> coeffs() const { return c_; }

  T d1(int i) const {
    need(1);
    return c_[table_->unit(i)];
  }
  T d2(int i, int j) const {
    need(2);
    int k = table_->raise(table_->unit(i), j);
    return i == j ? T(2) * c_[k] : c_[k];
  }

  Taylor truncated(int order) const {
    if (order >= order_) return *this;
    Taylor r;
    r.table_ = table_;
    r.order_ = order;
    r.c_.assign(c_.begin(), c_.begin() + table_->size(order));
    return r;
  }

  // d/dx_var, one order lower
  Taylor derivative(int var) const {
    need(1);
    Taylor r(table_, order_ - 1);
    for (int idx = 0; idx < r.size(); ++idx) {
      int up = table_->raise(idx, var);
      r.c_[idx] = c_[up] * static_cast<double>(table_->exponents(up)[var]);
    }
    return r;
  }

  Taylor operator-() const {
    Taylor r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  Taylor& operator+=(const Taylor& o) {
    shrink(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    shrink(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Taylor& operator+=(T s) {
    c_[0] += s;
    return *this;
  }
  Taylor& operator-=(T s) {
    c_[0] -= s;
    return *this;
  }
  Taylor& operator*=(T s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Taylor& operator/=(T s) {
    for (auto& v : c_) v /= s;
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    *this = *this * o;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator+(Taylor a, T s) { return a += s; }
  friend Taylor operator+(T s, Taylor a) { return a += s; }
  friend Taylor operator-(Taylor a, T s) { return a -= s; }
  friend Taylor operator-(T s, const Taylor& a) { return (-a) += s; }
  friend Taylor operator*(Taylor a, T s) { return a *= s; }
  friend Taylor operator*(T s, Taylor a) { return a *= s; }
  friend Taylor operator/(Taylor a, T s) { return a /= s; }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    int order = std::min(a.order_, b.order_);
    Taylor r(a.table_, order);
    for (const auto& p : a.table_->products(order)) r.c_[p.k] += a.c_[p.i] * b.c_[p.j];
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) { return a * reciprocal(b); }
  friend Taylor operator/(T s, const Taylor& b) { return reciprocal(b) * s; }

  // f(x) from the univariate Taylor coefficients of f at x.value()
  Taylor compose(std::span<const T> series) const {
    Taylor h = *this;
    h.c_[0] = T{};
    Taylor r = constant_like(series[order_]);
    for (int k = order_ - 1; k >= 0; --k) {
      r = r * h;
      r.c_[0] += series[k];
    }
    return r;
  }

  friend Taylor reciprocal(const Taylor& x) {
    std::vector<T> s(x.order_ + 1);
    T inv = T(1) / x.value();
    T p = inv;
    for (int k = 0; k <= x.order_; ++k) {
      s[k] = (k % 2 ? -p : p);
      p *= inv;
    }
    return x.compose(s);
  }
  friend Taylor exp(const Taylor& x) {
    std::vector<T> s(x.order_ + 1);
    T e = std::exp(x.value());
    double fact = 1.0;
    for (int k = 0; k <= x.order_; ++k) {
      if (k > 0) fact *= k;
      s[k] = e / fact;
    }
    return x.compose(s);
  }
  friend Taylor log(const Taylor& x) {
    std::vector<T> s(x.order_ + 1);
    T a = x.value();
    s[0] = std::log(a);
    T p = T(1);
    for (int k = 1; k <= x.order_; ++k) {
      p /= a;
      s[k] = (k % 2 ? p : -p) / static_cast<double>(k);
    }
    return x.compose(s);
  }
  friend Taylor pow(const Taylor& x, double e) {
    std::vector<T> s(x.order_ + 1);
    T a = x.value();
    double binom = 1.0;
    for (int k = 0; k <= x.order_; ++k) {
      s[k] = binom * std::pow(a, e - k);
      binom *= (e - k) / (k + 1);
    }
    return x.compose(s);
  }
  friend Taylor sqrt(const Taylor& x) { return pow(x, 0.5); }
  friend Taylor sin(const Taylor& x) { return trig(x, false); }
  friend Taylor cos(const Taylor& x) { return trig(x, true); }
  // asin via the series of (1 - x^2)^(-1/2) in one variable
  friend Taylor asin(const Taylor& x) {
    Taylor<T> s1 = Taylor<T>::variable(1, std::max(x.order_ - 1, 0), x.value(), 0);
    Taylor<T> g = pow(T(1) - s1 * s1, -0.5);
    std::vector<T> s(x.order_ + 1);
    s[0] = std::asin(x.value());
    for (int k = 1; k <= x.order_; ++k) s[k] = g.c_[k - 1] / static_cast<double>(k);
    return x.compose(s);
  }

 private:
  Taylor(const MonomialTable* table, int order) : table_(table), order_(order) {
    if (order < 0 || order > MonomialTable::kMaxOrder) throw std::invalid_argument("jet order out of range");
    c_.assign(table_->size(order), T{});
  }
  void need(int k) const {
    if (order_ < k) throw std::logic_error("jet order too low for requested derivative");
  }
  void shrink(int order) {
    if (order < order_) {
      order_ = order;
      c_.resize(table_->size(order));
    }
  }
  static Taylor trig(const Taylor& x, bool cosine) {
    std::vector<T> s(x.order_ + 1);
    T sv = std::sin(x.value()), cv = std::cos(x.value());
    // derivatives cycle sin, cos, -sin, -cos
    T cyc[4] = {sv, cv, -sv, -cv};
    int shift = cosine ? 1 : 0;
    double fact = 1.0;
    for (int k = 0; k <= x.order_; ++k) {
      if (k > 0) fact *= k;
      s[k] = cyc[(k + shift) % 4] / fact;
    }
    return x.compose(s);
  }

  template <class U>
  friend class Taylor;

  const MonomialTable* table_ = nullptr;
  int order_ = 0;
  std::vector<T> c_;
};

using cplx = std::complex<double>;
using RJet = Taylor<double>;
using CJet = Taylor<cplx>;

inline CJet to_complex(const RJet& x) {
  CJet r(x.dim(), x.order());
  for (int i = 0; i < x.size(); ++i) r.coeff(i) = x.coeff(i);
  return r;
}
inline CJet conj(const CJet& x) {
  CJet r = x;
  for (int i = 0; i < r.size(); ++i) r.coeff(i) = std::conj(r.coeff(i));
  return r;
}
inline CJet real_part(const CJet& x) {
  CJet r = x;
  for (int i = 0; i < r.size(); ++i) r.coeff(i) = r.coeff(i).real();
  return r;
}
inline CJet imag_part(const CJet& x) {
  CJet r = x;
  for (int i = 0; i < r.size(); ++i) r.coeff(i) = r.coeff(i).imag();
  return r;
}
inline RJet real_jet(const CJet& x) {
  RJet r(x.dim(), x.order());
  for (int i = 0; i < x.size(); ++i) r.coeff(i) = x.coeff(i).real();
  return r;
}
inline CJet operator*(const CJet& a, const RJet& b) { return a * to_complex(b); }
inline CJet operator*(const RJet& a, const CJet& b) { return to_complex(a) * b; }
inline CJet operator*(const RJet& a, cplx s) { return to_complex(a) * s; }
inline CJet operator*(cplx s, const RJet& a) { return to_complex(a) * s; }

// coordinate jets x_i = p_i + dx_i
std::vector<RJet> seed(std::span<const double> p, int order);

// largest |coefficient|, used as a field scale
template <class T>
double max_abs(const Taylor<T>& x) {
  double m = 0;
  for (const auto& c : x.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace crlab
