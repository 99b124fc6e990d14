#pragma once

// Spinors as the complex exterior algebra of C^n with the generators
// E_{2j-1} = eps_j - iota_j and E_{2j} = i (eps_j + iota_j).  Basis vectors are
// indexed by bitmasks over {1..n}; bit j-1 stands for omega^j.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace crlab {

// Gaussian integer, enough for exact generator products
struct Gint {
  long long re = 0, im = 0;

  friend Gint operator+(Gint a, Gint b) { return {a.re + b.re, a.im + b.im}; }
  friend Gint operator-(Gint a, Gint b) { return {a.re - b.re, a.im - b.im}; }
  friend Gint operator*(Gint a, Gint b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend bool operator==(Gint a, Gint b) { return a.re == b.re && a.im == b.im; }
  std::complex<double> to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

class GintMatrix {
 public:
  GintMatrix() = default;
  explicit GintMatrix(int size) : n_(size), a_(static_cast<std::size_t>(size) * size) {}
  static GintMatrix identity(int size);

  int size() const { return n_; }
  Gint& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  Gint operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

  friend GintMatrix operator*(const GintMatrix& a, const GintMatrix& b);
  friend GintMatrix operator+(const GintMatrix& a, const GintMatrix& b);
  friend GintMatrix operator-(const GintMatrix& a, const GintMatrix& b);
  friend GintMatrix operator*(Gint s, const GintMatrix& a);
  friend bool operator==(const GintMatrix& a, const GintMatrix& b) { return a.n_ == b.n_ && a.a_ == b.a_; }
  bool is_zero() const;
  Eigen::MatrixXcd to_complex() const;

 private:
  int n_ = 0;
  std::vector<Gint> a_;
};

enum class Parity { Even, Odd };

struct Spinor {
  int n = 1;
  Eigen::VectorXcd c;  // 2^n coefficients

  static Spinor zero(int n);
  static Spinor basis(int n, unsigned mask);
  double norm() const { return c.norm(); }
};

// eps_j and iota_j, j in 1..n
GintMatrix exterior_mult(int n, int j);
GintMatrix interior_mult(int n, int j);

// E_a, a in 1..2n
GintMatrix generator(int n, int a);
// product E_{w0} E_{w1} ... (applied right to left)
GintMatrix word_matrix(int n, const std::vector<int>& word);
Spinor apply_word(const std::vector<int>& word, const Spinor& psi);
Spinor grade_projection(const Spinor& psi, Parity parity);

// max over a,b of |E_aE_b + E_bE_a + 2 delta_ab|, in exact arithmetic
long long anticommutation_defect(int n);

// sum_beta E_beta E_{n+beta}
GintMatrix key_operator(int n);
double key_operator_norm(int n, Parity parity);
std::complex<double> quartic_form(const Spinor& psi);

// cached complex generator matrices E_1..E_2n (index 0 unused)
const std::vector<Eigen::MatrixXcd>& generators(int n);

}  // namespace crlab
