#include "crlab/clifford.hpp"

#include <array>
#include <bit>
#include <mutex>
#include <stdexcept>

namespace crlab {

GintMatrix GintMatrix::identity(int size) {
  GintMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = {1, 0};
  return m;
}

GintMatrix operator*(const GintMatrix& a, const GintMatrix& b) {
  GintMatrix r(a.n_);
  for (int i = 0; i < a.n_; ++i)
    for (int k = 0; k < a.n_; ++k) {
      Gint aik = a(i, k);
      if (aik == Gint{}) continue;
      for (int j = 0; j < a.n_; ++j) r(i, j) = r(i, j) + aik * b(k, j);
    }
  return r;
}

GintMatrix operator+(const GintMatrix& a, const GintMatrix& b) {
  GintMatrix r = a;
  for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] + b.a_[i];
  return r;
}

GintMatrix operator-(const GintMatrix& a, const GintMatrix& b) {
  GintMatrix r = a;
  for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] - b.a_[i];
  return r;
}

GintMatrix operator*(Gint s, const GintMatrix& a) {
  GintMatrix r = a;
  for (auto& v : r.a_) v = s * v;
  return r;
}

bool GintMatrix::is_zero() const {
  for (const auto& v : a_)
    if (!(v == Gint{})) return false;
  return true;
}

Eigen::MatrixXcd GintMatrix::to_complex() const {
  Eigen::MatrixXcd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).to_complex();
  return m;
}

Spinor Spinor::zero(int n) { return {n, Eigen::VectorXcd::Zero(1 << n)}; }

Spinor Spinor::basis(int n, unsigned mask) {
  Spinor s = zero(n);
  s.c[mask] = 1.0;
  return s;
}

namespace {

void check_rank(int n) {
  if (n < 1 || n > 8) throw std::out_of_range("spinor rank out of range");
}

}  // namespace

GintMatrix exterior_mult(int n, int j) {
  check_rank(n);
  if (j < 1 || j > n) throw std::out_of_range("exterior index out of range");
  unsigned bit = 1u << (j - 1);
  GintMatrix m(1 << n);
  for (unsigned I = 0; I < (1u << n); ++I) {
    if (I & bit) continue;
    long long s = std::popcount(I & (bit - 1)) % 2 ? -1 : 1;
    m(I | bit, I) = {s, 0};
  }
  return m;
}

GintMatrix interior_mult(int n, int j) {
  check_rank(n);
  if (j < 1 || j > n) throw std::out_of_range("interior index out of range");
  unsigned bit = 1u << (j - 1);
  GintMatrix m(1 << n);
  for (unsigned I = 0; I < (1u << n); ++I) {
    if (!(I & bit)) continue;
    long long s = std::popcount(I & (bit - 1)) % 2 ? -1 : 1;
    m(I ^ bit, I) = {s, 0};
  }
  return m;
}

GintMatrix generator(int n, int a) {
  check_rank(n);
  if (a < 1 || a > 2 * n) throw std::out_of_range("generator index out of range");
  int j = (a + 1) / 2;
  GintMatrix eps = exterior_mult(n, j), iota = interior_mult(n, j);
  if (a % 2) return eps - iota;
  return Gint{0, 1} * (eps + iota);
}

GintMatrix word_matrix(int n, const std::vector<int>& word) {
  GintMatrix m = GintMatrix::identity(1 << n);
  for (int a : word) m = m * generator(n, a);
  return m;
}

Spinor apply_word(const std::vector<int>& word, const Spinor& psi) {
  if (psi.c.size() != (1 << psi.n)) throw std::invalid_argument("spinor rank mismatch");
  return {psi.n, word_matrix(psi.n, word).to_complex() * psi.c};
}

Spinor grade_projection(const Spinor& psi, Parity parity) {
  Spinor r = psi;
  int want = parity == Parity::Even ? 0 : 1;
  for (unsigned I = 0; I < static_cast<unsigned>(r.c.size()); ++I)
    if (std::popcount(I) % 2 != want) r.c[I] = 0.0;
  return r;
}

long long anticommutation_defect(int n) {
  long long worst = 0;
  GintMatrix id = GintMatrix::identity(1 << n);
  for (int a = 1; a <= 2 * n; ++a) {
    for (int b = 1; b <= 2 * n; ++b) {
      GintMatrix ea = generator(n, a), eb = generator(n, b);
      GintMatrix s = ea * eb + eb * ea;
      if (a == b) s = s + Gint{2, 0} * id;
      for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j) worst = std::max({worst, std::llabs(s(i, j).re), std::llabs(s(i, j).im)});
    }
  }
  return worst;
}

GintMatrix key_operator(int n) {
  GintMatrix k(1 << n);
  for (int b = 1; b <= n; ++b) k = k + generator(n, b) * generator(n, n + b);
  return k;
}

double key_operator_norm(int n, Parity parity) {
  Eigen::MatrixXcd k = key_operator(n).to_complex();
  int want = parity == Parity::Even ? 0 : 1;
  std::vector<int> idx;
  for (int I = 0; I < (1 << n); ++I)
    if (std::popcount(static_cast<unsigned>(I)) % 2 == want) idx.push_back(I);
  // the operator is even, so it preserves the parity subspace
  Eigen::MatrixXcd sub(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = k(idx[r], idx[c]);
  if (sub.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(sub).singularValues()(0);
}

std::complex<double> quartic_form(const Spinor& psi) {
  if (psi.n != 2) throw std::invalid_argument("quartic form is defined for rank 2");
  Eigen::VectorXcd w = word_matrix(2, {1, 3, 2, 4}).to_complex() * psi.c;
  return psi.c.dot(w);
}

const std::vector<Eigen::MatrixXcd>& generators(int n) {
  check_rank(n);
  static std::array<std::once_flag, 9> once;
  static std::array<std::vector<Eigen::MatrixXcd>, 9> cache;
  std::call_once(once[n], [n] {
    std::vector<Eigen::MatrixXcd> g(2 * n + 1);
    for (int a = 1; a <= 2 * n; ++a) g[a] = generator(n, a).to_complex();
    cache[n] = std::move(g);
  });
  return cache[n];
}

}  // namespace crlab
