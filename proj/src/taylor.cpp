#include "crlab/taylor.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>

namespace crlab {

namespace {

void enumerate(int dim, int deg, int var, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (var == dim - 1) {
    cur[var] = deg;
    out.push_back(cur);
    return;
  }
  for (int k = deg; k >= 0; --k) {
    cur[var] = k;
    enumerate(dim, deg - k, var + 1, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

MonomialTable::MonomialTable(int dim) : dim_(dim) {
  std::vector<int> cur(dim, 0);
  for (int d = 0; d <= kMaxOrder; ++d) {
    enumerate(dim, d, 0, cur, exps_);
    size_.push_back(static_cast<int>(exps_.size()));
  }
  for (const auto& e : exps_) {
    int s = 0;
    for (int v : e) s += v;
    deg_.push_back(s);
  }
  std::map<std::vector<int>, int> lookup;
  for (int i = 0; i < static_cast<int>(exps_.size()); ++i) lookup[exps_[i]] = i;

  raise_.assign(exps_.size() * dim, -1);
  for (int i = 0; i < static_cast<int>(exps_.size()); ++i) {
    if (deg_[i] == kMaxOrder) continue;
    for (int v = 0; v < dim; ++v) {
      auto e = exps_[i];
      ++e[v];
      raise_[i * dim + v] = lookup.at(e);
    }
  }

  for (int i = 0; i < static_cast<int>(exps_.size()); ++i) {
    for (int j = 0; j < static_cast<int>(exps_.size()); ++j) {
      if (deg_[i] + deg_[j] > kMaxOrder) continue;
      std::vector<int> e(dim);
      for (int v = 0; v < dim; ++v) e[v] = exps_[i][v] + exps_[j][v];
      prod_.push_back({i, j, lookup.at(e)});
    }
  }
  std::stable_sort(prod_.begin(), prod_.end(),
                   [&](const Triple& a, const Triple& b) { return a.k < b.k; });
  prod_count_.assign(kMaxOrder + 1, 0);
  for (int d = 0; d <= kMaxOrder; ++d)
    prod_count_[d] = static_cast<int>(
        std::count_if(prod_.begin(), prod_.end(), [&](const Triple& t) { return t.k < size_[d]; }));
}

int MonomialTable::index(const std::vector<int>& exps) const {
  auto it = std::find(exps_.begin(), exps_.end(), exps);
  return it == exps_.end() ? -1 : static_cast<int>(it - exps_.begin());
}

const MonomialTable& MonomialTable::get(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("jet dimension out of range");
  static std::array<std::atomic<const MonomialTable*>, kMaxDim + 1> fast{};
  if (const MonomialTable* t = fast[dim].load(std::memory_order_acquire)) return *t;
  static std::mutex mu;
  static std::map<int, std::unique_ptr<MonomialTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = tables[dim];
  if (!slot) slot.reset(new MonomialTable(dim));
  fast[dim].store(slot.get(), std::memory_order_release);
  return *slot;
}

std::vector<RJet> seed(std::span<const double> p, int order) {
  int d = static_cast<int>(p.size());
  std::vector<RJet> x;
  x.reserve(d);
  for (int i = 0; i < d; ++i) x.push_back(RJet::variable(d, order, p[i], i));
  return x;
}

}  // namespace crlab
