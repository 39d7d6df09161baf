#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "fockphase/angular.hpp"
#include "fockphase/grid.hpp"
#include "fockphase/parallel.hpp"
#include "fockphase/state.hpp"

namespace fockphase {

using TableMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// P(m | phi) for a mixture, sampled on a phase grid. Row m + m_max, one
// column per grid point; every column sums to one.
struct CondProbTable {
  PhiGrid grid;
  int m_max = 0;
  TableMatrix p;
  StatePrep prep;

  int size() const { return grid.size(); }
  bool has_m(int m) const { return std::abs(m) <= m_max; }
  double prob(int m, int idx) const {
    if (!has_m(m)) throw std::invalid_argument("CondProbTable::prob: outcome outside table range");
    return p(m + m_max, idx);
  }
};

// Memoized squared kernel columns on one grid, keyed by (j, m0). Tables for
// different mixtures on the same grid share the expensive kernel work, and
// every column is computed by one fixed-shape evaluation so results do not
// depend on which caller triggered it.
class KernelBank {
 public:
  explicit KernelBank(PhiGrid grid) : grid_(std::move(grid)) {}

  const PhiGrid& grid() const { return grid_; }

  const Eigen::MatrixXd& squared_columns(int j, int m0) {
    const std::pair<int, int> key{j, m0};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return *it->second;
    }
    auto sys = detail::eigensystem(j);
    auto fresh = std::make_unique<Eigen::MatrixXd>(sys->squared_columns(m0, grid_.points));
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(key, std::move(fresh)).first->second;
  }

  void prime(const std::vector<std::pair<int, int>>& keys, int threads = 0) {
    std::vector<std::pair<int, int>> missing;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (const auto& k : keys)
        if (cache_.find(k) == cache_.end()) missing.push_back(k);
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    parallel_for(missing.size(), threads,
                 [&](std::size_t i) { squared_columns(missing[i].first, missing[i].second); });
  }

 private:
  PhiGrid grid_;
  std::map<std::pair<int, int>, std::unique_ptr<Eigen::MatrixXd>> cache_;
  std::mutex mu_;
};

// P(m|phi) = sum over mixture components of weight * D_j(phi)[m, m0]^2.
// Accumulation runs in fixed component order over fixed-size column blocks,
// so the table is bitwise reproducible for any thread count.
inline CondProbTable cond_prob_table(const MixtureWeights& w, KernelBank& bank, int threads = 0) {
  const PhiGrid& grid = bank.grid();
  const int nphi = grid.size();
  const int m_max = w.j_max;
  CondProbTable table{grid, m_max, TableMatrix::Zero(2 * m_max + 1, nphi), w.prep};

  std::vector<std::pair<int, int>> keys;
  keys.reserve(w.entries.size());
  for (const auto& e : w.entries) keys.emplace_back(e.j, e.m);
  bank.prime(keys, threads);

  constexpr int kBlock = 256;
  const std::size_t nblocks = static_cast<std::size_t>((nphi + kBlock - 1) / kBlock);
  parallel_for(nblocks, threads, [&](std::size_t b) {
    const int c0 = static_cast<int>(b) * kBlock;
    const int len = std::min(kBlock, nphi - c0);
    for (const auto& e : w.entries) {
      const Eigen::MatrixXd& sq = bank.squared_columns(e.j, e.m);
      table.p.block(m_max - e.j, c0, 2 * e.j + 1, len) +=
          e.weight * sq.block(0, c0, 2 * e.j + 1, len);
    }
  });

  // fail loudly rather than hand silently denormalized data downstream
  const double defect = (table.p.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (!(defect < 1e-10))
    throw numerical_contract_error("cond_prob_table: column normalization defect " +
                                   std::to_string(defect));
  return table;
}

inline CondProbTable cond_prob_table(const MixtureWeights& w, const PhiGrid& grid,
                                     int threads = 0) {
  KernelBank bank(grid);
  return cond_prob_table(w, bank, threads);
}

inline CondProbTable table_for_prep(const StatePrep& prep, KernelBank& bank, int threads = 0) {
  return cond_prob_table(build_mixture(prep), bank, threads);
}

inline CondProbTable table_for_prep(const StatePrep& prep, const PhiGrid& grid,
                                    int threads = 0) {
  return cond_prob_table(build_mixture(prep), grid, threads);
}

// Tail law 1/(pi j phi) of the wings of P(m|phi).
inline double tail_envelope(int j, double phi) {
  if (j < 1) throw std::invalid_argument("tail_envelope: j must be >= 1");
  if (!(phi > 0.0)) throw std::invalid_argument("tail_envelope: phi must be > 0");
  return 1.0 / (std::numbers::pi * j * phi);
}

}  // namespace fockphase
