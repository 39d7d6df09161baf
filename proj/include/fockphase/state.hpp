#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fockphase/errors.hpp"

namespace fockphase {

// The three preparation parameters: mean total angular momentum j (N = 2j
// particles), its spread delta_j, and the number-imbalance spread delta_m.
struct StatePrep {
  int j_mean = 0;
  double delta_j = 0.0;
  double delta_m = 0.0;

  void validate() const {
    if (j_mean < 1) throw std::invalid_argument("StatePrep: j_mean must be >= 1");
    if (!(delta_j >= 0.0) || !std::isfinite(delta_j))
      throw std::invalid_argument("StatePrep: delta_j must be a finite non-negative number");
    if (!(delta_m >= 0.0) || !std::isfinite(delta_m))
      throw std::invalid_argument("StatePrep: delta_m must be a finite non-negative number");
  }
};

struct MixtureEntry {
  int j = 0;
  int m = 0;
  double weight = 0.0;
};

// Normalized weights of the incoherent mixture sum_{j,m} w |j,m><j,m|.
// Entries are ordered by (j, m); weights are mirror-identical in m.
struct MixtureWeights {
  std::vector<MixtureEntry> entries;
  int j_min = 0;
  int j_max = 0;
  int m_cap = 0;  // largest |m| carrying weight
  StatePrep prep;
};

// Product of independent Gaussians in j' and m, evaluated at integer points,
// restricted to |m| <= j', truncated at 4 sigma and renormalized.
// delta_j = 0 and delta_m = 0 collapse to Kronecker deltas.
inline MixtureWeights build_mixture(const StatePrep& prep) {
  prep.validate();
  const int j_lo =
      prep.delta_j == 0.0
          ? prep.j_mean
          : std::max(0, prep.j_mean - static_cast<int>(std::ceil(4.0 * prep.delta_j)));
  const int j_hi =
      prep.delta_j == 0.0
          ? prep.j_mean
          : prep.j_mean + static_cast<int>(std::ceil(4.0 * prep.delta_j));
  const int m_window =
      prep.delta_m == 0.0 ? 0 : static_cast<int>(std::ceil(4.0 * prep.delta_m)) + 1;
  if (j_hi < j_lo) throw std::invalid_argument("build_mixture: empty truncation window");

  MixtureWeights w;
  w.prep = prep;
  w.j_min = j_lo;
  w.j_max = j_hi;
  double total = 0.0;
  std::vector<double> m_factor;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double dj = static_cast<double>(j - prep.j_mean);
    const double wj =
        prep.delta_j == 0.0 ? 1.0 : std::exp(-0.5 * dj * dj / (prep.delta_j * prep.delta_j));
    const int mc = std::min(j, m_window);
    m_factor.assign(static_cast<std::size_t>(mc) + 1, 0.0);
    for (int m = 0; m <= mc; ++m) {
      m_factor[static_cast<std::size_t>(m)] =
          prep.delta_m == 0.0
              ? (m == 0 ? 1.0 : 0.0)
              : std::exp(-0.5 * static_cast<double>(m) * m / (prep.delta_m * prep.delta_m));
    }
    for (int m = -mc; m <= mc; ++m) {
      const double wm = m_factor[static_cast<std::size_t>(std::abs(m))];
      const double weight = wj * wm;
      w.entries.push_back(MixtureEntry{j, m, weight});
      total += weight;
      if (std::abs(m) > w.m_cap && weight > 0.0) w.m_cap = std::abs(m);
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("build_mixture: truncation window carries no weight");
  for (auto& e : w.entries) e.weight /= total;
  return w;
}

namespace detail {
inline std::vector<double> m_marginal(const MixtureWeights& w) {
  std::vector<double> marg(static_cast<std::size_t>(2 * w.m_cap + 1), 0.0);
  for (const auto& e : w.entries) marg[static_cast<std::size_t>(e.m + w.m_cap)] += e.weight;
  return marg;
}
}  // namespace detail

// Mean of the m marginal; pairwise summation of the mirror-identical weights
// makes this exactly zero for every mixture built here.
inline double marginal_m_mean(const MixtureWeights& w) {
  const auto marg = detail::m_marginal(w);
  double mean = 0.0;
  for (int m = 1; m <= w.m_cap; ++m)
    mean += m * (marg[static_cast<std::size_t>(w.m_cap + m)] -
                 marg[static_cast<std::size_t>(w.m_cap - m)]);
  return mean;
}

// Realized standard deviation of the m marginal.
inline double marginal_m_std(const MixtureWeights& w) {
  const auto marg = detail::m_marginal(w);
  const double mean = marginal_m_mean(w);
  double second = 0.0;
  for (int m = -w.m_cap; m <= w.m_cap; ++m)
    second += static_cast<double>(m) * m * marg[static_cast<std::size_t>(m + w.m_cap)];
  const double var = second - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

inline double marginal_j_mean(const MixtureWeights& w) {
  double mean = 0.0;
  for (const auto& e : w.entries) mean += e.j * e.weight;
  return mean;
}

}  // namespace fockphase
