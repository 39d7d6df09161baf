#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fockphase/condprob.hpp"
#include "fockphase/errors.hpp"
#include "fockphase/grid.hpp"

namespace fockphase {

// Probability density over the phase grid; trapezoidal integral equals one.
struct PhaseDistribution {
  PhiGrid grid;
  std::vector<double> density;
};

namespace detail {

inline double trapezoid(const PhiGrid& g, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    acc += 0.5 * (g.points[i + 1] - g.points[i]) * (f[i] + f[i + 1]);
  return acc;
}

inline void normalize(PhaseDistribution& d) {
  const double z = trapezoid(d.grid, d.density);
  if (!(z > 0.0) || !std::isfinite(z))
    throw model_contradiction_error("phase distribution carries no mass under the model");
  for (auto& v : d.density) v /= z;
}

}  // namespace detail

// Flat prior 1/pi on [-pi/2, pi/2].
inline PhaseDistribution uniform_prior(const PhiGrid& grid) {
  PhaseDistribution d{grid, std::vector<double>(static_cast<std::size_t>(grid.size()),
                                                1.0 / std::numbers::pi)};
  detail::normalize(d);
  return d;
}

// One Bayes step: pointwise product with the likelihood column of outcome m,
// renormalized on the grid.
inline PhaseDistribution bayes_update(const PhaseDistribution& prior, int m,
                                      const CondProbTable& table) {
  if (prior.grid != table.grid)
    throw std::invalid_argument("bayes_update: prior and table grids differ");
  if (!table.has_m(m)) throw std::invalid_argument("bayes_update: outcome outside table range");
  const int row = m + table.m_max;
  PhaseDistribution post{prior.grid, std::vector<double>(prior.density.size())};
  for (std::size_t i = 0; i < post.density.size(); ++i)
    post.density[i] = prior.density[i] * table.p(row, static_cast<int>(i));
  detail::normalize(post);
  return post;
}

// Inference table built from the estimated delta_m, truth table from the
// actual delta_m, and the true phase. The matched case uses one table twice.
struct LikelihoodSpec {
  const CondProbTable* inference = nullptr;
  const CondProbTable* truth = nullptr;
  double theta = 0.0;

  void validate() const {
    if (inference == nullptr || truth == nullptr)
      throw std::invalid_argument("LikelihoodSpec: tables must be set");
    if (inference->grid != truth->grid)
      throw std::invalid_argument("LikelihoodSpec: tables must share one grid");
  }
};

// Large-record likelihood F(phi) = prod_m p(m|phi)^w(m) with w(m) the truth
// column at theta. Evaluated in the log domain with 0*log(0) = 0; a zero
// model probability against positive truth weight makes F vanish exactly
// (no probability floor, which would distort the mismatch bimodality).
//
// Truth weights below 1e-15 are dropped: their exact contribution to log F
// is bounded by w * |log p| < 1e-15 * 750 * (2 m_max + 1), far below the
// double-precision resolution of log F, while the table entries they would
// exponentiate are squared rounding noise (~1e-32) that can land on an
// exact 0 and punch a spurious hole into F.
inline PhaseDistribution asymptotic_likelihood(const LikelihoodSpec& spec) {
  spec.validate();
  const PhiGrid& grid = spec.truth->grid;
  const int itheta = grid.snap_index(spec.theta);
  const int n = grid.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  constexpr double kWeightEps = 1e-15;
  std::vector<double> logf(static_cast<std::size_t>(n), 0.0);
  for (int m = -spec.truth->m_max; m <= spec.truth->m_max; ++m) {
    const double wm = spec.truth->prob(m, itheta);
    if (!(wm > kWeightEps)) continue;
    if (!spec.inference->has_m(m)) {
      std::fill(logf.begin(), logf.end(), kNegInf);
      break;
    }
    const int row = m + spec.inference->m_max;
    for (int i = 0; i < n; ++i) {
      const double p = spec.inference->p(row, i);
      logf[static_cast<std::size_t>(i)] += p > 0.0 ? wm * std::log(p) : kNegInf;
    }
  }
  double peak = kNegInf;
  for (const double v : logf) peak = std::max(peak, v);
  if (peak == kNegInf)
    throw model_contradiction_error("asymptotic likelihood vanishes at every phase");
  PhaseDistribution f{grid, std::vector<double>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    const double v = logf[static_cast<std::size_t>(i)];
    f.density[static_cast<std::size_t>(i)] = v == kNegInf ? 0.0 : std::exp(v - peak);
  }
  detail::normalize(f);
  return f;
}

// Pointwise n-th power in the log domain, renormalized. Exact zeros stay
// zero for every n.
inline PhaseDistribution raise_to_n(const PhaseDistribution& f, double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("raise_to_n: n must be positive");
  PhaseDistribution out{f.grid, f.density};
  if (n != 1.0) {
    double peak = 0.0;
    for (const double v : f.density) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw model_contradiction_error("raise_to_n: distribution is identically zero");
    const double logpeak = std::log(peak);
    for (std::size_t i = 0; i < out.density.size(); ++i) {
      const double v = f.density[i];
      out.density[i] = v > 0.0 ? std::exp(n * (std::log(v) - logpeak)) : 0.0;
    }
  }
  detail::normalize(out);
  return out;
}

inline double phase_mean(const PhaseDistribution& d) {
  std::vector<double> tmp(d.density.size());
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = d.grid.points[i] * d.density[i];
  return detail::trapezoid(d.grid, tmp);
}

// Plain second moment on the bounded interval (not a circular statistic).
inline double phase_std(const PhaseDistribution& d) {
  const double mean = phase_mean(d);
  std::vector<double> tmp(d.density.size());
  for (std::size_t i = 0; i < tmp.size(); ++i)
    tmp[i] = d.grid.points[i] * d.grid.points[i] * d.density[i];
  const double second = detail::trapezoid(d.grid, tmp);
  const double var = second - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

// Index of the global maximum; exact ties resolve to the larger phi, so the
// two mirror points of an even distribution report the non-negative side.
inline int argmax_index(const PhaseDistribution& d) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(d.density.size()); ++i)
    if (d.density[static_cast<std::size_t>(i)] >= d.density[static_cast<std::size_t>(best)])
      best = i;
  return best;
}

// Interior local maxima above 1e-3 of the global peak. A plateau of equal
// values flanked by strictly smaller neighbors counts once (symmetric peaks
// land on two equal points when the grid has no phi = 0 node); the reported
// index is the plateau's right edge.
inline std::vector<int> local_maxima(const PhaseDistribution& d, double rel_floor = 1e-3) {
  std::vector<int> out;
  const int n = static_cast<int>(d.density.size());
  if (n < 3) return out;
  double peak = 0.0;
  for (const double v : d.density) peak = std::max(peak, v);
  const double floor = rel_floor * peak;
  int i = 1;
  while (i < n - 1) {
    const double v = d.density[static_cast<std::size_t>(i)];
    if (v <= d.density[static_cast<std::size_t>(i - 1)]) {
      ++i;
      continue;
    }
    int jend = i;
    while (jend + 1 < n && d.density[static_cast<std::size_t>(jend + 1)] == v) ++jend;
    if (jend < n - 1 && v > d.density[static_cast<std::size_t>(jend + 1)] && v > floor)
      out.push_back(jend);
    i = jend + 1;
  }
  return out;
}

}  // namespace fockphase
