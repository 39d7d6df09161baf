#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fockphase/analysis.hpp"
#include "fockphase/angular.hpp"
#include "fockphase/bayes.hpp"
#include "fockphase/condprob.hpp"
#include "fockphase/montecarlo.hpp"

namespace fockphase {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// The six uncertainty combinations (delta_j, delta_m) in {0,3} x {0,1,3} at
// j = 10 exercised by the normalization suite and the condprob panel preset.
inline std::vector<StatePrep> panel_preset_preps() {
  return {StatePrep{10, 0.0, 0.0}, StatePrep{10, 0.0, 1.0}, StatePrep{10, 0.0, 3.0},
          StatePrep{10, 3.0, 0.0}, StatePrep{10, 3.0, 1.0}, StatePrep{10, 3.0, 3.0}};
}

namespace detail {

// Regularized upper incomplete gamma Q(a, x); series for x < a + 1, Lentz
// continued fraction otherwise. Enough accuracy for p-value thresholds.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

// Chi-square goodness of fit of sampled outcomes against a table column;
// bins with expected count below 5 are pooled into the tails.
inline double chi_square_p_value(const CondProbTable& table, double theta, int n_draws,
                                 std::uint64_t seed) {
  const int idx = table.grid.snap_index(theta);
  const int nm = 2 * table.m_max + 1;
  std::vector<double> expected(static_cast<std::size_t>(nm));
  for (int m = -table.m_max; m <= table.m_max; ++m)
    expected[static_cast<std::size_t>(m + table.m_max)] =
        n_draws * table.p(m + table.m_max, idx);
  std::vector<long> counts(static_cast<std::size_t>(nm), 0);
  StreamRng rng(seed, 0);
  for (int k = 0; k < n_draws; ++k)
    counts[static_cast<std::size_t>(sample_outcome(table, theta, rng) + table.m_max)]++;

  int lo = 0, hi = nm - 1;
  double exp_lo = 0.0, exp_hi = 0.0;
  long cnt_lo = 0, cnt_hi = 0;
  while (lo <= hi && exp_lo + expected[static_cast<std::size_t>(lo)] < 5.0) {
    exp_lo += expected[static_cast<std::size_t>(lo)];
    cnt_lo += counts[static_cast<std::size_t>(lo)];
    ++lo;
  }
  while (hi >= lo && exp_hi + expected[static_cast<std::size_t>(hi)] < 5.0) {
    exp_hi += expected[static_cast<std::size_t>(hi)];
    cnt_hi += counts[static_cast<std::size_t>(hi)];
    --hi;
  }
  std::vector<double> e;
  std::vector<long> o;
  if (lo > 0) {
    e.push_back(exp_lo + expected[static_cast<std::size_t>(lo)]);
    o.push_back(cnt_lo + counts[static_cast<std::size_t>(lo)]);
    ++lo;
  }
  for (int i = lo; i <= hi; ++i) {
    e.push_back(expected[static_cast<std::size_t>(i)]);
    o.push_back(counts[static_cast<std::size_t>(i)]);
  }
  if (hi < nm - 1 && !e.empty()) {
    e.back() += exp_hi;
    o.back() += cnt_hi;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] <= 0.0) continue;
    const double diff = o[i] - e[i];
    chi2 += diff * diff / e[i];
  }
  const double dof = static_cast<double>(e.size()) - 1.0;
  if (dof < 1.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * chi2);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

inline CriterionResult criterion_oracle_equivalence() {
  double worst = 0.0;
  for (int j = 0; j <= 5; ++j) {
    for (int i = 0; i < 50; ++i) {
      const double phi = -0.5 * std::numbers::pi + i * (std::numbers::pi / 49.0);
      const RotationKernel exact = rotation_kernel(j, phi);
      const RotationKernel oracle = matrix_exponential_oracle(j, phi);
      worst = std::max(worst, (exact.d - oracle.d).cwiseAbs().maxCoeff());
    }
  }
  return CriterionResult{1, "oracle equivalence", worst < 1e-10,
                         "max |kernel - series oracle| = " + detail::fmt(worst)};
}

inline CriterionResult criterion_normalization(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  KernelBank bank(grid);
  double worst = 0.0;
  for (const auto& prep : panel_preset_preps()) {
    const CondProbTable t = table_for_prep(prep, bank, threads);
    worst = std::max(worst, (t.p.colwise().sum().array() - 1.0).abs().maxCoeff());
  }
  return CriterionResult{2, "normalization suite", worst <= 1e-10,
                         "max |sum_m P(m|phi) - 1| = " + detail::fmt(worst)};
}

inline CriterionResult criterion_heisenberg_plateau(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  bool pass = true;
  std::ostringstream detail;
  detail << "J*dphi_inf at dm=0:";
  for (const int j : {10, 20, 40, 80}) {
    const double scaled = j * delta_phi_infinity(StatePrep{j, 0.0, 0.0}, 0.0, 5.0, grid, threads);
    detail << " J=" << j << ": " << detail::fmt(scaled);
    if (!(scaled >= 1.0 && scaled <= 1.1)) pass = false;
  }
  detail << " (required in [1.0, 1.1])";
  return CriterionResult{3, "Heisenberg plateau", pass, detail.str()};
}

inline CriterionResult criterion_universal_collapse(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const std::vector<int> js{10, 20, 40, 80};
  std::vector<double> dms;
  for (int k = 0; k <= 12; ++k) dms.push_back(0.25 * k);
  const std::vector<SweepRow> rows = universal_sweep(js, dms, grid, threads);
  double worst_spread = 0.0;
  for (std::size_t di = 0; di < dms.size(); ++di) {
    double lo = 1e300, hi = 0.0, mean = 0.0;
    for (std::size_t ji = 0; ji < js.size(); ++ji) {
      const double s = rows[ji * dms.size() + di].scaled;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      mean += s;
    }
    mean /= js.size();
    worst_spread = std::max(worst_spread, (hi - lo) / mean);
  }
  const AlphaFit fit = fit_alpha(rows);
  const bool pass = worst_spread < 0.10 && fit.alpha >= 1.8 && fit.alpha <= 2.2 &&
                    fit.residual < 0.15;
  std::ostringstream detail;
  detail << "max spread = " << detail::fmt(worst_spread) << " (< 0.10), alpha = "
         << detail::fmt(fit.alpha) << " (2.0 +- 0.2), max residual = "
         << detail::fmt(fit.residual) << " (< 0.15)";
  return CriterionResult{4, "universal collapse", pass, detail.str()};
}

inline CriterionResult criterion_width_law(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const int j = 20;
  const CondProbTable t = table_for_prep(StatePrep{j, 0.0, 3.0}, grid, threads);
  const int row = t.m_max;  // m = 0
  double height = 0.0;
  for (int i = 0; i < t.size(); ++i) height = std::max(height, t.p(row, i));
  const double width = 3.0 / j;
  double worst_center = 0.0, worst_tail = 0.0;
  for (int i = 0; i < t.size(); ++i) {
    const double phi = grid.points[static_cast<std::size_t>(i)];
    const double p = t.p(row, i);
    if (std::abs(phi) <= width) {
      const double gauss = height * std::exp(-0.5 * phi * phi / (width * width));
      worst_center = std::max(worst_center, std::abs(p / gauss - 1.0));
    }
    if (std::abs(phi) >= 0.4 && std::abs(phi) <= 1.2) {
      const double tail = tail_envelope(j, std::abs(phi));
      worst_tail = std::max(worst_tail, std::abs(p / tail - 1.0));
    }
  }
  const bool pass = worst_center <= 0.10 && worst_tail <= 0.25;
  std::ostringstream detail;
  detail << "max |P/gauss - 1| = " << detail::fmt(worst_center)
         << " for |phi| <= 0.15 (<= 0.10), max |P/tail - 1| = " << detail::fmt(worst_tail)
         << " for 0.4 <= |phi| <= 1.2 (<= 0.25)";
  return CriterionResult{5, "width law", pass, detail.str()};
}

inline CriterionResult criterion_delta_j_insensitivity(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const auto rows = delta_j_sensitivity(StatePrep{10, 0.0, 1.0}, {0.0, 3.0}, grid, threads);
  const double rel = std::abs(rows[1].second - rows[0].second) / rows[0].second;
  std::ostringstream detail;
  detail << "dphi_inf(dJ=0) = " << detail::fmt(rows[0].second) << ", dphi_inf(dJ=3) = "
         << detail::fmt(rows[1].second) << ", change = " << detail::fmt(rel) << " (< 0.03)";
  return CriterionResult{6, "delta-J insensitivity", rel < 0.03, detail.str()};
}

inline CriterionResult criterion_mismatch_phenomenology(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const auto rows = modality_scan(20, 2.0, {0.5, 1.0, 2.0, 3.0, 4.0}, 0.0, grid, threads);
  const double tol = 2.0 * grid.spacing;  // "at zero" within grid resolution
  bool pass = true;
  std::ostringstream detail;
  for (const auto& r : rows) {
    const bool optimistic = r.delta_m_est < 2.0;
    const bool ok = optimistic ? (r.n_modes >= 2 && std::abs(r.peak_phi) > tol)
                               : (r.n_modes == 1 && std::abs(r.peak_phi) <= tol);
    if (!ok) pass = false;
    detail << " dm_est=" << detail::fmt(r.delta_m_est) << ": modes=" << r.n_modes
           << " peak=" << detail::fmt(r.peak_phi) << " std=" << detail::fmt(r.std_dev) << ";";
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].std_dev < rows[best].std_dev) best = i;
  if (rows[best].delta_m_est != 2.0) pass = false;
  detail << " std minimized at dm_est=" << detail::fmt(rows[best].delta_m_est);
  return CriterionResult{7, "mismatch phenomenology", pass, detail.str()};
}

inline CriterionResult criterion_monte_carlo(int threads = 0) {
  const PhiGrid grid = PhiGrid::uniform(2048);
  bool pass = true;
  std::ostringstream detail;
  const std::vector<StatePrep> preps{StatePrep{10, 0.0, 1.0}, StatePrep{10, 3.0, 1.0},
                                     StatePrep{20, 0.0, 3.0}};
  std::uint64_t seed = 20240001;
  detail << "chi-square p-values:";
  for (const auto& prep : preps) {
    const CondProbTable t = table_for_prep(prep, grid, threads);
    const double p = detail::chi_square_p_value(t, 0.0, 100000, seed++);
    detail << " " << detail::fmt(p);
    if (!(p >= 0.001)) pass = false;
  }
  const double dpi = delta_phi_infinity(StatePrep{10, 0.0, 0.0}, 0.0, 5.0, grid, threads);
  const EnsembleStats stats =
      ensemble_std(StatePrep{10, 0.0, 0.0}, 0.0, 5, 200, 42, grid, threads);
  const double target = dpi / std::sqrt(5.0);
  const double rel = std::abs(stats.mean_std - target) / target;
  detail << "; ensemble mean std = " << detail::fmt(stats.mean_std) << " vs dphi_inf/sqrt(5) = "
         << detail::fmt(target) << ", rel = " << detail::fmt(rel) << " (< 0.15)";
  if (!(rel < 0.15)) pass = false;
  return CriterionResult{8, "Monte Carlo consistency", pass, detail.str()};
}

}  // namespace fockphase
