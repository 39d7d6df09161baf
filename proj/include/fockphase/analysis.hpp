#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fockphase/bayes.hpp"
#include "fockphase/condprob.hpp"
#include "fockphase/parallel.hpp"

namespace fockphase {

// One cell of the universal curve: the resolution and its j-rescaled value.
struct SweepRow {
  int j = 0;
  double delta_m = 0.0;
  double delta_phi_inf = 0.0;
  double scaled = 0.0;  // j * delta_phi_inf
};

struct AlphaFit {
  double alpha = 0.0;
  double residual = 0.0;  // max relative deviation of the fit over the rows
  int n_rows = 0;
};

// Measurement-count-independent resolution: sqrt(n) times the standard
// deviation of the matched likelihood raised to n (default n = 5). Fully
// deterministic; no sampling enters.
inline double delta_phi_infinity(const StatePrep& prep, double theta, double n, KernelBank& bank,
                                 int threads = 0) {
  if (!(n > 0.0)) throw std::invalid_argument("delta_phi_infinity: n must be positive");
  const CondProbTable table = table_for_prep(prep, bank, threads);
  const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&table, &table, theta});
  return std::sqrt(n) * phase_std(raise_to_n(f, n));
}

inline double delta_phi_infinity(const StatePrep& prep, double theta, double n,
                                 const PhiGrid& grid, int threads = 0) {
  KernelBank bank(grid);
  return delta_phi_infinity(prep, theta, n, bank, threads);
}

inline double delta_phi_infinity(const StatePrep& prep, const PhiGrid& grid, int threads = 0) {
  return delta_phi_infinity(prep, 0.0, 5.0, grid, threads);
}

// Resolution over the (j, delta_m) product with delta_j = 0 throughout.
// Rows come back in input order: j-major, then delta_m.
inline std::vector<SweepRow> universal_sweep(const std::vector<int>& j_values,
                                             const std::vector<double>& delta_m_values,
                                             const PhiGrid& grid, int threads = 0,
                                             double theta = 0.0, double n = 5.0) {
  if (j_values.empty() || delta_m_values.empty())
    throw std::invalid_argument("universal_sweep: value lists must be non-empty");
  std::vector<SweepRow> rows(j_values.size() * delta_m_values.size());
  for (std::size_t ji = 0; ji < j_values.size(); ++ji) {
    const int j = j_values[ji];
    KernelBank bank(grid);
    double dm_max = 0.0;
    for (const double dm : delta_m_values) dm_max = std::max(dm_max, dm);
    {
      // prime the kernel columns for the widest support once per j
      const MixtureWeights widest = build_mixture(StatePrep{j, 0.0, dm_max});
      std::vector<std::pair<int, int>> keys;
      for (const auto& e : widest.entries) keys.emplace_back(e.j, e.m);
      bank.prime(keys, threads);
    }
    parallel_for(delta_m_values.size(), threads, [&](std::size_t di) {
      const StatePrep prep{j, 0.0, delta_m_values[di]};
      const double dpi = delta_phi_infinity(prep, theta, n, bank, 1);
      rows[ji * delta_m_values.size() + di] = SweepRow{j, delta_m_values[di], dpi, j * dpi};
    });
  }
  return rows;
}

// Linear least squares for alpha in scaled^2 = 1 + (alpha * delta_m)^2 over
// the rows with delta_m >= 1; the squared variable makes the model linear in
// alpha^2. The residual is reported over all rows passed in.
inline AlphaFit fit_alpha(const std::vector<SweepRow>& rows) {
  double num = 0.0, den = 0.0;
  int used = 0;
  for (const auto& r : rows) {
    if (r.delta_m < 1.0) continue;
    const double dm2 = r.delta_m * r.delta_m;
    num += dm2 * (r.scaled * r.scaled - 1.0);
    den += dm2 * dm2;
    ++used;
  }
  if (used == 0 || !(den > 0.0))
    throw std::invalid_argument("fit_alpha: need rows with delta_m >= 1");
  const double alpha2 = num / den;
  if (!(alpha2 > 0.0)) throw std::invalid_argument("fit_alpha: degenerate fit");
  AlphaFit fit;
  fit.alpha = std::sqrt(alpha2);
  fit.n_rows = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    const double model = std::sqrt(1.0 + alpha2 * r.delta_m * r.delta_m);
    fit.residual = std::max(fit.residual, std::abs(r.scaled - model) / model);
  }
  return fit;
}

struct ModalityRow {
  double delta_m_est = 0.0;
  int n_modes = 0;
  double peak_phi = 0.0;
  double std_dev = 0.0;
};

// Mismatched likelihood F(phi | theta; delta_m_est, delta_m) for each
// estimate: number of local maxima, global peak location, and width.
inline std::vector<ModalityRow> modality_scan(int j, double delta_m,
                                              const std::vector<double>& delta_m_est_values,
                                              double theta, const PhiGrid& grid,
                                              int threads = 0) {
  if (delta_m_est_values.empty())
    throw std::invalid_argument("modality_scan: estimate list must be non-empty");
  KernelBank bank(grid);
  double dm_top = delta_m;
  for (const double v : delta_m_est_values) dm_top = std::max(dm_top, v);
  {
    const MixtureWeights widest = build_mixture(StatePrep{j, 0.0, dm_top});
    std::vector<std::pair<int, int>> keys;
    for (const auto& e : widest.entries) keys.emplace_back(e.j, e.m);
    bank.prime(keys, threads);
  }
  const CondProbTable truth = table_for_prep(StatePrep{j, 0.0, delta_m}, bank, 1);
  std::vector<ModalityRow> rows(delta_m_est_values.size());
  parallel_for(delta_m_est_values.size(), threads, [&](std::size_t i) {
    const CondProbTable inference =
        table_for_prep(StatePrep{j, 0.0, delta_m_est_values[i]}, bank, 1);
    const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&inference, &truth, theta});
    rows[i] = ModalityRow{delta_m_est_values[i], static_cast<int>(local_maxima(f).size()),
                          f.grid.points[static_cast<std::size_t>(argmax_index(f))], phase_std(f)};
  });
  return rows;
}

// Resolution as a function of delta_j with everything else fixed. Backs the
// claim that the reconstruction does not care about total-number noise.
inline std::vector<std::pair<double, double>> delta_j_sensitivity(
    const StatePrep& prep, const std::vector<double>& delta_j_values, const PhiGrid& grid,
    int threads = 0) {
  std::vector<std::pair<double, double>> out(delta_j_values.size());
  KernelBank bank(grid);
  for (std::size_t i = 0; i < delta_j_values.size(); ++i) {
    const StatePrep varied{prep.j_mean, delta_j_values[i], prep.delta_m};
    out[i] = {delta_j_values[i], delta_phi_infinity(varied, 0.0, 5.0, bank, threads)};
  }
  return out;
}

}  // namespace fockphase
