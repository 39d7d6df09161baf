#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fockphase/bayes.hpp"
#include "fockphase/condprob.hpp"
#include "fockphase/parallel.hpp"

namespace fockphase {

// Name recorded in every output file that contains sampled data.
inline constexpr const char* kRngAlgorithm = "mt19937_64/seed_seq(master,stream)/53-bit";

// Deterministic per-run stream: mt19937_64 seeded through std::seed_seq from
// the master seed and a stream counter. Uniform doubles take the top 53 bits
// so the draw sequence is pinned by the standard, not by the platform's
// distribution implementation.
class StreamRng {
 public:
  StreamRng(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Draws one outcome by inverse CDF over the table column nearest theta.
inline int sample_outcome(const CondProbTable& table, double theta, StreamRng& rng) {
  const int idx = table.grid.snap_index(theta);
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int m = -table.m_max; m <= table.m_max; ++m) {
    cum += table.p(m + table.m_max, idx);
    if (u < cum) return m;
  }
  return table.m_max;  // u fell in the trailing rounding gap
}

struct ReconstructionRun {
  std::uint64_t seed = 0;
  double theta = 0.0;
  int n = 0;
  StatePrep prep_true;
  StatePrep prep_inference;
  std::vector<int> record;
  std::vector<PhaseDistribution> posteriors;
};

namespace detail {

inline ReconstructionRun run_with_tables(const CondProbTable& truth,
                                         const CondProbTable& inference, double theta, int n,
                                         std::uint64_t master, std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument("run_reconstruction: n must be >= 1");
  if (truth.grid != inference.grid)
    throw std::invalid_argument("run_reconstruction: tables must share one grid");
  ReconstructionRun run;
  run.seed = master;
  run.theta = theta;
  run.n = n;
  run.prep_true = truth.prep;
  run.prep_inference = inference.prep;
  run.record.reserve(static_cast<std::size_t>(n));
  run.posteriors.reserve(static_cast<std::size_t>(n));
  StreamRng rng(master, stream);
  PhaseDistribution post = uniform_prior(truth.grid);
  for (int k = 0; k < n; ++k) {
    const int m = sample_outcome(truth, theta, rng);
    run.record.push_back(m);
    post = bayes_update(post, m, inference);
    run.posteriors.push_back(post);
  }
  return run;
}

// Final posterior std only; used by ensembles where snapshots would be waste.
inline double final_std_with_tables(const CondProbTable& truth, const CondProbTable& inference,
                                    double theta, int n, std::uint64_t master,
                                    std::uint64_t stream) {
  StreamRng rng(master, stream);
  PhaseDistribution post = uniform_prior(truth.grid);
  for (int k = 0; k < n; ++k)
    post = bayes_update(post, sample_outcome(truth, theta, rng), inference);
  return phase_std(post);
}

}  // namespace detail

inline ReconstructionRun run_reconstruction(const CondProbTable& truth,
                                            const CondProbTable& inference, double theta, int n,
                                            std::uint64_t seed) {
  return detail::run_with_tables(truth, inference, theta, n, seed, 0);
}

// Samples n outcomes from the truth table at theta and chains Bayes updates
// with the inference table, keeping every posterior snapshot. Matching preps
// give the standard reconstruction; differing preps feed the mismatch
// analysis at finite n.
inline ReconstructionRun run_reconstruction(const StatePrep& prep_true,
                                            const StatePrep& prep_inference, double theta, int n,
                                            std::uint64_t seed, const PhiGrid& grid,
                                            int threads = 0) {
  KernelBank bank(grid);
  const CondProbTable truth = table_for_prep(prep_true, bank, threads);
  if (prep_true.j_mean == prep_inference.j_mean && prep_true.delta_j == prep_inference.delta_j &&
      prep_true.delta_m == prep_inference.delta_m)
    return detail::run_with_tables(truth, truth, theta, n, seed, 0);
  const CondProbTable inference = table_for_prep(prep_inference, bank, threads);
  return detail::run_with_tables(truth, inference, theta, n, seed, 0);
}

struct EnsembleStats {
  double mean_std = 0.0;
  double std_error = 0.0;
  int n_runs = 0;
};

// Mean final-posterior standard deviation over n_runs independent matched
// reconstructions, with per-run streams derived from the master seed by
// counter. Runs execute in parallel; the reduction order is fixed.
inline EnsembleStats ensemble_std(const StatePrep& prep, double theta, int n, int n_runs,
                                  std::uint64_t seed, const PhiGrid& grid, int threads = 0) {
  if (n_runs < 2) throw std::invalid_argument("ensemble_std: n_runs must be >= 2");
  if (n < 1) throw std::invalid_argument("ensemble_std: n must be >= 1");
  const CondProbTable table = table_for_prep(prep, grid, threads);
  std::vector<double> stds(static_cast<std::size_t>(n_runs), 0.0);
  parallel_for(static_cast<std::size_t>(n_runs), threads, [&](std::size_t i) {
    stds[i] = detail::final_std_with_tables(table, table, theta, n, seed,
                                            static_cast<std::uint64_t>(i));
  });
  double mean = 0.0;
  for (const double s : stds) mean += s;
  mean /= n_runs;
  double ssq = 0.0;
  for (const double s : stds) ssq += (s - mean) * (s - mean);
  const double sample_var = ssq / (n_runs - 1);
  return EnsembleStats{mean, std::sqrt(sample_var / n_runs), n_runs};
}

}  // namespace fockphase
