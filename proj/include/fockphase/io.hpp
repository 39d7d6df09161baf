#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fockphase/analysis.hpp"
#include "fockphase/bayes.hpp"
#include "fockphase/condprob.hpp"
#include "fockphase/montecarlo.hpp"
#include "fockphase/version.hpp"

namespace fockphase {

using ordered_json = nlohmann::ordered_json;

// Full round-trip precision, locale independent.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// What went into a file: tool version plus the physics/seed/grid parameters.
// Execution-only knobs (thread count, paths) are excluded on purpose so that
// reruns produce byte-identical output.
struct Provenance {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> parameters;

  void add(const std::string& key, const std::string& value) { parameters.emplace_back(key, value); }
  void add(const std::string& key, double value) { parameters.emplace_back(key, format_double(value)); }
  void add(const std::string& key, int value) { parameters.emplace_back(key, std::to_string(value)); }
  void add(const std::string& key, std::uint64_t value) {
    parameters.emplace_back(key, std::to_string(value));
  }
};

namespace detail {

inline void write_provenance_comments(std::ostream& os, const Provenance& prov) {
  os << "# fockphase " << FOCKPHASE_VERSION << "\n";
  os << "# subcommand=" << prov.subcommand << "\n";
  for (const auto& [k, v] : prov.parameters) os << "# " << k << "=" << v << "\n";
}

inline ordered_json provenance_json(const Provenance& prov) {
  ordered_json j;
  j["tool"] = "fockphase";
  j["version"] = FOCKPHASE_VERSION;
  j["subcommand"] = prov.subcommand;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : prov.parameters) params[k] = v;
  j["parameters"] = params;
  return j;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path.string());
  return os;
}

}  // namespace detail

// Header row `phi,m=-mmax,...,m=+mmax`, one row per grid point.
inline void write_cond_prob_csv(std::ostream& os, const CondProbTable& table,
                                const Provenance& prov) {
  detail::write_provenance_comments(os, prov);
  os << "phi";
  for (int m = -table.m_max; m <= table.m_max; ++m) os << ",m=" << m;
  os << "\n";
  for (int i = 0; i < table.size(); ++i) {
    os << format_double(table.grid.points[static_cast<std::size_t>(i)]);
    for (int m = -table.m_max; m <= table.m_max; ++m)
      os << ',' << format_double(table.p(m + table.m_max, i));
    os << "\n";
  }
}

inline void write_cond_prob_csv(const std::filesystem::path& path, const CondProbTable& table,
                                const Provenance& prov) {
  auto os = detail::open_out(path);
  write_cond_prob_csv(os, table, prov);
}

inline void write_distribution_csv(std::ostream& os, const PhaseDistribution& dist,
                                   const Provenance& prov) {
  detail::write_provenance_comments(os, prov);
  os << "phi,density\n";
  for (std::size_t i = 0; i < dist.density.size(); ++i)
    os << format_double(dist.grid.points[i]) << ',' << format_double(dist.density[i]) << "\n";
}

inline void write_distribution_csv(const std::filesystem::path& path,
                                   const PhaseDistribution& dist, const Provenance& prov) {
  auto os = detail::open_out(path);
  write_distribution_csv(os, dist, prov);
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                            const Provenance& prov) {
  detail::write_provenance_comments(os, prov);
  os << "J,delta_m,delta_phi_inf,scaled\n";
  for (const auto& r : rows)
    os << r.j << ',' << format_double(r.delta_m) << ',' << format_double(r.delta_phi_inf) << ','
       << format_double(r.scaled) << "\n";
}

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows,
                            const Provenance& prov) {
  auto os = detail::open_out(path);
  write_sweep_csv(os, rows, prov);
}

inline void write_fit_json(const std::filesystem::path& path, const AlphaFit& fit,
                           const Provenance& prov) {
  ordered_json j = detail::provenance_json(prov);
  j["alpha"] = fit.alpha;
  j["residual"] = fit.residual;
  j["n_rows"] = fit.n_rows;
  auto os = detail::open_out(path);
  os << j.dump(2) << "\n";
}

// Run document: seed, generator, parameters, the record, and per-step
// posterior summaries. snapshot_stride > 1 decimates the summaries for long
// runs (the final step is always kept).
inline void write_run_json(const std::filesystem::path& path, const ReconstructionRun& run,
                           const Provenance& prov, int snapshot_stride = 1) {
  if (snapshot_stride < 1) throw std::invalid_argument("write_run_json: stride must be >= 1");
  ordered_json j = detail::provenance_json(prov);
  j["rng"] = kRngAlgorithm;
  j["seed"] = run.seed;
  j["theta"] = run.theta;
  j["n"] = run.n;
  j["grid_points"] = run.posteriors.empty() ? 0 : run.posteriors.front().grid.size();
  j["snapshot_stride"] = snapshot_stride;
  j["record"] = run.record;
  ordered_json snaps = ordered_json::array();
  for (std::size_t k = 0; k < run.posteriors.size(); ++k) {
    if (k % static_cast<std::size_t>(snapshot_stride) != 0 && k + 1 != run.posteriors.size())
      continue;
    const auto& post = run.posteriors[k];
    ordered_json s;
    s["step"] = k + 1;
    s["m"] = run.record[k];
    s["mean"] = phase_mean(post);
    s["std"] = phase_std(post);
    s["argmax_phi"] = post.grid.points[static_cast<std::size_t>(argmax_index(post))];
    snaps.push_back(s);
  }
  j["posteriors"] = snaps;
  auto os = detail::open_out(path);
  os << j.dump(2) << "\n";
}

inline void write_modality_json(const std::filesystem::path& path,
                                const std::vector<ModalityRow>& rows, const Provenance& prov) {
  ordered_json j = detail::provenance_json(prov);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].std_dev < rows[best].std_dev) best = i;
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ordered_json r;
    r["delta_m_est"] = rows[i].delta_m_est;
    r["n_modes"] = rows[i].n_modes;
    r["argmax_phi"] = rows[i].peak_phi;
    r["std"] = rows[i].std_dev;
    r["optimal"] = (i == best);
    arr.push_back(r);
  }
  j["rows"] = arr;
  auto os = detail::open_out(path);
  os << j.dump(2) << "\n";
}

}  // namespace fockphase
