// Command-line front end: conditional-probability tables, single phase
// reconstructions, resolution sweeps, mismatch scans, and a self-check.
// Every subcommand is deterministic for a fixed flag set; files embed the
// generating parameters.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fockphase/acceptance.hpp"
#include "fockphase/analysis.hpp"
#include "fockphase/io.hpp"
#include "fockphase/montecarlo.hpp"
#include "fockphase/version.hpp"

namespace fs = std::filesystem;
using namespace fockphase;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;

// "a,b,c" or "start:stop:step" (inclusive endpoints).
std::vector<double> parse_values(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':')
      throw std::invalid_argument(flag + ": expected start:stop:step, got '" + text + "'");
    if (!(step > 0.0) || stop < start)
      throw std::invalid_argument(flag + ": range must have step > 0 and stop >= start");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) out.push_back(start + k * step);
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument(flag + ": bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(flag + ": empty value list");
  return out;
}

std::vector<int> parse_int_values(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (const double v : parse_values(text, flag)) {
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9) throw std::invalid_argument(flag + ": expected integers");
    out.push_back(i);
  }
  return out;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FOCKPHASE_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string num_tag(double v) {
  std::ostringstream os;
  os << v;
  std::string s = os.str();
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

struct CommonOpts {
  int grid_points = 2048;
  int threads = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--grid-points", opts.grid_points, "Phase grid size")->check(CLI::Range(16, 1 << 20));
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)")
      ->check(CLI::Range(0, 4096));
  cmd->add_option("-o,--out-dir", opts.out_dir,
                  "Output directory (default: $FOCKPHASE_OUT_DIR or .)");
}

int run_condprob(int j, double dj, double dm, const std::string& panels, const CommonOpts& opts,
                 const std::string& format) {
  if (format != "csv") throw std::invalid_argument("--format: only 'csv' is supported here");
  const fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);
  const PhiGrid grid = PhiGrid::uniform(opts.grid_points);
  KernelBank bank(grid);
  std::vector<StatePrep> preps;
  if (!panels.empty()) {
    if (panels != "paper") throw std::invalid_argument("--panels: unknown preset '" + panels + "'");
    preps = panel_preset_preps();
  } else {
    preps.push_back(StatePrep{j, dj, dm});
  }
  for (const auto& prep : preps) {
    const CondProbTable table = table_for_prep(prep, bank, opts.threads);
    Provenance prov;
    prov.subcommand = "condprob";
    prov.add("j", prep.j_mean);
    prov.add("delta_j", prep.delta_j);
    prov.add("delta_m", prep.delta_m);
    prov.add("grid_points", opts.grid_points);
    std::ostringstream name;
    name << "condprob_J" << prep.j_mean << "_dJ" << num_tag(prep.delta_j) << "_dm"
         << num_tag(prep.delta_m) << ".csv";
    const fs::path path = dir / name.str();
    write_cond_prob_csv(path, table, prov);
    std::cout << path.string() << "\n";
  }
  return 0;
}

int run_reconstruct(int j, double dj, double dm, double dmest, double theta, int n,
                    std::uint64_t seed, int stride, bool densities, const CommonOpts& opts) {
  const fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);
  const PhiGrid grid = PhiGrid::uniform(opts.grid_points);
  const StatePrep prep_true{j, dj, dm};
  const StatePrep prep_inf{j, dj, dmest};
  const ReconstructionRun run =
      run_reconstruction(prep_true, prep_inf, theta, n, seed, grid, opts.threads);

  Provenance prov;
  prov.subcommand = "reconstruct";
  prov.add("j", j);
  prov.add("delta_j", dj);
  prov.add("delta_m", dm);
  prov.add("delta_m_est", dmest);
  prov.add("theta", theta);
  prov.add("n", n);
  prov.add("seed", seed);
  prov.add("grid_points", opts.grid_points);
  std::ostringstream name;
  name << "run_J" << j << "_dm" << num_tag(dm) << "_n" << n << "_seed" << seed << ".json";
  const fs::path path = dir / name.str();
  write_run_json(path, run, prov, stride);
  std::cout << path.string() << "\n";
  if (densities) {
    for (std::size_t k = 0; k < run.posteriors.size(); ++k) {
      if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != run.posteriors.size()) continue;
      Provenance pprov = prov;
      pprov.add("step", static_cast<int>(k + 1));
      std::ostringstream pname;
      pname << "run_J" << j << "_dm" << num_tag(dm) << "_n" << n << "_seed" << seed << "_step"
            << (k + 1) << ".csv";
      const fs::path ppath = dir / pname.str();
      write_distribution_csv(ppath, run.posteriors[k], pprov);
      std::cout << ppath.string() << "\n";
    }
  }
  return 0;
}

int run_sweep(const std::string& j_text, const std::string& dm_text, double theta, double n,
              const CommonOpts& opts) {
  const std::vector<int> js = parse_int_values(j_text, "--j");
  const std::vector<double> dms = parse_values(dm_text, "--dm");
  for (const int j : js)
    if (j < 1) throw std::invalid_argument("--j: values must be >= 1");
  for (const double dm : dms)
    if (dm < 0.0) throw std::invalid_argument("--dm: values must be >= 0");
  if (!(n > 0.0)) throw std::invalid_argument("--n: must be positive");
  const fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);
  const PhiGrid grid = PhiGrid::uniform(opts.grid_points);
  const std::vector<SweepRow> rows = universal_sweep(js, dms, grid, opts.threads, theta, n);

  Provenance prov;
  prov.subcommand = "sweep";
  prov.add("j", j_text);
  prov.add("delta_m", dm_text);
  prov.add("theta", theta);
  prov.add("n", n);
  prov.add("grid_points", opts.grid_points);
  const fs::path csv_path = dir / "sweep.csv";
  write_sweep_csv(csv_path, rows, prov);
  std::cout << csv_path.string() << "\n";

  bool fit_ok = true;
  AlphaFit fit;
  try {
    fit = fit_alpha(rows);
  } catch (const std::invalid_argument& err) {
    fit_ok = false;
    std::cerr << "warning: alpha fit skipped: " << err.what() << "\n";
  }
  if (fit_ok) {
    const fs::path fit_path = dir / "sweep_fit.json";
    write_fit_json(fit_path, fit, prov);
    std::cout << fit_path.string() << "\n";
  }
  return 0;
}

int run_mismatch(int j, double dm, const std::string& dmest_text, double theta,
                 const CommonOpts& opts) {
  const std::vector<double> dmests = parse_values(dmest_text, "--dmest");
  for (const double v : dmests)
    if (v < 0.0) throw std::invalid_argument("--dmest: values must be >= 0");
  const fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);
  const PhiGrid grid = PhiGrid::uniform(opts.grid_points);
  const std::vector<ModalityRow> rows = modality_scan(j, dm, dmests, theta, grid, opts.threads);

  Provenance prov;
  prov.subcommand = "mismatch";
  prov.add("j", j);
  prov.add("delta_m", dm);
  prov.add("delta_m_est", dmest_text);
  prov.add("theta", theta);
  prov.add("grid_points", opts.grid_points);

  // per-estimate likelihood curves
  KernelBank bank(grid);
  const CondProbTable truth = table_for_prep(StatePrep{j, 0.0, dm}, bank, opts.threads);
  for (const double dmest : dmests) {
    const CondProbTable inference = table_for_prep(StatePrep{j, 0.0, dmest}, bank, opts.threads);
    const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&inference, &truth, theta});
    Provenance fprov = prov;
    fprov.add("this_delta_m_est", dmest);
    std::ostringstream name;
    name << "likelihood_J" << j << "_dm" << num_tag(dm) << "_dmest" << num_tag(dmest) << ".csv";
    const fs::path path = dir / name.str();
    write_distribution_csv(path, f, fprov);
    std::cout << path.string() << "\n";
  }
  std::ostringstream sname;
  sname << "mismatch_J" << j << "_dm" << num_tag(dm) << ".json";
  const fs::path spath = dir / sname.str();
  write_modality_json(spath, rows, prov);
  std::cout << spath.string() << "\n";
  return 0;
}

int run_verify(int threads, bool full) {
  std::vector<CriterionResult> results;
  results.push_back(criterion_oracle_equivalence());
  results.push_back(criterion_normalization(threads));
  results.push_back(criterion_heisenberg_plateau(threads));
  results.push_back(criterion_universal_collapse(threads));
  if (full) {
    results.push_back(criterion_width_law(threads));
    results.push_back(criterion_delta_j_insensitivity(threads));
    results.push_back(criterion_mismatch_phenomenology(threads));
    results.push_back(criterion_monte_carlo(threads));
  }
  bool all = true;
  for (const auto& r : results) {
    std::cout << "criterion " << r.id << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL")
              << " -- " << r.detail << "\n";
    if (!r.pass) all = false;
  }
  return all ? 0 : kExitContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian phase reconstruction for two-mode number-state interferometry"};
  app.set_version_flag("--version", FOCKPHASE_VERSION);
  app.require_subcommand(1);

  // condprob
  auto* condprob = app.add_subcommand("condprob", "Write a conditional-probability table CSV");
  int cp_j = 10;
  double cp_dj = 0.0, cp_dm = 0.0;
  std::string cp_panels, cp_format = "csv";
  CommonOpts cp_opts;
  condprob->add_option("--j", cp_j, "Mean total angular momentum (N = 2J)")->check(CLI::Range(1, 100000));
  condprob->add_option("--dj", cp_dj, "Total angular momentum spread")->check(CLI::NonNegativeNumber);
  condprob->add_option("--dm", cp_dm, "Number-imbalance spread")->check(CLI::NonNegativeNumber);
  condprob->add_option("--panels", cp_panels, "Preset 'paper': the six (dJ,dm) panels at J=10");
  condprob->add_option("--format", cp_format, "Output format (csv)");
  add_common(condprob, cp_opts);

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "Simulate one measurement record and its posterior chain");
  int rc_j = 10, rc_n = 30, rc_stride = 1;
  double rc_dj = 0.0, rc_dm = 0.0, rc_dmest = -1.0, rc_theta = 0.0;
  std::uint64_t rc_seed = 42;
  bool rc_densities = false;
  CommonOpts rc_opts;
  reconstruct->add_option("--j", rc_j)->check(CLI::Range(1, 100000));
  reconstruct->add_option("--dj", rc_dj)->check(CLI::NonNegativeNumber);
  reconstruct->add_option("--dm", rc_dm)->check(CLI::NonNegativeNumber);
  reconstruct->add_option("--dmest", rc_dmest, "Inference-side delta_m (default: matched)");
  reconstruct->add_option("--theta", rc_theta, "True phase");
  reconstruct->add_option("--n", rc_n, "Record length")->check(CLI::Range(1, 1000000));
  reconstruct->add_option("--seed", rc_seed, "Master seed");
  reconstruct->add_option("--snapshot-stride", rc_stride, "Keep every k-th posterior summary")
      ->check(CLI::Range(1, 1000000));
  reconstruct->add_flag("--densities", rc_densities, "Also write per-step density CSVs");
  add_common(reconstruct, rc_opts);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Resolution sweep over (J, delta_m) plus alpha fit");
  std::string sw_j = "10,20,40,80", sw_dm = "0:3:0.25";
  double sw_theta = 0.0, sw_n = 5.0;
  CommonOpts sw_opts;
  sweep->add_option("--j", sw_j, "J list, e.g. 10,20,40,80");
  sweep->add_option("--dm", sw_dm, "delta_m list or start:stop:step");
  sweep->add_option("--theta", sw_theta);
  sweep->add_option("--n", sw_n, "Likelihood power used for the resolution");
  add_common(sweep, sw_opts);

  // mismatch
  auto* mismatch = app.add_subcommand("mismatch", "Likelihood modality versus the delta_m estimate");
  int mm_j = 20;
  double mm_dm = 2.0, mm_theta = 0.0;
  std::string mm_dmest = "0.5:4:0.25";
  CommonOpts mm_opts;
  mismatch->add_option("--j", mm_j)->check(CLI::Range(1, 100000));
  mismatch->add_option("--dm", mm_dm, "True delta_m")->check(CLI::NonNegativeNumber);
  mismatch->add_option("--dmest", mm_dmest, "Estimates, list or start:stop:step");
  mismatch->add_option("--theta", mm_theta);
  add_common(mismatch, mm_opts);

  // verify
  auto* verify = app.add_subcommand("verify", "Run the oracle and invariant suites");
  int vf_threads = 0;
  bool vf_full = false;
  verify->add_option("--threads", vf_threads)->check(CLI::Range(0, 4096));
  verify->add_flag("--full", vf_full, "Also run the width-law, mismatch and Monte Carlo suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (condprob->parsed())
      return run_condprob(cp_j, cp_dj, cp_dm, cp_panels, cp_opts, cp_format);
    if (reconstruct->parsed()) {
      if (rc_dmest < 0.0) rc_dmest = rc_dm;
      return run_reconstruct(rc_j, rc_dj, rc_dm, rc_dmest, rc_theta, rc_n, rc_seed, rc_stride,
                             rc_densities, rc_opts);
    }
    if (sweep->parsed()) return run_sweep(sw_j, sw_dm, sw_theta, sw_n, sw_opts);
    if (mismatch->parsed()) return run_mismatch(mm_j, mm_dm, mm_dmest, mm_theta, mm_opts);
    if (verify->parsed()) return run_verify(vf_threads, vf_full);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const numerical_contract_error& err) {
    std::cerr << "numerical contract violation: " << err.what() << "\n";
    return kExitContract;
  } catch (const model_contradiction_error& err) {
    std::cerr << "model contradiction: " << err.what() << "\n";
    return kExitContract;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
