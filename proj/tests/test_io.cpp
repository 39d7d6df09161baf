#include <catch2/catch.hpp>

#include <cstdlib>
#include <sstream>
#include <string>

#include "fockphase/io.hpp"

using namespace fockphase;

TEST_CASE("doubles are written with full round-trip precision") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-17, 123456.789012345678}) {
    const std::string s = format_double(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("conditional-probability CSV layout") {
  const PhiGrid grid = PhiGrid::uniform(64);
  const CondProbTable t = table_for_prep(StatePrep{2, 0.0, 0.0}, grid);
  Provenance prov;
  prov.subcommand = "condprob";
  prov.add("j", 2);
  std::ostringstream os;
  write_cond_prob_csv(os, t, prov);
  const std::string text = os.str();

  std::istringstream is(text);
  std::string line;
  int comments = 0, rows = 0;
  std::string header;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') {
      ++comments;
      continue;
    }
    if (header.empty()) {
      header = line;
      continue;
    }
    ++rows;
  }
  REQUIRE(header == "phi,m=-2,m=-1,m=0,m=1,m=2");
  REQUIRE(rows == 64);
  REQUIRE(comments >= 3);

  // identical inputs produce identical bytes
  std::ostringstream os2;
  write_cond_prob_csv(os2, t, prov);
  REQUIRE(os2.str() == text);
}

TEST_CASE("distribution CSV round trip") {
  const PhiGrid grid = PhiGrid::uniform(32);
  const PhaseDistribution prior = uniform_prior(grid);
  Provenance prov;
  prov.subcommand = "test";
  std::ostringstream os;
  write_distribution_csv(os, prior, prov);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);  // # fockphase
  std::getline(is, line);  // # subcommand
  std::getline(is, line);  // header
  REQUIRE(line == "phi,density");
  std::getline(is, line);
  const auto comma = line.find(',');
  REQUIRE(std::strtod(line.substr(0, comma).c_str(), nullptr) == grid.points[0]);
  REQUIRE(std::strtod(line.substr(comma + 1).c_str(), nullptr) == prior.density[0]);
}

TEST_CASE("run JSON carries seed, record and summaries") {
  const PhiGrid grid = PhiGrid::uniform(256);
  const StatePrep prep{10, 0.0, 1.0};
  const ReconstructionRun run = run_reconstruction(prep, prep, 0.0, 12, 5, grid);
  Provenance prov;
  prov.subcommand = "reconstruct";
  prov.add("seed", std::uint64_t{5});
  const auto path = std::filesystem::temp_directory_path() / "fockphase_run_test.json";
  write_run_json(path, run, prov, 3);
  std::ifstream in(path);
  const ordered_json j = ordered_json::parse(in);
  REQUIRE(j["seed"] == 5);
  REQUIRE(j["n"] == 12);
  REQUIRE(j["record"].size() == 12);
  REQUIRE(std::string(j["rng"]) == std::string(kRngAlgorithm));
  // stride 3 over 12 steps keeps steps 1, 4, 7, 10 and the final one
  REQUIRE(j["posteriors"].size() == 5);
  REQUIRE(j["posteriors"].back()["step"] == 12);
  std::filesystem::remove(path);
}

TEST_CASE("sweep CSV and fit JSON") {
  std::vector<SweepRow> rows{SweepRow{10, 0.0, 0.09, 0.9}, SweepRow{10, 1.0, 0.25, 2.5}};
  Provenance prov;
  prov.subcommand = "sweep";
  std::ostringstream os;
  write_sweep_csv(os, rows, prov);
  REQUIRE(os.str().find("J,delta_m,delta_phi_inf,scaled\n") != std::string::npos);
  REQUIRE(os.str().find("10,0,0.089999999999999997,0.90000000000000002") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "fockphase_fit_test.json";
  write_fit_json(path, AlphaFit{2.01, 0.08, 52}, prov);
  std::ifstream in(path);
  const ordered_json j = ordered_json::parse(in);
  REQUIRE(j["alpha"] == Approx(2.01));
  REQUIRE(j["n_rows"] == 52);
  std::filesystem::remove(path);
}

TEST_CASE("modality JSON flags the optimal row") {
  std::vector<ModalityRow> rows{ModalityRow{1.0, 2, 0.1, 0.66}, ModalityRow{2.0, 1, 0.0, 0.63},
                                ModalityRow{3.0, 1, 0.0, 0.65}};
  Provenance prov;
  prov.subcommand = "mismatch";
  const auto path = std::filesystem::temp_directory_path() / "fockphase_modality_test.json";
  write_modality_json(path, rows, prov);
  std::ifstream in(path);
  const ordered_json j = ordered_json::parse(in);
  REQUIRE(j["rows"].size() == 3);
  REQUIRE(j["rows"][0]["optimal"] == false);
  REQUIRE(j["rows"][1]["optimal"] == true);
  REQUIRE(j["rows"][2]["optimal"] == false);
  std::filesystem::remove(path);
}
