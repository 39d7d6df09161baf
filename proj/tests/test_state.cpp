#include <catch2/catch.hpp>

#include <cmath>
#include <cstring>

#include "fockphase/state.hpp"

using namespace fockphase;

TEST_CASE("perfect preparation collapses to a single component") {
  const MixtureWeights w = build_mixture(StatePrep{10, 0.0, 0.0});
  REQUIRE(w.entries.size() == 1);
  REQUIRE(w.entries[0].j == 10);
  REQUIRE(w.entries[0].m == 0);
  REQUIRE(w.entries[0].weight == 1.0);
  REQUIRE(marginal_m_std(w) == 0.0);
}

TEST_CASE("delta_m = 1 mixture: support, symmetry, normalization") {
  const MixtureWeights w = build_mixture(StatePrep{10, 0.0, 1.0});
  REQUIRE(w.entries.size() == 11);  // m in [-5, 5]
  REQUIRE(w.m_cap == 5);
  double sum = 0.0;
  double w0 = 0.0, w1p = 0.0, w1m = 0.0;
  for (const auto& e : w.entries) {
    REQUIRE(e.j == 10);
    REQUIRE(std::abs(e.m) <= 5);
    sum += e.weight;
    if (e.m == 0) w0 = e.weight;
    if (e.m == 1) w1p = e.weight;
    if (e.m == -1) w1m = e.weight;
  }
  REQUIRE(sum == Approx(1.0).margin(1e-12));
  REQUIRE(w1p == w1m);  // mirror weights are bitwise identical
  REQUIRE(w1p / w0 == Approx(std::exp(-0.5)).margin(1e-15));
}

TEST_CASE("product weight matches an independent brute-force sum") {
  const MixtureWeights w = build_mixture(StatePrep{10, 3.0, 3.0});
  double got = 0.0;
  for (const auto& e : w.entries)
    if (e.j == 10 && e.m == 0) got = e.weight;

  double total = 0.0, target = 0.0;
  for (int jp = -2; jp <= 22; ++jp) {
    if (jp < 0) continue;
    const int mc = std::min(jp, 13);  // ceil(4 * 3) + 1
    for (int m = -mc; m <= mc; ++m) {
      const double v =
          std::exp(-0.5 * (jp - 10.0) * (jp - 10.0) / 9.0) * std::exp(-0.5 * m * m / 9.0);
      total += v;
      if (jp == 10 && m == 0) target = v;
    }
  }
  REQUIRE(got == Approx(target / total).margin(1e-14));
  for (const auto& e : w.entries) {
    REQUIRE(std::abs(e.m) <= e.j);
    REQUIRE(e.weight >= 0.0);
  }
}

TEST_CASE("m marginal moments") {
  // truncation at the 4-sigma window shrinks the variance slightly below 1
  const MixtureWeights w1 = build_mixture(StatePrep{10, 0.0, 1.0});
  const double s1 = marginal_m_std(w1);
  REQUIRE(s1 > 0.9);
  REQUIRE(s1 < 1.0);
  // independent brute force over the same window
  double z = 0.0, m2 = 0.0;
  for (int m = -5; m <= 5; ++m) {
    const double v = std::exp(-0.5 * m * m);
    z += v;
    m2 += m * m * v;
  }
  REQUIRE(s1 == Approx(std::sqrt(m2 / z)).margin(1e-12));

  REQUIRE(marginal_m_std(build_mixture(StatePrep{40, 0.0, 2.0})) == Approx(2.0).epsilon(0.02));
  REQUIRE(marginal_m_mean(w1) == 0.0);
  REQUIRE(marginal_m_mean(build_mixture(StatePrep{12, 3.0, 1.0})) == 0.0);
}

TEST_CASE("j marginal mean stays at j_mean") {
  const MixtureWeights w = build_mixture(StatePrep{12, 3.0, 1.0});
  REQUIRE(marginal_j_mean(w) == Approx(12.0).margin(0.01));
}

TEST_CASE("mixture construction is bitwise deterministic") {
  const MixtureWeights a = build_mixture(StatePrep{10, 3.0, 2.5});
  const MixtureWeights b = build_mixture(StatePrep{10, 3.0, 2.5});
  REQUIRE(a.entries.size() == b.entries.size());
  REQUIRE(std::memcmp(a.entries.data(), b.entries.data(),
                      a.entries.size() * sizeof(MixtureEntry)) == 0);
}

TEST_CASE("state preparation validation") {
  REQUIRE_THROWS_AS(build_mixture(StatePrep{0, 0.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(build_mixture(StatePrep{5, -1.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(build_mixture(StatePrep{5, 0.0, -0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(build_mixture(StatePrep{5, std::nan(""), 0.0}), std::invalid_argument);
}
