#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "fockphase/bayes.hpp"

using namespace fockphase;

namespace {

double integral(const PhaseDistribution& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < d.density.size(); ++i)
    acc += 0.5 * (d.grid.points[i + 1] - d.grid.points[i]) * (d.density[i] + d.density[i + 1]);
  return acc;
}

// table with a single constant row: a likelihood that carries no phase
// information at all
CondProbTable flat_table(const PhiGrid& grid) {
  CondProbTable t;
  t.grid = grid;
  t.m_max = 0;
  t.p = TableMatrix::Ones(1, grid.size());
  t.prep = StatePrep{1, 0.0, 0.0};
  return t;
}

}  // namespace

TEST_CASE("uniform prior") {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const PhaseDistribution prior = uniform_prior(grid);
  for (std::size_t i = 0; i < prior.density.size(); i += 97)
    REQUIRE(prior.density[i] == Approx(1.0 / std::numbers::pi).margin(1e-12));
  REQUIRE(integral(prior) == Approx(1.0).margin(1e-9));
  REQUIRE(phase_std(prior) == Approx(std::numbers::pi / std::sqrt(12.0)).margin(1e-4));
  REQUIRE(std::abs(phase_mean(prior)) < 1e-12);
}

TEST_CASE("updating with a flat likelihood returns the prior") {
  const PhiGrid grid = PhiGrid::uniform(512);
  const PhaseDistribution prior = uniform_prior(grid);
  const PhaseDistribution post = bayes_update(prior, 0, flat_table(grid));
  for (std::size_t i = 0; i < post.density.size(); ++i)
    REQUIRE(post.density[i] == Approx(prior.density[i]).margin(1e-15));
}

TEST_CASE("posterior from a single m = 0 outcome is peaked at zero") {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const CondProbTable t = table_for_prep(StatePrep{10, 0.0, 0.0}, grid);
  const PhaseDistribution post = bayes_update(uniform_prior(grid), 0, t);
  REQUIRE(integral(post) == Approx(1.0).margin(1e-9));
  const int am = argmax_index(post);
  REQUIRE(std::abs(post.grid.points[am]) <= grid.spacing);
  // central peak of width ~1/j (the full std is larger: the oscillatory
  // wings carry weight until more measurements suppress them)
  double half = 0.0;
  for (int i = grid.snap_index(0.0); i < grid.size(); ++i)
    if (post.density[i] < 0.5 * post.density[am]) {
      half = grid.points[i];
      break;
    }
  REQUIRE(2.0 * half > 0.5 / 10.0);
  REQUIRE(2.0 * half < 3.0 / 10.0);
}

TEST_CASE("update order does not matter") {
  const PhiGrid grid = PhiGrid::uniform(1024);
  const CondProbTable t = table_for_prep(StatePrep{10, 0.0, 1.0}, grid);
  const PhaseDistribution prior = uniform_prior(grid);
  const PhaseDistribution a = bayes_update(bayes_update(bayes_update(prior, 0, t), 1, t), -2, t);
  const PhaseDistribution b = bayes_update(bayes_update(bayes_update(prior, -2, t), 0, t), 1, t);
  for (std::size_t i = 0; i < a.density.size(); ++i)
    REQUIRE(a.density[i] == Approx(b.density[i]).margin(1e-12));
}

TEST_CASE("two updates equal one update with the product likelihood") {
  const PhiGrid grid = PhiGrid::uniform(1024);
  const CondProbTable t = table_for_prep(StatePrep{10, 0.0, 1.0}, grid);
  const PhaseDistribution prior = uniform_prior(grid);
  const PhaseDistribution two = bayes_update(bayes_update(prior, 1, t), 2, t);
  // direct product, one renormalization
  PhaseDistribution direct{grid, std::vector<double>(prior.density.size())};
  for (std::size_t i = 0; i < direct.density.size(); ++i)
    direct.density[i] = prior.density[i] * t.prob(1, static_cast<int>(i)) *
                        t.prob(2, static_cast<int>(i));
  const double z = integral(direct);
  for (auto& v : direct.density) v /= z;
  for (std::size_t i = 0; i < direct.density.size(); i += 13)
    REQUIRE(two.density[i] == Approx(direct.density[i]).margin(1e-12));
}

TEST_CASE("impossible outcomes raise a model contradiction") {
  const PhiGrid grid = PhiGrid::uniform(256);
  CondProbTable t;
  t.grid = grid;
  t.m_max = 1;
  t.p = TableMatrix::Zero(3, grid.size());
  t.p.row(1).setOnes();  // all mass on m = 0 at every phase
  t.prep = StatePrep{1, 0.0, 0.0};
  const PhaseDistribution prior = uniform_prior(grid);
  REQUIRE_THROWS_AS(bayes_update(prior, 1, t), model_contradiction_error);
  REQUIRE_THROWS_AS(bayes_update(prior, 5, t), std::invalid_argument);
}

TEST_CASE("matched likelihood peaks at the snapped true phase") {
  const PhiGrid grid = PhiGrid::uniform(2048);
  KernelBank bank(grid);
  for (double dm : {0.0, 1.0}) {
    const CondProbTable t = table_for_prep(StatePrep{10, 0.0, dm}, bank);
    for (double theta : {0.0, 0.1, 0.3}) {
      const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&t, &t, theta});
      REQUIRE(integral(f) == Approx(1.0).margin(1e-9));
      // P(m|phi) is even in phi, so F carries the inherent +-theta
      // ambiguity of the null fringe; the argmax reports the positive one.
      REQUIRE(argmax_index(f) == grid.snap_index(theta));
      const int mirror = grid.size() - 1 - grid.snap_index(theta);
      REQUIRE(f.density[static_cast<std::size_t>(mirror)] ==
              f.density[static_cast<std::size_t>(argmax_index(f))]);
    }
  }
}

TEST_CASE("mismatched likelihood reproduces the bimodal/broadened regimes") {
  const PhiGrid grid = PhiGrid::uniform(2048);
  KernelBank bank(grid);
  const CondProbTable truth = table_for_prep(StatePrep{20, 0.0, 2.0}, bank);
  const CondProbTable narrow = table_for_prep(StatePrep{20, 0.0, 1.0}, bank);
  const CondProbTable wide = table_for_prep(StatePrep{20, 0.0, 3.0}, bank);
  const CondProbTable matched = table_for_prep(StatePrep{20, 0.0, 2.0}, bank);

  const PhaseDistribution f_narrow = asymptotic_likelihood(LikelihoodSpec{&narrow, &truth, 0.0});
  REQUIRE(local_maxima(f_narrow).size() >= 2);
  REQUIRE(std::abs(f_narrow.grid.points[argmax_index(f_narrow)]) > 0.05);

  const PhaseDistribution f_matched = asymptotic_likelihood(LikelihoodSpec{&matched, &truth, 0.0});
  REQUIRE(local_maxima(f_matched).size() == 1);
  REQUIRE(std::abs(f_matched.grid.points[argmax_index(f_matched)]) <= grid.spacing);

  const PhaseDistribution f_wide = asymptotic_likelihood(LikelihoodSpec{&wide, &truth, 0.0});
  REQUIRE(local_maxima(f_wide).size() == 1);
  REQUIRE(std::abs(f_wide.grid.points[argmax_index(f_wide)]) <= grid.spacing);
  REQUIRE(phase_std(f_wide) > phase_std(f_matched));
}

TEST_CASE("raise_to_n behaves like a power") {
  const PhiGrid grid = PhiGrid::uniform(2048);
  const CondProbTable t = table_for_prep(StatePrep{10, 0.0, 0.0}, grid);
  const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&t, &t, 0.0});

  const PhaseDistribution same = raise_to_n(f, 1.0);
  for (std::size_t i = 0; i < f.density.size(); i += 101)
    REQUIRE(same.density[i] == Approx(f.density[i]).margin(1e-12));

  const PhaseDistribution flat = raise_to_n(uniform_prior(grid), 7.0);
  for (std::size_t i = 0; i < flat.density.size(); i += 211)
    REQUIRE(flat.density[i] == Approx(1.0 / std::numbers::pi).margin(1e-12));

  // in the gaussian-limit regime doubling twice halves the width; n = 1 is
  // excluded because its width is dominated by the oscillatory wings
  const double s5 = phase_std(raise_to_n(f, 5.0));
  const double s20 = phase_std(raise_to_n(f, 20.0));
  REQUIRE(s20 / s5 == Approx(0.5).epsilon(0.05));
  const double s1 = phase_std(f);
  REQUIRE(s5 / s1 < 0.15);  // wings dominate n = 1; see the width-law tests

  REQUIRE_THROWS_AS(raise_to_n(f, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(raise_to_n(f, -2.0), std::invalid_argument);
}

TEST_CASE("likelihood spec validation") {
  const PhiGrid g1 = PhiGrid::uniform(512);
  const PhiGrid g2 = PhiGrid::uniform(256);
  const CondProbTable a = table_for_prep(StatePrep{5, 0.0, 0.0}, g1);
  const CondProbTable b = table_for_prep(StatePrep{5, 0.0, 0.0}, g2);
  REQUIRE_THROWS_AS(asymptotic_likelihood(LikelihoodSpec{&a, &b, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(asymptotic_likelihood(LikelihoodSpec{nullptr, &a, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("tables with different m ranges pad with zeros") {
  const PhiGrid grid = PhiGrid::uniform(1024);
  KernelBank bank(grid);
  // truth spans |m| <= 22 (delta_j = 3 widens the j window); the inference
  // table only spans |m| <= 10, but the truth weights out there are far
  // below the numerical cutoff, so the likelihood is still well defined
  const CondProbTable truth = table_for_prep(StatePrep{10, 3.0, 1.0}, bank);
  const CondProbTable inference = table_for_prep(StatePrep{10, 0.0, 1.0}, bank);
  REQUIRE(truth.m_max == 22);
  REQUIRE(inference.m_max == 10);
  const PhaseDistribution f = asymptotic_likelihood(LikelihoodSpec{&inference, &truth, 0.0});
  REQUIRE(integral(f) == Approx(1.0).margin(1e-9));
  REQUIRE(std::abs(f.grid.points[argmax_index(f)]) <= grid.spacing);

  // if the truth puts real weight on outcomes the inference model cannot
  // produce, the likelihood vanishes everywhere
  const CondProbTable wide_truth = table_for_prep(StatePrep{5, 0.0, 2.0}, bank);
  CondProbTable tiny;
  tiny.grid = grid;
  tiny.m_max = 1;
  tiny.p = TableMatrix::Zero(3, grid.size());
  tiny.p.row(1).setOnes();
  tiny.prep = StatePrep{1, 0.0, 0.0};
  REQUIRE_THROWS_AS(asymptotic_likelihood(LikelihoodSpec{&tiny, &wide_truth, 0.0}),
                    model_contradiction_error);
}

TEST_CASE("local maxima counting handles plateaus") {
  PhiGrid grid = PhiGrid::uniform(8);
  PhaseDistribution d{grid, {0.0, 1.0, 5.0, 5.0, 1.0, 6.0, 0.5, 0.0}};
  const auto peaks = local_maxima(d);
  REQUIRE(peaks.size() == 2);  // the 5,5 plateau counts once
  REQUIRE(peaks[0] == 3);
  REQUIRE(peaks[1] == 5);
}
