#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dccopmsp/schedule.hpp"
#include "dccopmsp/stochastic.hpp"
#include "oracles.hpp"

using namespace dccopmsp;

namespace {

Instance flat(std::vector<std::pair<bool, double>> blocks, int periods = 2, double d = 0.1) {
  std::vector<Block> bl;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    bl.push_back({static_cast<BlockId>(i), blocks[i].first, blocks[i].second, {1.0}});
  }
  return Instance("flat", std::move(bl), periods, d, {"mining"}, ResourceMatrix(1, periods, 1e9), {});
}

}  // namespace

TEST_CASE("ensemble columns follow the requested spread") {
  const Instance inst = flat({{true, 100.0}, {false, -5.0}, {true, -40.0}});
  const auto ens = generate_ensembles(inst, 0.2, {}, 11, 50);
  CHECK(ens.count() == 50);
  CHECK(ens.blocks() == 3);
  // Sample stddev of 50 normals lies within 3 standard errors (sigma/sqrt(2(n-1))).
  const double sd = std::sqrt(ens.column_variance(0));
  CHECK(std::abs(sd - 20.0) < 3.0 * 20.0 / std::sqrt(98.0));
  CHECK(std::abs(ens.column_mean(0) - 100.0) < 3.0 * 20.0 / std::sqrt(50.0));
  for (int e = 0; e < 50; ++e) CHECK(ens.value(e, 1) == -5.0);
  CHECK(std::abs(std::sqrt(ens.column_variance(2)) - 8.0) < 3.0 * 8.0 / std::sqrt(98.0));
}

TEST_CASE("zero noise gives constant columns") {
  const Instance inst = flat({{true, 7.0}, {true, 3.0}});
  const auto ens = generate_ensembles(inst, 0.0, {}, 1, 5);
  for (int e = 0; e < 5; ++e) {
    CHECK(ens.value(e, 0) == 7.0);
    CHECK(ens.value(e, 1) == 3.0);
  }
}

TEST_CASE("independent columns are uncorrelated") {
  const Instance inst = flat({{true, 10.0}, {true, 10.0}});
  const auto ens = generate_ensembles(inst, 0.2, {}, 5, 10000);
  const double corr = oracle::covariance(ens, 0, 1) / std::sqrt(ens.column_variance(0) * ens.column_variance(1));
  CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("neighborhood mode correlates nearby blocks only") {
  std::vector<Block> blocks;
  std::vector<Coord> coords;
  for (int i = 0; i < 12; ++i) {
    blocks.push_back({i, true, 10.0, {1.0}});
    coords.push_back({static_cast<double>(i), 0, 0});
  }
  const Instance inst("row", blocks, 1, 0.1, {"m"}, ResourceMatrix(1, 1, 100), {}, coords);
  const auto ens = generate_ensembles(inst, 0.2, {CorrelationMode::neighborhood, 1.5, 0.8}, 3, 20000);
  auto corr = [&](BlockId a, BlockId b) {
    return oracle::covariance(ens, a, b) / std::sqrt(ens.column_variance(a) * ens.column_variance(b));
  };
  CHECK(corr(5, 6) > 0.3);
  CHECK(std::abs(corr(2, 9)) < 0.05);
  // Marginal spread is unchanged by the mixing.
  CHECK(std::sqrt(ens.column_variance(5)) == doctest::Approx(2.0).epsilon(0.03));
  CHECK_THROWS_AS(generate_ensembles(flat({{true, 1.0}}), 0.2, {CorrelationMode::neighborhood, 1.5, 0.5}, 1, 5),
                  std::invalid_argument);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(EnsembleSet(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSet(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(generate_ensembles(flat({{true, 1.0}}), -0.1, {}, 1, 5), std::invalid_argument);
}

TEST_CASE("moments") {
  const Instance inst = flat({{true, 50.0}, {false, -3.0}});
  const auto ens = generate_ensembles(inst, 0.2, {}, 2, 50);
  const auto gen = moments_for_generated(inst, ens, 0.2);
  CHECK(gen.mean == std::vector<double>{50.0, -3.0});
  CHECK(gen.stddev[0] == doctest::Approx(10.0));
  CHECK(gen.stddev[1] == 0.0);
  const auto ext = moments_from_ensembles(inst, ens);
  CHECK(ext.stddev[0] == doctest::Approx(std::sqrt(ens.column_variance(0))));
  CHECK(ext.stddev[1] == 0.0);
}

TEST_CASE("expected NPV") {
  const Instance one = flat({{true, 110.0}});
  const auto m1 = moments_for_generated(one, generate_ensembles(one, 0.2, {}, 1, 5), 0.2);
  CHECK(expected_npv(one, m1, Schedule(1)) == 0.0);
  CHECK(expected_npv(one, m1, Schedule(std::vector<Period>{1})) == doctest::Approx(100.0).epsilon(1e-12));

  const Instance four = flat({{true, 30.0}, {false, -4.0}, {true, 17.5}, {true, -2.0}}, 3, 0.08);
  const auto m4 = moments_for_generated(four, generate_ensembles(four, 0.2, {}, 1, 5), 0.2);
  const Schedule x(std::vector<Period>{2, 1, 3, 0});
  const double want = oracle::expected_npv_loop(four, x);
  CHECK(std::abs(expected_npv(four, m4, x) - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("period variance") {
  SUBCASE("no ore in period") {
    const Instance inst = flat({{false, -1.0}, {true, 5.0}});
    const auto ens = generate_ensembles(inst, 0.2, {}, 1, 10);
    const auto m = moments_for_generated(inst, ens, 0.2);
    CHECK(period_variance(m, ens, Schedule(std::vector<Period>{1, 2}), 1) == 0.0);
  }
  SUBCASE("single ore block") {
    const Instance inst = flat({{true, 10.0}});
    const auto ens = generate_ensembles(inst, 0.2, {}, 1, 10);
    const auto m = moments_for_generated(inst, ens, 0.2);
    CHECK(period_variance(m, ens, Schedule(std::vector<Period>{1}), 1) == doctest::Approx(4.0));
  }
  SUBCASE("five ore blocks against the pairwise formula") {
    const Instance inst = flat({{true, 10}, {true, 20}, {true, 15}, {true, 8}, {true, 30}});
    const auto ens = generate_ensembles(inst, 0.2, {}, 21, 50);
    const auto m = moments_for_generated(inst, ens, 0.2);
    const Schedule x(std::vector<Period>{1, 1, 1, 1, 1});
    const double want = oracle::pairwise_period_variance(m, ens, x, 1);
    CHECK(std::abs(period_variance(m, ens, x, 1) - want) <= 1e-9 * want);
  }
}

TEST_CASE("total variance") {
  const Instance one = flat({{true, 15.0}});
  const auto e1 = generate_ensembles(one, 0.2, {}, 1, 10);
  const auto m1 = moments_for_generated(one, e1, 0.2);   // sigma = 3
  CHECK(total_variance(one, m1, e1, Schedule(1)) == 0.0);
  CHECK(total_variance(one, m1, e1, Schedule(std::vector<Period>{1})) == doctest::Approx(9.0 / 1.21));

  const Instance inst = flat({{true, 10}, {true, 20}, {false, -2}, {true, 8}, {true, 30}}, 3, 0.1);
  const auto ens = generate_ensembles(inst, 0.2, {}, 4, 50);
  const auto m = moments_for_generated(inst, ens, 0.2);
  const Schedule x(std::vector<Period>{1, 3, 1, 3, 2});
  double want = 0;
  for (Period t = 1; t <= 3; ++t) want += oracle::pairwise_period_variance(m, ens, x, t) / std::pow(1.1, 2 * t);
  CHECK(std::abs(total_variance(inst, m, ens, x) - want) <= 1e-12 * want);
}

TEST_CASE("risk-adjusted value") {
  CHECK(risk_adjusted_value(100, 25, ChanceParams::from_alpha(0.5)) == doctest::Approx(100.0));
  CHECK(risk_adjusted_value(100, 25, ChanceParams::from_alpha(0.99)) == doctest::Approx(88.368).epsilon(1e-5));
  for (double a : {0.6, 0.9, 0.99}) CHECK(risk_adjusted_value(42, 0, ChanceParams::from_alpha(a)) == 42);
  CHECK_THROWS_AS(risk_adjusted_value(1, -1, ChanceParams::from_alpha(0.9)), std::invalid_argument);
  CHECK_THROWS_AS(ChanceParams::from_alpha(0.4), std::invalid_argument);
  CHECK_THROWS_AS(ChanceParams::from_alpha(1.0), std::invalid_argument);
}

TEST_CASE("normal quantile") {
  CHECK(std::abs(normal_quantile(0.5)) < 1e-12);
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-12));
  CHECK(normal_quantile(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-12));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1e-6, 1 - 1e-6);
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng);
    CHECK(std::abs(normal_quantile(p) - oracle::bisect_quantile(p)) < 1e-9);
  }
  CHECK(std::abs(normal_cdf(normal_quantile(0.975)) - 0.975) < 1e-12);
  CHECK_THROWS(normal_quantile(0.0));
  CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("ensemble file round trip") {
  const Instance inst = flat({{true, 10}, {false, -1}, {true, 3}});
  const auto ens = generate_ensembles(inst, 0.2, {}, 8, 6);
  const auto path = std::filesystem::temp_directory_path() / "dccopmsp_ens_test.txt";
  save_ensembles(ens, path);
  CHECK(load_ensembles(path) == ens);
  std::filesystem::remove(path);
}
