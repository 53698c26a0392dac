#include <doctest.h>

#include <algorithm>

#include "dccopmsp/algorithms.hpp"
#include "oracles.hpp"

using namespace dccopmsp;

namespace {

Problem toy_problem() {
  Instance inst = load_instance(oracle::data("toy8.txt"));
  auto ens = generate_ensembles(inst, 0.2, {}, 3, 30);
  auto m = moments_for_generated(inst, ens, 0.2);
  return Problem{std::move(inst), std::move(m), std::move(ens)};
}

struct Fixture {
  Problem problem = toy_problem();
  Evaluator evaluator{problem, problem.instance.baseline_capacity()};
  Rng rng{11};

  MutationFn mutation() {
    return [this](const Schedule& x, double pm, Rng& r) {
      return period_swap_mutation(problem.instance, evaluator.capacities(), x, pm, r);
    };
  }

  std::vector<Member> initial(int n) {
    std::vector<Member> pop;
    for (int i = 0; i < n; ++i) {
      Member m;
      m.schedule = greedy_randomized_init(problem.instance, evaluator.capacities(), problem.moments, rng);
      m.eval = evaluator(m.schedule);
      pop.push_back(std::move(m));
    }
    return pop;
  }
};

const AlgorithmKind kAll[] = {AlgorithmKind::moead, AlgorithmKind::nsga2, AlgorithmKind::spea2,
                              AlgorithmKind::smsemoa};

}  // namespace

TEST_CASE("algorithm names") {
  for (auto k : kAll) CHECK(parse_algorithm(to_string(k)) == k);
  CHECK_THROWS_AS(parse_algorithm("nsga3"), std::invalid_argument);
}

TEST_CASE("decomposition weights") {
  for (int n : {1, 2, 5, 20}) {
    const auto w = moead_weights(n);
    CHECK(w.size() == static_cast<std::size_t>(n));
    for (const auto& v : w) {
      CHECK(v[0] + v[1] == doctest::Approx(1.0));
      CHECK(v[0] >= 0.0);
      CHECK(v[1] >= 0.0);
    }
  }
  const auto w = moead_weights(5);
  CHECK(w.front()[0] == 0.0);
  CHECK(w.back()[0] == 1.0);
  CHECK(w[2][0] == 0.5);
  const auto nb = moead_neighborhoods(w, 3);
  CHECK(nb[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(nb[2] == std::vector<std::size_t>{2, 1, 3});
  CHECK(nb[4] == std::vector<std::size_t>{4, 3, 2});
  CHECK_THROWS_AS(moead_weights(0), std::invalid_argument);
}

TEST_CASE("NSGA-II survivor selection") {
  // (2,2) is dominated by (1,1) and (4,4) by everything.
  const std::vector<Objectives> layered{{0, 3}, {1, 1}, {3, 0}, {2, 2}, {4, 4}};
  CHECK(nsga2_survivors(layered, 4) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(nsga2_survivors(layered, 3) == std::vector<std::size_t>{0, 1, 2});

  // One front cut by crowding: (1,3) has distance 1.0, (2,2) has 1.5.
  const std::vector<Objectives> front{{0, 4}, {1, 3}, {2, 2}, {4, 0}};
  auto keep = nsga2_survivors(front, 3);
  std::sort(keep.begin(), keep.end());
  CHECK(keep == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("SMS-EMOA reference point") {
  const std::vector<Objectives> pts{{0, 0}, {10, 2}};
  CHECK(smsemoa_reference(pts, 0.1, 1.0) == Objectives{11, 3});
  CHECK(smsemoa_reference(pts, 0.5, 0.0) == Objectives{15, 3});
}

TEST_CASE("population size, budget and feasibility are preserved") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    Fixture f;
    f.evaluator.set_limit(100000);
    AlgoConfig cfg;
    cfg.algorithm = kind;
    cfg.pop_size = 10;
    auto algo = make_algorithm(cfg, f.evaluator, f.mutation(), f.rng);
    algo->initialize(f.initial(10));
    for (int it = 0; it < 30; ++it) {
      const long before = f.evaluator.count();
      algo->iterate();
      CHECK(f.evaluator.count() - before <= 10);
      CHECK(algo->population().size() == 10);
      for (const auto& m : algo->population()) CHECK(m.eval.feasible);
    }
    CHECK(algo->iterations() == 30);
  }
}

TEST_CASE("iterations stop at the evaluation limit") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    Fixture f;
    AlgoConfig cfg;
    cfg.algorithm = kind;
    cfg.pop_size = 8;
    auto algo = make_algorithm(cfg, f.evaluator, f.mutation(), f.rng);
    f.evaluator.set_limit(1000);
    algo->initialize(f.initial(8));
    f.evaluator.set_limit(f.evaluator.count() + 5);
    for (int it = 0; it < 10; ++it) algo->iterate();
    CHECK(f.evaluator.count() == f.evaluator.limit());
    CHECK(algo->population().size() == 8);
  }
}

TEST_CASE("without mutation no new objective values appear") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    Fixture f;
    f.evaluator.set_limit(100000);
    AlgoConfig cfg;
    cfg.algorithm = kind;
    cfg.pop_size = 8;
    cfg.mutation_rate = 0.0;
    auto algo = make_algorithm(cfg, f.evaluator, f.mutation(), f.rng);
    auto init = f.initial(8);
    std::vector<Objectives> seen;
    for (const auto& m : init) seen.push_back({m.eval.f1, m.eval.f2});
    algo->initialize(init);
    for (int it = 0; it < 10; ++it) algo->iterate();
    for (const auto& m : algo->solutions()) {
      CHECK(std::find(seen.begin(), seen.end(), Objectives{m.eval.f1, m.eval.f2}) != seen.end());
    }
  }
}

TEST_CASE("initialization rejects a population of the wrong size") {
  Fixture f;
  f.evaluator.set_limit(1000);
  AlgoConfig cfg;
  cfg.pop_size = 5;
  auto algo = make_algorithm(cfg, f.evaluator, f.mutation(), f.rng);
  CHECK_THROWS_AS(algo->initialize(f.initial(4)), std::invalid_argument);
  cfg.pop_size = 0;
  CHECK_THROWS_AS(make_algorithm(cfg, f.evaluator, f.mutation(), f.rng), std::invalid_argument);
}
