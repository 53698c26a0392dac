#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dccopmsp/operators.hpp"
#include "dccopmsp/pareto.hpp"
#include "dccopmsp/schedule.hpp"

namespace dccopmsp {

struct Member {
  Schedule schedule;
  Evaluation eval;
};

enum class AlgorithmKind { moead, nsga2, spea2, smsemoa };

std::string to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm(const std::string& s);

struct AlgoConfig {
  AlgorithmKind algorithm = AlgorithmKind::nsga2;
  int pop_size = 20;
  double mutation_rate = 0.1;

  int moead_neighborhood = 8;
  double moead_neighbor_prob = 0.9;
  int moead_max_replacements = 12;

  /// 0 means "same as pop_size".
  int spea2_archive_size = 0;

  double smsemoa_ref_fraction = 0.1;
  double smsemoa_ref_floor = 1.0;
};

/// Uniformly spaced weights (i/(N-1), 1 - i/(N-1)).
std::vector<std::array<double, 2>> moead_weights(int n);
/// The `size` closest weight vectors to each weight (itself included), ties by index.
std::vector<std::vector<std::size_t>> moead_neighborhoods(
    const std::vector<std::array<double, 2>>& weights, int size);

/// Mutation-only MOEA driven one iteration at a time by the harness. Every
/// offspring evaluation goes through the shared Evaluator; an iteration stops
/// early once the evaluator's limit is reached.
class Algorithm {
 public:
  Algorithm(AlgoConfig cfg, Evaluator& evaluator, MutationFn mutate, Rng& rng);
  virtual ~Algorithm() = default;

  virtual void initialize(std::vector<Member> population);
  virtual void iterate() = 0;

  /// Members the change-response mechanisms operate on.
  std::vector<Member>& population() { return population_; }
  const std::vector<Member>& population() const { return population_; }
  /// Everything the algorithm currently holds (population plus any archive).
  virtual std::vector<Member> solutions() const { return population_; }
  /// Hook run after a change response has replaced/re-evaluated the population.
  virtual void after_response() {}

  const AlgoConfig& config() const { return cfg_; }
  long iterations() const { return iterations_; }

 protected:
  Member make_offspring(const Member& parent);

  AlgoConfig cfg_;
  Evaluator& evaluator_;
  MutationFn mutate_;
  Rng& rng_;
  std::vector<Member> population_;
  long iterations_ = 0;
};

std::unique_ptr<Algorithm> make_algorithm(const AlgoConfig& cfg, Evaluator& evaluator,
                                          MutationFn mutate, Rng& rng);

/// Survivors of NSGA-II environmental selection (rank, then crowding distance).
std::vector<std::size_t> nsga2_survivors(std::span<const Objectives> objs, std::size_t n);

/// SMS-EMOA reference point: nadir plus max(fraction * range, floor) per objective.
Objectives smsemoa_reference(std::span<const Objectives> objs, double fraction, double floor);

}  // namespace dccopmsp
