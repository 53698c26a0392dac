#pragma once

#include <string>
#include <vector>

#include "dccopmsp/algorithms.hpp"
#include "dccopmsp/operators.hpp"

namespace dccopmsp {

enum class Mechanism { re, div };

std::string to_string(Mechanism m);
Mechanism parse_mechanism(const std::string& s);

struct ResponseReport {
  int feasible_before = 0;
  int repaired = 0;
  int injected_random = 0;
  int filled_least_violating = 0;
  long evals_spent = 0;
};

/// Re-evaluates every member under the evaluator's current capacities.
void respond_re(std::vector<Member>& population, Evaluator& evaluator);

/// Hypermutation repair: mutates the incumbent at rate 2*pm for `budget`
/// evaluations and keeps the best under the order
///   feasible > infeasible; feasible by (f1 desc, f2 asc); infeasible by v asc.
/// `s` must already be evaluated under the current capacities.
Member repair_hypermutation(const Member& s, Evaluator& evaluator, const MutationFn& mutate,
                            double pm, int budget, Rng& rng);

/// True when `y` would replace `best` under the repair acceptance rule.
bool repair_accepts(const Evaluation& y, const Evaluation& best);

struct DivOptions {
  double pm = 0.1;
  int repair_budget = 50;
  double fraction = 0.2;
  /// When false the initial re-evaluation of the population is free.
  bool charge_reevaluation = true;
};

/// Diversity-increasing response. Keeps slot positions: repaired members take
/// their original slot; injected feasible schedules take the slots of the most
/// violating infeasible members that were not retained.
ResponseReport respond_div(std::vector<Member>& population, Evaluator& evaluator,
                           const MutationFn& repair_mutation, const InitFn& random_feasible,
                           const DivOptions& options, Rng& rng);

}  // namespace dccopmsp
