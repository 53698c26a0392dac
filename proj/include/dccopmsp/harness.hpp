#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dccopmsp/algorithms.hpp"
#include "dccopmsp/dynamics.hpp"
#include "dccopmsp/response.hpp"
#include "dccopmsp/schedule.hpp"

namespace dccopmsp {

struct StochasticConfig {
  double rel_stddev = 0.2;
  CorrelationSpec correlation{CorrelationMode::neighborhood, 1.5, 0.5};
  int ensemble_count = 50;
  std::uint64_t ensemble_seed = 20240901;
  /// When set, ensembles are read from this file and sigma_b comes from the columns.
  std::optional<std::filesystem::path> ensembles_path;
};

/// Instance plus its profit model. Neighborhood correlation silently falls
/// back to independent noise when the instance has no coordinates.
Problem build_problem(Instance inst, const StochasticConfig& cfg);

struct RunConfig {
  std::string instance_label;
  AlgoConfig algo;
  Mechanism mechanism = Mechanism::re;
  std::vector<double> alphas{0.60, 0.90, 0.99};
  int nu = 20;
  double eta = 0.4;
  long budget = 10000;
  std::uint64_t seed = 1;
  double penalty_m = 1e8;
  int repair_budget = 50;
  double greedy_noise = 0.3;
  std::optional<double> external_bound;
  bool charge_cached = true;
  /// When false, post-change re-evaluations of the population are free.
  bool charge_reevaluation = true;
  /// Iterations without a new evaluation before a run is abandoned as stalled.
  long stall_limit = 10000;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Best member for one confidence level at a change boundary.
struct BestAtAlpha {
  double alpha = 0.0;
  bool feasible = false;
  double value = 0.0;       // risk-adjusted value when feasible
  double violation = 0.0;   // v when infeasible
  double expected = 0.0;
  double stddev = 0.0;
  double error = 0.0;       // e_i
  Schedule schedule;
};

struct ChangeRecord {
  int index = 0;
  long eval_count = 0;
  std::vector<BestAtAlpha> best;   // one per alpha, environment live before this change
  ChangeEvent event;
  std::optional<ResponseReport> response;
};

struct RunRecord {
  RunConfig config;
  std::string instance_name;
  double upper_bound = 0.0;
  std::vector<ChangeRecord> changes;
  std::vector<double> offline_error;     // E per alpha (NaN when nu = 0)
  std::vector<BestAtAlpha> final_best;   // per alpha at the end of the run
  double final_max_expected = 0.0;       // best feasible expected NPV held at the end
  bool final_has_feasible = false;
  long evaluations = 0;
  long cache_hits = 0;
  bool stalled = false;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  std::vector<std::string> resource_names;
  std::vector<ResourceMatrix> capacity_history;   // baseline, then after each change

  /// Serialized record. Wall time is only included on request so identical
  /// runs produce identical bytes.
  nlohmann::ordered_json to_json(bool include_timing = false) const;
};

/// Sum of positive mean profits discounted one period; min with `external` when given.
double upper_bound(const Instance& inst, const ProfitMoments& moments,
                   std::optional<double> external = std::nullopt);

/// Feasible members: maximize the risk-adjusted value at `params`; with none
/// feasible, minimize total violation. Ties keep the lowest index.
std::size_t select_best(const std::vector<Member>& members, const ChanceParams& params);

/// bound - f(x) when feasible, bound + v(x) otherwise.
double offline_error(const Evaluation& best, double bound, const ChanceParams& params);

RunRecord run_experiment(const Problem& problem, const RunConfig& config);

}  // namespace dccopmsp
