#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dccopmsp/instance.hpp"
#include "dccopmsp/stochastic.hpp"

namespace dccopmsp {

/// One extraction period per block (0 = unmined). A block can only hold one
/// period, so "extracted at most once" holds by construction.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(int blocks) : period_(static_cast<std::size_t>(blocks), kUnmined) {}
  explicit Schedule(std::vector<Period> periods) : period_(std::move(periods)) {}

  int size() const { return static_cast<int>(period_.size()); }
  Period operator[](BlockId b) const { return period_[static_cast<std::size_t>(b)]; }
  Period& operator[](BlockId b) { return period_[static_cast<std::size_t>(b)]; }
  const std::vector<Period>& periods() const { return period_; }
  bool mined(BlockId b) const { return (*this)[b] != kUnmined; }

  std::uint64_t hash() const;

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<Period> period_;
};

/// Throws InstanceError when the length or a period value is out of range.
void check_schedule(const Instance& inst, const Schedule& x);

struct Evaluation {
  double f1 = 0.0;
  double f2 = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  double stddev = 0.0;
  /// Resource violation v(x).
  double violation = 0.0;
  /// Number of precedence arcs violated (zero for operator-produced schedules).
  int precedence_violations = 0;
  ResourceMatrix usage;
  bool feasible = true;
  int epoch = 0;

  double violation_total() const { return violation + precedence_violations; }
};

ResourceMatrix resource_usage(const Instance& inst, const Schedule& x);

/// Relative slack below which an excess is treated as floating-point noise.
inline constexpr double kCapacityTolerance = 1e-9;

/// v(x) = sum_t max_r max(0, y_r^t - R_r^t).
double violation(const ResourceMatrix& caps, const ResourceMatrix& usage);
double violation(const Instance& inst, const ResourceMatrix& caps, const Schedule& x);

struct PrecedenceCheck {
  bool ok = true;
  std::optional<Arc> witness;
  int violated_arcs = 0;
};

PrecedenceCheck precedence_ok(const Instance& inst, const Schedule& x);

/// The problem data an evaluation depends on besides capacities.
struct Problem {
  Instance instance;
  ProfitMoments moments;
  EnsembleSet ensembles;
};

Evaluation evaluate(const Instance& inst, const ResourceMatrix& caps, const ProfitMoments& moments,
                    const EnsembleSet& ens, const Schedule& x, double penalty_m);

struct EvaluatorOptions {
  double penalty_m = 1e8;
  bool memoize = true;
  /// When false, a memo hit does not increment the evaluation counter.
  bool charge_cached = true;
};

/// Counted, memoized evaluation under the current capacity snapshot. The
/// counter is the run's global evaluation budget clock.
class Evaluator {
 public:
  Evaluator(const Problem& problem, ResourceMatrix caps, EvaluatorOptions options = {});

  Evaluation operator()(const Schedule& x);

  /// Installs a new capacity snapshot; clears the memo.
  void set_capacities(ResourceMatrix caps, int epoch);
  const ResourceMatrix& capacities() const { return caps_; }
  int epoch() const { return epoch_; }

  long count() const { return counter_.load(); }
  /// Evaluations may be requested while count() < limit().
  void set_limit(long limit) { limit_ = limit; }
  long limit() const { return limit_; }
  bool has_budget() const { return count() < limit_; }

  /// While off, evaluations are not counted against the budget.
  void set_charging(bool on) { charging_ = on; }
  bool charging() const { return charging_; }

  long cache_hits() const { return hits_; }
  const Problem& problem() const { return problem_; }
  double penalty() const { return options_.penalty_m; }

 private:
  const Problem& problem_;
  ResourceMatrix caps_;
  EvaluatorOptions options_;
  int epoch_ = 0;
  std::atomic<long> counter_{0};
  long limit_ = 0;
  long hits_ = 0;
  bool charging_ = true;
  std::unordered_map<std::uint64_t, std::vector<std::pair<Schedule, Evaluation>>> memo_;
};

/// `<block_id> <period>` per mined block.
void write_schedule(std::ostream& out, const Schedule& x);
Schedule read_schedule(std::istream& in, const Instance& inst);

}  // namespace dccopmsp
