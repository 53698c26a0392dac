#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <vector>

#include "dccopmsp/instance.hpp"

namespace dccopmsp {

struct DynamicConfig {
  int num_changes = 0;      // nu
  double magnitude = 0.4;   // eta
  long budget = 10000;      // E_max
  std::uint64_t seed = 0;

  /// tau = E_max / nu (integer division); 0 when there are no changes.
  long change_interval() const { return num_changes > 0 ? budget / num_changes : 0; }
  void validate() const;
};

struct ChangeEvent {
  int index = 0;                      // 1..nu
  long eval_count_at_change = 0;
  std::map<Period, double> factors;   // affected period -> gamma
};

/// Capacity environment. Each event rescales the affected periods from the
/// baseline (current = baseline * gamma); unaffected periods keep their value.
class DynamicEnvironment {
 public:
  DynamicEnvironment(ResourceMatrix baseline, DynamicConfig cfg);

  /// Applies the next change. Throws std::logic_error after nu changes.
  const ChangeEvent& next_change(long eval_count);

  const ResourceMatrix& baseline() const { return baseline_; }
  const ResourceMatrix& current() const { return current_; }
  int epoch() const { return epoch_; }
  const std::vector<ChangeEvent>& log() const { return log_; }
  const DynamicConfig& config() const { return cfg_; }

  /// Capacity of every (resource, period) after each epoch; index 0 is the baseline.
  const std::vector<ResourceMatrix>& history() const { return history_; }

 private:
  ResourceMatrix baseline_;
  ResourceMatrix current_;
  DynamicConfig cfg_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
  std::vector<ChangeEvent> log_;
  std::vector<ResourceMatrix> history_;
};

/// Re-applies logged events to a baseline.
ResourceMatrix replay(const ResourceMatrix& baseline, const std::vector<ChangeEvent>& log);

struct TracePoint {
  int resource = 0;
  Period period = 0;
  int epoch = 0;
  double capacity = 0.0;
  double baseline = 0.0;
};

std::vector<TracePoint> capacity_trace(const DynamicEnvironment& env);

/// CSV `resource,period,epoch,capacity,baseline`.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace,
                     const std::vector<std::string>& resource_names);
/// One panel per period; solid current capacity vs dashed baseline per resource.
void write_trace_svg(std::ostream& out, const std::vector<TracePoint>& trace,
                     const std::vector<std::string>& resource_names);

}  // namespace dccopmsp
