#pragma once

#include <functional>
#include <random>

#include "dccopmsp/schedule.hpp"

namespace dccopmsp {

using Rng = std::mt19937_64;

struct GreedyOptions {
  /// Scores are multiplied by U(1-noise, 1+noise).
  double noise = 0.3;
};

/// Greedy-randomized construction of a precedence- and capacity-feasible schedule.
///
/// Blocks are ranked by discounted mean value per unit of (capacity-normalized)
/// resource use, perturbed by multiplicative noise. Each positive-score block is
/// placed together with its still-unmined predecessor closure, every block going
/// to the earliest period that respects its predecessors and has residual
/// capacity. A group is committed only if it fits entirely and its discounted
/// mean value is positive.
Schedule greedy_randomized_init(const Instance& inst, const ResourceMatrix& caps,
                                const ProfitMoments& moments, Rng& rng,
                                const GreedyOptions& options = {});

struct MutationOptions {
  /// Probability that a selected block jumps to a uniform period in 1..T
  /// instead of the directed move.
  double random_move_prob = 0.1;
  /// The repair variant turns this off so infeasible schedules can move.
  bool check_capacity = true;
};

/// Period-swap mutation. Each block is selected with probability `pm`; ore is
/// proposed one period earlier, waste one period later (an unmined block counts
/// as sitting in period T+1, so waste in T leaves the schedule and unmined ore
/// enters in T). A move is applied only if every direct predecessor and mined
/// successor stays consistent and, when enabled, the target period has
/// residual capacity for the block.
Schedule period_swap_mutation(const Instance& inst, const ResourceMatrix& caps, const Schedule& x,
                              double pm, Rng& rng, const MutationOptions& options = {});

/// A mutation bound to its instance/capacities: (schedule, pm, rng) -> schedule.
using MutationFn = std::function<Schedule(const Schedule&, double, Rng&)>;
/// Produces a fresh feasible schedule under the current capacities.
using InitFn = std::function<Schedule(Rng&)>;

}  // namespace dccopmsp
