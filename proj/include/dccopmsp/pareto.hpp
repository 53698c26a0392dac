#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dccopmsp/schedule.hpp"

namespace dccopmsp {

/// Objective vector in minimization space: (-f1, f2).
using Objectives = std::array<double, 2>;

inline Objectives to_min_space(const Evaluation& ev) { return {-ev.f1, ev.f2}; }

bool dominates(const Objectives& a, const Objectives& b);

/// Fronts as index lists, best first.
std::vector<std::vector<std::size_t>> nondominated_fronts(std::span<const Objectives> objs);
/// Front rank (0 = non-dominated) per member.
std::vector<int> nondominated_ranks(std::span<const Objectives> objs);
/// Ranks for evaluated members; throws std::invalid_argument on mixed epochs.
std::vector<int> nondominated_sort(std::span<const Evaluation> evals);

/// Crowding distance for the members of one front (same order as `front`).
std::vector<double> crowding_distance(std::span<const Objectives> front);

double tchebycheff(const Objectives& f, const std::array<double, 2>& lambda, const Objectives& ideal);

/// Dominated area of `points` bounded by `ref`.
double hypervolume_2d(std::span<const Objectives> points, const Objectives& ref);
/// Member whose removal loses the least hypervolume; lowest index on ties.
/// A point not strictly better than `ref` in both objectives contributes
/// nothing and is returned first.
std::size_t min_contributor(std::span<const Objectives> points, const Objectives& ref);

/// SPEA2 fitness R(i) + D(i) with density from the k-th nearest neighbour.
std::vector<double> spea2_fitness(std::span<const Objectives> objs, int k);
/// SPEA2 environmental selection: indices of the next archive (size `capacity`).
std::vector<std::size_t> spea2_select(std::span<const Objectives> objs,
                                      std::span<const double> fitness, std::size_t capacity);

}  // namespace dccopmsp
