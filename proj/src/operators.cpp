#include "dccopmsp/operators.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace dccopmsp {

namespace {

bool fits(const Instance& inst, const ResourceMatrix& caps, const ResourceMatrix& usage, BlockId b,
          Period t) {
  const auto& use = inst.block(b).resource_use;
  for (int r = 0; r < inst.num_resources(); ++r) {
    if (usage(r, t) + use[static_cast<std::size_t>(r)] > caps(r, t)) return false;
  }
  return true;
}

void add_usage(const Instance& inst, ResourceMatrix& usage, BlockId b, Period t, double sign) {
  if (t == kUnmined) return;
  const auto& use = inst.block(b).resource_use;
  for (int r = 0; r < inst.num_resources(); ++r) usage(r, t) += sign * use[static_cast<std::size_t>(r)];
}

}  // namespace

Schedule greedy_randomized_init(const Instance& inst, const ResourceMatrix& caps,
                                const ProfitMoments& moments, Rng& rng,
                                const GreedyOptions& options) {
  const int n = inst.num_blocks();
  const int nres = inst.num_resources();
  const Period periods = inst.periods();
  Schedule x(n);
  ResourceMatrix usage(nres, periods);

  std::vector<double> cap_total(static_cast<std::size_t>(nres), 0.0);
  for (int r = 0; r < nres; ++r) {
    for (Period t = 1; t <= periods; ++t) cap_total[static_cast<std::size_t>(r)] += caps(r, t);
  }
  std::uniform_real_distribution<double> jitter(1.0 - options.noise, 1.0 + options.noise);
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  for (BlockId b = 0; b < n; ++b) {
    const auto& use = inst.block(b).resource_use;
    double norm = 0.0;
    for (int r = 0; r < nres; ++r) {
      const double u = use[static_cast<std::size_t>(r)];
      if (u <= 0.0) continue;
      const double total = cap_total[static_cast<std::size_t>(r)];
      norm += total > 0.0 ? u / total : std::numeric_limits<double>::infinity();
    }
    const double value = moments.mean[static_cast<std::size_t>(b)] * inst.discount(1);
    const double noise = options.noise > 0.0 ? jitter(rng) : 1.0;
    score[static_cast<std::size_t>(b)] = value * noise / std::max(norm, 1e-12);
  }
  std::vector<BlockId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](BlockId a, BlockId b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });

  std::vector<int> topo_pos(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < inst.topological_order().size(); ++i) {
    topo_pos[static_cast<std::size_t>(inst.topological_order()[i])] = static_cast<int>(i);
  }

  std::vector<BlockId> group;
  for (BlockId b : order) {
    if (!(score[static_cast<std::size_t>(b)] > 0.0)) break;
    if (x.mined(b)) continue;
    group.clear();
    for (BlockId p : inst.predecessor_closure(b)) {
      if (!x.mined(p)) group.push_back(p);
    }
    group.push_back(b);
    std::sort(group.begin(), group.end(), [&](BlockId u, BlockId v) {
      return topo_pos[static_cast<std::size_t>(u)] < topo_pos[static_cast<std::size_t>(v)];
    });

    bool ok = true;
    double value = 0.0;
    std::size_t placed = 0;
    for (BlockId g : group) {
      Period earliest = 1;
      for (BlockId p : inst.predecessors(g)) earliest = std::max(earliest, x[p]);
      Period t = earliest;
      while (t <= periods && !fits(inst, caps, usage, g, t)) ++t;
      if (t > periods) {
        ok = false;
        break;
      }
      x[g] = t;
      add_usage(inst, usage, g, t, 1.0);
      value += moments.mean[static_cast<std::size_t>(g)] * inst.discount(t);
      ++placed;
    }
    if (!ok || !(value > 0.0)) {
      for (std::size_t i = 0; i < placed; ++i) {
        add_usage(inst, usage, group[i], x[group[i]], -1.0);
        x[group[i]] = kUnmined;
      }
    }
  }
  return x;
}

Schedule period_swap_mutation(const Instance& inst, const ResourceMatrix& caps, const Schedule& x,
                              double pm, Rng& rng, const MutationOptions& options) {
  Schedule y = x;
  if (pm <= 0.0) return y;
  const Period periods = inst.periods();
  ResourceMatrix usage;
  if (options.check_capacity) usage = resource_usage(inst, x);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Period> any_period(1, periods);
  for (BlockId b : inst.topological_order()) {
    if (unit(rng) >= pm) continue;
    const Period cur = y[b];
    Period target;
    if (unit(rng) < options.random_move_prob) {
      target = any_period(rng);
    } else {
      const Period slot = cur == kUnmined ? periods + 1 : cur;
      target = inst.block(b).ore ? slot - 1 : slot + 1;
      if (target < 1 || target > periods + 1) continue;
      if (target == periods + 1) target = kUnmined;
    }
    if (target == cur) continue;

    bool ok = true;
    if (target != kUnmined) {
      for (BlockId p : inst.predecessors(b)) {
        if (y[p] == kUnmined || y[p] > target) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      for (BlockId s : inst.successors(b)) {
        if (y[s] != kUnmined && (target == kUnmined || y[s] < target)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    if (options.check_capacity) {
      if (target != kUnmined && !fits(inst, caps, usage, b, target)) continue;
      add_usage(inst, usage, b, cur, -1.0);
      add_usage(inst, usage, b, target, 1.0);
    }
    y[b] = target;
  }
  return y;
}

}  // namespace dccopmsp
