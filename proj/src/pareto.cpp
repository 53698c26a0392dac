#include "dccopmsp/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dccopmsp {

bool dominates(const Objectives& a, const Objectives& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

std::vector<std::vector<std::size_t>> nondominated_fronts(std::span<const Objectives> objs) {
  const std::size_t n = objs.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> counter(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objs[p], objs[q])) {
        dominated_by[p].push_back(q);
      } else if (dominates(objs[q], objs[p])) {
        ++counter[p];
      }
    }
    if (counter[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      for (std::size_t q : dominated_by[p]) {
        if (--counter[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<int> nondominated_ranks(std::span<const Objectives> objs) {
  std::vector<int> rank(objs.size(), 0);
  auto fronts = nondominated_fronts(objs);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    for (std::size_t i : fronts[f]) rank[i] = static_cast<int>(f);
  }
  return rank;
}

std::vector<int> nondominated_sort(std::span<const Evaluation> evals) {
  std::vector<Objectives> objs;
  objs.reserve(evals.size());
  for (const auto& ev : evals) {
    if (ev.epoch != evals.front().epoch) {
      throw std::invalid_argument("cannot rank evaluations from different environment epochs");
    }
    objs.push_back(to_min_space(ev));
  }
  return nondominated_ranks(objs);
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (int m = 0; m < 2; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    const double lo = front[order.front()][m];
    const double hi = front[order.back()][m];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (hi - lo <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      dist[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / (hi - lo);
    }
  }
  return dist;
}

double tchebycheff(const Objectives& f, const std::array<double, 2>& lambda, const Objectives& ideal) {
  return std::max(lambda[0] * std::abs(f[0] - ideal[0]), lambda[1] * std::abs(f[1] - ideal[1]));
}

double hypervolume_2d(std::span<const Objectives> points, const Objectives& ref) {
  std::vector<Objectives> pts;
  for (const auto& p : points) {
    if (p[0] < ref[0] && p[1] < ref[1]) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double prev_y = ref[1];
  for (const auto& p : pts) {
    if (p[1] < prev_y) {
      area += (ref[0] - p[0]) * (prev_y - p[1]);
      prev_y = p[1];
    }
  }
  return area;
}

std::size_t min_contributor(std::span<const Objectives> points, const Objectives& ref) {
  if (points.empty()) throw std::invalid_argument("min_contributor of an empty set");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i][0] < ref[0] && points[i][1] < ref[1])) return i;
  }
  const double total = hypervolume_2d(points, ref);
  std::vector<Objectives> rest;
  rest.reserve(points.size());
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    rest.clear();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) rest.push_back(points[j]);
    }
    const double loss = total - hypervolume_2d(rest, ref);
    if (loss < best_loss) {
      best_loss = loss;
      best = i;
    }
  }
  return best;
}

namespace {

double distance(const Objectives& a, const Objectives& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

std::vector<double> spea2_fitness(std::span<const Objectives> objs, int k) {
  const std::size_t n = objs.size();
  std::vector<int> strength(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && dominates(objs[i], objs[j])) ++strength[i];
    }
  }
  std::vector<double> fitness(n, 0.0);
  std::vector<double> d;
  for (std::size_t i = 0; i < n; ++i) {
    double raw = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && dominates(objs[j], objs[i])) raw += strength[j];
    }
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(distance(objs[i], objs[j]));
    }
    double sigma = 0.0;
    if (!d.empty()) {
      const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), d.size());
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk - 1), d.end());
      sigma = d[kk - 1];
    }
    fitness[i] = raw + 1.0 / (sigma + 2.0);
  }
  return fitness;
}

std::vector<std::size_t> spea2_select(std::span<const Objectives> objs,
                                      std::span<const double> fitness, std::size_t capacity) {
  const std::size_t n = objs.size();
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    if (fitness[i] < 1.0) chosen.push_back(i);
  }
  if (chosen.size() < capacity) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (fitness[i] >= 1.0) rest.push_back(i);
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    for (std::size_t i = 0; i < rest.size() && chosen.size() < capacity; ++i) {
      chosen.push_back(rest[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }
  // Truncation: repeatedly drop the member whose sorted neighbour-distance
  // list is lexicographically smallest. The best member in each objective is
  // kept while at least three remain.
  while (chosen.size() > capacity) {
    std::size_t best0 = 0, best1 = 0;
    for (std::size_t a = 1; a < chosen.size(); ++a) {
      const auto& o = objs[chosen[a]];
      const auto& b0 = objs[chosen[best0]];
      const auto& b1 = objs[chosen[best1]];
      if (o[0] < b0[0] || (o[0] == b0[0] && o[1] < b0[1])) best0 = a;
      if (o[1] < b1[1] || (o[1] == b1[1] && o[0] < b1[0])) best1 = a;
    }
    const bool protect = chosen.size() > 2;
    std::size_t victim = chosen.size();
    std::vector<double> victim_d;
    for (std::size_t a = 0; a < chosen.size(); ++a) {
      if (protect && (a == best0 || a == best1)) continue;
      std::vector<double> d;
      d.reserve(chosen.size() - 1);
      for (std::size_t b = 0; b < chosen.size(); ++b) {
        if (a != b) d.push_back(distance(objs[chosen[a]], objs[chosen[b]]));
      }
      std::sort(d.begin(), d.end());
      if (victim == chosen.size() || d < victim_d) {
        victim = a;
        victim_d = std::move(d);
      }
    }
    chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return chosen;
}

}  // namespace dccopmsp
