#include "dccopmsp/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dccopmsp {

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::moead: return "moead";
    case AlgorithmKind::nsga2: return "nsga2";
    case AlgorithmKind::spea2: return "spea2";
    case AlgorithmKind::smsemoa: return "smsemoa";
  }
  return "?";
}

AlgorithmKind parse_algorithm(const std::string& s) {
  if (s == "moead") return AlgorithmKind::moead;
  if (s == "nsga2") return AlgorithmKind::nsga2;
  if (s == "spea2") return AlgorithmKind::spea2;
  if (s == "smsemoa") return AlgorithmKind::smsemoa;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

std::vector<std::array<double, 2>> moead_weights(int n) {
  if (n < 1) throw std::invalid_argument("population size must be positive");
  std::vector<std::array<double, 2>> w;
  if (n == 1) return {{0.5, 0.5}};
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / (n - 1);
    w.push_back({a, 1.0 - a});
  }
  return w;
}

std::vector<std::vector<std::size_t>> moead_neighborhoods(
    const std::vector<std::array<double, 2>>& weights, int size) {
  const std::size_t n = weights.size();
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(size, 1)), n);
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto d = [&](std::size_t j) {
      return std::hypot(weights[i][0] - weights[j][0], weights[i][1] - weights[j][1]);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d(a) < d(b); });
    out[i].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

Algorithm::Algorithm(AlgoConfig cfg, Evaluator& evaluator, MutationFn mutate, Rng& rng)
    : cfg_(cfg), evaluator_(evaluator), mutate_(std::move(mutate)), rng_(rng) {
  if (cfg_.pop_size < 1) throw std::invalid_argument("population size must be positive");
}

void Algorithm::initialize(std::vector<Member> population) {
  if (static_cast<int>(population.size()) != cfg_.pop_size) {
    throw std::invalid_argument("initial population has the wrong size");
  }
  population_ = std::move(population);
}

Member Algorithm::make_offspring(const Member& parent) {
  Member child;
  child.schedule = mutate_(parent.schedule, cfg_.mutation_rate, rng_);
  child.eval = evaluator_(child.schedule);
  return child;
}

namespace {

std::vector<Objectives> objectives_of(const std::vector<Member>& members) {
  std::vector<Objectives> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(to_min_space(m.eval));
  return out;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// ---------------------------------------------------------------------------

class Moead final : public Algorithm {
 public:
  using Algorithm::Algorithm;

  void initialize(std::vector<Member> population) override {
    Algorithm::initialize(std::move(population));
    weights_ = moead_weights(cfg_.pop_size);
    neighbors_ = moead_neighborhoods(weights_, cfg_.moead_neighborhood);
    rebuild_ideal();
  }

  void iterate() override {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> all(population_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < population_.size(); ++i) {
      if (!evaluator_.has_budget()) break;
      std::vector<std::size_t> pool =
          unit(rng_) < cfg_.moead_neighbor_prob ? neighbors_[i] : all;
      const std::size_t parent = pool[uniform_index(rng_, pool.size())];
      Member child = make_offspring(population_[parent]);
      const Objectives fc = to_min_space(child.eval);
      ideal_[0] = std::min(ideal_[0], fc[0]);
      ideal_[1] = std::min(ideal_[1], fc[1]);

      std::shuffle(pool.begin(), pool.end(), rng_);
      int replaced = 0;
      for (std::size_t j : pool) {
        if (replaced >= cfg_.moead_max_replacements) break;
        const Objectives fj = to_min_space(population_[j].eval);
        if (tchebycheff(fc, weights_[j], ideal_) <= tchebycheff(fj, weights_[j], ideal_)) {
          population_[j] = child;
          ++replaced;
        }
      }
    }
    ++iterations_;
  }

  // Re-evaluated objectives make the old ideal point meaningless.
  void after_response() override { rebuild_ideal(); }

  const Objectives& ideal() const { return ideal_; }

 private:
  void rebuild_ideal() {
    ideal_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& m : population_) {
      const Objectives f = to_min_space(m.eval);
      ideal_[0] = std::min(ideal_[0], f[0]);
      ideal_[1] = std::min(ideal_[1], f[1]);
    }
  }

  std::vector<std::array<double, 2>> weights_;
  std::vector<std::vector<std::size_t>> neighbors_;
  Objectives ideal_{};
};

// ---------------------------------------------------------------------------

class Nsga2 final : public Algorithm {
 public:
  using Algorithm::Algorithm;

  void iterate() override {
    std::vector<Evaluation> evals;
    for (const auto& m : population_) evals.push_back(m.eval);
    const std::vector<int> rank = nondominated_sort(evals);
    const auto objs = objectives_of(population_);
    std::vector<double> crowd(population_.size(), 0.0);
    for (const auto& front : nondominated_fronts(objs)) {
      std::vector<Objectives> f;
      for (std::size_t i : front) f.push_back(objs[i]);
      const auto d = crowding_distance(f);
      for (std::size_t k = 0; k < front.size(); ++k) crowd[front[k]] = d[k];
    }

    std::vector<Member> combined = population_;
    for (int k = 0; k < cfg_.pop_size && evaluator_.has_budget(); ++k) {
      combined.push_back(make_offspring(population_[tournament(rank, crowd)]));
    }
    const auto survivors = nsga2_survivors(objectives_of(combined), population_.size());
    std::vector<Member> next;
    next.reserve(survivors.size());
    for (std::size_t i : survivors) next.push_back(std::move(combined[i]));
    population_ = std::move(next);
    ++iterations_;
  }

 private:
  std::size_t tournament(const std::vector<int>& rank, const std::vector<double>& crowd) {
    const std::size_t a = uniform_index(rng_, population_.size());
    const std::size_t b = uniform_index(rng_, population_.size());
    if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
    if (crowd[a] != crowd[b]) return crowd[a] > crowd[b] ? a : b;
    return std::bernoulli_distribution(0.5)(rng_) ? a : b;
  }
};

// ---------------------------------------------------------------------------

class Spea2 final : public Algorithm {
 public:
  using Algorithm::Algorithm;

  void iterate() override {
    const std::size_t archive_cap = archive_capacity();
    std::vector<Member> united = population_;
    united.insert(united.end(), archive_.begin(), archive_.end());
    const auto objs = objectives_of(united);
    const int k = static_cast<int>(std::lround(
        std::sqrt(static_cast<double>(population_.size() + archive_cap))));
    const auto fitness = spea2_fitness(objs, k);
    const auto keep = spea2_select(objs, fitness, archive_cap);
    std::vector<Member> next_archive;
    std::vector<double> archive_fit;
    for (std::size_t i : keep) {
      next_archive.push_back(united[i]);
      archive_fit.push_back(fitness[i]);
    }
    archive_ = std::move(next_archive);

    // Mating selection from the archive; offspring form the next population.
    std::vector<Member> offspring;
    for (int j = 0; j < cfg_.pop_size && evaluator_.has_budget(); ++j) {
      const std::size_t a = uniform_index(rng_, archive_.size());
      const std::size_t b = uniform_index(rng_, archive_.size());
      std::size_t w;
      if (archive_fit[a] != archive_fit[b]) {
        w = archive_fit[a] < archive_fit[b] ? a : b;
      } else {
        w = std::bernoulli_distribution(0.5)(rng_) ? a : b;
      }
      offspring.push_back(make_offspring(archive_[w]));
    }
    // A budget cut mid-generation keeps the unreplaced parents.
    for (std::size_t j = offspring.size(); j < population_.size(); ++j) {
      offspring.push_back(population_[j]);
    }
    population_ = std::move(offspring);
    ++iterations_;
  }

  std::vector<Member> solutions() const override {
    std::vector<Member> out = population_;
    out.insert(out.end(), archive_.begin(), archive_.end());
    return out;
  }

  void after_response() override {
    for (auto& m : archive_) m.eval = evaluator_(m.schedule);
  }

 private:
  std::size_t archive_capacity() const {
    return static_cast<std::size_t>(cfg_.spea2_archive_size > 0 ? cfg_.spea2_archive_size
                                                                : cfg_.pop_size);
  }

  std::vector<Member> archive_;
};

// ---------------------------------------------------------------------------

class SmsEmoa final : public Algorithm {
 public:
  using Algorithm::Algorithm;

  void iterate() override {
    if (!evaluator_.has_budget()) return;
    const std::size_t parent = uniform_index(rng_, population_.size());
    population_.push_back(make_offspring(population_[parent]));

    const auto objs = objectives_of(population_);
    const auto fronts = nondominated_fronts(objs);
    const auto& worst = fronts.back();
    std::size_t victim;
    if (worst.size() == 1) {
      victim = worst.front();
    } else {
      const Objectives ref =
          smsemoa_reference(objs, cfg_.smsemoa_ref_fraction, cfg_.smsemoa_ref_floor);
      std::vector<Objectives> pts;
      for (std::size_t i : worst) pts.push_back(objs[i]);
      victim = worst[min_contributor_keep_extremes(pts, ref)];
    }
    population_.erase(population_.begin() + static_cast<std::ptrdiff_t>(victim));
    ++iterations_;
  }

 private:
  // The best point in each objective is never removed while other candidates exist.
  static std::size_t min_contributor_keep_extremes(const std::vector<Objectives>& pts,
                                                   const Objectives& ref) {
    if (pts.size() <= 2) return min_contributor(pts, ref);
    std::size_t best0 = 0, best1 = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i][0] < pts[best0][0] || (pts[i][0] == pts[best0][0] && pts[i][1] < pts[best0][1])) best0 = i;
      if (pts[i][1] < pts[best1][1] || (pts[i][1] == pts[best1][1] && pts[i][0] < pts[best1][0])) best1 = i;
    }
    const double total = hypervolume_2d(pts, ref);
    std::vector<Objectives> rest;
    std::size_t victim = pts.size();
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best0 || i == best1) continue;
      rest.clear();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j != i) rest.push_back(pts[j]);
      }
      const double loss = total - hypervolume_2d(rest, ref);
      if (loss < best_loss) {
        best_loss = loss;
        victim = i;
      }
    }
    return victim == pts.size() ? min_contributor(pts, ref) : victim;
  }
};

}  // namespace

std::vector<std::size_t> nsga2_survivors(std::span<const Objectives> objs, std::size_t n) {
  std::vector<std::size_t> out;
  for (const auto& front : nondominated_fronts(objs)) {
    if (out.size() + front.size() <= n) {
      out.insert(out.end(), front.begin(), front.end());
      if (out.size() == n) break;
      continue;
    }
    std::vector<Objectives> f;
    for (std::size_t i : front) f.push_back(objs[i]);
    const auto d = crowding_distance(f);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    for (std::size_t k = 0; out.size() < n; ++k) out.push_back(front[order[k]]);
    break;
  }
  return out;
}

Objectives smsemoa_reference(std::span<const Objectives> objs, double fraction, double floor) {
  Objectives lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Objectives hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& o : objs) {
    for (int m = 0; m < 2; ++m) {
      lo[m] = std::min(lo[m], o[m]);
      hi[m] = std::max(hi[m], o[m]);
    }
  }
  Objectives ref;
  for (int m = 0; m < 2; ++m) ref[m] = hi[m] + std::max(fraction * (hi[m] - lo[m]), floor);
  return ref;
}

std::unique_ptr<Algorithm> make_algorithm(const AlgoConfig& cfg, Evaluator& evaluator,
                                          MutationFn mutate, Rng& rng) {
  switch (cfg.algorithm) {
    case AlgorithmKind::moead: return std::make_unique<Moead>(cfg, evaluator, std::move(mutate), rng);
    case AlgorithmKind::nsga2: return std::make_unique<Nsga2>(cfg, evaluator, std::move(mutate), rng);
    case AlgorithmKind::spea2: return std::make_unique<Spea2>(cfg, evaluator, std::move(mutate), rng);
    case AlgorithmKind::smsemoa: return std::make_unique<SmsEmoa>(cfg, evaluator, std::move(mutate), rng);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace dccopmsp
