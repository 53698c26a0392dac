#include "dccopmsp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "dccopmsp/operators.hpp"

namespace dccopmsp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Component streams derived from the master seed at fixed offsets.
enum SeedOffset : std::uint64_t { kInit = 1, kMutation = 2, kDynamics = 3, kRepair = 4 };

std::uint64_t component_seed(std::uint64_t master, SeedOffset off) {
  return splitmix64(master * 0x100000001b3ULL + off);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

BestAtAlpha summarize(const Member& m, double alpha, double bound) {
  const auto params = ChanceParams::from_alpha(alpha);
  BestAtAlpha b;
  b.alpha = alpha;
  b.feasible = m.eval.feasible;
  b.expected = m.eval.expected;
  b.stddev = m.eval.stddev;
  b.violation = m.eval.violation_total();
  b.value = m.eval.feasible ? risk_adjusted_value(m.eval.expected, m.eval.variance, params) : nan();
  b.error = offline_error(m.eval, bound, params);
  b.schedule = m.schedule;
  return b;
}

std::vector<BestAtAlpha> snapshot(const std::vector<Member>& members, const std::vector<double>& alphas,
                                  double bound) {
  std::vector<BestAtAlpha> out;
  for (double a : alphas) {
    const auto idx = select_best(members, ChanceParams::from_alpha(a));
    out.push_back(summarize(members[idx], a, bound));
  }
  return out;
}

nlohmann::ordered_json best_json(const BestAtAlpha& b) {
  nlohmann::ordered_json j;
  j["alpha"] = b.alpha;
  j["feasible"] = b.feasible;
  if (b.feasible) {
    j["value"] = b.value;
  } else {
    j["violation"] = b.violation;
  }
  j["expected"] = b.expected;
  j["stddev"] = b.stddev;
  j["error"] = b.error;
  auto sched = nlohmann::ordered_json::array();
  for (Period p : b.schedule.periods()) sched.push_back(p);
  j["schedule"] = std::move(sched);
  return j;
}

}  // namespace

Problem build_problem(Instance inst, const StochasticConfig& cfg) {
  if (cfg.ensembles_path) {
    EnsembleSet ens = load_ensembles(*cfg.ensembles_path);
    if (ens.blocks() != inst.num_blocks()) {
      throw InstanceError("ensemble file has " + std::to_string(ens.blocks()) +
                          " blocks, instance has " + std::to_string(inst.num_blocks()));
    }
    ProfitMoments m = moments_from_ensembles(inst, ens);
    return Problem{std::move(inst), std::move(m), std::move(ens)};
  }
  CorrelationSpec corr = cfg.correlation;
  if (corr.mode == CorrelationMode::neighborhood && !inst.has_coords()) {
    corr.mode = CorrelationMode::independent;
  }
  EnsembleSet ens = generate_ensembles(inst, cfg.rel_stddev, corr, cfg.ensemble_seed, cfg.ensemble_count);
  ProfitMoments m = moments_for_generated(inst, ens, cfg.rel_stddev);
  return Problem{std::move(inst), std::move(m), std::move(ens)};
}

void RunConfig::validate() const {
  if (algo.pop_size < 2) throw std::invalid_argument("population size must be >= 2");
  if (!(algo.mutation_rate > 0.0 && algo.mutation_rate <= 1.0)) {
    throw std::invalid_argument("mutation rate must be in (0, 1]");
  }
  if (budget < 1) throw std::invalid_argument("evaluation budget must be >= 1");
  if (nu < 0) throw std::invalid_argument("number of changes must be >= 0");
  if (alphas.empty()) throw std::invalid_argument("at least one confidence level is required");
  for (double a : alphas) ChanceParams::from_alpha(a);
  if (repair_budget < 1) throw std::invalid_argument("repair budget must be >= 1");
  if (!(penalty_m > 0.0)) throw std::invalid_argument("penalty constant must be positive");
  DynamicConfig{nu, eta, budget, 0}.validate();
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["instance"] = instance_label;
  j["algorithm"] = to_string(algo.algorithm);
  j["mechanism"] = to_string(mechanism);
  j["alphas"] = alphas;
  j["nu"] = nu;
  j["eta"] = eta;
  j["budget"] = budget;
  j["seed"] = seed;
  j["pop_size"] = algo.pop_size;
  j["mutation_rate"] = algo.mutation_rate;
  j["penalty_m"] = penalty_m;
  j["repair_budget"] = repair_budget;
  j["greedy_noise"] = greedy_noise;
  if (external_bound) j["external_bound"] = *external_bound;
  j["charge_cached"] = charge_cached;
  j["charge_reevaluation"] = charge_reevaluation;
  return j;
}

nlohmann::ordered_json RunRecord::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  j["instance_name"] = instance_name;
  j["upper_bound"] = upper_bound;
  j["evaluations"] = evaluations;
  j["cache_hits"] = cache_hits;
  j["stalled"] = stalled;
  auto err = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < offline_error.size(); ++i) {
    nlohmann::ordered_json e;
    e["alpha"] = config.alphas[i];
    if (std::isnan(offline_error[i])) {
      e["offline_error"] = nullptr;
    } else {
      e["offline_error"] = offline_error[i];
    }
    err.push_back(std::move(e));
  }
  j["offline_error"] = std::move(err);
  auto changes_j = nlohmann::ordered_json::array();
  for (const auto& c : changes) {
    nlohmann::ordered_json cj;
    cj["index"] = c.index;
    cj["eval_count"] = c.eval_count;
    auto factors = nlohmann::ordered_json::object();
    for (const auto& [t, g] : c.event.factors) factors[std::to_string(t)] = g;
    cj["factors"] = std::move(factors);
    auto best = nlohmann::ordered_json::array();
    for (const auto& b : c.best) best.push_back(best_json(b));
    cj["best"] = std::move(best);
    if (c.response) {
      nlohmann::ordered_json r;
      r["feasible_before"] = c.response->feasible_before;
      r["repaired"] = c.response->repaired;
      r["injected_random"] = c.response->injected_random;
      r["filled_least_violating"] = c.response->filled_least_violating;
      r["evals_spent"] = c.response->evals_spent;
      cj["response"] = std::move(r);
    } else {
      cj["response"] = nullptr;
    }
    changes_j.push_back(std::move(cj));
  }
  j["changes"] = std::move(changes_j);
  auto fin = nlohmann::ordered_json::array();
  for (const auto& b : final_best) fin.push_back(best_json(b));
  j["final_best"] = std::move(fin);
  j["final_has_feasible"] = final_has_feasible;
  if (final_has_feasible) j["final_max_expected"] = final_max_expected;
  j["warnings"] = warnings;
  if (include_timing) j["wall_seconds"] = wall_seconds;
  return j;
}

double upper_bound(const Instance& inst, const ProfitMoments& moments, std::optional<double> external) {
  double sum = 0.0;
  for (double mu : moments.mean) sum += std::max(0.0, mu);
  const double analytic = sum * inst.discount(1);
  return external ? std::min(analytic, *external) : analytic;
}

std::size_t select_best(const std::vector<Member>& members, const ChanceParams& params) {
  if (members.empty()) throw std::invalid_argument("select_best on an empty set");
  std::size_t best = members.size();
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& ev = members[i].eval;
    if (!ev.feasible) continue;
    const double v = risk_adjusted_value(ev.expected, ev.variance, params);
    if (best == members.size() || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  if (best != members.size()) return best;
  best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].eval.violation_total() < members[best].eval.violation_total()) best = i;
  }
  return best;
}

double offline_error(const Evaluation& best, double bound, const ChanceParams& params) {
  if (best.feasible) return bound - risk_adjusted_value(best.expected, best.variance, params);
  return bound + best.violation_total();
}

RunRecord run_experiment(const Problem& problem, const RunConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const Instance& inst = problem.instance;

  double abs_sum = 0.0;
  for (double mu : problem.moments.mean) abs_sum += std::abs(mu);
  if (config.penalty_m < abs_sum) {
    throw std::invalid_argument("penalty constant M must exceed the attainable objective scale (" +
                                std::to_string(abs_sum) + ")");
  }

  RunRecord rec;
  rec.config = config;
  rec.instance_name = inst.name();
  rec.resource_names = inst.resource_names();
  rec.upper_bound = upper_bound(inst, problem.moments, config.external_bound);

  DynamicConfig dcfg{config.nu, config.eta, config.budget, component_seed(config.seed, kDynamics)};
  DynamicEnvironment env(inst.baseline_capacity(), dcfg);
  const long tau = dcfg.change_interval();

  Evaluator evaluator(problem, env.current(),
                      EvaluatorOptions{config.penalty_m, true, config.charge_cached});
  Rng init_rng(component_seed(config.seed, kInit));
  Rng mut_rng(component_seed(config.seed, kMutation));
  Rng repair_rng(component_seed(config.seed, kRepair));

  MutationFn mutate = [&](const Schedule& x, double pm, Rng& rng) {
    return period_swap_mutation(inst, evaluator.capacities(), x, pm, rng);
  };
  MutationFn repair_mutate = [&](const Schedule& x, double pm, Rng& rng) {
    MutationOptions opts;
    opts.check_capacity = false;
    return period_swap_mutation(inst, evaluator.capacities(), x, pm, rng, opts);
  };
  const GreedyOptions gopts{config.greedy_noise};
  InitFn fresh = [&](Rng& rng) {
    return greedy_randomized_init(inst, evaluator.capacities(), problem.moments, rng, gopts);
  };

  auto next_boundary = [&](int next_change) {
    if (config.nu > 0 && next_change <= config.nu) {
      return std::min(config.budget, static_cast<long>(next_change) * tau);
    }
    return config.budget;
  };

  int next = 1;
  // Initial population evaluations are not cut off by the limit.
  evaluator.set_limit(next_boundary(next));
  std::vector<Member> init;
  init.reserve(static_cast<std::size_t>(config.algo.pop_size));
  for (int i = 0; i < config.algo.pop_size; ++i) {
    Member m;
    m.schedule = fresh(init_rng);
    m.eval = evaluator(m.schedule);
    init.push_back(std::move(m));
  }
  auto algo = make_algorithm(config.algo, evaluator, mutate, mut_rng);
  algo->initialize(std::move(init));

  const DivOptions dopts{config.algo.mutation_rate, config.repair_budget, 0.2, config.charge_reevaluation};
  long stall = 0;
  for (;;) {
    if (config.nu > 0 && next <= config.nu && evaluator.count() >= static_cast<long>(next) * tau) {
      ChangeRecord cr;
      cr.index = next;
      cr.eval_count = evaluator.count();
      cr.best = snapshot(algo->solutions(), config.alphas, rec.upper_bound);
      cr.event = env.next_change(evaluator.count());
      evaluator.set_capacities(env.current(), env.epoch());
      if (evaluator.count() < config.budget) {
        evaluator.set_limit(next_boundary(next + 1));
        if (config.mechanism == Mechanism::re) {
          const long before = evaluator.count();
          const bool charging = evaluator.charging();
          if (!config.charge_reevaluation) evaluator.set_charging(false);
          respond_re(algo->population(), evaluator);
          evaluator.set_charging(charging);
          ResponseReport r;
          for (const auto& m : algo->population()) r.feasible_before += m.eval.feasible ? 1 : 0;
          r.evals_spent = evaluator.count() - before;
          cr.response = r;
        } else {
          cr.response = respond_div(algo->population(), evaluator, repair_mutate, fresh, dopts, repair_rng);
        }
        algo->after_response();
      }
      rec.changes.push_back(std::move(cr));
      ++next;
      continue;
    }
    if (evaluator.count() >= config.budget) break;
    evaluator.set_limit(next_boundary(next));
    const long before = evaluator.count();
    algo->iterate();
    if (evaluator.count() == before) {
      if (++stall >= config.stall_limit) {
        rec.stalled = true;
        rec.warnings.push_back("run stalled: no new evaluations for " +
                               std::to_string(config.stall_limit) + " iterations");
        break;
      }
    } else {
      stall = 0;
    }
  }

  const auto final_members = algo->solutions();
  rec.final_best = snapshot(final_members, config.alphas, rec.upper_bound);
  for (const auto& m : final_members) {
    if (!m.eval.feasible) continue;
    if (!rec.final_has_feasible || m.eval.expected > rec.final_max_expected) {
      rec.final_max_expected = m.eval.expected;
    }
    rec.final_has_feasible = true;
  }

  rec.offline_error.assign(config.alphas.size(), config.nu > 0 ? 0.0 : nan());
  for (const auto& c : rec.changes) {
    for (std::size_t i = 0; i < c.best.size(); ++i) rec.offline_error[i] += c.best[i].error;
  }
  if (!rec.changes.empty()) {
    for (double& e : rec.offline_error) e /= static_cast<double>(rec.changes.size());
  }

  // A bound below an observed feasible value cannot be an upper bound.
  double observed = -std::numeric_limits<double>::infinity();
  for (const auto& c : rec.changes) {
    for (const auto& b : c.best) {
      if (b.feasible) observed = std::max(observed, b.value);
    }
  }
  for (const auto& b : rec.final_best) {
    if (b.feasible) observed = std::max(observed, b.value);
  }
  if (observed > rec.upper_bound) {
    const std::string msg = "upper bound " + std::to_string(rec.upper_bound) +
                            " is below an observed feasible value " + std::to_string(observed);
    rec.warnings.push_back(msg);
    std::cerr << "warning: " << msg << "\n";
  }

  rec.evaluations = evaluator.count();
  rec.cache_hits = evaluator.cache_hits();
  rec.capacity_history = env.history();
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

}  // namespace dccopmsp
