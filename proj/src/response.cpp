#include "dccopmsp/response.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dccopmsp {

std::string to_string(Mechanism m) { return m == Mechanism::re ? "re" : "div"; }

Mechanism parse_mechanism(const std::string& s) {
  if (s == "re") return Mechanism::re;
  if (s == "div") return Mechanism::div;
  throw std::invalid_argument("unknown change-response mechanism '" + s + "'");
}

void respond_re(std::vector<Member>& population, Evaluator& evaluator) {
  for (auto& m : population) m.eval = evaluator(m.schedule);
}

bool repair_accepts(const Evaluation& y, const Evaluation& best) {
  if (y.feasible) {
    if (!best.feasible) return true;
    return y.f1 > best.f1 || (y.f1 == best.f1 && y.f2 <= best.f2);
  }
  return !best.feasible && y.violation_total() < best.violation_total();
}

Member repair_hypermutation(const Member& s, Evaluator& evaluator, const MutationFn& mutate,
                            double pm, int budget, Rng& rng) {
  if (budget < 1) throw std::invalid_argument("repair budget must be >= 1");
  const double hyper_pm = std::min(1.0, 2.0 * pm);
  Member best = s;
  for (int i = 0; i < budget && evaluator.has_budget(); ++i) {
    Member y;
    y.schedule = mutate(best.schedule, hyper_pm, rng);
    y.eval = evaluator(y.schedule);
    if (repair_accepts(y.eval, best.eval)) best = std::move(y);
  }
  return best;
}

ResponseReport respond_div(std::vector<Member>& population, Evaluator& evaluator,
                           const MutationFn& repair_mutation, const InitFn& random_feasible,
                           const DivOptions& options, Rng& rng) {
  const long start = evaluator.count();
  const int n = static_cast<int>(population.size());
  const bool charging = evaluator.charging();
  if (!options.charge_reevaluation) evaluator.set_charging(false);
  respond_re(population, evaluator);
  evaluator.set_charging(charging);

  std::vector<std::size_t> infeasible;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].eval.feasible) infeasible.push_back(i);
  }
  ResponseReport report;
  report.feasible_before = n - static_cast<int>(infeasible.size());
  if (infeasible.empty()) {
    report.evals_spent = evaluator.count() - start;
    return report;
  }

  const int share = static_cast<int>(std::floor(options.fraction * n));

  // Repair a uniformly random subset of the infeasible members in place.
  const int n_repair = std::min(share, static_cast<int>(infeasible.size()));
  std::vector<std::size_t> pick = infeasible;
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(static_cast<std::size_t>(n_repair));
  std::sort(pick.begin(), pick.end());
  for (std::size_t slot : pick) {
    population[slot] = repair_hypermutation(population[slot], evaluator, repair_mutation,
                                            options.pm, options.repair_budget, rng);
  }
  report.repaired = n_repair;
  int feasible_count = report.feasible_before + n_repair;

  std::vector<std::size_t> rest;
  for (std::size_t i : infeasible) {
    if (!std::binary_search(pick.begin(), pick.end(), i)) rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
    return population[a].eval.violation_total() < population[b].eval.violation_total();
  });

  const int k = std::min(share, n - feasible_count);
  const int keep = n - feasible_count - k;
  if (keep < 0 || keep > static_cast<int>(rest.size())) {
    throw std::logic_error("diversity response bookkeeping out of range");
  }
  std::vector<std::size_t> inject_slots(rest.begin() + keep, rest.end());
  std::sort(inject_slots.begin(), inject_slots.end());
  for (std::size_t slot : inject_slots) {
    Member fresh;
    fresh.schedule = random_feasible(rng);
    fresh.eval = evaluator(fresh.schedule);
    population[slot] = std::move(fresh);
  }
  report.injected_random = k;
  report.filled_least_violating = keep;
  report.evals_spent = evaluator.count() - start;
  return report;
}

}  // namespace dccopmsp
