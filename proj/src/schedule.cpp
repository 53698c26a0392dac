#include "dccopmsp/schedule.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace dccopmsp {

std::uint64_t Schedule::hash() const {
  // FNV-1a over the period values.
  std::uint64_t h = 1469598103934665603ULL;
  for (Period p : period_) {
    auto v = static_cast<std::uint32_t>(p);
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void check_schedule(const Instance& inst, const Schedule& x) {
  if (x.size() != inst.num_blocks()) {
    throw InstanceError("schedule has " + std::to_string(x.size()) + " entries, instance has " +
                        std::to_string(inst.num_blocks()) + " blocks");
  }
  for (BlockId b = 0; b < x.size(); ++b) {
    if (x[b] < 0 || x[b] > inst.periods()) {
      throw InstanceError("block " + std::to_string(b) + " assigned to invalid period " +
                          std::to_string(x[b]));
    }
  }
}

ResourceMatrix resource_usage(const Instance& inst, const Schedule& x) {
  ResourceMatrix usage(inst.num_resources(), inst.periods());
  for (BlockId b = 0; b < x.size(); ++b) {
    const Period t = x[b];
    if (t == kUnmined) continue;
    const auto& use = inst.block(b).resource_use;
    for (int r = 0; r < inst.num_resources(); ++r) usage(r, t) += use[static_cast<std::size_t>(r)];
  }
  return usage;
}

double violation(const ResourceMatrix& caps, const ResourceMatrix& usage) {
  double total = 0.0;
  for (Period t = 1; t <= caps.periods(); ++t) {
    double worst = 0.0;
    for (int r = 0; r < caps.resources(); ++r) {
      const double excess = usage(r, t) - caps(r, t);
      if (excess > kCapacityTolerance * std::max(1.0, std::abs(caps(r, t)))) {
        worst = std::max(worst, excess);
      }
    }
    total += worst;
  }
  return total;
}

double violation(const Instance& inst, const ResourceMatrix& caps, const Schedule& x) {
  return violation(caps, resource_usage(inst, x));
}

PrecedenceCheck precedence_ok(const Instance& inst, const Schedule& x) {
  PrecedenceCheck out;
  for (const Arc& a : inst.precedence()) {
    const Period ts = x[a.succ];
    if (ts == kUnmined) continue;
    const Period tp = x[a.pred];
    if (tp == kUnmined || tp > ts) {
      if (out.ok) out.witness = a;
      out.ok = false;
      ++out.violated_arcs;
    }
  }
  return out;
}

Evaluation evaluate(const Instance& inst, const ResourceMatrix& caps, const ProfitMoments& moments,
                    const EnsembleSet& ens, const Schedule& x, double penalty_m) {
  Evaluation ev;
  ev.usage = resource_usage(inst, x);
  ev.violation = violation(caps, ev.usage);
  ev.precedence_violations = precedence_ok(inst, x).violated_arcs;
  ev.expected = expected_npv(inst, moments, x);
  ev.variance = total_variance(inst, moments, ens, x);
  ev.stddev = std::sqrt(ev.variance);
  ev.feasible = ev.violation == 0.0 && ev.precedence_violations == 0;
  if (ev.feasible) {
    ev.f1 = ev.expected;
    ev.f2 = ev.stddev;
  } else {
    const double v = ev.violation_total();
    ev.f1 = -v;
    ev.f2 = ev.variance + penalty_m * v;
  }
  return ev;
}

Evaluator::Evaluator(const Problem& problem, ResourceMatrix caps, EvaluatorOptions options)
    : problem_(problem), caps_(std::move(caps)), options_(options) {
  if (caps_.resources() != problem.instance.num_resources() ||
      caps_.periods() != problem.instance.periods()) {
    throw InstanceError("capacity matrix does not match the instance");
  }
}

Evaluation Evaluator::operator()(const Schedule& x) {
  if (options_.memoize) {
    const auto h = x.hash();
    auto it = memo_.find(h);
    if (it != memo_.end()) {
      for (const auto& [s, ev] : it->second) {
        if (s == x) {
          ++hits_;
          if (options_.charge_cached && charging_) ++counter_;
          return ev;
        }
      }
    }
    Evaluation ev = evaluate(problem_.instance, caps_, problem_.moments, problem_.ensembles, x,
                             options_.penalty_m);
    ev.epoch = epoch_;
    if (charging_) ++counter_;
    // Bound memory on long runs.
    if (memo_.size() > 50000) memo_.clear();
    memo_[h].emplace_back(x, ev);
    return ev;
  }
  Evaluation ev = evaluate(problem_.instance, caps_, problem_.moments, problem_.ensembles, x,
                           options_.penalty_m);
  ev.epoch = epoch_;
  if (charging_) ++counter_;
  return ev;
}

void Evaluator::set_capacities(ResourceMatrix caps, int epoch) {
  caps_ = std::move(caps);
  epoch_ = epoch;
  memo_.clear();
}

void write_schedule(std::ostream& out, const Schedule& x) {
  for (BlockId b = 0; b < x.size(); ++b) {
    if (x.mined(b)) out << b << ' ' << x[b] << "\n";
  }
}

Schedule read_schedule(std::istream& in, const Instance& inst) {
  Schedule x(inst.num_blocks());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError("<schedule>", line_no, "expected '<block_id> <period>'");
    auto b = parse_number<BlockId>(tok[0]);
    auto t = parse_number<Period>(tok[1]);
    if (!b || !t) throw ParseError("<schedule>", line_no, "expected integers");
    if (*b < 0 || *b >= inst.num_blocks()) throw ParseError("<schedule>", line_no, "unknown block");
    if (*t < 1 || *t > inst.periods()) throw ParseError("<schedule>", line_no, "invalid period");
    x[*b] = *t;
  }
  return x;
}

}  // namespace dccopmsp
