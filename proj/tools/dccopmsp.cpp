#include <algorithm>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dccopmsp/harness.hpp"
#include "dccopmsp/report.hpp"
#include "dccopmsp/synthetic.hpp"

using namespace dccopmsp;

namespace {

int fail(const std::string& kind, const std::string& message, int code = 1) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
  return code;
}

std::vector<double> parse_alphas(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(',', start);
    const auto tok = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad alpha '" + tok + "'");
    out.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

struct InstanceArgs {
  std::string path;
  std::string format = "canonical";
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--instance", a.path, "Instance file (canonical) or descriptor (minelib)")
      ->required()
      ->envname("DCCOPMSP_INSTANCE");
  cmd->add_option("--format", a.format, "canonical or minelib")
      ->check(CLI::IsMember({"canonical", "minelib"}))
      ->envname("DCCOPMSP_FORMAT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic chance-constrained open-pit mine scheduling experiments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one algorithm/mechanism configuration over several seeds");
  InstanceArgs run_inst;
  add_instance_options(run, run_inst);
  std::string algo = "nsga2", mech = "div", alphas = "0.60,0.90,0.99", out_dir = "results";
  std::string correlation = "neighborhood", ensembles_path;
  RunConfig rc;
  StochasticConfig sc;
  int repeats = 10, jobs = 1;
  double bound = 0.0;
  bool no_charge_cached = false, free_reeval = false, traces = false, millions = false, timing = false;
  run->add_option("--algo", algo)->check(CLI::IsMember({"moead", "nsga2", "spea2", "smsemoa"}))->envname("DCCOPMSP_ALGO");
  run->add_option("--mech", mech)->check(CLI::IsMember({"re", "div"}))->envname("DCCOPMSP_MECH");
  run->add_option("--alphas", alphas, "Comma-separated confidence levels")->envname("DCCOPMSP_ALPHAS");
  run->add_option("--nu", rc.nu, "Number of capacity changes")->envname("DCCOPMSP_NU");
  run->add_option("--eta", rc.eta, "Change magnitude")->envname("DCCOPMSP_ETA");
  run->add_option("--budget", rc.budget, "Evaluation budget")->envname("DCCOPMSP_BUDGET");
  run->add_option("--pop", rc.algo.pop_size, "Population size")->envname("DCCOPMSP_POP");
  run->add_option("--pm", rc.algo.mutation_rate, "Per-block mutation probability")->envname("DCCOPMSP_PM");
  run->add_option("--seed", rc.seed, "First master seed")->envname("DCCOPMSP_SEED");
  run->add_option("--repeats", repeats, "Seeds seed..seed+repeats-1")->check(CLI::PositiveNumber)->envname("DCCOPMSP_REPEATS");
  run->add_option("--out", out_dir)->envname("DCCOPMSP_OUT");
  run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber)->envname("DCCOPMSP_JOBS");
  run->add_option("--rel-stddev", sc.rel_stddev, "Relative profit stddev of ore blocks")->envname("DCCOPMSP_REL_STDDEV");
  run->add_option("--ensemble-count", sc.ensemble_count)->envname("DCCOPMSP_ENSEMBLE_COUNT");
  run->add_option("--ensemble-seed", sc.ensemble_seed)->envname("DCCOPMSP_ENSEMBLE_SEED");
  run->add_option("--ensembles", ensembles_path, "Read ensembles from file instead of generating")->envname("DCCOPMSP_ENSEMBLES");
  run->add_option("--correlation", correlation)->check(CLI::IsMember({"independent", "neighborhood"}))->envname("DCCOPMSP_CORRELATION");
  run->add_option("--bound", bound, "External upper bound (min with the analytic bound)")->envname("DCCOPMSP_BOUND");
  run->add_option("--repair-budget", rc.repair_budget)->envname("DCCOPMSP_REPAIR_BUDGET");
  run->add_option("--penalty", rc.penalty_m, "Penalty constant M")->envname("DCCOPMSP_PENALTY");
  run->add_flag("--no-charge-cached", no_charge_cached, "Memo hits do not consume budget");
  run->add_flag("--free-reevaluation", free_reeval, "Post-change re-evaluations do not consume budget");
  run->add_flag("--traces", traces, "Write capacity traces (CSV and SVG) per run");
  run->add_flag("--millions", millions, "Report summary errors in millions");
  run->add_flag("--timing", timing, "Include wall time in run JSON");

  // trace
  auto* trace = app.add_subcommand("trace", "Sample a capacity change sequence and plot it");
  InstanceArgs tr_inst;
  add_instance_options(trace, tr_inst);
  DynamicConfig dc{30, 0.4, 10000, 1};
  std::string trace_out = "capacity";
  trace->add_option("--nu", dc.num_changes)->envname("DCCOPMSP_NU");
  trace->add_option("--eta", dc.magnitude)->envname("DCCOPMSP_ETA");
  trace->add_option("--budget", dc.budget)->envname("DCCOPMSP_BUDGET");
  trace->add_option("--seed", dc.seed)->envname("DCCOPMSP_SEED");
  trace->add_option("--out", trace_out, "Output prefix; writes <prefix>.svg and <prefix>.csv");

  // stats
  auto* stats = app.add_subcommand("stats", "Aggregate runs.csv files into summary and significance tables");
  std::vector<std::string> inputs;
  std::string stats_out = "stats";
  bool stats_millions = false;
  stats->add_option("inputs", inputs, "runs.csv files")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out);
  stats->add_flag("--millions", stats_millions);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic layered pit");
  PitSpec ps = newman1_like_spec();
  std::string synth_out = "data", synth_format = "minelib";
  synth->add_option("--name", ps.name);
  synth->add_option("--seed", ps.seed);
  synth->add_option("--nx", ps.top_nx);
  synth->add_option("--ny", ps.top_ny);
  synth->add_option("--layers", ps.layers);
  synth->add_option("--periods", ps.periods);
  synth->add_option("--diagonal-arcs", ps.diagonal_arcs);
  synth->add_option("--mining-share", ps.mining_capacity_share);
  synth->add_option("--processing-share", ps.processing_capacity_share);
  synth->add_option("--out", synth_out);
  synth->add_option("--format", synth_format)->check(CLI::IsMember({"canonical", "minelib"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*run) {
      Instance inst = load_instance(run_inst.path, parse_instance_format(run_inst.format));
      sc.correlation.mode =
          correlation == "independent" ? CorrelationMode::independent : CorrelationMode::neighborhood;
      if (!ensembles_path.empty()) sc.ensembles_path = ensembles_path;
      const Problem problem = build_problem(std::move(inst), sc);

      rc.instance_label = run_inst.path;
      rc.algo.algorithm = parse_algorithm(algo);
      rc.mechanism = parse_mechanism(mech);
      rc.alphas = parse_alphas(alphas);
      if (run->count("--bound")) rc.external_bound = bound;
      rc.charge_cached = !no_charge_cached;
      rc.charge_reevaluation = !free_reeval;
      rc.validate();

      std::vector<RunRecord> records(static_cast<std::size_t>(repeats));
      std::mutex err_mu;
      std::string first_error;
      std::size_t next = 0;
      std::mutex next_mu;
      auto worker = [&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard lk(next_mu);
            if (next >= records.size()) return;
            i = next++;
          }
          try {
            RunConfig c = rc;
            c.seed = rc.seed + i;
            records[i] = run_experiment(problem, c);
          } catch (const std::exception& e) {
            std::lock_guard lk(err_mu);
            if (first_error.empty()) first_error = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < std::min(jobs, repeats); ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      if (!first_error.empty()) return fail("run", first_error);

      emit_results(records, EmitOptions{out_dir, millions, traces, timing});
      nlohmann::ordered_json done;
      done["status"] = "ok";
      done["runs"] = records.size();
      done["out"] = out_dir;
      std::cout << done.dump() << "\n";
    } else if (*trace) {
      const Instance inst = load_instance(tr_inst.path, parse_instance_format(tr_inst.format));
      dc.validate();
      DynamicEnvironment env(inst.baseline_capacity(), dc);
      const long tau = dc.change_interval();
      for (int k = 1; k <= dc.num_changes; ++k) env.next_change(k * tau);
      const auto points = capacity_trace(env);
      std::ofstream svg(trace_out + ".svg"), csv(trace_out + ".csv");
      if (!svg || !csv) return fail("io", "cannot write " + trace_out + ".{svg,csv}");
      write_trace_svg(svg, points, inst.resource_names());
      write_trace_csv(csv, points, inst.resource_names());
    } else if (*stats) {
      std::vector<RunRow> rows;
      for (const auto& p : inputs) {
        std::ifstream in(p);
        auto part = read_runs_csv(in, p);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      if (rows.empty()) return fail("stats", "no rows in the given files");
      std::filesystem::create_directories(stats_out);
      std::ofstream sum(std::filesystem::path(stats_out) / "summary.csv");
      std::ofstream sig(std::filesystem::path(stats_out) / "significance.csv");
      if (!sum || !sig) return fail("io", "cannot write to " + stats_out);
      write_summary_csv(sum, summarize(rows), stats_millions ? 1e6 : 1.0);
      write_significance_csv(sig, rows);
    } else if (*synth) {
      const Instance inst = generate_pit(ps);
      if (synth_format == "minelib") {
        std::cout << write_minelib(inst, synth_out).string() << "\n";
      } else {
        std::filesystem::create_directories(synth_out);
        const auto path = std::filesystem::path(synth_out) / (ps.name + ".txt");
        inst.save_canonical(path);
        std::cout << path.string() << "\n";
      }
    }
  } catch (const ParseError& e) {
    return fail("parse", e.what());
  } catch (const InstanceError& e) {
    return fail("instance", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
