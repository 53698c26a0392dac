#include "dccopmsp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "dccopmsp/stats.hpp"
#include "text_util.hpp"

namespace dccopmsp {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

std::string run_label(const RunRecord& rec) {
  const auto& c = rec.config;
  std::string label = rec.instance_name + "_" + to_string(c.algo.algorithm) + "-" + to_string(c.mechanism) +
                      "_nu" + std::to_string(c.nu) + "_s" + std::to_string(c.seed);
  return label;
}

std::vector<RunRow> rows_from_records(const std::vector<RunRecord>& records) {
  std::vector<RunRow> rows;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.config.alphas.size(); ++i) {
      if (std::isnan(r.offline_error[i])) continue;
      rows.push_back({r.instance_name, to_string(r.config.algo.algorithm), to_string(r.config.mechanism),
                      r.config.nu, r.config.alphas[i], r.config.seed, r.offline_error[i]});
    }
  }
  return rows;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << "instance,algorithm,mechanism,nu,alpha,seed,offline_error\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.algorithm << ',' << r.mechanism << ',' << r.nu << ','
        << format_double(r.alpha) << ',' << r.seed << ',' << format_double(r.offline_error) << "\n";
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in, const std::string& source) {
  std::vector<RunRow> rows;
  std::string line;
  int lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("instance,", 0) == 0) continue;
    }
    const auto f = split_on(line, ',');
    if (f.size() != 7) throw ParseError(source, lineno, "expected 7 columns");
    RunRow r;
    r.instance = f[0];
    r.algorithm = f[1];
    r.mechanism = f[2];
    auto nu = parse_number<int>(f[3]);
    auto alpha = parse_number<double>(f[4]);
    auto seed = parse_number<std::uint64_t>(f[5]);
    auto err = parse_number<double>(f[6]);
    if (!nu || !alpha || !seed || !err) throw ParseError(source, lineno, "malformed number");
    r.nu = *nu;
    r.alpha = *alpha;
    r.seed = *seed;
    r.offline_error = *err;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows) {
  using Key = std::tuple<std::string, int, double, int, std::string, std::string>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : rows) {
    groups[{r.instance, r.nu, r.alpha, group_number(r.algorithm, r.mechanism), r.algorithm, r.mechanism}]
        .push_back(r.offline_error);
  }
  std::vector<SummaryRow> out;
  for (const auto& [k, v] : groups) {
    out.push_back({std::get<0>(k), std::get<4>(k), std::get<5>(k), std::get<1>(k), std::get<2>(k), mean(v),
                   sample_stddev(v), static_cast<int>(v.size())});
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, double scale) {
  out << "instance,algorithm,mechanism,nu,alpha,mean_offline_error,std_offline_error,runs\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.algorithm << ',' << r.mechanism << ',' << r.nu << ','
        << format_double(r.alpha) << ',' << format_double(r.mean / scale) << ','
        << format_double(r.stddev / scale) << ',' << r.runs << "\n";
  }
}

int group_number(const std::string& algorithm, const std::string& mechanism) {
  static const char* algos[] = {"moead", "nsga2", "spea2", "smsemoa"};
  for (int a = 0; a < 4; ++a) {
    if (algorithm == algos[a]) {
      if (mechanism == "re") return 2 * a + 1;
      if (mechanism == "div") return 2 * a + 2;
    }
  }
  return 0;
}

void write_significance_csv(std::ostream& out, const std::vector<RunRow>& rows, double confidence) {
  using Setting = std::tuple<std::string, int, double>;
  std::map<Setting, std::map<std::pair<int, std::string>, std::vector<double>>> settings;
  for (const auto& r : rows) {
    const int g = group_number(r.algorithm, r.mechanism);
    settings[{r.instance, r.nu, r.alpha}][{g, r.algorithm + "-" + r.mechanism}].push_back(r.offline_error);
  }
  out << "instance,nu,alpha,group,number,p_value,relations\n";
  for (const auto& [setting, groups] : settings) {
    if (groups.size() < 2) continue;
    std::vector<std::vector<double>> samples;
    std::vector<int> numbers;
    std::vector<std::string> names;
    int fallback = 100;
    for (const auto& [key, v] : groups) {
      samples.push_back(v);
      numbers.push_back(key.first > 0 ? key.first : ++fallback);
      names.push_back(key.second);
    }
    const auto kw = kruskal_wallis(samples, confidence);
    for (std::size_t c = 0; c < samples.size(); ++c) {
      out << std::get<0>(setting) << ',' << std::get<1>(setting) << ',' << format_double(std::get<2>(setting))
          << ',' << names[c] << ',' << numbers[c] << ',' << format_double(kw.p_value) << ','
          << relation_cell(kw, c, numbers) << "\n";
    }
  }
}

void emit_results(const std::vector<RunRecord>& records, const EmitOptions& options) {
  if (records.empty()) throw std::invalid_argument("no run records to emit");
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir / "runs");
  std::set<std::string> used;
  for (const auto& r : records) {
    std::string label = run_label(r);
    for (int k = 2; used.count(label); ++k) label = run_label(r) + "_" + std::to_string(k);
    used.insert(label);
    auto out = open_out(options.out_dir / "runs" / (label + ".json"));
    out << r.to_json(options.include_timing).dump(1) << "\n";
    if (options.traces) {
      fs::create_directories(options.out_dir / "traces");
      std::vector<TracePoint> trace;
      const auto& hist = r.capacity_history;
      for (std::size_t e = 0; e < hist.size(); ++e) {
        for (int res = 0; res < hist[e].resources(); ++res) {
          for (Period t = 1; t <= hist[e].periods(); ++t) {
            trace.push_back({res, t, static_cast<int>(e), hist[e](res, t), hist.front()(res, t)});
          }
        }
      }
      auto csv = open_out(options.out_dir / "traces" / (label + ".csv"));
      write_trace_csv(csv, trace, r.resource_names);
      auto svg = open_out(options.out_dir / "traces" / (label + ".svg"));
      write_trace_svg(svg, trace, r.resource_names);
    }
  }
  const auto rows = rows_from_records(records);
  {
    auto out = open_out(options.out_dir / "runs.csv");
    write_runs_csv(out, rows);
  }
  {
    auto out = open_out(options.out_dir / "summary.csv");
    write_summary_csv(out, summarize(rows), options.scale_millions ? 1e6 : 1.0);
  }
  {
    auto out = open_out(options.out_dir / "significance.csv");
    write_significance_csv(out, rows);
  }
}

}  // namespace dccopmsp
