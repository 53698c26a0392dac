#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dccopmsp/harness.hpp"

namespace dccopmsp {

/// One offline-error observation: a run at one confidence level.
struct RunRow {
  std::string instance;
  std::string algorithm;
  std::string mechanism;
  int nu = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double offline_error = 0.0;
};

struct SummaryRow {
  std::string instance;
  std::string algorithm;
  std::string mechanism;
  int nu = 0;
  double alpha = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int runs = 0;
};

std::vector<RunRow> rows_from_records(const std::vector<RunRecord>& records);

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows);
std::vector<RunRow> read_runs_csv(std::istream& in, const std::string& source);

std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows);
/// `scale` divides the error columns (1e6 reports millions of dollars).
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, double scale = 1.0);

/// Position of an algorithm/mechanism pair in the fixed column order
/// moead-re, moead-div, nsga2-re, nsga2-div, spea2-re, spea2-div,
/// smsemoa-re, smsemoa-div (1-based; 0 for an unknown pair).
int group_number(const std::string& algorithm, const std::string& mechanism);

/// One line per (instance, nu, alpha) with at least two groups; each group
/// cell lists the other groups with +, - or *.
void write_significance_csv(std::ostream& out, const std::vector<RunRow>& rows, double confidence = 0.95);

struct EmitOptions {
  std::filesystem::path out_dir;
  bool scale_millions = false;
  bool traces = false;
  bool include_timing = false;
};

/// Per-run JSON under runs/, plus runs.csv, summary.csv, significance.csv,
/// and capacity traces under traces/ when requested.
void emit_results(const std::vector<RunRecord>& records, const EmitOptions& options);

std::string run_label(const RunRecord& rec);

}  // namespace dccopmsp
