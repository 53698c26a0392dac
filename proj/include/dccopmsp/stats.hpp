#pragma once

#include <string>
#include <vector>

namespace dccopmsp {

/// Relation of group i to group j for a lower-is-better metric.
enum class Relation : char { worse = '+', better = '-', same = '*' };

struct KruskalResult {
  double h = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool significant = false;
  std::vector<double> mean_ranks;
  /// relation[i][j]: '+' when i is significantly worse (larger) than j,
  /// '-' when significantly better, '*' otherwise. Diagonal is '*'.
  std::vector<std::vector<Relation>> relation;
  std::vector<std::vector<double>> pairwise_p;
};

/// Kruskal-Wallis H test with tie correction. When the omnibus test is
/// significant, pairs are compared with Dunn's z test against a
/// Bonferroni-adjusted threshold (1 - confidence) / pairs.
KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double confidence = 0.95);

double mean(const std::vector<double>& v);
/// Sample standard deviation (n-1); 0 for fewer than two values.
double sample_stddev(const std::vector<double>& v);

/// Table cell for column group `c`: e.g. "2+ 3- 4*" over the other groups, 1-based.
std::string relation_cell(const KruskalResult& r, std::size_t c);
/// Same, with explicit group numbers.
std::string relation_cell(const KruskalResult& r, std::size_t c, const std::vector<int>& numbers);

}  // namespace dccopmsp
