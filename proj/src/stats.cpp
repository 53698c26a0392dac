#include "dccopmsp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "dccopmsp/stochastic.hpp"

namespace dccopmsp {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double confidence) {
  const std::size_t k = groups.size();
  if (k < 2) throw std::invalid_argument("Kruskal-Wallis needs at least two groups");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");

  struct Obs {
    double value;
    std::size_t group;
  };
  std::vector<Obs> all;
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].empty()) throw std::invalid_argument("Kruskal-Wallis group is empty");
    for (double x : groups[g]) {
      if (std::isnan(x)) throw std::invalid_argument("Kruskal-Wallis input contains NaN");
      all.push_back({x, g});
    }
  }
  const double n = static_cast<double>(all.size());
  std::sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });

  // Mid-ranks and the tie term sum(t^3 - t).
  std::vector<double> rank_sum(k, 0.0);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t q = i; q < j; ++q) rank_sum[all[q].group] += r;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  KruskalResult res;
  res.df = static_cast<int>(k) - 1;
  res.mean_ranks.resize(k);
  double h = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double ng = static_cast<double>(groups[g].size());
    res.mean_ranks[g] = rank_sum[g] / ng;
    h += rank_sum[g] * rank_sum[g] / ng;
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - tie_term / (n * n * n - n);
  res.h = correction > 0.0 ? h / correction : 0.0;
  if (correction > 0.0) {
    boost::math::chi_squared dist(res.df);
    res.p_value = boost::math::cdf(boost::math::complement(dist, std::max(0.0, res.h)));
  } else {
    res.p_value = 1.0;   // every observation identical
  }
  const double level = 1.0 - confidence;
  res.significant = res.p_value < level;

  res.relation.assign(k, std::vector<Relation>(k, Relation::same));
  res.pairwise_p.assign(k, std::vector<double>(k, 1.0));
  const double pairs = static_cast<double>(k * (k - 1) / 2);
  const double var_base = (n * (n + 1.0) / 12.0 - tie_term / (12.0 * (n - 1.0)));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double se = std::sqrt(var_base * (1.0 / static_cast<double>(groups[i].size()) +
                                              1.0 / static_cast<double>(groups[j].size())));
      const double diff = res.mean_ranks[i] - res.mean_ranks[j];
      double p = 1.0;
      if (se > 0.0) p = 2.0 * normal_cdf(-std::abs(diff) / se);
      res.pairwise_p[i][j] = res.pairwise_p[j][i] = p;
      if (res.significant && p < level / pairs) {
        res.relation[i][j] = diff > 0 ? Relation::worse : Relation::better;
        res.relation[j][i] = diff > 0 ? Relation::better : Relation::worse;
      }
    }
  }
  return res;
}

std::string relation_cell(const KruskalResult& r, std::size_t c) {
  std::vector<int> numbers(r.relation.size());
  std::iota(numbers.begin(), numbers.end(), 1);
  return relation_cell(r, c, numbers);
}

std::string relation_cell(const KruskalResult& r, std::size_t c, const std::vector<int>& numbers) {
  std::string out;
  for (std::size_t j = 0; j < r.relation.size(); ++j) {
    if (j == c) continue;
    if (!out.empty()) out += ' ';
    out += std::to_string(numbers.at(j));
    out += static_cast<char>(r.relation[c][j]);
  }
  return out;
}

}  // namespace dccopmsp
