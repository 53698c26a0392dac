#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dccopmsp/instance.hpp"

namespace dccopmsp {

class Schedule;

/// Equiprobable profit realizations, one row per ensemble member.
/// Stored block-major so a block's column is contiguous.
class EnsembleSet {
 public:
  EnsembleSet() = default;
  EnsembleSet(int count, int blocks);
  EnsembleSet(int count, int blocks, std::vector<double> block_major_values);

  int count() const { return count_; }
  int blocks() const { return blocks_; }

  double value(int ensemble, BlockId b) const { return values_[offset(b) + static_cast<std::size_t>(ensemble)]; }
  double& value(int ensemble, BlockId b) { return values_[offset(b) + static_cast<std::size_t>(ensemble)]; }
  std::span<const double> column(BlockId b) const { return {values_.data() + offset(b), static_cast<std::size_t>(count_)}; }

  double column_mean(BlockId b) const;
  /// Unbiased sample variance (denominator count-1).
  double column_variance(BlockId b) const;

  bool operator==(const EnsembleSet&) const = default;

 private:
  std::size_t offset(BlockId b) const { return static_cast<std::size_t>(b) * static_cast<std::size_t>(count_); }

  int count_ = 0;
  int blocks_ = 0;
  std::vector<double> values_;
};

struct ProfitMoments {
  std::vector<double> mean;
  std::vector<double> stddev;
  /// Blocks carrying stochastic processing profit.
  std::vector<char> ore;
  /// Sample variance of each ensemble column, used to recover the pairwise
  /// covariance sum from the per-ensemble period totals.
  std::vector<double> ensemble_variance;
};

struct ChanceParams {
  double alpha = 0.5;
  double k_alpha = 0.0;

  static ChanceParams from_alpha(double alpha);
};

enum class CorrelationMode { independent, neighborhood };

struct CorrelationSpec {
  CorrelationMode mode = CorrelationMode::independent;
  /// Neighborhood mode: blocks within `radius` (Euclidean, block coordinates)
  /// share a latent factor; `weight` is the shared share of the noise variance.
  double radius = 1.5;
  double weight = 0.5;
};

/// Ore columns ~ N(mu_b, (rel_stddev*|mu_b|)^2); waste columns are constant mu_b.
EnsembleSet generate_ensembles(const Instance& inst, double rel_stddev, const CorrelationSpec& corr,
                               std::uint64_t seed, int count);

/// Moments for internally generated ensembles: sigma_b = rel_stddev*|mu_b| for ore blocks.
ProfitMoments moments_for_generated(const Instance& inst, const EnsembleSet& ens, double rel_stddev);
/// Moments for externally supplied ensembles: sigma_b is the column sample stddev.
ProfitMoments moments_from_ensembles(const Instance& inst, const EnsembleSet& ens);

double expected_npv(const Instance& inst, const ProfitMoments& moments, const Schedule& x);

/// Var_t(x) = sum sigma_b^2 + max(0, sum_{b != b'} Cov(b,b')), over ore blocks mined in t,
/// via the per-ensemble period totals.
double period_variance(const ProfitMoments& moments, const EnsembleSet& ens, const Schedule& x,
                       Period t);

double total_variance(const Instance& inst, const ProfitMoments& moments, const EnsembleSet& ens,
                      const Schedule& x);

/// expected - k_alpha * sqrt(variance). Throws std::invalid_argument on negative variance.
double risk_adjusted_value(double expected, double variance, const ChanceParams& params);

double normal_cdf(double z);
/// Inverse standard-normal CDF, |error| < 1e-9 on (0,1).
double normal_quantile(double alpha);

void save_ensembles(const EnsembleSet& ens, const std::filesystem::path& path);
EnsembleSet load_ensembles(const std::filesystem::path& path);

}  // namespace dccopmsp
