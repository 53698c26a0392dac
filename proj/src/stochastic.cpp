#include "dccopmsp/stochastic.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "dccopmsp/schedule.hpp"
#include "text_util.hpp"

namespace dccopmsp {

EnsembleSet::EnsembleSet(int count, int blocks)
    : count_(count), blocks_(blocks),
      values_(static_cast<std::size_t>(count) * static_cast<std::size_t>(blocks), 0.0) {
  if (count < 2) throw std::invalid_argument("ensemble count must be >= 2");
}

EnsembleSet::EnsembleSet(int count, int blocks, std::vector<double> block_major_values)
    : count_(count), blocks_(blocks), values_(std::move(block_major_values)) {
  if (count < 2) throw std::invalid_argument("ensemble count must be >= 2");
  if (values_.size() != static_cast<std::size_t>(count) * static_cast<std::size_t>(blocks)) {
    throw std::invalid_argument("ensemble matrix size mismatch");
  }
}

double EnsembleSet::column_mean(BlockId b) const {
  double s = 0.0;
  for (double v : column(b)) s += v;
  return s / count_;
}

double EnsembleSet::column_variance(BlockId b) const {
  const double m = column_mean(b);
  double ss = 0.0;
  for (double v : column(b)) ss += (v - m) * (v - m);
  return ss / (count_ - 1);
}

ChanceParams ChanceParams::from_alpha(double alpha) {
  if (!(alpha >= 0.5 && alpha < 1.0)) {
    throw std::invalid_argument("confidence level must lie in [0.5, 1)");
  }
  return {alpha, normal_quantile(alpha)};
}

namespace {

// Blocks within `radius` of each block (including itself), via a uniform grid.
std::vector<std::vector<BlockId>> neighborhoods(const std::vector<Coord>& coords, double radius) {
  const double cell = radius > 0.0 ? radius : 1.0;
  using Key = std::tuple<long, long, long>;
  std::map<Key, std::vector<BlockId>> grid;
  auto key_of = [&](const Coord& c) {
    return Key{static_cast<long>(std::floor(c.x / cell)), static_cast<long>(std::floor(c.y / cell)),
               static_cast<long>(std::floor(c.z / cell))};
  };
  for (std::size_t b = 0; b < coords.size(); ++b) {
    grid[key_of(coords[b])].push_back(static_cast<BlockId>(b));
  }
  const double r2 = radius * radius;
  std::vector<std::vector<BlockId>> out(coords.size());
  for (std::size_t b = 0; b < coords.size(); ++b) {
    const auto [kx, ky, kz] = key_of(coords[b]);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(Key{kx + dx, ky + dy, kz + dz});
          if (it == grid.end()) continue;
          for (BlockId j : it->second) {
            const Coord& p = coords[b];
            const Coord& q = coords[static_cast<std::size_t>(j)];
            const double d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) +
                              (p.z - q.z) * (p.z - q.z);
            if (d2 <= r2) out[b].push_back(j);
          }
        }
      }
    }
    std::sort(out[b].begin(), out[b].end());
  }
  return out;
}

}  // namespace

EnsembleSet generate_ensembles(const Instance& inst, double rel_stddev, const CorrelationSpec& corr,
                               std::uint64_t seed, int count) {
  if (!(rel_stddev >= 0.0)) throw std::invalid_argument("rel_stddev must be >= 0");
  if (count < 2) throw std::invalid_argument("ensemble count must be >= 2");
  const int n = inst.num_blocks();
  EnsembleSet ens(count, n);

  std::vector<std::vector<BlockId>> hood;
  double shared_w = 0.0;
  if (corr.mode == CorrelationMode::neighborhood) {
    if (!inst.has_coords()) {
      throw std::invalid_argument("neighborhood correlation needs block coordinates");
    }
    if (!(corr.weight >= 0.0 && corr.weight <= 1.0)) {
      throw std::invalid_argument("correlation weight must lie in [0,1]");
    }
    hood = neighborhoods(inst.coords(), corr.radius);
    shared_w = corr.weight;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> latent(static_cast<std::size_t>(n));
  for (int e = 0; e < count; ++e) {
    if (!hood.empty()) {
      for (auto& g : latent) g = normal(rng);
    }
    for (BlockId b = 0; b < n; ++b) {
      const Block& blk = inst.block(b);
      if (!blk.ore) {
        ens.value(e, b) = blk.mean_profit;
        continue;
      }
      double z = normal(rng);
      if (!hood.empty()) {
        const auto& nb = hood[static_cast<std::size_t>(b)];
        double s = 0.0;
        for (BlockId j : nb) s += latent[static_cast<std::size_t>(j)];
        const double shared = s / std::sqrt(static_cast<double>(nb.size()));
        z = std::sqrt(shared_w) * shared + std::sqrt(1.0 - shared_w) * z;
      }
      ens.value(e, b) = blk.mean_profit + rel_stddev * std::abs(blk.mean_profit) * z;
    }
  }
  return ens;
}

namespace {

ProfitMoments base_moments(const Instance& inst, const EnsembleSet& ens) {
  if (ens.blocks() != inst.num_blocks()) {
    throw std::invalid_argument("ensemble block count does not match the instance");
  }
  ProfitMoments m;
  const auto n = static_cast<std::size_t>(inst.num_blocks());
  m.mean.resize(n);
  m.stddev.assign(n, 0.0);
  m.ore.resize(n);
  m.ensemble_variance.assign(n, 0.0);
  for (BlockId b = 0; b < inst.num_blocks(); ++b) {
    const auto i = static_cast<std::size_t>(b);
    m.mean[i] = inst.block(b).mean_profit;
    m.ore[i] = inst.block(b).ore ? 1 : 0;
    if (m.ore[i]) m.ensemble_variance[i] = ens.column_variance(b);
  }
  return m;
}

}  // namespace

ProfitMoments moments_for_generated(const Instance& inst, const EnsembleSet& ens, double rel_stddev) {
  ProfitMoments m = base_moments(inst, ens);
  for (std::size_t i = 0; i < m.mean.size(); ++i) {
    if (m.ore[i]) m.stddev[i] = rel_stddev * std::abs(m.mean[i]);
  }
  return m;
}

ProfitMoments moments_from_ensembles(const Instance& inst, const EnsembleSet& ens) {
  ProfitMoments m = base_moments(inst, ens);
  for (std::size_t i = 0; i < m.mean.size(); ++i) {
    if (m.ore[i]) m.stddev[i] = std::sqrt(m.ensemble_variance[i]);
  }
  return m;
}

double expected_npv(const Instance& inst, const ProfitMoments& moments, const Schedule& x) {
  std::vector<double> per_period(static_cast<std::size_t>(inst.periods()) + 1, 0.0);
  for (BlockId b = 0; b < x.size(); ++b) {
    const Period t = x[b];
    if (t != kUnmined) per_period[static_cast<std::size_t>(t)] += moments.mean[static_cast<std::size_t>(b)];
  }
  double total = 0.0;
  for (Period t = 1; t <= inst.periods(); ++t) {
    total += inst.discount(t) * per_period[static_cast<std::size_t>(t)];
  }
  return total;
}

namespace {

// Per-period variance from the period's ensemble totals S_t:
//   V = sample var(S_t) = sum of selected ensemble variances + pairwise covariance sum,
// so the covariance sum is V - sum(ensemble variances).
double truncated_period_variance(std::span<const double> totals, double sigma2_sum,
                                 double ensemble_var_sum) {
  const auto count = static_cast<double>(totals.size());
  double mean = 0.0;
  for (double s : totals) mean += s;
  mean /= count;
  double ss = 0.0;
  for (double s : totals) ss += (s - mean) * (s - mean);
  const double v = ss / (count - 1.0);
  return sigma2_sum + std::max(0.0, v - ensemble_var_sum);
}

}  // namespace

double period_variance(const ProfitMoments& moments, const EnsembleSet& ens, const Schedule& x,
                       Period t) {
  std::vector<double> totals(static_cast<std::size_t>(ens.count()), 0.0);
  double d = 0.0;
  double dv = 0.0;
  bool any = false;
  for (BlockId b = 0; b < x.size(); ++b) {
    const auto i = static_cast<std::size_t>(b);
    if (x[b] != t || !moments.ore[i]) continue;
    any = true;
    d += moments.stddev[i] * moments.stddev[i];
    dv += moments.ensemble_variance[i];
    auto col = ens.column(b);
    for (std::size_t e = 0; e < totals.size(); ++e) totals[e] += col[e];
  }
  if (!any) return 0.0;
  return truncated_period_variance(totals, d, dv);
}

double total_variance(const Instance& inst, const ProfitMoments& moments, const EnsembleSet& ens,
                      const Schedule& x) {
  const auto periods = static_cast<std::size_t>(inst.periods());
  const auto count = static_cast<std::size_t>(ens.count());
  std::vector<double> totals((periods + 1) * count, 0.0);
  std::vector<double> d(periods + 1, 0.0), dv(periods + 1, 0.0);
  std::vector<char> any(periods + 1, 0);
  for (BlockId b = 0; b < x.size(); ++b) {
    const auto i = static_cast<std::size_t>(b);
    const Period t = x[b];
    if (t == kUnmined || !moments.ore[i]) continue;
    const auto ti = static_cast<std::size_t>(t);
    any[ti] = 1;
    d[ti] += moments.stddev[i] * moments.stddev[i];
    dv[ti] += moments.ensemble_variance[i];
    auto col = ens.column(b);
    double* row = totals.data() + ti * count;
    for (std::size_t e = 0; e < count; ++e) row[e] += col[e];
  }
  double var = 0.0;
  for (Period t = 1; t <= inst.periods(); ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (!any[ti]) continue;
    const double w = inst.discount(t);
    var += w * w *
           truncated_period_variance({totals.data() + ti * count, count}, d[ti], dv[ti]);
  }
  return var;
}

double risk_adjusted_value(double expected, double variance, const ChanceParams& params) {
  if (variance < 0.0) throw std::invalid_argument("variance must be nonnegative");
  return expected - params.k_alpha * std::sqrt(variance);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  // Acklam's rational approximation, then Newton steps on the erfc-based CDF.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double inv_sqrt_2pi = 0.39894228040143267794;
  for (int i = 0; i < 2; ++i) {
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    if (pdf <= 0.0) break;
    x -= (normal_cdf(x) - p) / pdf;
  }
  return x;
}

void save_ensembles(const EnsembleSet& ens, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "ensembles " << ens.count() << ' ' << ens.blocks() << "\n";
  for (int e = 0; e < ens.count(); ++e) {
    for (BlockId b = 0; b < ens.blocks(); ++b) {
      if (b) out << ' ';
      out << format_double(ens.value(e, b));
    }
    out << "\n";
  }
}

EnsembleSet load_ensembles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  int count = -1, blocks = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3 || tok[0] != "ensembles") fail("expected 'ensembles <count> <blocks>'");
    auto c = parse_number<int>(tok[1]);
    auto b = parse_number<int>(tok[2]);
    if (!c || !b || *c < 2 || *b < 0) fail("bad ensemble header");
    count = *c;
    blocks = *b;
    break;
  }
  if (count < 0) fail("missing header");
  EnsembleSet ens(count, blocks);
  int e = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (e >= count) fail("more rows than declared");
    if (static_cast<int>(tok.size()) != blocks) fail("row has wrong number of values");
    for (int b = 0; b < blocks; ++b) {
      auto v = parse_number<double>(tok[static_cast<std::size_t>(b)]);
      if (!v) fail("bad number '" + tok[static_cast<std::size_t>(b)] + "'");
      ens.value(e, b) = *v;
    }
    ++e;
  }
  if (e != count) fail("fewer rows than declared");
  return ens;
}

}  // namespace dccopmsp
