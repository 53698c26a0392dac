#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dccopmsp {

using BlockId = std::int32_t;
/// Extraction period. 1..T are real periods, 0 means the block stays in the ground.
using Period = std::int32_t;

inline constexpr Period kUnmined = 0;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed input; carries the 1-based line number when known.
class ParseError : public InstanceError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Dense [resource x period] matrix of nonnegative reals. Periods are 1-based.
class ResourceMatrix {
 public:
  ResourceMatrix() = default;
  ResourceMatrix(int resources, int periods, double fill = 0.0)
      : resources_(resources), periods_(periods),
        data_(static_cast<std::size_t>(resources) * static_cast<std::size_t>(periods), fill) {}

  double operator()(int r, Period t) const { return data_[index(r, t)]; }
  double& operator()(int r, Period t) { return data_[index(r, t)]; }

  int resources() const { return resources_; }
  int periods() const { return periods_; }

  bool operator==(const ResourceMatrix&) const = default;

 private:
  std::size_t index(int r, Period t) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(periods_) +
           static_cast<std::size_t>(t - 1);
  }

  int resources_ = 0;
  int periods_ = 0;
  std::vector<double> data_;
};

struct Block {
  BlockId id = 0;
  bool ore = false;
  double mean_profit = 0.0;
  std::vector<double> resource_use;

  bool operator==(const Block&) const = default;
};

struct Coord {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Coord&) const = default;
};

/// (predecessor, successor): the predecessor must be extracted no later than the successor.
struct Arc {
  BlockId pred = 0;
  BlockId succ = 0;

  bool operator==(const Arc&) const = default;
  auto operator<=>(const Arc&) const = default;
};

enum class InstanceFormat { canonical, minelib };

/// Static mine model. Immutable after construction; the lazily built
/// predecessor closures are guarded by per-block once-flags so an Instance
/// may be shared by concurrent readers.
class Instance {
 public:
  Instance(std::string name, std::vector<Block> blocks, int periods, double discount_rate,
           std::vector<std::string> resource_names, ResourceMatrix baseline_capacity,
           std::vector<Arc> precedence, std::vector<Coord> coords = {});

  Instance(const Instance& other);
  Instance& operator=(const Instance& other);
  Instance(Instance&&) noexcept = default;
  Instance& operator=(Instance&&) noexcept = default;
  ~Instance() = default;

  const std::string& name() const { return name_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int periods() const { return periods_; }
  int num_resources() const { return static_cast<int>(resource_names_.size()); }
  double discount_rate() const { return discount_rate_; }

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(BlockId b) const { return blocks_.at(static_cast<std::size_t>(b)); }
  const std::vector<std::string>& resource_names() const { return resource_names_; }
  const ResourceMatrix& baseline_capacity() const { return baseline_; }
  /// Arcs sorted by (succ, pred), duplicates removed.
  const std::vector<Arc>& precedence() const { return arcs_; }
  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Coord>& coords() const { return coords_; }

  std::span<const BlockId> predecessors(BlockId b) const;
  std::span<const BlockId> successors(BlockId b) const;

  /// All transitive predecessors of `b`, excluding `b`, sorted ascending.
  /// Computed on first request and memoized.
  const std::vector<BlockId>& predecessor_closure(BlockId b) const;

  const std::vector<BlockId>& topological_order() const { return topo_; }

  /// (1+d)^-t for t in 1..T.
  double discount(Period t) const { return discount_factors_[static_cast<std::size_t>(t)]; }

  void write_canonical(std::ostream& out) const;
  void save_canonical(const std::filesystem::path& path) const;

  /// Structural equality (closure caches are ignored).
  bool operator==(const Instance& other) const;

 private:
  struct ClosureCache {
    explicit ClosureCache(std::size_t n) : flags(new std::once_flag[n]), closures(n) {}
    std::unique_ptr<std::once_flag[]> flags;
    std::vector<std::vector<BlockId>> closures;
  };

  void validate_and_index();
  void check_block(BlockId b) const;

  std::string name_;
  std::vector<Block> blocks_;
  int periods_ = 0;
  double discount_rate_ = 0.0;
  std::vector<std::string> resource_names_;
  ResourceMatrix baseline_;
  std::vector<Arc> arcs_;
  std::vector<Coord> coords_;

  // CSR adjacency
  std::vector<std::size_t> pred_offsets_, succ_offsets_;
  std::vector<BlockId> pred_ids_, succ_ids_;
  std::vector<BlockId> topo_;
  std::vector<double> discount_factors_;
  std::unique_ptr<ClosureCache> closure_cache_;
};

Instance parse_canonical(std::istream& in, const std::string& source = "<stream>");
Instance load_instance(const std::filesystem::path& path,
                       InstanceFormat format = InstanceFormat::canonical);

InstanceFormat parse_instance_format(const std::string& s);

}  // namespace dccopmsp
