#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dccopmsp/instance.hpp"

namespace dccopmsp {

/// Layered open-pit model. Layer z (0 = surface) has (top_nx - 2z) x (top_ny - 2z)
/// blocks; every block below the surface needs the five blocks in a plus shape
/// above it, and `diagonal_arcs` randomly chosen corner blocks on top of that.
struct PitSpec {
  std::string name = "pit";
  int top_nx = 20;
  int top_ny = 16;
  int layers = 6;
  int periods = 6;
  double discount = 0.08;
  int diagonal_arcs = 222;
  std::uint64_t seed = 7;

  // Economics, in thousands of dollars per kilotonne.
  double price = 120.0;
  double processing_cost = 24.0;
  double mining_cost = 10.0;
  int ore_bodies = 4;

  /// Per-period capacity as a share of the total tonnage (resp. ore tonnage) / T.
  double mining_capacity_share = 0.7;
  double processing_capacity_share = 1.2;
};

Instance generate_pit(const PitSpec& spec);

/// A pit with the dimensions of the Newman1 benchmark: 1060 blocks, 3922
/// arcs, 6 periods, 8% discount, mining and processing resources.
PitSpec newman1_like_spec();

/// Writes `<name>.blocks`, `<name>.prec` and `<name>.desc` into `dir`;
/// returns the descriptor path.
std::filesystem::path write_minelib(const Instance& inst, const std::filesystem::path& dir);

}  // namespace dccopmsp
