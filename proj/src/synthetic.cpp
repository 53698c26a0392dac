#include "dccopmsp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "text_util.hpp"

namespace dccopmsp {

namespace {

struct Blob {
  double x, y, z, spread, peak;
};

}  // namespace

Instance generate_pit(const PitSpec& spec) {
  if (spec.layers < 1 || spec.top_nx - 2 * (spec.layers - 1) < 1 ||
      spec.top_ny - 2 * (spec.layers - 1) < 1) {
    throw std::invalid_argument("pit layers shrink below one block");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Block ids are assigned layer by layer, row-major.
  std::vector<int> layer_start(static_cast<std::size_t>(spec.layers) + 1, 0);
  for (int z = 0; z < spec.layers; ++z) {
    layer_start[static_cast<std::size_t>(z) + 1] =
        layer_start[static_cast<std::size_t>(z)] + (spec.top_nx - 2 * z) * (spec.top_ny - 2 * z);
  }
  auto id_of = [&](int z, int i, int j) {
    return layer_start[static_cast<std::size_t>(z)] + j * (spec.top_nx - 2 * z) + i;
  };

  // Grade field: Gaussian ore bodies placed in the upper-central part of the pit.
  std::vector<Blob> blobs;
  for (int k = 0; k < spec.ore_bodies; ++k) {
    blobs.push_back({spec.top_nx * (0.25 + 0.5 * unit(rng)), spec.top_ny * (0.25 + 0.5 * unit(rng)),
                     (spec.layers - 1) * (0.2 + 0.6 * unit(rng)), 1.8 + 1.8 * unit(rng),
                     0.55 + 0.45 * unit(rng)});
  }

  std::vector<Block> blocks;
  std::vector<Coord> coords;
  double total_tonnes = 0.0, ore_tonnes = 0.0;
  for (int z = 0; z < spec.layers; ++z) {
    const int nx = spec.top_nx - 2 * z, ny = spec.top_ny - 2 * z;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        // Absolute position: layer z is inset by z blocks on each side.
        const double x = i + z, y = j + z, depth = z;
        double grade = 0.0;
        for (const auto& b : blobs) {
          const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y) + (depth - b.z) * (depth - b.z);
          grade += b.peak * std::exp(-d2 / (2.0 * b.spread * b.spread));
        }
        grade *= 0.85 + 0.3 * unit(rng);
        const double tonnes = 0.9 + 0.2 * unit(rng);
        Block blk;
        blk.id = static_cast<BlockId>(blocks.size());
        blk.ore = spec.price * grade > spec.processing_cost;
        const double margin = blk.ore ? spec.price * grade - spec.processing_cost : 0.0;
        blk.mean_profit = tonnes * (margin - spec.mining_cost);
        blk.resource_use = {tonnes, blk.ore ? tonnes : 0.0};
        total_tonnes += tonnes;
        if (blk.ore) ore_tonnes += tonnes;
        blocks.push_back(std::move(blk));
        coords.push_back({x, y, depth});
      }
    }
  }

  std::vector<Arc> arcs;
  std::vector<Arc> diagonal;
  for (int z = 1; z < spec.layers; ++z) {
    const int nx = spec.top_nx - 2 * z, ny = spec.top_ny - 2 * z;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const BlockId s = id_of(z, i, j);
        // The block directly above is (i+1, j+1) in the wider layer z-1.
        const int ci = i + 1, cj = j + 1;
        for (auto [di, dj] : {std::pair{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          arcs.push_back({id_of(z - 1, ci + di, cj + dj), s});
        }
        for (auto [di, dj] : {std::pair{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}) {
          diagonal.push_back({id_of(z - 1, ci + di, cj + dj), s});
        }
      }
    }
  }
  if (spec.diagonal_arcs < 0 || spec.diagonal_arcs > static_cast<int>(diagonal.size())) {
    throw std::invalid_argument("diagonal arc count out of range");
  }
  std::shuffle(diagonal.begin(), diagonal.end(), rng);
  arcs.insert(arcs.end(), diagonal.begin(), diagonal.begin() + spec.diagonal_arcs);

  ResourceMatrix caps(2, spec.periods);
  for (Period t = 1; t <= spec.periods; ++t) {
    caps(0, t) = std::round(spec.mining_capacity_share * total_tonnes / spec.periods);
    caps(1, t) = std::round(spec.processing_capacity_share * ore_tonnes / spec.periods);
  }
  return Instance(spec.name, std::move(blocks), spec.periods, spec.discount, {"mining", "processing"},
                  std::move(caps), std::move(arcs), std::move(coords));
}

PitSpec newman1_like_spec() {
  PitSpec s;
  s.name = "newman1";
  return s;
}

std::filesystem::path write_minelib(const Instance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string& name = inst.name();
  const auto desc = dir / (name + ".desc");
  {
    std::ofstream out(dir / (name + ".blocks"));
    out << "% id x y z profit";
    for (const auto& r : inst.resource_names()) out << ' ' << r;
    out << " ore\n";
    for (const auto& b : inst.blocks()) {
      out << b.id;
      if (inst.has_coords()) {
        const auto& c = inst.coords()[static_cast<std::size_t>(b.id)];
        out << ' ' << format_double(c.x) << ' ' << format_double(c.y) << ' ' << format_double(c.z);
      } else {
        out << " 0 0 0";
      }
      out << ' ' << format_double(b.mean_profit);
      for (double u : b.resource_use) out << ' ' << format_double(u);
      out << ' ' << (b.ore ? 1 : 0) << "\n";
    }
  }
  {
    std::ofstream out(dir / (name + ".prec"));
    out << "% id npred preds...\n";
    for (BlockId b = 0; b < inst.num_blocks(); ++b) {
      const auto preds = inst.predecessors(b);
      out << b << ' ' << preds.size();
      for (BlockId p : preds) out << ' ' << p;
      out << "\n";
    }
  }
  std::ofstream out(desc);
  out << "name " << name << "\n"
      << "blocks " << name << ".blocks\n"
      << "precedence " << name << ".prec\n"
      << "periods " << inst.periods() << "\n"
      << "discount " << format_double(inst.discount_rate()) << "\n"
      << "id_column 0\n"
      << "xyz_columns 1 2 3\n"
      << "profit_column 4\n";
  const int nres = inst.num_resources();
  for (int r = 0; r < nres; ++r) {
    out << "resource " << inst.resource_names()[static_cast<std::size_t>(r)] << ' ' << 5 + r << "\n";
  }
  out << "ore_column " << 5 + nres << "\n";
  for (int r = 0; r < nres; ++r) {
    out << "capacity " << inst.resource_names()[static_cast<std::size_t>(r)];
    for (Period t = 1; t <= inst.periods(); ++t) out << ' ' << format_double(inst.baseline_capacity()(r, t));
    out << "\n";
  }
  return desc;
}

}  // namespace dccopmsp
