#include "dccopmsp/instance.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "text_util.hpp"

namespace dccopmsp {

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : InstanceError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

Instance::Instance(std::string name, std::vector<Block> blocks, int periods, double discount_rate,
                   std::vector<std::string> resource_names, ResourceMatrix baseline_capacity,
                   std::vector<Arc> precedence, std::vector<Coord> coords)
    : name_(std::move(name)),
      blocks_(std::move(blocks)),
      periods_(periods),
      discount_rate_(discount_rate),
      resource_names_(std::move(resource_names)),
      baseline_(std::move(baseline_capacity)),
      arcs_(std::move(precedence)),
      coords_(std::move(coords)) {
  validate_and_index();
}

Instance::Instance(const Instance& other)
    : name_(other.name_),
      blocks_(other.blocks_),
      periods_(other.periods_),
      discount_rate_(other.discount_rate_),
      resource_names_(other.resource_names_),
      baseline_(other.baseline_),
      arcs_(other.arcs_),
      coords_(other.coords_),
      pred_offsets_(other.pred_offsets_),
      succ_offsets_(other.succ_offsets_),
      pred_ids_(other.pred_ids_),
      succ_ids_(other.succ_ids_),
      topo_(other.topo_),
      discount_factors_(other.discount_factors_),
      closure_cache_(std::make_unique<ClosureCache>(other.blocks_.size())) {}

Instance& Instance::operator=(const Instance& other) {
  if (this != &other) {
    Instance copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Instance::validate_and_index() {
  if (periods_ < 1) throw InstanceError("number of periods must be positive");
  if (!(discount_rate_ >= 0.0)) throw InstanceError("discount rate must be >= 0");
  const int nres = num_resources();
  if (baseline_.resources() != nres || baseline_.periods() != periods_) {
    throw InstanceError("capacity matrix is " + std::to_string(baseline_.resources()) + "x" +
                        std::to_string(baseline_.periods()) + ", expected " +
                        std::to_string(nres) + "x" + std::to_string(periods_));
  }
  for (int r = 0; r < nres; ++r) {
    for (Period t = 1; t <= periods_; ++t) {
      if (!(baseline_(r, t) >= 0.0)) throw InstanceError("negative capacity");
    }
  }
  const auto n = static_cast<BlockId>(blocks_.size());
  for (BlockId b = 0; b < n; ++b) {
    const Block& blk = blocks_[static_cast<std::size_t>(b)];
    if (blk.id != b) throw InstanceError("block ids must be dense 0..n-1; found id " +
                                         std::to_string(blk.id) + " at position " +
                                         std::to_string(b));
    if (static_cast<int>(blk.resource_use.size()) != nres) {
      throw InstanceError("block " + std::to_string(b) + " has " +
                          std::to_string(blk.resource_use.size()) + " resource entries, expected " +
                          std::to_string(nres));
    }
    for (double u : blk.resource_use) {
      if (!(u >= 0.0)) throw InstanceError("block " + std::to_string(b) + " has negative resource use");
    }
  }
  if (!coords_.empty() && coords_.size() != blocks_.size()) {
    throw InstanceError("coordinate count does not match block count");
  }
  for (const Arc& a : arcs_) {
    if (a.pred < 0 || a.pred >= n || a.succ < 0 || a.succ >= n) {
      throw InstanceError("precedence arc (" + std::to_string(a.pred) + "," +
                          std::to_string(a.succ) + ") references an unknown block");
    }
    if (a.pred == a.succ) throw InstanceError("self precedence on block " + std::to_string(a.pred));
  }
  std::sort(arcs_.begin(), arcs_.end(), [](const Arc& x, const Arc& y) {
    return x.succ != y.succ ? x.succ < y.succ : x.pred < y.pred;
  });
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());

  const auto nn = static_cast<std::size_t>(n);
  pred_offsets_.assign(nn + 1, 0);
  succ_offsets_.assign(nn + 1, 0);
  for (const Arc& a : arcs_) {
    ++pred_offsets_[static_cast<std::size_t>(a.succ) + 1];
    ++succ_offsets_[static_cast<std::size_t>(a.pred) + 1];
  }
  for (std::size_t i = 0; i < nn; ++i) {
    pred_offsets_[i + 1] += pred_offsets_[i];
    succ_offsets_[i + 1] += succ_offsets_[i];
  }
  pred_ids_.assign(arcs_.size(), 0);
  succ_ids_.assign(arcs_.size(), 0);
  {
    auto pfill = pred_offsets_;
    auto sfill = succ_offsets_;
    for (const Arc& a : arcs_) {
      pred_ids_[pfill[static_cast<std::size_t>(a.succ)]++] = a.pred;
      succ_ids_[sfill[static_cast<std::size_t>(a.pred)]++] = a.succ;
    }
  }

  // Kahn's algorithm; smallest ready id first so the order is deterministic.
  std::vector<std::size_t> indegree(nn);
  for (std::size_t b = 0; b < nn; ++b) indegree[b] = pred_offsets_[b + 1] - pred_offsets_[b];
  std::vector<BlockId> ready;
  for (BlockId b = n - 1; b >= 0; --b) {
    if (indegree[static_cast<std::size_t>(b)] == 0) ready.push_back(b);
  }
  topo_.clear();
  topo_.reserve(nn);
  auto cmp = [](BlockId x, BlockId y) { return x > y; };
  std::make_heap(ready.begin(), ready.end(), cmp);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), cmp);
    const BlockId b = ready.back();
    ready.pop_back();
    topo_.push_back(b);
    for (BlockId s : successors(b)) {
      if (--indegree[static_cast<std::size_t>(s)] == 0) {
        ready.push_back(s);
        std::push_heap(ready.begin(), ready.end(), cmp);
      }
    }
  }
  if (topo_.size() != nn) throw InstanceError("precedence graph contains a cycle");

  discount_factors_.assign(static_cast<std::size_t>(periods_) + 1, 0.0);
  for (Period t = 1; t <= periods_; ++t) {
    discount_factors_[static_cast<std::size_t>(t)] = std::pow(1.0 + discount_rate_, -t);
  }
  closure_cache_ = std::make_unique<ClosureCache>(nn);
}

void Instance::check_block(BlockId b) const {
  if (b < 0 || b >= num_blocks()) throw InstanceError("invalid block id " + std::to_string(b));
}

std::span<const BlockId> Instance::predecessors(BlockId b) const {
  check_block(b);
  const auto i = static_cast<std::size_t>(b);
  return {pred_ids_.data() + pred_offsets_[i], pred_offsets_[i + 1] - pred_offsets_[i]};
}

std::span<const BlockId> Instance::successors(BlockId b) const {
  check_block(b);
  const auto i = static_cast<std::size_t>(b);
  return {succ_ids_.data() + succ_offsets_[i], succ_offsets_[i + 1] - succ_offsets_[i]};
}

const std::vector<BlockId>& Instance::predecessor_closure(BlockId b) const {
  check_block(b);
  const auto i = static_cast<std::size_t>(b);
  std::call_once(closure_cache_->flags[i], [&] {
    std::vector<char> seen(blocks_.size(), 0);
    std::vector<BlockId> stack(predecessors(b).begin(), predecessors(b).end());
    std::vector<BlockId> out;
    while (!stack.empty()) {
      const BlockId v = stack.back();
      stack.pop_back();
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      out.push_back(v);
      for (BlockId p : predecessors(v)) {
        if (!seen[static_cast<std::size_t>(p)]) stack.push_back(p);
      }
    }
    std::sort(out.begin(), out.end());
    closure_cache_->closures[i] = std::move(out);
  });
  return closure_cache_->closures[i];
}

bool Instance::operator==(const Instance& other) const {
  return blocks_ == other.blocks_ && periods_ == other.periods_ &&
         discount_rate_ == other.discount_rate_ && resource_names_ == other.resource_names_ &&
         baseline_ == other.baseline_ && arcs_ == other.arcs_ && coords_ == other.coords_;
}

void Instance::write_canonical(std::ostream& out) const {
  out << "dccopmsp v1\n";
  out << "# " << name_ << ": " << blocks_.size() << " blocks, " << arcs_.size()
      << " precedence arcs\n";
  out << "T " << periods_ << "\n";
  out << "D " << format_double(discount_rate_) << "\n";
  out << "RESOURCES " << resource_names_.size();
  for (const auto& r : resource_names_) out << ' ' << r;
  out << "\n";
  for (Period t = 1; t <= periods_; ++t) {
    out << "CAP " << t;
    for (int r = 0; r < num_resources(); ++r) out << ' ' << format_double(baseline_(r, t));
    out << "\n";
  }
  for (const Block& b : blocks_) {
    out << "BLOCK " << b.id << ' ' << (b.ore ? 1 : 0) << ' ' << format_double(b.mean_profit);
    for (double u : b.resource_use) out << ' ' << format_double(u);
    out << "\n";
  }
  for (BlockId b = 0; b < num_blocks(); ++b) {
    auto preds = predecessors(b);
    if (preds.empty()) continue;
    out << "PREC " << b << ' ' << preds.size();
    for (BlockId p : preds) out << ' ' << p;
    out << "\n";
  }
  for (std::size_t b = 0; b < coords_.size(); ++b) {
    out << "XYZ " << b << ' ' << format_double(coords_[b].x) << ' ' << format_double(coords_[b].y)
        << ' ' << format_double(coords_[b].z) << "\n";
  }
}

void Instance::save_canonical(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path.string());
  write_canonical(out);
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next non-empty line with comments stripped, split on whitespace.
  bool next(std::vector<std::string>& tokens, char comment = '#') {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto pos = line.find(comment); pos != std::string::npos) line.erase(pos);
      tokens = split_ws(line);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  template <typename T>
  T number(const std::string& tok) const {
    auto v = parse_number<T>(tok);
    if (!v) fail("expected a number, got '" + tok + "'");
    return *v;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

Instance parse_canonical(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "dccopmsp" || tok[1] != "v1") {
    reader.fail("missing 'dccopmsp v1' header");
  }
  std::optional<int> periods;
  std::optional<double> discount;
  std::vector<std::string> resources;
  bool have_resources = false;
  std::map<Period, std::vector<double>> caps;
  std::map<BlockId, Block> blocks;
  std::map<BlockId, Coord> coords;
  std::vector<Arc> arcs;

  while (reader.next(tok)) {
    const std::string& key = tok[0];
    if (key == "T") {
      if (tok.size() != 2) reader.fail("T expects one integer");
      periods = reader.number<int>(tok[1]);
      if (*periods < 1) reader.fail("T must be positive");
    } else if (key == "D") {
      if (tok.size() != 2) reader.fail("D expects one real");
      discount = reader.number<double>(tok[1]);
      if (*discount < 0.0) reader.fail("D must be >= 0");
    } else if (key == "RESOURCES") {
      if (tok.size() < 2) reader.fail("RESOURCES expects a count");
      const int k = reader.number<int>(tok[1]);
      if (k < 0 || static_cast<std::size_t>(k) + 2 != tok.size()) {
        reader.fail("RESOURCES count does not match the number of names");
      }
      resources.assign(tok.begin() + 2, tok.end());
      have_resources = true;
    } else if (key == "CAP") {
      if (!have_resources) reader.fail("CAP before RESOURCES");
      if (tok.size() != resources.size() + 2) reader.fail("CAP has wrong number of capacities");
      const Period t = reader.number<int>(tok[1]);
      if (caps.count(t)) reader.fail("duplicate CAP for period " + tok[1]);
      std::vector<double> row;
      for (std::size_t i = 2; i < tok.size(); ++i) row.push_back(reader.number<double>(tok[i]));
      caps[t] = std::move(row);
    } else if (key == "BLOCK") {
      if (!have_resources) reader.fail("BLOCK before RESOURCES");
      if (tok.size() != resources.size() + 4) reader.fail("BLOCK has wrong number of fields");
      Block b;
      b.id = reader.number<BlockId>(tok[1]);
      const int ore = reader.number<int>(tok[2]);
      if (ore != 0 && ore != 1) reader.fail("ore flag must be 0 or 1");
      b.ore = ore == 1;
      b.mean_profit = reader.number<double>(tok[3]);
      for (std::size_t i = 4; i < tok.size(); ++i) {
        b.resource_use.push_back(reader.number<double>(tok[i]));
        if (b.resource_use.back() < 0.0) reader.fail("negative resource use");
      }
      if (blocks.count(b.id)) reader.fail("duplicate BLOCK " + tok[1]);
      blocks[b.id] = std::move(b);
    } else if (key == "PREC") {
      if (tok.size() < 3) reader.fail("PREC expects <succ> <npred> <pred>...");
      const BlockId succ = reader.number<BlockId>(tok[1]);
      const int np = reader.number<int>(tok[2]);
      if (np < 0 || static_cast<std::size_t>(np) + 3 != tok.size()) {
        reader.fail("PREC predecessor count does not match");
      }
      for (std::size_t i = 3; i < tok.size(); ++i) {
        arcs.push_back({reader.number<BlockId>(tok[i]), succ});
        if (arcs.back().pred == succ) reader.fail("self precedence on block " + tok[1]);
      }
    } else if (key == "XYZ") {
      if (tok.size() != 5) reader.fail("XYZ expects <id> <x> <y> <z>");
      coords[reader.number<BlockId>(tok[1])] = {reader.number<double>(tok[2]),
                                                reader.number<double>(tok[3]),
                                                reader.number<double>(tok[4])};
    } else {
      reader.fail("unknown record '" + key + "'");
    }
  }

  if (!periods) throw InstanceError(source + ": missing T");
  if (!discount) throw InstanceError(source + ": missing D");
  if (!have_resources) throw InstanceError(source + ": missing RESOURCES");
  if (static_cast<int>(caps.size()) != *periods || caps.begin()->first != 1 ||
      caps.rbegin()->first != *periods) {
    throw InstanceError(source + ": expected one CAP line for each period 1.." +
                        std::to_string(*periods));
  }
  ResourceMatrix baseline(static_cast<int>(resources.size()), *periods);
  for (const auto& [t, row] : caps) {
    for (std::size_t r = 0; r < row.size(); ++r) baseline(static_cast<int>(r), t) = row[r];
  }
  std::vector<Block> block_list;
  block_list.reserve(blocks.size());
  for (auto& [id, b] : blocks) {
    if (id != static_cast<BlockId>(block_list.size())) {
      throw InstanceError(source + ": block ids must be dense 0..n-1 (missing " +
                          std::to_string(block_list.size()) + ")");
    }
    block_list.push_back(std::move(b));
  }
  std::vector<Coord> coord_list;
  if (!coords.empty()) {
    if (coords.size() != block_list.size()) {
      throw InstanceError(source + ": XYZ records must cover every block");
    }
    for (auto& [id, c] : coords) {
      if (id < 0 || id >= static_cast<BlockId>(block_list.size())) {
        throw InstanceError(source + ": XYZ for unknown block " + std::to_string(id));
      }
      coord_list.push_back(c);
    }
  }
  std::string name = std::filesystem::path(source).stem().string();
  try {
    return Instance(name, std::move(block_list), *periods, *discount, std::move(resources),
                    std::move(baseline), std::move(arcs), std::move(coord_list));
  } catch (const ParseError&) {
    throw;
  } catch (const InstanceError& e) {
    throw InstanceError(source + ": " + e.what());
  }
}

namespace {

// Sidecar descriptor for MineLib-style block and precedence files:
//
//   name newman1
//   blocks newman1.blocks
//   precedence newman1.prec
//   periods 6
//   discount 0.08
//   id_column 0
//   xyz_columns 1 2 3
//   profit_column 4
//   ore_column 7            (optional; otherwise ore = profit > 0)
//   resource mining 5
//   resource processing 6
//   capacity mining 160 160 ...
//   capacity processing 60 60 ...
struct MinelibDescriptor {
  std::string name;
  std::filesystem::path blocks, precedence;
  int periods = 0;
  double discount = 0.0;
  int id_column = 0;
  std::optional<std::array<int, 3>> xyz_columns;
  int profit_column = -1;
  std::optional<int> ore_column;
  std::vector<std::pair<std::string, int>> resources;
  std::map<std::string, std::vector<double>> capacity;
};

MinelibDescriptor read_descriptor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open " + path.string());
  LineReader reader(in, path.string());
  MinelibDescriptor d;
  d.name = path.stem().string();
  std::vector<std::string> tok;
  const auto dir = path.parent_path();
  while (reader.next(tok)) {
    const std::string& key = tok[0];
    auto want = [&](std::size_t n) {
      if (tok.size() != n) reader.fail(key + " expects " + std::to_string(n - 1) + " value(s)");
    };
    if (key == "name") {
      want(2);
      d.name = tok[1];
    } else if (key == "blocks") {
      want(2);
      d.blocks = dir / tok[1];
    } else if (key == "precedence") {
      want(2);
      d.precedence = dir / tok[1];
    } else if (key == "periods") {
      want(2);
      d.periods = reader.number<int>(tok[1]);
    } else if (key == "discount") {
      want(2);
      d.discount = reader.number<double>(tok[1]);
    } else if (key == "id_column") {
      want(2);
      d.id_column = reader.number<int>(tok[1]);
    } else if (key == "xyz_columns") {
      want(4);
      d.xyz_columns = std::array<int, 3>{reader.number<int>(tok[1]), reader.number<int>(tok[2]),
                                         reader.number<int>(tok[3])};
    } else if (key == "profit_column") {
      want(2);
      d.profit_column = reader.number<int>(tok[1]);
    } else if (key == "ore_column") {
      want(2);
      d.ore_column = reader.number<int>(tok[1]);
    } else if (key == "resource") {
      want(3);
      d.resources.emplace_back(tok[1], reader.number<int>(tok[2]));
    } else if (key == "capacity") {
      if (tok.size() < 3) reader.fail("capacity expects <resource> <values...>");
      std::vector<double> vals;
      for (std::size_t i = 2; i < tok.size(); ++i) vals.push_back(reader.number<double>(tok[i]));
      d.capacity[tok[1]] = std::move(vals);
    } else {
      reader.fail("unknown descriptor key '" + key + "'");
    }
  }
  if (d.blocks.empty() || d.precedence.empty()) {
    throw InstanceError(path.string() + ": descriptor must name blocks and precedence files");
  }
  if (d.periods < 1) throw InstanceError(path.string() + ": periods must be positive");
  if (d.profit_column < 0) throw InstanceError(path.string() + ": profit_column is required");
  for (const auto& [rname, col] : d.resources) {
    auto it = d.capacity.find(rname);
    if (it == d.capacity.end()) {
      throw InstanceError(path.string() + ": no capacity line for resource " + rname);
    }
    if (static_cast<int>(it->second.size()) != d.periods) {
      throw InstanceError(path.string() + ": capacity for " + rname + " has " +
                          std::to_string(it->second.size()) + " values, expected " +
                          std::to_string(d.periods));
    }
  }
  return d;
}

Instance load_minelib(const std::filesystem::path& descriptor_path) {
  const MinelibDescriptor d = read_descriptor(descriptor_path);

  std::ifstream bin(d.blocks);
  if (!bin) throw InstanceError("cannot open " + d.blocks.string());
  LineReader breader(bin, d.blocks.string());
  std::map<BlockId, Block> blocks;
  std::map<BlockId, Coord> coords;
  std::vector<std::string> tok;
  auto column = [&](int c) -> const std::string& {
    if (c < 0 || static_cast<std::size_t>(c) >= tok.size()) {
      breader.fail("missing column " + std::to_string(c));
    }
    return tok[static_cast<std::size_t>(c)];
  };
  while (breader.next(tok, '%')) {
    Block b;
    b.id = breader.number<BlockId>(column(d.id_column));
    b.mean_profit = breader.number<double>(column(d.profit_column));
    // Explicit flags win; otherwise negative-profit blocks are waste.
    if (d.ore_column) {
      b.ore = breader.number<double>(column(*d.ore_column)) != 0.0;
    } else {
      b.ore = b.mean_profit > 0.0;
    }
    for (const auto& [rname, col] : d.resources) {
      b.resource_use.push_back(breader.number<double>(column(col)));
      if (b.resource_use.back() < 0.0) breader.fail("negative resource use");
    }
    if (d.xyz_columns) {
      coords[b.id] = {breader.number<double>(column((*d.xyz_columns)[0])),
                      breader.number<double>(column((*d.xyz_columns)[1])),
                      breader.number<double>(column((*d.xyz_columns)[2]))};
    }
    if (blocks.count(b.id)) breader.fail("duplicate block id");
    blocks[b.id] = std::move(b);
  }

  std::ifstream pin(d.precedence);
  if (!pin) throw InstanceError("cannot open " + d.precedence.string());
  LineReader preader(pin, d.precedence.string());
  std::vector<Arc> arcs;
  while (preader.next(tok, '%')) {
    if (tok.size() < 2) preader.fail("expected <id> <npred> <pred>...");
    const BlockId succ = preader.number<BlockId>(tok[0]);
    const int np = preader.number<int>(tok[1]);
    if (np < 0 || static_cast<std::size_t>(np) + 2 != tok.size()) {
      preader.fail("predecessor count does not match");
    }
    if (!blocks.count(succ)) preader.fail("precedence for unknown block " + tok[0]);
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const BlockId p = preader.number<BlockId>(tok[i]);
      if (!blocks.count(p)) preader.fail("dangling predecessor " + tok[i]);
      if (p == succ) preader.fail("self precedence on block " + tok[0]);
      arcs.push_back({p, succ});
    }
  }

  std::vector<Block> block_list;
  std::vector<Coord> coord_list;
  for (auto& [id, b] : blocks) {
    if (id != static_cast<BlockId>(block_list.size())) {
      throw InstanceError(d.blocks.string() + ": block ids must be dense 0..n-1");
    }
    block_list.push_back(std::move(b));
    if (d.xyz_columns) coord_list.push_back(coords[id]);
  }
  std::vector<std::string> names;
  ResourceMatrix caps(static_cast<int>(d.resources.size()), d.periods);
  for (std::size_t r = 0; r < d.resources.size(); ++r) {
    names.push_back(d.resources[r].first);
    const auto& vals = d.capacity.at(d.resources[r].first);
    for (Period t = 1; t <= d.periods; ++t) {
      caps(static_cast<int>(r), t) = vals[static_cast<std::size_t>(t - 1)];
    }
  }
  return Instance(d.name, std::move(block_list), d.periods, d.discount, std::move(names),
                  std::move(caps), std::move(arcs), std::move(coord_list));
}

}  // namespace

Instance load_instance(const std::filesystem::path& path, InstanceFormat format) {
  if (format == InstanceFormat::minelib) return load_minelib(path);
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open " + path.string());
  return parse_canonical(in, path.string());
}

InstanceFormat parse_instance_format(const std::string& s) {
  if (s == "canonical") return InstanceFormat::canonical;
  if (s == "minelib") return InstanceFormat::minelib;
  throw InstanceError("unknown instance format '" + s + "'");
}

}  // namespace dccopmsp
