#include <doctest.h>

#include <sstream>
#include <thread>

#include "dccopmsp/instance.hpp"
#include "dccopmsp/synthetic.hpp"
#include "oracles.hpp"

using namespace dccopmsp;

namespace {

Instance from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_canonical(in, "inline.txt");
}

const char* kHeader =
    "dccopmsp v1\nT 2\nD 0.1\nRESOURCES 1 mining\nCAP 1 10\nCAP 2 10\n";

Instance diamond() {
  return from_text(std::string(kHeader) +
                   "BLOCK 0 0 -1 1\nBLOCK 1 0 -1 1\nBLOCK 2 1 3 1\nBLOCK 3 1 9 1\n"
                   "PREC 1 1 0\nPREC 2 1 0\nPREC 3 2 1 2\n");
}

}  // namespace

TEST_CASE("chain fixture loads with its topological order") {
  const Instance inst = load_instance(oracle::data("chain3.txt"));
  CHECK(inst.name() == "chain3");
  CHECK(inst.num_blocks() == 3);
  CHECK(inst.periods() == 2);
  CHECK(inst.precedence().size() == 2);
  CHECK(inst.topological_order() == std::vector<BlockId>{0, 1, 2});
  CHECK(inst.block(2).ore);
  CHECK_FALSE(inst.block(0).ore);
  CHECK(inst.discount(1) == doctest::Approx(1.0 / 1.1));
  CHECK(inst.discount(2) == doctest::Approx(1.0 / 1.21));
}

TEST_CASE("instance without precedence arcs") {
  const Instance inst = from_text(std::string(kHeader) + "BLOCK 0 1 5 1\nBLOCK 1 0 -1 2\n");
  CHECK(inst.precedence().empty());
  CHECK(inst.predecessors(1).empty());
  CHECK(inst.predecessor_closure(1).empty());
}

TEST_CASE("predecessor closure") {
  const Instance chain = load_instance(oracle::data("chain3.txt"));
  CHECK(chain.predecessor_closure(2) == std::vector<BlockId>{0, 1});
  CHECK(chain.predecessor_closure(0).empty());

  const Instance d = diamond();
  CHECK(d.predecessor_closure(3) == std::vector<BlockId>{0, 1, 2});
  CHECK(d.predecessor_closure(1) == std::vector<BlockId>{0});
  CHECK(d.successors(0).size() == 2);
}

TEST_CASE("closure is safe under concurrent first access") {
  const Instance inst = generate_pit(newman1_like_spec());
  const BlockId deepest = inst.num_blocks() - 1;
  std::vector<std::vector<BlockId>> seen(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] { seen[static_cast<std::size_t>(i)] = inst.predecessor_closure(deepest); });
  }
  for (auto& t : threads) t.join();
  for (const auto& s : seen) CHECK(s == seen.front());
  // The bottom block of a six-layer pit needs blocks from all five layers above.
  CHECK(seen.front().size() >= 5 + 13 + 25 + 41 + 61);
}

TEST_CASE("malformed input is rejected with a line number") {
  SUBCASE("cycle") {
    CHECK_THROWS_AS(from_text(std::string(kHeader) + "BLOCK 0 0 1 1\nBLOCK 1 0 1 1\nPREC 0 1 1\nPREC 1 1 0\n"),
                    InstanceError);
  }
  SUBCASE("dangling predecessor") {
    CHECK_THROWS_AS(from_text(std::string(kHeader) + "BLOCK 0 0 1 1\nPREC 0 1 7\n"), InstanceError);
  }
  SUBCASE("self arc") {
    try {
      from_text(std::string(kHeader) + "BLOCK 0 0 1 1\nPREC 0 1 0\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 8);
    }
  }
  SUBCASE("wrong resource count") {
    try {
      from_text(std::string(kHeader) + "BLOCK 0 0 1 1 2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
    }
  }
  SUBCASE("negative resource use") {
    CHECK_THROWS_AS(from_text(std::string(kHeader) + "BLOCK 0 0 1 -1\n"), ParseError);
  }
  SUBCASE("non-dense ids") {
    CHECK_THROWS_AS(from_text(std::string(kHeader) + "BLOCK 0 0 1 1\nBLOCK 2 0 1 1\n"), InstanceError);
  }
  SUBCASE("missing capacity period") {
    CHECK_THROWS_AS(from_text("dccopmsp v1\nT 2\nD 0.1\nRESOURCES 1 m\nCAP 1 3\nBLOCK 0 0 1 1\n"), InstanceError);
  }
  SUBCASE("bad header") { CHECK_THROWS_AS(from_text("T 2\n"), ParseError); }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_instance("/nonexistent/x.txt"), InstanceError); }
}

TEST_CASE("canonical round trip") {
  const Instance inst = load_instance(oracle::data("toy8.txt"));
  std::ostringstream out;
  inst.write_canonical(out);
  std::istringstream in(out.str());
  const Instance back = parse_canonical(in, "toy8.txt");
  CHECK(back == inst);
}

TEST_CASE("Newman1-sized pit in minelib layout") {
  const Instance inst = load_instance(oracle::data("newman1/newman1.desc"), InstanceFormat::minelib);
  CHECK(inst.name() == "newman1");
  CHECK(inst.periods() == 6);
  CHECK(inst.num_blocks() == 1060);
  CHECK(inst.precedence().size() == 3922);
  CHECK(inst.num_resources() == 2);
  CHECK(inst.discount_rate() == doctest::Approx(0.08));
  CHECK(inst.has_coords());
  // The committed files are exactly what the generator produces.
  CHECK(inst == generate_pit(newman1_like_spec()));
}

TEST_CASE("minelib writer and reader agree") {
  PitSpec spec;
  spec.name = "mini";
  spec.top_nx = 6;
  spec.top_ny = 5;
  spec.layers = 3;
  spec.diagonal_arcs = 5;
  const Instance inst = generate_pit(spec);
  const auto dir = std::filesystem::temp_directory_path() / "dccopmsp_minelib_test";
  const auto desc = write_minelib(inst, dir);
  CHECK(load_instance(desc, InstanceFormat::minelib) == inst);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format names") {
  CHECK(parse_instance_format("minelib") == InstanceFormat::minelib);
  CHECK(parse_instance_format("canonical") == InstanceFormat::canonical);
  CHECK_THROWS(parse_instance_format("xml"));
}
