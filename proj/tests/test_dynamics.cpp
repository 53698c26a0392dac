#include <doctest.h>

#include <sstream>

#include "dccopmsp/dynamics.hpp"

using namespace dccopmsp;

namespace {

ResourceMatrix baseline6() {
  ResourceMatrix m(2, 6);
  for (Period t = 1; t <= 6; ++t) {
    m(0, t) = 100.0 + t;
    m(1, t) = 50.0 * t;
  }
  return m;
}

}  // namespace

TEST_CASE("change interval") {
  CHECK(DynamicConfig{20, 0.4, 10000, 0}.change_interval() == 500);
  CHECK(DynamicConfig{2, 0.4, 10000, 0}.change_interval() == 5000);
  CHECK(DynamicConfig{0, 0.4, 10000, 0}.change_interval() == 0);
  CHECK_THROWS_AS(DynamicConfig({5, 0.4, 3, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DynamicConfig({5, 1.0, 100, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DynamicConfig({-1, 0.4, 100, 0}).validate(), std::invalid_argument);
}

TEST_CASE("zero magnitude leaves capacities at baseline") {
  DynamicEnvironment env(baseline6(), {10, 0.0, 1000, 3});
  for (int k = 1; k <= 10; ++k) env.next_change(k * 100);
  CHECK(env.current() == baseline6());
  for (const auto& m : env.history()) CHECK(m == baseline6());
}

TEST_CASE("scaled capacities stay within the magnitude band") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DynamicEnvironment env(baseline6(), {30, 0.4, 3000, seed});
    for (int k = 1; k <= 30; ++k) {
      const auto& ev = env.next_change(k * 100);
      CHECK(ev.index == k);
      CHECK(ev.eval_count_at_change == k * 100);
      CHECK_FALSE(ev.factors.empty());
      for (const auto& [t, g] : ev.factors) {
        CHECK(g >= 0.6);
        CHECK(g <= 1.4);
      }
      for (int r = 0; r < 2; ++r) {
        for (Period t = 1; t <= 6; ++t) {
          const double ratio = env.current()(r, t) / env.baseline()(r, t);
          CHECK(ratio >= 0.6 - 1e-12);
          CHECK(ratio <= 1.4 + 1e-12);
        }
      }
    }
    CHECK_THROWS_AS(env.next_change(9999), std::logic_error);
  }
}

TEST_CASE("factors rescale the baseline, unaffected periods keep their value") {
  DynamicEnvironment env(baseline6(), {5, 0.4, 500, 17});
  for (int k = 1; k <= 5; ++k) {
    const ResourceMatrix before = env.current();
    const auto ev = env.next_change(k * 100);
    for (Period t = 1; t <= 6; ++t) {
      for (int r = 0; r < 2; ++r) {
        auto it = ev.factors.find(t);
        if (it == ev.factors.end()) {
          CHECK(env.current()(r, t) == before(r, t));
        } else {
          CHECK(env.current()(r, t) == env.baseline()(r, t) * it->second);
        }
      }
    }
  }
  CHECK(replay(env.baseline(), env.log()) == env.current());
}

TEST_CASE("same seed, same events") {
  DynamicEnvironment a(baseline6(), {8, 0.4, 800, 99}), b(baseline6(), {8, 0.4, 800, 99});
  for (int k = 1; k <= 8; ++k) {
    CHECK(a.next_change(k) .factors == b.next_change(k).factors);
  }
}

TEST_CASE("capacity trace") {
  SUBCASE("no changes") {
    DynamicEnvironment env(baseline6(), {0, 0.4, 100, 1});
    const auto tr = capacity_trace(env);
    CHECK(tr.size() == 12);
    for (const auto& p : tr) CHECK(p.capacity == p.baseline);
  }
  SUBCASE("thirty changes on six periods") {
    DynamicEnvironment env(baseline6(), {30, 0.4, 3000, 5});
    for (int k = 1; k <= 30; ++k) env.next_change(k * 100);
    const auto tr = capacity_trace(env);
    CHECK(tr.size() == 2u * 6u * 31u);
    for (int r = 0; r < 2; ++r) {
      for (Period t = 1; t <= 6; ++t) {
        int n = 0;
        for (const auto& p : tr) n += (p.resource == r && p.period == t) ? 1 : 0;
        CHECK(n == 31);
      }
    }
    std::ostringstream csv, svg;
    write_trace_csv(csv, tr, {"mining", "processing"});
    write_trace_svg(svg, tr, {"mining", "processing"});
    CHECK(csv.str().rfind("resource,period,epoch,capacity,baseline\n", 0) == 0);
    CHECK(svg.str().find("<svg") != std::string::npos);
    CHECK(svg.str().find("stroke-dasharray") != std::string::npos);
  }
}
