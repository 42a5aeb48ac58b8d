// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "replay/error.hpp"
#include "replay/interface_spec.hpp"
#include "support.hpp"

namespace replay {
namespace {

using testing::Rng;

void expect_error(const std::string& yaml, const std::string& needle) {
  try {
    load_spec(yaml);
    FAIL() << "expected an error containing '" << needle << "'";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(LoadSpec, MinimalValid) {
  const auto spec = load_spec(R"(
clock: tb.clk
signals:
  - {name: data, path: tb.data, width: 32, direction: agent}
)");
  EXPECT_EQ(spec.clock.capture_path, "tb.clk");
  ASSERT_EQ(spec.bindings.size(), 1u);
  EXPECT_EQ(spec.bindings[0].width, 32u);
  EXPECT_EQ(spec.bindings[0].direction, Direction::AgentDriven);
  EXPECT_EQ(spec.bindings[0].check.kind, CheckPolicy::Kind::Strict);
  EXPECT_FALSE(spec.reset);
  EXPECT_EQ(spec.start_condition, StartCondition::FirstEdge);
}

TEST(LoadSpec, ResetDefaultsToAfterDeassert) {
  const auto spec = load_spec(R"(
clock: {path: tb.clk, edge: rising}
reset: {path: tb.rst_n, active: low}
signals:
  - {name: a, path: tb.a, width: 1, direction: dut}
)");
  ASSERT_TRUE(spec.reset);
  EXPECT_FALSE(spec.reset->active_high);
  EXPECT_EQ(spec.start_condition, StartCondition::AfterResetDeassert);

  const auto first = load_spec(R"(
clock: tb.clk
reset: {path: tb.rst, active: high, start: first_edge}
signals:
  - {name: a, path: tb.a, width: 1, direction: dut}
)");
  EXPECT_TRUE(first.reset->active_high);
  EXPECT_EQ(first.start_condition, StartCondition::FirstEdge);
}

TEST(LoadSpec, Errors) {
  expect_error("clock: tb.clk\nsignals:\n  - {name: c, path: tb.clk, width: 1, direction: agent}\n",
               "clock must not be a replayed binding");
  expect_error(
      "clock: tb.clk\nsignals:\n  - {name: a, path: tb.a, width: 1, direction: agent}\n"
      "  - {name: a, path: tb.b, width: 1, direction: agent}\n",
      "duplicate signal name");
  expect_error("clock: tb.clk\nsignals:\n  - {name: a, path: tb.a, width: 0, direction: agent}\n", "zero width");
  expect_error("clock: tb.clk\nsignals:\n  - {name: a, path: tb.a, width: 1, direction: sideways}\n",
               "unknown direction");
  expect_error(
      "clock: tb.clk\nsignals:\n  - {name: a, path: tb.a, width: 4, direction: dut, check: masked, mask: '101'}\n",
      "mask");
  expect_error("clock: tb.clk\nsignals: []\n", "at least one signal");
  expect_error("clock: tb.clk\ncolour: red\nsignals:\n  - {name: a, path: tb.a, width: 1, direction: dut}\n",
               "colour");
  expect_error("signals:\n  - {name: a, path: tb.a, width: 1, direction: dut}\n", "clock");
  expect_error("clock: [unterminated\n", "interface config");
}

TEST(LoadSpec, MaskedPolicy) {
  const auto spec = load_spec(
      "clock: tb.clk\nsignals:\n  - {name: a, path: tb.a, width: 4, direction: dut, check: masked, mask: '1100'}\n");
  const auto& check = spec.bindings[0].check;
  ASSERT_EQ(check.kind, CheckPolicy::Kind::Masked);
  EXPECT_EQ(check.effective_mask(4).to_u64(), 0xCu);
  EXPECT_EQ(CheckPolicy::ignore().effective_mask(4).to_u64(), 0u);
  EXPECT_EQ(CheckPolicy::strict().effective_mask(4).to_u64(), 0xFu);
}

InterfaceSpec spec_with_widths(const std::vector<std::size_t>& widths) {
  InterfaceSpec s;
  s.clock.capture_path = "clk";
  for (std::size_t i = 0; i < widths.size(); ++i) {
    s.bindings.push_back({"s" + std::to_string(i), "p" + std::to_string(i), widths[i], Direction::AgentDriven, {}});
  }
  return s;
}

TEST(FrameLayout, PrefixSums) {
  const auto l = frame_layout(spec_with_widths({1, 32, 8}));
  EXPECT_EQ(l.offsets, (std::vector<std::size_t>{0, 1, 33}));
  EXPECT_EQ(l.width, 41u);
  const auto single = frame_layout(spec_with_widths({1}));
  EXPECT_EQ(single.offsets, std::vector<std::size_t>{0});
  EXPECT_EQ(single.width, 1u);
}

TEST(FrameLayout, MatchesIndependentFold) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::size_t> widths(10);
    for (auto& w : widths) w = testing::pick(rng, 1, 100);
    const auto l = frame_layout(spec_with_widths(widths));
    std::vector<std::size_t> expected(widths.size());
    std::exclusive_scan(widths.begin(), widths.end(), expected.begin(), std::size_t{0});
    EXPECT_EQ(l.offsets, expected);
    EXPECT_EQ(l.width, std::accumulate(widths.begin(), widths.end(), std::size_t{0}));
  }
}

TEST(FrameLayout, PermutationPermutesOffsets) {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::size_t> widths(testing::pick(rng, 1, 8));
    for (auto& w : widths) w = testing::pick(rng, 1, 20);
    auto spec = spec_with_widths(widths);
    auto permuted = spec;
    std::shuffle(permuted.bindings.begin(), permuted.bindings.end(), rng);
    const auto a = frame_layout(spec);
    const auto b = frame_layout(permuted);
    EXPECT_EQ(a.width, b.width);
    // Offset of each binding in the permuted layout equals the sum of the
    // widths placed before it.
    std::size_t running = 0;
    for (std::size_t k = 0; k < permuted.bindings.size(); ++k) {
      EXPECT_EQ(b.offsets[k], running);
      running += permuted.bindings[k].width;
    }
  }
}

TEST(DumpSpec, RoundTripsRandomSpecs) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    InterfaceSpec s;
    s.clock.capture_path = "tb.clk";
    if (testing::pick(rng, 0, 1)) {
      s.reset = ResetSpec{"tb.rst", testing::pick(rng, 0, 1) == 1};
      s.start_condition = testing::pick(rng, 0, 1) ? StartCondition::FirstEdge : StartCondition::AfterResetDeassert;
    }
    const auto n = testing::pick(rng, 1, 6);
    for (std::uint64_t k = 0; k < n; ++k) {
      SignalBinding b;
      b.name = "sig_" + std::to_string(k);
      b.capture_path = "tb.u.sig_" + std::to_string(k);
      b.width = testing::pick(rng, 1, 80);
      b.direction = testing::pick(rng, 0, 1) ? Direction::DutDriven : Direction::AgentDriven;
      const auto p = testing::pick(rng, 0, 2);
      if (p == 1) b.check = CheckPolicy::ignore();
      if (p == 2) b.check = CheckPolicy::masked(testing::random_bits(rng, b.width));
      s.bindings.push_back(b);
    }
    s.validate();
    ASSERT_EQ(load_spec(dump_spec(s)), s) << dump_spec(s);
  }
}

TEST(Validate, AfterDeassertNeedsReset) {
  auto s = spec_with_widths({1});
  s.start_condition = StartCondition::AfterResetDeassert;
  EXPECT_THROW(s.validate(), Error);
  s.reset = ResetSpec{"p0", false};
  EXPECT_THROW(s.validate(), Error);  // reset listed as a binding
}

}  // namespace
}  // namespace replay
