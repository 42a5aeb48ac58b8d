// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "replay/engine.hpp"
#include "replay/error.hpp"
#include "replay/romgen.hpp"
#include "replay/toy_soc.hpp"
#include "support.hpp"

namespace replay {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

ReplayArtifact pm_ack_only() {
  ReplayArtifact a;
  a.frame_width = 1;
  a.clock_period = 10;
  a.directory.push_back({"pm_ack", 1, Direction::AgentDriven, {}, 0});
  a.frames.push_back({BitVector::from_u64(1, 1), BitVector::ones(1)});
  return a;
}

ReplayArtifact mixed() {
  ReplayArtifact a;
  a.frame_width = 29;
  a.clock_period = 4;
  a.timescale = {10, TimeUnit::ps};
  a.start_condition = StartCondition::AfterResetDeassert;
  a.directory = {{"req", 1, Direction::DutDriven, {}, 0},
                 {"ack", 1, Direction::AgentDriven, {}, 1},
                 {"rdata", 16, Direction::AgentDriven, {}, 2},
                 {"status", 8, Direction::DutDriven, CheckPolicy::masked(BitVector::from_u64(8, 0x0F)), 18},
                 {"debug", 3, Direction::DutDriven, CheckPolicy::ignore(), 26}};
  const std::uint64_t data[] = {0x0000001, 0x1ABCD03, 0x12345678};
  for (auto d : data) {
    Frame f{BitVector::from_u64(29, d), BitVector::ones(29)};
    f.care.set(0, d != data[1]);
    a.frames.push_back(f);
  }
  return a;
}

ReplayArtifact toy_capture() {
  auto tb = sim::build_ip_testbench(sim::ToyGpuConfig{});
  return encode_artifact(tb.run(10000).vcd, sim::toy_interface_spec()).artifact;
}

TEST(Romgen, MinimalModule) {
  const auto out = emit_hdl_module(pm_ack_only(), {"tiny", 8, true});
  EXPECT_EQ(out.data_hex, "01\n");
  EXPECT_EQ(out.care_hex, "01\n");  // padding bits are zero in both planes
  EXPECT_NE(out.hdl.find("output wire pm_ack"), std::string::npos);
  EXPECT_NE(out.hdl.find("reg [7:0] rp_data_rom [0:0];"), std::string::npos);
  EXPECT_NE(out.hdl.find("$readmemh(\"tiny_data.hex\", rp_data_rom);"), std::string::npos);
  EXPECT_NE(out.hdl.find("module tiny ("), std::string::npos);
  EXPECT_NE(out.hdl.find("output reg  replay_error"), std::string::npos);

  const auto bare = emit_hdl_module(pm_ack_only(), {"tiny", 8, false});
  EXPECT_EQ(bare.hdl.find("replay_mismatch"), std::string::npos);
  EXPECT_EQ(bare.hdl.find("care"), bare.hdl.find("care: "));  // only the header mentions the care file
}

TEST(Romgen, Deterministic) {
  const auto art = mixed();
  const auto a = emit_hdl_module(art, {"m", 16, true});
  const auto b = emit_hdl_module(art, {"m", 16, true});
  EXPECT_EQ(a.hdl, b.hdl);
  EXPECT_EQ(a.data_hex, b.data_hex);
  EXPECT_EQ(a.care_hex, b.care_hex);
}

TEST(Romgen, HexEqualsEmitHex) {
  const auto art = toy_capture();
  for (unsigned ww : {8u, 16u, 32u, 64u}) {
    const auto out = emit_hdl_module(art, {"gpu_replay", ww, true});
    EXPECT_EQ(out.data_hex, emit_hex(art, ww));
    EXPECT_EQ(out.care_hex, emit_hex(art, ww, HexPlane::Care));
  }
}

// Reads the module text and ROM file the way a simulator would and returns
// the agent outputs for every cycle.
std::vector<std::map<std::string, BitVector>> extract_outputs(const RomGenOutput& out) {
  std::smatch m;
  const std::regex words_re(R"(localparam integer WORDS_PER_FRAME = (\d+);)");
  const std::regex cycles_re(R"(localparam integer CYCLES = (\d+);)");
  const std::regex rom_re(R"(reg \[(\d+):0\] rp_data_rom)");
  EXPECT_TRUE(std::regex_search(out.hdl, m, words_re));
  const std::size_t k = std::stoul(m[1]);
  EXPECT_TRUE(std::regex_search(out.hdl, m, cycles_re));
  const std::size_t n = std::stoul(m[1]);
  EXPECT_TRUE(std::regex_search(out.hdl, m, rom_re));
  const std::size_t ww = std::stoul(m[1]) + 1;

  const auto lines = testing::split_lines(out.data_hex);
  EXPECT_EQ(lines.size(), n * k);
  std::vector<BitVector> frames;
  for (std::size_t i = 0; i < n; ++i) {
    BitVector f(k * ww);
    for (std::size_t w = 0; w < k; ++w) {
      const std::string& hex = lines[i * k + w];
      for (std::size_t d = 0; d < hex.size(); ++d) {
        const unsigned nib = std::stoul(std::string(1, hex[hex.size() - 1 - d]), nullptr, 16);
        for (unsigned b = 0; b < 4; ++b) f.set(w * ww + 4 * d + b, (nib >> b) & 1u);
      }
    }
    frames.push_back(f);
  }

  const std::regex assign_re(R"(assign (\w+) = rp_data\[(\d+)(?: \+: (\d+))?\];)");
  std::vector<std::map<std::string, BitVector>> result(n);
  for (auto it = std::sregex_iterator(out.hdl.begin(), out.hdl.end(), assign_re); it != std::sregex_iterator(); ++it) {
    const auto& am = *it;
    const std::size_t off = std::stoul(am[2]);
    const std::size_t width = am[3].matched ? std::stoul(am[3]) : 1;
    for (std::size_t i = 0; i < n; ++i) result[i][am[1]] = frames[i].slice(off, width);
  }
  return result;
}

TEST(Romgen, RomContentMirrorsEngineDrive) {
  Rng rng(71);
  std::vector<ReplayArtifact> cases{mixed(), toy_capture(), pm_ack_only()};
  while (cases.size() < 40) {
    auto a = testing::random_artifact(rng, 150, 12);
    if (!a.frames.empty()) cases.push_back(std::move(a));
  }
  for (const auto& art : cases) {
    const unsigned ww = 8u << testing::pick(rng, 0, 3);
    const auto outputs = extract_outputs(emit_hdl_module(art, {"dut_replay", ww, true}));
    ReplayEngine eng(art, {false, false, 1});
    ASSERT_EQ(outputs.size(), art.cycle_count());
    for (std::size_t i = 0; i < art.cycle_count(); ++i) {
      SignalValues observed;
      for (const auto& e : art.directory)
        if (e.direction == Direction::DutDriven) observed[e.name] = BitVector(e.width);
      const auto drive = eng.step(observed).drive;
      ASSERT_EQ(drive.size(), outputs[i].size());
      for (const auto& [name, value] : drive) ASSERT_EQ(outputs[i].at(name), value) << name << " cycle " << i;
    }
  }
}

TEST(Romgen, RejectsBadNames) {
  const auto art = pm_ack_only();
  EXPECT_THROW(emit_hdl_module(art, {"module", 32, true}), Error);
  EXPECT_THROW(emit_hdl_module(art, {"9lives", 32, true}), Error);
  EXPECT_THROW(emit_hdl_module(art, {"pm_ack", 32, true}), Error);
  EXPECT_THROW(emit_hdl_module(art, {"ok", 12, true}), Error);
  for (const char* bad : {"rp_cycle", "clk", "rst", "replay_done", "wire", "a.b", "x-y"}) {
    auto a = art;
    a.directory[0].name = bad;
    EXPECT_THROW(emit_hdl_module(a, {"ok", 32, true}), Error) << bad;
  }
  auto empty = art;
  empty.frames.clear();
  EXPECT_THROW(emit_hdl_module(empty, {"ok", 32, true}), Error);

  EXPECT_TRUE(is_hdl_identifier("gpu_replay"));
  EXPECT_TRUE(is_hdl_identifier("_x$1"));
  EXPECT_FALSE(is_hdl_identifier(""));
  EXPECT_FALSE(is_hdl_identifier("always"));
}

struct GoldenCase {
  const char* module;
  unsigned word_width;
  ReplayArtifact (*make)();
};

const GoldenCase kGoldenCases[] = {
    {"pm_ack_replay", 8, pm_ack_only},
    {"mixed_replay", 16, mixed},
    {"gpu_replay", 32, toy_capture},
};

TEST(Romgen, MatchesCheckedInGoldens) {
  const fs::path dir = fs::path(REPLAY_SOURCE_DIR) / "tests" / "golden";
  const bool update = std::getenv("REPLAY_UPDATE_GOLDEN") != nullptr;
  for (const auto& c : kGoldenCases) {
    const auto out = emit_hdl_module(c.make(), {c.module, c.word_width, true});
    const std::pair<std::string, const std::string*> files[] = {
        {std::string(c.module) + ".v", &out.hdl},
        {std::string(c.module) + "_data.hex", &out.data_hex},
        {std::string(c.module) + "_care.hex", &out.care_hex},
    };
    for (const auto& [name, content] : files) {
      if (update) {
        std::ofstream(dir / name, std::ios::binary) << *content;
        continue;
      }
      ASSERT_TRUE(fs::exists(dir / name)) << name;
      EXPECT_EQ(testing::slurp(dir / name), *content) << name;
    }
  }
}

}  // namespace
}  // namespace replay
