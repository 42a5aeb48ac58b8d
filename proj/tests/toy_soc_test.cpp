// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "replay/artifact.hpp"
#include "replay/error.hpp"
#include "replay/toy_soc.hpp"
#include "replay/waveform.hpp"

namespace replay::sim {
namespace {

std::vector<std::uint8_t> le_words(std::uint32_t first, std::size_t count) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t w = first + static_cast<std::uint32_t>(i);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  }
  return out;
}

ToyGpuConfig randomized(std::uint64_t seed) {
  ToyGpuConfig c;
  c.randomization = {true, seed, 3};
  return c;
}

struct Capture {
  RunResult run;
  std::vector<std::uint8_t> memory;
};

Capture capture(const ToyGpuConfig& cfg) {
  auto tb = build_ip_testbench(cfg);
  Capture c{tb.run(10000), tb.dump_memory(cfg.mem_base, 4 * cfg.word_count)};
  return c;
}

ReplayArtifact encode(const RunResult& r) { return encode_artifact(r.vcd, toy_interface_spec()).artifact; }

TEST(ToyGpu, DefaultRunWritesWordIndices) {
  const ToyGpuConfig cfg;
  const auto c = capture(cfg);
  EXPECT_EQ(c.run.status, RunStatus::DoneAsserted);
  EXPECT_EQ(c.memory, le_words(0, 16));
  EXPECT_EQ(c.run.cycles_run, c.run.done_cycle + 3);  // two drain edges after the one raising done
}

TEST(ToyGpu, FuseOffsetAndWordCount) {
  ToyGpuConfig cfg;
  cfg.word_count = 1;
  EXPECT_EQ(capture(cfg).memory, le_words(0, 1));
  cfg.word_count = 5;
  cfg.fuse_words[0] = 0x100;
  EXPECT_EQ(capture(cfg).memory, le_words(0x100, 5));
  cfg.fuse_words.clear();
  EXPECT_EQ(capture(cfg).memory, le_words(0, 5));
}

TEST(ToyGpu, StallsMoveTimingNotResults) {
  const auto a = capture(randomized(3));
  const auto b = capture(randomized(4));
  const auto plain = capture(ToyGpuConfig{});
  EXPECT_NE(write_vcd(a.run.vcd), write_vcd(b.run.vcd));
  EXPECT_NE(a.run.done_cycle, plain.run.done_cycle);
  EXPECT_EQ(a.memory, plain.memory);
  EXPECT_EQ(b.memory, plain.memory);
}

TEST(ToyGpu, RunsAreReproducible) {
  const auto a = capture(randomized(9));
  const auto b = capture(randomized(9));
  EXPECT_EQ(write_vcd(a.run.vcd), write_vcd(b.run.vcd));
  EXPECT_EQ(a.run.done_cycle, b.run.done_cycle);
}

TEST(ToyGpu, Timeout) {
  auto tb = build_ip_testbench(ToyGpuConfig{});
  const auto r = tb.run(1);
  EXPECT_EQ(r.status, RunStatus::Timeout);
  EXPECT_EQ(r.cycles_run, 1u);
  EXPECT_THROW(tb.run(5), Error);
}

TEST(ToyGpu, MemoryOutsideWritesIsZero) {
  auto tb = build_ip_testbench(ToyGpuConfig{});
  tb.run(10000);
  EXPECT_EQ(tb.dump_memory(kDefaultMemBase + 64, 32), std::vector<std::uint8_t>(32, 0));
  EXPECT_TRUE(tb.dump_memory(kDefaultMemBase, 0).empty());
}

TEST(ToyGpu, ConfigValidation) {
  ToyGpuConfig cfg;
  cfg.word_count = 0;
  EXPECT_THROW(build_ip_testbench(cfg), Error);
  cfg.word_count = 1;
  cfg.mem_base = 2;
  EXPECT_THROW(build_ip_testbench(cfg), Error);
}

TEST(Replay, ClosureWithoutRandomization) {
  const ToyGpuConfig cfg;
  const auto c = capture(cfg);
  auto soc = build_soc_testbench(encode(c.run), cfg, {});
  const auto r = soc.run(10000);
  ASSERT_TRUE(r.replay);
  EXPECT_TRUE(r.replay->pass) << r.replay->to_text();
  EXPECT_EQ(r.replay->mismatch_count, 0u);
  EXPECT_EQ(r.status, RunStatus::DoneAsserted);
  EXPECT_EQ(soc.dump_memory(cfg.mem_base, 64), c.memory);
}

TEST(Replay, ClosureWithSameSeed) {
  const auto cfg = randomized(21);
  const auto c = capture(cfg);
  auto soc = build_soc_testbench(encode(c.run), cfg, {});
  const auto r = soc.run(10000);
  EXPECT_TRUE(r.replay->pass) << r.replay->to_text();
  EXPECT_EQ(soc.dump_memory(cfg.mem_base, 64), c.memory);
}

TEST(Replay, ReplayedBoundaryMatchesCapture) {
  const ToyGpuConfig cfg;
  const auto c = capture(cfg);
  const auto art = encode(c.run);
  auto soc = build_soc_testbench(art, cfg, {});
  const auto r = soc.run(10000);
  // Re-encoding the SoC-side trace reproduces the artifact's frames.
  const auto again = encode(r);
  ASSERT_GE(again.cycle_count(), art.cycle_count());
  for (std::size_t i = 0; i < art.cycle_count(); ++i) ASSERT_EQ(again.frames[i], art.frames[i]) << "cycle " << i;
}

TEST(Replay, DifferentSeedIsDetected) {
  const auto c = capture(randomized(7));
  auto soc = build_soc_testbench(encode(c.run), randomized(99), {});
  const auto r = soc.run(10000);
  EXPECT_FALSE(r.replay->pass);
  EXPECT_GE(r.replay->mismatch_count, 1u);
}

TEST(Replay, MismatchedBoundaryIsRejected) {
  const auto art = encode(capture(ToyGpuConfig{}).run);

  auto renamed = art;
  renamed.directory[0].name = "pm_request";
  EXPECT_THROW(build_soc_testbench(renamed, ToyGpuConfig{}, {}), Error);

  auto flipped = art;
  for (auto& e : flipped.directory)
    if (e.name == "done") e.direction = Direction::AgentDriven;
  EXPECT_THROW(build_soc_testbench(flipped, ToyGpuConfig{}, {}), Error);

  // Drop the agent-driven mem_ready from the directory: the GPU input would float.
  ReplayArtifact partial;
  partial.clock_period = art.clock_period;
  for (const auto& e : art.directory) {
    if (e.name == "mem_ready") continue;
    auto copy = e;
    copy.offset = partial.frame_width;
    partial.frame_width += e.width;
    partial.directory.push_back(copy);
  }
  EXPECT_THROW(build_soc_testbench(partial, ToyGpuConfig{}, {}), Error);
}

TEST(Boundary, InterfaceSpecMatchesPorts) {
  const auto spec = toy_interface_spec();
  const auto ports = gpu_boundary();
  ASSERT_EQ(spec.bindings.size(), ports.size());
  std::size_t width = 0;
  for (std::size_t i = 0; i < ports.size(); ++i) {
    EXPECT_EQ(spec.bindings[i].name, ports[i].name);
    EXPECT_EQ(spec.bindings[i].width, ports[i].width);
    width += ports[i].width;
  }
  EXPECT_EQ(frame_layout(spec).width, width);
  EXPECT_NO_THROW(spec.validate());
}

}  // namespace
}  // namespace replay::sim
