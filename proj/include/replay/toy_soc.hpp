// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// Reference designs hosted on the cycle kernel.
//
// ToyGpu is a small GPU-like IP with a three-phase boundary:
//   1. power-management handshake: pm_req out, pm_ack in (4-phase; the agent
//      acknowledges after a fixed 3-cycle latency);
//   2. fuse load: the agent streams fuse words over fuse_valid/fuse_data
//      while the GPU holds fuse_ready;
//   3. workload: the GPU writes word_count 32-bit words over a valid/ready
//      memory port (mem_valid, mem_addr, mem_wdata out; mem_ready in), word
//      i = i + fuse_words[0] at mem_base + 4 * i, then raises done.
//
// With randomization enabled the GPU inserts seeded stalls (0..max_stall
// cycles) before the handshake and before every write. Stalls move the
// boundary waveform in time but never change final memory contents.
//
// The IP testbench pairs the GPU with AgentBfm, which answers every request.
// The SoC testbench replaces the BFM with a replay adapter driven purely by
// a ReplayArtifact; a passive system-memory sink records the GPU's writes.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replay/artifact.hpp"
#include "replay/engine.hpp"
#include "replay/interface_spec.hpp"
#include "replay/kernel.hpp"
#include "replay/waveform.hpp"

namespace replay::sim {

inline constexpr std::uint64_t kDefaultMemBase = 0x4316BC0000ull;

struct Randomization {
  bool enabled = false;
  std::uint64_t seed = 1;
  std::uint64_t max_stall = 3;
};

struct ToyGpuConfig {
  std::uint64_t mem_base = kDefaultMemBase;
  std::uint64_t word_count = 16;
  std::vector<std::uint32_t> fuse_words = {0x00000000u, 0xC0DE0001u, 0x0000FFFFu, 0x12345678u};
  Randomization randomization;

  void validate() const;
};

struct TestbenchTiming {
  Tick clock_period = 10;        // ticks of 1 ns
  std::uint64_t reset_cycles = 2;  // edges with rst_n sampled low
  std::uint64_t drain_cycles = 2;  // edges run after done first rises
};

/// One boundary port of the GPU, named as it appears in traces and artifacts.
struct BoundaryPort {
  const char* name;
  std::size_t width;
  Direction direction;  // AgentDriven = GPU input
};

/// The GPU boundary in frame order.
std::span<const BoundaryPort> gpu_boundary();

/// Interface description matching the traces produced by the testbenches:
/// clock tb.clk, active-low reset tb.rst_n, and every boundary port.
InterfaceSpec toy_interface_spec();

enum class RunStatus { DoneAsserted, Timeout };

struct RunResult {
  RunStatus status = RunStatus::Timeout;
  std::uint64_t done_cycle = 0;  // edge index at which done was first committed
  std::uint64_t cycles_run = 0;
  WaveformDb vcd;
  std::optional<ReplayReport> replay;
};

class Testbench {
 public:
  Testbench(Testbench&&) noexcept;
  Testbench& operator=(Testbench&&) noexcept;
  ~Testbench();

  /// Steps up to max_cycles rising edges. Stops drain_cycles after done
  /// rises or, when replaying, once the replay engine has finished.
  RunResult run(std::uint64_t max_cycles);

  std::vector<std::uint8_t> dump_memory(std::uint64_t base, std::size_t byte_count) const;

  const Kernel& kernel() const;
  /// Null for the IP testbench.
  const ReplayEngine* engine() const;

 private:
  struct State;
  explicit Testbench(std::unique_ptr<State> s);
  std::unique_ptr<State> s_;

  friend Testbench build_ip_testbench(const ToyGpuConfig&, const TestbenchTiming&);
  friend Testbench build_soc_testbench(std::shared_ptr<const ReplayArtifact>, const ToyGpuConfig&,
                                       const ReplayOptions&, const TestbenchTiming&);
};

Testbench build_ip_testbench(const ToyGpuConfig& cfg, const TestbenchTiming& timing = {});

/// Throws when the artifact directory does not line up with the GPU ports
/// (unknown name, wrong width or direction, or an undriven GPU input).
Testbench build_soc_testbench(std::shared_ptr<const ReplayArtifact> artifact, const ToyGpuConfig& cfg,
                              const ReplayOptions& opts, const TestbenchTiming& timing = {});

inline Testbench build_soc_testbench(const ReplayArtifact& artifact, const ToyGpuConfig& cfg,
                                     const ReplayOptions& opts, const TestbenchTiming& timing = {}) {
  return build_soc_testbench(std::make_shared<const ReplayArtifact>(artifact), cfg, opts, timing);
}

}  // namespace replay::sim
