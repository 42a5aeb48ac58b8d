// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// The capture -> encode -> replay -> compare -> romgen pipeline, driven by a
// single YAML configuration. Each stage reads and writes fixed file names in
// the output directory so stages can be run one at a time or all at once.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "replay/artifact.hpp"
#include "replay/engine.hpp"
#include "replay/error.hpp"
#include "replay/golden.hpp"
#include "replay/interface_spec.hpp"
#include "replay/romgen.hpp"
#include "replay/toy_soc.hpp"

namespace replay::flow {

namespace fs = std::filesystem;

/// Process exit codes, one per failing stage.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kRunIp = 10,
  kEncode = 11,
  kReplay = 12,
  kCompare = 13,
  kRomgen = 14,
  kInspect = 15,
};

/// Failure of one pipeline stage; carries the exit code for that stage.
class StageError : public Error {
 public:
  StageError(std::string stage, ExitCode code, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  ExitCode code() const { return code_; }

 private:
  std::string stage_;
  ExitCode code_;
};

struct CompareConfig {
  std::optional<fs::path> golden;  // defaults to the IP run's memory dump
  std::uint64_t base = sim::kDefaultMemBase;
  std::size_t bytes = 64;
  Normalization norm;
};

struct RomgenConfig {
  bool enabled = true;
  RomGenOptions options{"gpu_replay", 32, true};
};

struct FlowConfig {
  fs::path output_dir = "replay_out";
  std::uint64_t max_cycles = 10000;
  sim::TestbenchTiming timing;
  sim::ToyGpuConfig ip_gpu;   // capture side
  sim::ToyGpuConfig soc_gpu;  // replay side; differs only in randomization
  InterfaceSpec interface = sim::toy_interface_spec();
  EncodeOptions encode;
  ReplayOptions replay;
  CompareConfig compare;
  RomgenConfig romgen;
};

/// Relative input paths in the YAML resolve against `base_dir`.
FlowConfig parse_config(std::string_view yaml_text, const fs::path& base_dir);
FlowConfig load_config(const fs::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool no_randomization = false;
  std::optional<Tick> period_tolerance;
  std::optional<unsigned> word_width;
  std::optional<fs::path> output_dir;
};

void apply_overrides(FlowConfig& cfg, const Overrides& o);

/// Fixed artifact names inside the output directory.
struct Paths {
  fs::path ip_vcd, ip_memory, artifact, soc_vcd, soc_memory, replay_report, compare_report;
  fs::path hdl, data_hex, care_hex;

  static Paths in(const FlowConfig& cfg);
};

struct StageOutcome {
  bool pass = true;
  std::string summary;
};

StageOutcome run_ip(const FlowConfig& cfg, std::ostream& log);
StageOutcome encode(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& vcd = {},
                    const std::optional<fs::path>& artifact = {});
StageOutcome replay(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& artifact = {});
StageOutcome compare(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& sim = {},
                     const std::optional<fs::path>& golden = {});
StageOutcome romgen(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& artifact = {});

/// Runs every stage in order; returns the exit code of the first failing
/// stage or kOk.
int run_flow(const FlowConfig& cfg, std::ostream& log);

struct InspectOptions {
  std::size_t first_cycle = 0;
  std::optional<std::size_t> last_cycle;  // exclusive; defaults to first + 16
  std::uint64_t captured_clocks = 1;
};

std::string inspect_text(const ReplayArtifact& a, const InspectOptions& opts);

std::string read_text(const fs::path& p);
std::vector<std::uint8_t> read_bytes(const fs::path& p);
void write_file(const fs::path& p, std::string_view content);

}  // namespace replay::flow
