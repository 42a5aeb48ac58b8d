// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replay/artifact.hpp"
#include "replay/bitvec.hpp"

namespace replay {

using SignalValues = std::map<std::string, BitVector, std::less<>>;

struct ReplayOptions {
  bool check_enabled = true;
  bool stop_on_first_mismatch = false;
  std::size_t max_recorded_mismatches = 16;
};

struct Mismatch {
  std::size_t cycle = 0;
  std::string signal;
  BitVector expected;
  BitVector observed;
  BitVector mask;

  friend bool operator==(const Mismatch&, const Mismatch&) = default;
};

enum class ReplayState { Running, Done, Halted };

struct StepResult {
  SignalValues drive;
  bool done = false;
};

struct ReplayReport {
  std::size_t cycles_executed = 0;
  std::size_t cycle_count = 0;
  std::size_t mismatch_count = 0;
  std::optional<Mismatch> first_mismatch;
  std::vector<Mismatch> recorded;
  ReplayState state = ReplayState::Running;
  bool pass = false;

  /// Stable multi-line rendering used by the CLI.
  std::string to_text() const;

  friend bool operator==(const ReplayReport&, const ReplayReport&) = default;
};

/// Open-loop agent emulator. Each step() drives the agent-side fields of the
/// current frame and checks the DUT-side observations against it. Drive
/// values depend only on the cycle index, never on what was observed.
class ReplayEngine {
 public:
  ReplayEngine(std::shared_ptr<const ReplayArtifact> artifact, ReplayOptions options);
  ReplayEngine(ReplayArtifact artifact, ReplayOptions options)
      : ReplayEngine(std::make_shared<const ReplayArtifact>(std::move(artifact)), options) {}

  /// `observed` must hold every DUT-driven signal at its declared width;
  /// names that are not DUT-driven signals are ignored.
  StepResult step(const SignalValues& observed);

  /// Agent values for the cycle about to be stepped; after Done or Halted,
  /// the values of the last stepped frame.
  SignalValues pending_drive() const;

  ReplayState state() const { return state_; }
  std::size_t cycle() const { return cycle_; }
  const std::vector<Mismatch>& mismatches() const { return recorded_; }
  std::size_t mismatch_count() const { return mismatch_count_; }
  const ReplayArtifact& artifact() const { return *artifact_; }

  ReplayReport report() const;

 private:
  SignalValues drive_for(std::size_t frame) const;

  std::shared_ptr<const ReplayArtifact> artifact_;
  ReplayOptions options_;
  std::vector<std::size_t> agent_entries_;
  std::vector<std::size_t> dut_entries_;
  std::vector<BitVector> policy_masks_;  // per directory entry
  std::size_t cycle_ = 0;
  ReplayState state_ = ReplayState::Running;
  std::size_t mismatch_count_ = 0;
  std::optional<Mismatch> first_;
  std::vector<Mismatch> recorded_;
};

}  // namespace replay
