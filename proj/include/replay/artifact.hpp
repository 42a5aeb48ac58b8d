// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// The replay artifact: a cycle-ordered bit image of a captured interface.
// One frame per qualifying clock edge holds every bound signal's sampled
// value (data) and a care mask. The same artifact feeds the software replay
// engine and the generated HDL ROM.
//
// Sampling is strictly-before: a value changing at the same tick as a clock
// edge is not seen by that edge, matching flip-flop setup behavior.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replay/bitvec.hpp"
#include "replay/interface_spec.hpp"
#include "replay/waveform.hpp"

namespace replay {

inline constexpr std::uint16_t kArtifactVersion = 1;

struct Frame {
  BitVector data;
  BitVector care;  // 1 = compare/drive literal, 0 = don't-care

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct DirectoryEntry {
  std::string name;
  std::size_t width = 1;
  Direction direction = Direction::AgentDriven;
  CheckPolicy check;
  std::size_t offset = 0;

  friend bool operator==(const DirectoryEntry&, const DirectoryEntry&) = default;
};

struct ReplayArtifact {
  std::uint16_t version = kArtifactVersion;
  std::size_t frame_width = 0;
  Tick clock_period = 0;
  Timescale timescale;
  StartCondition start_condition = StartCondition::FirstEdge;
  std::vector<DirectoryEntry> directory;
  std::vector<Frame> frames;

  std::size_t cycle_count() const { return frames.size(); }
  const DirectoryEntry& entry(std::string_view name) const;

  /// Checks directory tiling, frame widths, agent care bits and period.
  void validate() const;

  friend bool operator==(const ReplayArtifact&, const ReplayArtifact&) = default;
};

enum class XPolicy { Error, ZeroWithWarning };

struct EncodeOptions {
  XPolicy x_policy = XPolicy::Error;
  /// Allowed deviation of each edge interval from the first interval.
  Tick period_tolerance = 0;
  /// Required when the capture has exactly one qualifying edge.
  std::optional<Tick> explicit_period;
};

struct EncodeResult {
  ReplayArtifact artifact;
  std::size_t zeroed_agent_bits = 0;  // X/Z agent bits forced to 0
  std::size_t unknown_clock_rises = 0;
  std::vector<std::string> warnings;
};

EncodeResult encode_artifact(const WaveformDb& db, const InterfaceSpec& spec,
                             const EncodeOptions& options = {});

/// Returns the common interval between consecutive edges. With a nonzero
/// tolerance the first interval is the nominal period.
Tick check_fixed_period(std::span<const Tick> edges, Tick tolerance = 0,
                        std::optional<Tick> explicit_period = std::nullopt);

std::vector<std::uint8_t> serialize_artifact(const ReplayArtifact& a);
ReplayArtifact deserialize_artifact(std::span<const std::uint8_t> bytes);

enum class HexPlane { Data, Care };

/// Hex memory-init text: frame-major, each frame packed LSB-first into
/// `word_width`-bit words, one word per line, most significant nibble first.
std::string emit_hex(const ReplayArtifact& a, unsigned word_width, HexPlane plane = HexPlane::Data);

struct FootprintReport {
  std::uint64_t rom_bits = 0;
  std::uint64_t naive_bits = 0;
  std::uint64_t savings_bits = 0;
};

/// ROM size against a capture that also stored `captured_clock_count` clock
/// signals (data + care bit each) per cycle.
FootprintReport footprint_report(const ReplayArtifact& a, std::uint64_t captured_clock_count);

}  // namespace replay
