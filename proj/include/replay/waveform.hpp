// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// Value Change Dump (VCD) ingestion and emission, plus the point-in-time
// queries the encoder uses to sample a capture at clock edges.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace replay {

using Tick = std::uint64_t;

enum class TimeUnit : std::uint8_t { s, ms, us, ns, ps, fs };

struct Timescale {
  unsigned magnitude = 1;  // 1, 10 or 100
  TimeUnit unit = TimeUnit::ns;

  /// Single-byte code used by the artifact header: unit * 3 + log10(magnitude).
  std::uint8_t code() const;
  static Timescale from_code(std::uint8_t code);
  /// Parses "1ns", "10 ps", ... Throws on anything else.
  static Timescale parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const Timescale&, const Timescale&) = default;
};

enum class Logic : std::uint8_t { Zero, One, X, Z };

/// Four-state value. bits[0] is the least significant bit.
struct FourStateVector {
  std::vector<Logic> bits;

  static FourStateVector all(std::size_t width, Logic v) { return {std::vector<Logic>(width, v)}; }
  static FourStateVector from_u64(std::size_t width, std::uint64_t value);
  /// MSB-first text of 0/1/x/z characters, extended to `width` by VCD rules.
  static FourStateVector from_vcd(std::string_view text, std::size_t width);

  std::size_t width() const { return bits.size(); }
  bool is_known() const;
  /// MSB-first, lowercase x/z.
  std::string to_string() const;

  friend bool operator==(const FourStateVector&, const FourStateVector&) = default;
};

struct SignalDecl {
  std::string idcode;
  std::string path;  // dot-separated hierarchy, leaf last
  std::size_t width = 1;

  friend bool operator==(const SignalDecl&, const SignalDecl&) = default;
};

struct ValueChange {
  Tick time = 0;
  FourStateVector value;

  friend bool operator==(const ValueChange&, const ValueChange&) = default;
};

/// Parsed waveform. `changes[i]` belongs to `decls[i]` and is strictly
/// increasing in time.
class WaveformDb {
 public:
  WaveformDb() = default;
  explicit WaveformDb(Timescale ts) : timescale_(ts) {}

  const Timescale& timescale() const { return timescale_; }
  const std::vector<SignalDecl>& decls() const { return decls_; }
  const std::vector<ValueChange>& changes(std::size_t index) const { return changes_[index]; }

  /// Throws on duplicate idcode/path or zero width.
  std::size_t add_signal(SignalDecl decl);

  /// Appends a change. A write at the same time as the last change replaces it;
  /// a write earlier than the last change throws.
  void record(std::size_t index, Tick time, FourStateVector value);

  /// Index of the signal with the given path, or throws "unknown signal".
  std::size_t index_of(std::string_view path) const;
  bool contains(std::string_view path) const;
  const SignalDecl& decl(std::string_view path) const { return decls_[index_of(path)]; }

  friend bool operator==(const WaveformDb& a, const WaveformDb& b) {
    return a.timescale_ == b.timescale_ && a.decls_ == b.decls_ && a.changes_ == b.changes_;
  }

 private:
  Timescale timescale_;
  std::vector<SignalDecl> decls_;
  std::vector<std::vector<ValueChange>> changes_;
  std::map<std::string, std::size_t, std::less<>> by_path_;
  std::map<std::string, std::size_t, std::less<>> by_idcode_;

  friend WaveformDb parse_vcd(std::string_view text);
};

WaveformDb parse_vcd(std::string_view text);
std::string write_vcd(const WaveformDb& db);

/// Value of `path` from the last change strictly before `time`; all-X when
/// nothing was recorded before it.
FourStateVector value_before(const WaveformDb& db, std::string_view path, Tick time);

struct EdgeScan {
  std::vector<Tick> edges;
  /// X->1 and Z->1 transitions, which are not counted as edges.
  std::size_t unknown_rises = 0;
};

/// 0->1 transitions of a 1-bit signal.
EdgeScan rising_edges(const WaveformDb& db, std::string_view clock);

}  // namespace replay
