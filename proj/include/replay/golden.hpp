// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// Golden memory dumps in "ADDR: HEXBYTES" form and comparison of simulated
// memory against them.
//
// Goldens are always read literally: ascending addresses, bytes as written,
// words interpreted little-endian. Normalization (word size, word order,
// byte order) applies to the simulation side only.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace replay {

struct GoldenRecord {
  std::uint64_t base = 0;
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const GoldenRecord&, const GoldenRecord&) = default;
};

struct GoldenDump {
  std::vector<GoldenRecord> records;  // contiguous lines are merged

  friend bool operator==(const GoldenDump&, const GoldenDump&) = default;
};

GoldenDump parse_golden(std::string_view text);

/// Renders bytes as "ADDR: HEX" lines of `bytes_per_line` bytes; addresses are
/// uppercase and at least 10 digits wide.
std::string format_dump(std::uint64_t base, std::span<const std::uint8_t> bytes,
                        std::size_t bytes_per_line = 16);

/// Hex bytes with no addresses, one row per line (whitespace ignored).
std::vector<std::uint8_t> parse_hex_bytes(std::string_view text);

enum class WordOrder { Ascending, Descending };
enum class ByteOrder { Little, Big };

struct Normalization {
  std::size_t word_size = 4;  // 1, 2, 4 or 8
  WordOrder word_order = WordOrder::Ascending;
  ByteOrder byte_order = ByteOrder::Little;
};

struct MemoryDifference {
  std::uint64_t address = 0;
  std::uint64_t sim_word = 0;
  std::uint64_t golden_word = 0;
};

struct CompareReport {
  bool pass = false;
  std::size_t words_compared = 0;
  std::size_t word_size = 4;
  std::optional<MemoryDifference> first_difference;

  std::string to_text() const;
};

/// `sim` covers [sim_base, sim_base + sim.size()). Every golden record must
/// lie inside that range, word aligned relative to sim_base.
CompareReport compare_memory(std::span<const std::uint8_t> sim, std::uint64_t sim_base, const GoldenDump& golden,
                             const Normalization& norm);

/// Applies a normalization to a region and returns the words as little-endian
/// bytes in ascending order, i.e. the image compare_memory checks goldens against.
std::vector<std::uint8_t> normalize_region(std::span<const std::uint8_t> sim, const Normalization& norm);

}  // namespace replay
