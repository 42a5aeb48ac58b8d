// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0
// Random generators and independent reference helpers shared by the tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "replay/artifact.hpp"
#include "replay/waveform.hpp"

namespace replay::testing {

using Rng = std::mt19937_64;

inline std::uint64_t pick(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline BitVector random_bits(Rng& rng, std::size_t width) {
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng() & 1u);
  return v;
}

inline FourStateVector random_four_state(Rng& rng, std::size_t width) {
  FourStateVector v = FourStateVector::all(width, Logic::Zero);
  for (auto& b : v.bits) {
    const auto r = pick(rng, 0, 9);
    b = r < 4 ? Logic::Zero : r < 8 ? Logic::One : r == 8 ? Logic::X : Logic::Z;
  }
  return v;
}

/// Random hierarchy, widths and change lists. Idcodes come from the printable
/// range VCD allows so the db survives a text round trip.
inline WaveformDb random_db(Rng& rng, std::size_t max_signals = 12) {
  static constexpr unsigned kMagnitudes[] = {1, 10, 100};
  WaveformDb db(Timescale{kMagnitudes[pick(rng, 0, 2)], static_cast<TimeUnit>(pick(rng, 0, 5))});
  const std::size_t signals = pick(rng, 1, max_signals);
  for (std::size_t i = 0; i < signals; ++i) {
    std::string id;
    std::size_t n = i;
    do {
      id += static_cast<char>('!' + n % 94);
      n /= 94;
    } while (n);
    std::string path = "top";
    const auto depth = pick(rng, 0, 2);
    for (std::uint64_t d = 0; d < depth; ++d) path += ".u" + std::to_string(pick(rng, 0, 2));
    path += ".s" + std::to_string(i);
    const std::size_t width = pick(rng, 0, 3) == 0 ? 1 : pick(rng, 1, 70);
    db.add_signal({id, path, width});
  }
  for (std::size_t i = 0; i < signals; ++i) {
    Tick t = pick(rng, 0, 3);
    const auto count = pick(rng, 0, 20);
    for (std::uint64_t c = 0; c < count; ++c) {
      db.record(i, t, random_four_state(rng, db.decls()[i].width));
      t += pick(rng, 1, 50);
    }
  }
  return db;
}

/// Valid artifact with random directory and frames.
inline ReplayArtifact random_artifact(Rng& rng, std::size_t max_width, std::size_t max_cycles) {
  ReplayArtifact a;
  a.clock_period = pick(rng, 1, 1000);
  a.timescale = Timescale::from_code(static_cast<std::uint8_t>(pick(rng, 0, 17)));
  a.start_condition = pick(rng, 0, 1) ? StartCondition::AfterResetDeassert : StartCondition::FirstEdge;
  const std::size_t target = pick(rng, 1, max_width);
  std::size_t offset = 0;
  while (offset < target) {
    DirectoryEntry e;
    e.name = "sig" + std::to_string(a.directory.size());
    e.width = std::min<std::size_t>(target - offset, pick(rng, 1, 40));
    e.direction = pick(rng, 0, 1) ? Direction::DutDriven : Direction::AgentDriven;
    const auto policy = pick(rng, 0, 2);
    if (policy == 1) e.check = CheckPolicy::ignore();
    if (policy == 2) e.check = CheckPolicy::masked(random_bits(rng, e.width));
    e.offset = offset;
    offset += e.width;
    a.directory.push_back(e);
  }
  a.frame_width = offset;
  const std::size_t n = pick(rng, 0, max_cycles);
  for (std::size_t i = 0; i < n; ++i) {
    Frame f{random_bits(rng, offset), random_bits(rng, offset)};
    for (const auto& e : a.directory) {
      if (e.direction != Direction::AgentDriven) continue;
      for (std::size_t b = 0; b < e.width; ++b) f.care.set(e.offset + b, true);
    }
    a.frames.push_back(std::move(f));
  }
  return a;
}

/// Reference packer: frame bits to ww-bit words, word j holding bits
/// [j*ww, (j+1)*ww), printed with ww/4 lowercase digits. Written directly
/// from the format description, independent of BitVector::to_hex.
inline std::vector<std::string> reference_hex_lines(const std::vector<BitVector>& frames, unsigned ww) {
  std::vector<std::string> lines;
  for (const auto& f : frames) {
    const std::size_t words = (f.width() + ww - 1) / ww;
    for (std::size_t j = 0; j < words; ++j) {
      std::string line(ww / 4, '0');
      for (unsigned nib = 0; nib < ww / 4; ++nib) {
        unsigned v = 0;
        for (unsigned b = 0; b < 4; ++b) {
          const std::size_t bit = j * ww + nib * 4 + b;
          if (bit < f.width() && f.get(bit)) v |= 1u << b;
        }
        line[ww / 4 - 1 - nib] = "0123456789abcdef"[v];
      }
      lines.push_back(line);
    }
  }
  return lines;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("replaykit_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace replay::testing
