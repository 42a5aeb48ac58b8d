// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/golden.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "replay/error.hpp"

namespace replay {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::uint8_t> hex_to_bytes(std::string_view text, std::size_t line) {
  std::string digits;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (hex_value(c) < 0) throw ParseError(std::string("invalid hex digit '") + c + "'", line);
    digits += c;
  }
  if (digits.size() % 2 != 0) throw ParseError("odd number of hex digits", line);
  std::vector<std::uint8_t> out(digits.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(hex_value(digits[2 * i]) * 16 + hex_value(digits[2 * i + 1]));
  }
  return out;
}

std::uint64_t read_word(std::span<const std::uint8_t> b, ByteOrder order) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::size_t shift = order == ByteOrder::Little ? i : b.size() - 1 - i;
    v |= std::uint64_t{b[i]} << (8 * shift);
  }
  return v;
}

void check_norm(const Normalization& norm) {
  if (norm.word_size != 1 && norm.word_size != 2 && norm.word_size != 4 && norm.word_size != 8) {
    throw Error("word size must be 1, 2, 4 or 8 bytes");
  }
}

}  // namespace

GoldenDump parse_golden(std::string_view text) {
  GoldenDump dump;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'ADDR: HEX'", line_no);
    auto addr_text = trim(line.substr(0, colon));
    if (addr_text.size() > 2 && addr_text[0] == '0' && (addr_text[1] == 'x' || addr_text[1] == 'X')) {
      addr_text.remove_prefix(2);
    }
    if (addr_text.empty() || addr_text.size() > 16) throw ParseError("invalid address", line_no);
    std::uint64_t addr = 0;
    for (char c : addr_text) {
      const int v = hex_value(c);
      if (v < 0) throw ParseError("invalid address '" + std::string(addr_text) + "'", line_no);
      addr = addr * 16 + static_cast<std::uint64_t>(v);
    }
    auto bytes = hex_to_bytes(line.substr(colon + 1), line_no);
    if (bytes.empty()) throw ParseError("no data bytes", line_no);

    const std::uint64_t lo = addr, hi = addr + bytes.size();
    for (const auto& r : dump.records) {
      if (lo < r.base + r.bytes.size() && r.base < hi) {
        throw ParseError("record overlaps earlier data", line_no);
      }
    }
    if (!dump.records.empty() && dump.records.back().base + dump.records.back().bytes.size() == addr) {
      auto& last = dump.records.back().bytes;
      last.insert(last.end(), bytes.begin(), bytes.end());
    } else {
      dump.records.push_back({addr, std::move(bytes)});
    }
  }
  return dump;
}

std::vector<std::uint8_t> parse_hex_bytes(std::string_view text) {
  std::vector<std::uint8_t> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto bytes = hex_to_bytes(text.substr(pos, end - pos), line_no);
    out.insert(out.end(), bytes.begin(), bytes.end());
    pos = end + 1;
  }
  return out;
}

std::string format_dump(std::uint64_t base, std::span<const std::uint8_t> bytes, std::size_t bytes_per_line) {
  if (bytes_per_line == 0) throw Error("bytes_per_line must be positive");
  std::string out;
  char buf[32];
  for (std::size_t off = 0; off < bytes.size(); off += bytes_per_line) {
    std::snprintf(buf, sizeof buf, "%010llX: ", static_cast<unsigned long long>(base + off));
    out += buf;
    const std::size_t n = std::min(bytes_per_line, bytes.size() - off);
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%02X", bytes[off + i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> normalize_region(std::span<const std::uint8_t> sim, const Normalization& norm) {
  check_norm(norm);
  if (sim.size() % norm.word_size != 0) {
    throw Error("region length " + std::to_string(sim.size()) + " is not divisible by word size " +
                std::to_string(norm.word_size));
  }
  const std::size_t words = sim.size() / norm.word_size;
  std::vector<std::uint8_t> out(sim.size());
  for (std::size_t k = 0; k < words; ++k) {
    const std::size_t src = norm.word_order == WordOrder::Ascending ? k : words - 1 - k;
    const auto v = read_word(sim.subspan(src * norm.word_size, norm.word_size), norm.byte_order);
    for (std::size_t b = 0; b < norm.word_size; ++b) {
      out[k * norm.word_size + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
  }
  return out;
}

CompareReport compare_memory(std::span<const std::uint8_t> sim, std::uint64_t sim_base, const GoldenDump& golden,
                             const Normalization& norm) {
  const auto normalized = normalize_region(sim, norm);
  const std::size_t ws = norm.word_size;

  CompareReport report;
  report.word_size = ws;
  std::vector<const GoldenRecord*> ordered;
  for (const auto& r : golden.records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->base < b->base; });

  for (const auto* r : ordered) {
    if (r->base < sim_base || r->base + r->bytes.size() > sim_base + sim.size()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "golden record at %010llX lies outside the simulated range",
                    static_cast<unsigned long long>(r->base));
      throw Error(buf);
    }
    if ((r->base - sim_base) % ws != 0 || r->bytes.size() % ws != 0) {
      throw Error("golden record length/alignment is not divisible by word size " + std::to_string(ws));
    }
  }
  for (const auto* r : ordered) {
    const std::size_t start = r->base - sim_base;
    for (std::size_t off = 0; off < r->bytes.size(); off += ws) {
      const auto sim_word = read_word(std::span(normalized).subspan(start + off, ws), ByteOrder::Little);
      const auto gold_word = read_word(std::span(r->bytes).subspan(off, ws), ByteOrder::Little);
      ++report.words_compared;
      if (sim_word != gold_word && !report.first_difference) {
        report.first_difference = MemoryDifference{r->base + off, sim_word, gold_word};
      }
    }
  }
  report.pass = !report.first_difference;
  return report;
}

std::string CompareReport::to_text() const {
  std::ostringstream os;
  os << "compare: " << (pass ? "PASS" : "FAIL") << "\n";
  os << "words compared: " << words_compared << " (" << word_size << " bytes each)\n";
  if (first_difference) {
    char buf[128];
    const int digits = static_cast<int>(word_size * 2);
    std::snprintf(buf, sizeof buf, "first difference: %010llX sim 0x%0*llX golden 0x%0*llX\n",
                  static_cast<unsigned long long>(first_difference->address), digits,
                  static_cast<unsigned long long>(first_difference->sim_word), digits,
                  static_cast<unsigned long long>(first_difference->golden_word));
    os << buf;
  } else {
    os << "first difference: none\n";
  }
  return os.str();
}

}  // namespace replay
