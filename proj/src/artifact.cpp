// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/artifact.hpp"

#include <algorithm>
#include <set>

#include "replay/error.hpp"

namespace replay {

namespace {

constexpr std::uint8_t kMagic[4] = {0x52, 0x50, 0x41, 0x46};  // "RPAF"

std::size_t stride_bytes(std::size_t width) { return (width + 7) / 8; }

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }

  std::span<const std::uint8_t> bytes(std::uint64_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) throw Error("truncated artifact");
  }
  std::uint64_t le(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

BitVector read_plane(ByteReader& r, std::size_t width, const char* what) {
  auto raw = r.bytes(stride_bytes(width));
  if (width % 8 != 0 && (raw.back() >> (width % 8)) != 0) {
    throw Error(std::string("nonzero padding bits in ") + what);
  }
  return BitVector::from_bytes(width, raw);
}

// Walks a change list alongside increasing sample times.
struct Cursor {
  const std::vector<ValueChange>* changes = nullptr;
  std::size_t next = 0;
  const FourStateVector* current = nullptr;

  void advance_before(Tick t) {
    while (next < changes->size() && (*changes)[next].time < t) current = &(*changes)[next++].value;
  }
};

}  // namespace

const DirectoryEntry& ReplayArtifact::entry(std::string_view name) const {
  for (const auto& e : directory)
    if (e.name == name) return e;
  throw Error("no signal named '" + std::string(name) + "' in artifact");
}

void ReplayArtifact::validate() const {
  if (version != kArtifactVersion) throw Error("unsupported artifact version " + std::to_string(version));
  std::size_t offset = 0;
  std::set<std::string, std::less<>> names;
  for (const auto& e : directory) {
    if (e.width == 0) throw Error("directory entry '" + e.name + "' has zero width");
    if (e.offset != offset) {
      throw Error("directory/width inconsistency: '" + e.name + "' at offset " +
                  std::to_string(e.offset) + ", expected " + std::to_string(offset));
    }
    if (!names.insert(e.name).second) throw Error("duplicate directory entry '" + e.name + "'");
    if (e.check.kind == CheckPolicy::Kind::Masked && e.check.mask.width() != e.width) {
      throw Error("mask width mismatch for '" + e.name + "'");
    }
    offset += e.width;
  }
  if (offset != frame_width) {
    throw Error("directory/width inconsistency: entries cover " + std::to_string(offset) +
                " bits, frame width is " + std::to_string(frame_width));
  }
  if (!frames.empty() && clock_period == 0) throw Error("clock period must be positive");

  BitVector agent_bits(frame_width);
  for (const auto& e : directory) {
    if (e.direction == Direction::AgentDriven) agent_bits.assign(e.offset, BitVector::ones(e.width));
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.data.width() != frame_width || f.care.width() != frame_width) {
      throw Error("frame " + std::to_string(i) + " width does not match frame width");
    }
    if ((f.care & agent_bits) != agent_bits) {
      throw Error("frame " + std::to_string(i) + " has don't-care bits on an agent-driven signal");
    }
  }
}

Tick check_fixed_period(std::span<const Tick> edges, Tick tolerance, std::optional<Tick> explicit_period) {
  if (explicit_period && *explicit_period == 0) throw Error("clock period must be positive");
  if (edges.size() < 2) {
    if (!explicit_period) {
      throw Error("clock period needs at least two edges or an explicit period");
    }
    return *explicit_period;
  }
  const Tick nominal = explicit_period ? *explicit_period : edges[1] - edges[0];
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const Tick d = edges[i] - edges[i - 1];
    const Tick dev = d > nominal ? d - nominal : nominal - d;
    if (dev > tolerance) {
      throw Error("clock period changes at edge " + std::to_string(i) + ": expected " +
                  std::to_string(nominal) + " ticks, found " + std::to_string(d) +
                  " ticks (fixed-frequency replay)");
    }
  }
  return nominal;
}

EncodeResult encode_artifact(const WaveformDb& db, const InterfaceSpec& spec, const EncodeOptions& options) {
  spec.validate();
  for (const auto& b : spec.bindings) {
    if (!db.contains(b.capture_path)) {
      throw Error("signal '" + b.name + "': path '" + b.capture_path + "' not found in capture");
    }
    const auto& d = db.decl(b.capture_path);
    if (d.width != b.width) {
      throw Error("width mismatch for '" + b.name + "': interface declares " + std::to_string(b.width) +
                  ", capture has " + std::to_string(d.width));
    }
  }

  EncodeResult result;
  const auto scan = rising_edges(db, spec.clock.capture_path);
  result.unknown_clock_rises = scan.unknown_rises;
  if (scan.unknown_rises) {
    result.warnings.push_back(std::to_string(scan.unknown_rises) +
                              " clock rise(s) from X/Z ignored");
  }

  std::size_t first = 0;
  if (spec.start_condition == StartCondition::AfterResetDeassert) {
    if (!spec.reset) throw Error("start condition after_deassert requires a reset");
    const Logic inactive = spec.reset->active_high ? Logic::Zero : Logic::One;
    const auto& rpath = spec.reset->capture_path;
    if (db.decl(rpath).width != 1) throw Error("reset '" + rpath + "' must be 1 bit wide");
    first = scan.edges.size();
    for (std::size_t i = 0; i < scan.edges.size(); ++i) {
      if (value_before(db, rpath, scan.edges[i]).bits[0] == inactive) {
        first = i;
        break;
      }
    }
  }
  const std::span<const Tick> edges(scan.edges.data() + first, scan.edges.size() - first);
  if (edges.empty()) throw Error("no qualifying clock edges in capture");

  auto& a = result.artifact;
  a.clock_period = check_fixed_period(edges, options.period_tolerance, options.explicit_period);
  a.timescale = db.timescale();
  a.start_condition = spec.start_condition;
  const auto layout = frame_layout(spec);
  a.frame_width = layout.width;
  for (std::size_t j = 0; j < spec.bindings.size(); ++j) {
    const auto& b = spec.bindings[j];
    a.directory.push_back({b.name, b.width, b.direction, b.check, layout.offsets[j]});
  }

  std::vector<Cursor> cursors(spec.bindings.size());
  for (std::size_t j = 0; j < spec.bindings.size(); ++j) {
    cursors[j].changes = &db.changes(db.index_of(spec.bindings[j].capture_path));
  }

  a.frames.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Frame f{BitVector(a.frame_width), BitVector(a.frame_width)};
    for (std::size_t j = 0; j < spec.bindings.size(); ++j) {
      const auto& b = spec.bindings[j];
      auto& cur = cursors[j];
      cur.advance_before(edges[i]);
      for (std::size_t bit = 0; bit < b.width; ++bit) {
        const Logic l = cur.current ? cur.current->bits[bit] : Logic::X;
        const std::size_t pos = layout.offsets[j] + bit;
        if (l == Logic::Zero || l == Logic::One) {
          f.data.set(pos, l == Logic::One);
          f.care.set(pos, true);
        } else if (b.direction == Direction::DutDriven) {
          // unknown observation: don't-care
        } else if (options.x_policy == XPolicy::Error) {
          throw Error("agent-driven signal '" + b.name + "' is X/Z at cycle " + std::to_string(i) +
                      " (tick " + std::to_string(edges[i]) + ")");
        } else {
          f.care.set(pos, true);
          ++result.zeroed_agent_bits;
        }
      }
    }
    a.frames.push_back(std::move(f));
  }
  if (result.zeroed_agent_bits) {
    result.warnings.push_back(std::to_string(result.zeroed_agent_bits) +
                              " X/Z agent-driven bit(s) replaced with 0");
  }
  return result;
}

std::vector<std::uint8_t> serialize_artifact(const ReplayArtifact& a) {
  a.validate();
  ByteWriter w;
  w.bytes(kMagic);
  w.u16(a.version);
  w.u32(static_cast<std::uint32_t>(a.frame_width));
  w.u64(a.frames.size());
  w.u64(a.clock_period);
  w.u8(a.timescale.code());
  w.u8(static_cast<std::uint8_t>(a.start_condition));
  w.u32(static_cast<std::uint32_t>(a.directory.size()));
  for (const auto& e : a.directory) {
    if (e.name.size() > 0xFFFF) throw Error("signal name too long: '" + e.name + "'");
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.bytes({reinterpret_cast<const std::uint8_t*>(e.name.data()), e.name.size()});
    w.u32(static_cast<std::uint32_t>(e.width));
    w.u8(static_cast<std::uint8_t>(e.direction));
    w.u8(static_cast<std::uint8_t>(e.check.kind));
    if (e.check.kind == CheckPolicy::Kind::Masked) w.bytes(e.check.mask.to_bytes());
    w.u32(static_cast<std::uint32_t>(e.offset));
  }
  for (const auto& f : a.frames) w.bytes(f.data.to_bytes());
  for (const auto& f : a.frames) w.bytes(f.care.to_bytes());
  return w.take();
}

ReplayArtifact deserialize_artifact(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) throw Error("bad magic");
  r.bytes(4);
  ReplayArtifact a;
  a.version = r.u16();
  if (a.version != kArtifactVersion) throw Error("unsupported artifact version " + std::to_string(a.version));
  a.frame_width = r.u32();
  const std::uint64_t n = r.u64();
  a.clock_period = r.u64();
  a.timescale = Timescale::from_code(r.u8());
  const auto start = r.u8();
  if (start > 1) throw Error("invalid start condition " + std::to_string(start));
  a.start_condition = static_cast<StartCondition>(start);

  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    DirectoryEntry e;
    const auto len = r.u16();
    auto name = r.bytes(len);
    e.name.assign(name.begin(), name.end());
    e.width = r.u32();
    const auto dir = r.u8();
    if (dir > 1) throw Error("invalid direction code for '" + e.name + "'");
    e.direction = static_cast<Direction>(dir);
    const auto kind = r.u8();
    if (kind > 2) throw Error("invalid check policy code for '" + e.name + "'");
    e.check.kind = static_cast<CheckPolicy::Kind>(kind);
    if (e.check.kind == CheckPolicy::Kind::Masked) e.check.mask = read_plane(r, e.width, "mask");
    e.offset = r.u32();
    a.directory.push_back(std::move(e));
  }

  // Reject sizes that cannot fit before allocating.
  const std::size_t stride = stride_bytes(a.frame_width);
  if (stride != 0 && n > r.remaining() / (2 * stride)) throw Error("truncated artifact");
  if (stride == 0 && n > (std::uint64_t{1} << 32)) throw Error("implausible cycle count");
  a.frames.resize(n);
  for (auto& f : a.frames) f.data = read_plane(r, a.frame_width, "data frame");
  for (auto& f : a.frames) f.care = read_plane(r, a.frame_width, "care frame");
  if (r.remaining() != 0) throw Error("trailing bytes after artifact");
  a.validate();
  return a;
}

std::string emit_hex(const ReplayArtifact& a, unsigned word_width, HexPlane plane) {
  if (word_width != 8 && word_width != 16 && word_width != 32 && word_width != 64) {
    throw Error("word width must be 8, 16, 32 or 64");
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t words = (a.frame_width + word_width - 1) / word_width;
  const std::size_t word_bytes = word_width / 8;
  const std::size_t digits = word_width / 4;
  std::string out;
  out.reserve(a.frames.size() * words * (digits + 1));
  std::string line(digits, '0');
  for (const auto& f : a.frames) {
    const auto bytes = (plane == HexPlane::Data ? f.data : f.care).to_bytes();
    for (std::size_t k = 0; k < words; ++k) {
      std::uint64_t v = 0;
      for (std::size_t b = 0; b < word_bytes; ++b) {
        const std::size_t idx = k * word_bytes + b;
        if (idx < bytes.size()) v |= std::uint64_t{bytes[idx]} << (8 * b);
      }
      for (std::size_t d = 0; d < digits; ++d) line[digits - 1 - d] = kDigits[(v >> (4 * d)) & 0xF];
      out += line;
      out += '\n';
    }
  }
  return out;
}

FootprintReport footprint_report(const ReplayArtifact& a, std::uint64_t captured_clock_count) {
  FootprintReport r;
  const std::uint64_t n = a.frames.size();
  r.rom_bits = 2 * n * a.frame_width;
  r.naive_bits = r.rom_bits + 2 * n * captured_clock_count;
  r.savings_bits = r.naive_bits - r.rom_bits;
  return r;
}

}  // namespace replay
