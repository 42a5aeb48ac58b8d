// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// Two-phase cycle simulation kernel. Every component output is a register:
// on each rising clock edge all components read the pre-edge net values and
// write next values, then all next values are committed together. The order
// in which components are evaluated therefore cannot be observed.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "replay/waveform.hpp"

namespace replay::sim {

struct NetId {
  std::size_t index = 0;
};

class Kernel;

/// Pre-edge values.
class NetView {
 public:
  explicit NetView(const Kernel& k) : kernel_(k) {}
  std::uint64_t operator[](NetId id) const;
  bool bit(NetId id) const { return (*this)[id] & 1u; }

 private:
  const Kernel& kernel_;
};

/// Next-value writer bound to one component; only nets the component drives
/// may be written.
class NetDriver {
 public:
  NetDriver(Kernel& k, std::size_t component) : kernel_(k), component_(component) {}
  void set(NetId id, std::uint64_t value);

 private:
  Kernel& kernel_;
  std::size_t component_;
};

class Component {
 public:
  virtual ~Component() = default;
  virtual std::string_view name() const = 0;
  virtual void evaluate(const NetView& now, NetDriver& next) = 0;
};

/// xorshift64* generator: x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
/// output x * 0x2545F4914F6CDD1D. A zero seed is replaced by
/// 0x9E3779B97F4A7C15 because the all-zero state is a fixed point.
class XorShift64Star {
 public:
  explicit XorShift64Star(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  /// Uniform-ish value in [0, bound] by modulo reduction.
  std::uint64_t upto(std::uint64_t bound) { return next() % (bound + 1); }

 private:
  std::uint64_t state_;
};

/// Sparse byte-addressed memory over a 64-bit address space; unwritten bytes
/// read as zero.
class SparseMemory {
 public:
  void write(std::uint64_t addr, std::span<const std::uint8_t> bytes);
  void write_le(std::uint64_t addr, std::uint64_t value, std::size_t size);
  std::uint8_t read(std::uint64_t addr) const;
  std::vector<std::uint8_t> dump(std::uint64_t base, std::size_t count) const;

 private:
  static constexpr std::uint64_t kPage = 4096;
  std::map<std::uint64_t, std::array<std::uint8_t, kPage>> pages_;
};

class Kernel {
 public:
  explicit Kernel(std::string scope = "tb") : scope_(std::move(scope)) {}
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  NetId add_net(std::string name, std::size_t width, std::uint64_t initial = 0);
  NetId net(std::string_view name) const;
  std::size_t net_width(NetId id) const { return nets_[id.index].width; }
  const std::string& net_name(NetId id) const { return nets_[id.index].name; }
  std::size_t net_count() const { return nets_.size(); }

  /// Registers a component as the single driver of `outputs`.
  Component& attach(std::unique_ptr<Component> c, std::span<const NetId> outputs);

  std::uint64_t value(NetId id) const { return nets_[id.index].value; }
  void force_initial(NetId id, std::uint64_t value);

  /// Evaluates every component on one rising edge and commits. Returns the
  /// nets whose value changed.
  std::vector<NetId> clock_edge();
  std::uint64_t edges() const { return edges_; }

  /// Fresh waveform database with one declaration per net plus the clock.
  /// Clock is declaration 0, nets follow in creation order.
  WaveformDb make_trace_db(Timescale ts) const;
  const std::string& scope() const { return scope_; }

 private:
  friend class NetView;
  friend class NetDriver;

  struct Net {
    std::string name;
    std::size_t width;
    std::uint64_t mask;
    std::uint64_t value;
    std::uint64_t next;
    std::size_t driver;  // component index, or npos
  };
  static constexpr std::size_t kNoDriver = static_cast<std::size_t>(-1);

  std::string scope_;
  std::vector<Net> nets_;
  std::vector<std::unique_ptr<Component>> components_;
  std::uint64_t edges_ = 0;
};

/// Records kernel activity into a WaveformDb with a free-running clock:
/// clock low at tick 0, rising edge k at half + k * period, falling at
/// (k + 1) * period.
class Tracer {
 public:
  Tracer(const Kernel& kernel, Tick period, Timescale ts = {1, TimeUnit::ns});

  void on_edge(std::uint64_t edge_index, std::span<const NetId> changed);
  /// Closes the trace with the trailing falling clock edge.
  WaveformDb finish();

  Tick edge_time(std::uint64_t edge_index) const { return period_ / 2 + edge_index * period_; }

 private:
  const Kernel& kernel_;
  Tick period_;
  WaveformDb db_;
  std::uint64_t last_edge_ = 0;
  bool any_edge_ = false;
};

}  // namespace replay::sim
