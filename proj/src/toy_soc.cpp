// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/toy_soc.hpp"

#include <array>

#include "replay/error.hpp"

namespace replay::sim {

namespace {

constexpr std::array<BoundaryPort, 10> kBoundary = {{
    {"pm_req", 1, Direction::DutDriven},
    {"pm_ack", 1, Direction::AgentDriven},
    {"fuse_valid", 1, Direction::AgentDriven},
    {"fuse_data", 32, Direction::AgentDriven},
    {"fuse_ready", 1, Direction::DutDriven},
    {"mem_valid", 1, Direction::DutDriven},
    {"mem_addr", 64, Direction::DutDriven},
    {"mem_wdata", 32, Direction::DutDriven},
    {"mem_ready", 1, Direction::AgentDriven},
    {"done", 1, Direction::DutDriven},
}};

constexpr std::uint64_t kPmAckLatency = 3;

struct Ports {
  NetId rst_n, pm_req, pm_ack, fuse_valid, fuse_data, fuse_ready, mem_valid, mem_addr, mem_wdata,
      mem_ready, done;

  static Ports lookup(const Kernel& k) {
    return {k.net("rst_n"),     k.net("pm_req"),     k.net("pm_ack"),    k.net("fuse_valid"),
            k.net("fuse_data"), k.net("fuse_ready"), k.net("mem_valid"), k.net("mem_addr"),
            k.net("mem_wdata"), k.net("mem_ready"),  k.net("done")};
  }
};

class ResetGen : public Component {
 public:
  ResetGen(NetId rst_n, std::uint64_t cycles) : rst_n_(rst_n), cycles_(cycles) {}
  std::string_view name() const override { return "reset_gen"; }

  void evaluate(const NetView&, NetDriver& next) override {
    ++edges_;
    next.set(rst_n_, edges_ >= cycles_ ? 1 : 0);
  }

 private:
  NetId rst_n_;
  std::uint64_t cycles_;
  std::uint64_t edges_ = 0;
};

class ToyGpu : public Component {
 public:
  ToyGpu(const ToyGpuConfig& cfg, const Ports& p) : cfg_(cfg), p_(p), rng_(cfg.randomization.seed) {}
  std::string_view name() const override { return "toy_gpu"; }

  void evaluate(const NetView& now, NetDriver& next) override {
    if (!now.bit(p_.rst_n)) {
      reset();
      for (auto id : {p_.pm_req, p_.fuse_ready, p_.mem_valid, p_.mem_addr, p_.mem_wdata, p_.done}) {
        next.set(id, 0);
      }
      return;
    }
    switch (phase_) {
      case Phase::Boot:
        if (stall_ > 0) {
          --stall_;
        } else {
          next.set(p_.pm_req, 1);
          phase_ = Phase::PmWait;
        }
        break;
      case Phase::PmWait:
        if (now.bit(p_.pm_ack)) {
          next.set(p_.pm_req, 0);
          if (cfg_.fuse_words.empty()) {
            enter_write();
          } else {
            next.set(p_.fuse_ready, 1);
            phase_ = Phase::Fuse;
          }
        }
        break;
      case Phase::Fuse:
        if (now.bit(p_.fuse_valid) && now.bit(p_.fuse_ready)) {
          fuses_.push_back(static_cast<std::uint32_t>(now[p_.fuse_data]));
          if (fuses_.size() == cfg_.fuse_words.size()) {
            next.set(p_.fuse_ready, 0);
            enter_write();
          }
        }
        break;
      case Phase::Write:
        if (now.bit(p_.mem_valid)) {
          if (now.bit(p_.mem_ready)) {
            next.set(p_.mem_valid, 0);
            if (++word_ == cfg_.word_count) {
              next.set(p_.done, 1);
              phase_ = Phase::Finished;
            } else {
              stall_ = draw();
            }
          }
        } else if (stall_ > 0) {
          --stall_;
        } else {
          const std::uint32_t offset = fuses_.empty() ? 0 : fuses_[0];
          next.set(p_.mem_valid, 1);
          next.set(p_.mem_addr, cfg_.mem_base + 4 * word_);
          next.set(p_.mem_wdata, static_cast<std::uint32_t>(word_ + offset));
        }
        break;
      case Phase::Finished:
        break;
    }
  }

 private:
  enum class Phase { Boot, PmWait, Fuse, Write, Finished };

  std::uint64_t draw() {
    return cfg_.randomization.enabled ? rng_.upto(cfg_.randomization.max_stall) : 0;
  }

  void reset() {
    phase_ = Phase::Boot;
    rng_ = XorShift64Star(cfg_.randomization.seed);
    stall_ = draw();
    fuses_.clear();
    word_ = 0;
  }

  void enter_write() {
    phase_ = Phase::Write;
    stall_ = draw();
  }

  ToyGpuConfig cfg_;
  Ports p_;
  XorShift64Star rng_;
  Phase phase_ = Phase::Boot;
  std::uint64_t stall_ = 0;
  std::vector<std::uint32_t> fuses_;
  std::uint64_t word_ = 0;
};

// Writes land in memory on every edge that samples mem_valid && mem_ready.
void observe_write(const NetView& now, const Ports& p, SparseMemory& memory) {
  if (now.bit(p.mem_valid) && now.bit(p.mem_ready)) {
    memory.write_le(now[p.mem_addr], now[p.mem_wdata], 4);
  }
}

class AgentBfm : public Component {
 public:
  AgentBfm(const ToyGpuConfig& cfg, const Ports& p, SparseMemory& memory)
      : fuses_(cfg.fuse_words), p_(p), memory_(memory) {}
  std::string_view name() const override { return "agent_bfm"; }

  void evaluate(const NetView& now, NetDriver& next) override {
    if (!now.bit(p_.rst_n)) {
      latency_ = 0;
      fuse_index_ = 0;
      for (auto id : {p_.pm_ack, p_.fuse_valid, p_.fuse_data, p_.mem_ready}) next.set(id, 0);
      return;
    }

    if (now.bit(p_.pm_req)) {
      if (!now.bit(p_.pm_ack) && ++latency_ >= kPmAckLatency) next.set(p_.pm_ack, 1);
    } else if (now.bit(p_.pm_ack)) {
      next.set(p_.pm_ack, 0);
      latency_ = 0;
      fuse_index_ = 0;
      drive_fuse(next);
    }

    if (now.bit(p_.fuse_valid) && now.bit(p_.fuse_ready)) {
      ++fuse_index_;
      drive_fuse(next);
    }

    const bool transfer = now.bit(p_.mem_valid) && now.bit(p_.mem_ready);
    observe_write(now, p_, memory_);
    next.set(p_.mem_ready, now.bit(p_.mem_valid) && !transfer ? 1 : 0);
  }

 private:
  void drive_fuse(NetDriver& next) {
    if (fuse_index_ < fuses_.size()) {
      next.set(p_.fuse_valid, 1);
      next.set(p_.fuse_data, fuses_[fuse_index_]);
    } else {
      next.set(p_.fuse_valid, 0);
      next.set(p_.fuse_data, 0);
    }
  }

  std::vector<std::uint32_t> fuses_;
  Ports p_;
  SparseMemory& memory_;
  std::uint64_t latency_ = 0;
  std::size_t fuse_index_ = 0;
};

class MemorySink : public Component {
 public:
  MemorySink(const Ports& p, SparseMemory& memory) : p_(p), memory_(memory) {}
  std::string_view name() const override { return "system_memory"; }
  void evaluate(const NetView& now, NetDriver&) override { observe_write(now, p_, memory_); }

 private:
  Ports p_;
  SparseMemory& memory_;
};

// Stands in for the agent: agent-side nets carry the current frame's values
// (ROM output addressed by the cycle counter); each edge checks the sampled
// DUT outputs and advances to the next frame.
class ReplayAdapter : public Component {
 public:
  struct Binding {
    std::string name;
    NetId net;
    std::size_t width;
  };

  ReplayAdapter(std::shared_ptr<const ReplayArtifact> artifact, const ReplayOptions& opts, NetId rst_n,
                std::vector<Binding> agent, std::vector<Binding> dut)
      : engine_(std::move(artifact), opts),
        rst_n_(rst_n),
        wait_for_reset_(engine_.artifact().start_condition == StartCondition::AfterResetDeassert),
        agent_(std::move(agent)),
        dut_(std::move(dut)) {}

  std::string_view name() const override { return "replay_engine"; }

  void drive_initial(Kernel& k) const {
    const auto drive = engine_.pending_drive();
    for (const auto& b : agent_) k.force_initial(b.net, drive.at(b.name).to_u64());
  }

  void evaluate(const NetView& now, NetDriver& next) override {
    if (engine_.state() != ReplayState::Running) return;
    if (wait_for_reset_ && !now.bit(rst_n_)) return;
    SignalValues observed;
    for (const auto& b : dut_) observed.emplace(b.name, BitVector::from_u64(b.width, now[b.net]));
    engine_.step(observed);
    const auto drive = engine_.pending_drive();
    for (const auto& b : agent_) next.set(b.net, drive.at(b.name).to_u64());
  }

  const ReplayEngine& engine() const { return engine_; }

 private:
  ReplayEngine engine_;
  NetId rst_n_;
  bool wait_for_reset_;
  std::vector<Binding> agent_;
  std::vector<Binding> dut_;
};

}  // namespace

void ToyGpuConfig::validate() const {
  if (word_count < 1) throw Error("word_count must be at least 1");
  if (mem_base % 4 != 0) throw Error("mem_base must be 4-byte aligned");
}

std::span<const BoundaryPort> gpu_boundary() { return kBoundary; }

InterfaceSpec toy_interface_spec() {
  InterfaceSpec spec;
  spec.clock.capture_path = "tb.clk";
  spec.reset = ResetSpec{"tb.rst_n", false};
  spec.start_condition = StartCondition::AfterResetDeassert;
  for (const auto& p : kBoundary) {
    spec.bindings.push_back({p.name, std::string("tb.") + p.name, p.width, p.direction, CheckPolicy::strict()});
  }
  return spec;
}

struct Testbench::State {
  Kernel kernel{"tb"};
  SparseMemory memory;
  TestbenchTiming timing;
  NetId done;
  ReplayAdapter* adapter = nullptr;
  bool ran = false;
};

Testbench::Testbench(std::unique_ptr<State> s) : s_(std::move(s)) {}
Testbench::Testbench(Testbench&&) noexcept = default;
Testbench& Testbench::operator=(Testbench&&) noexcept = default;
Testbench::~Testbench() = default;

const Kernel& Testbench::kernel() const { return s_->kernel; }
const ReplayEngine* Testbench::engine() const { return s_->adapter ? &s_->adapter->engine() : nullptr; }

std::vector<std::uint8_t> Testbench::dump_memory(std::uint64_t base, std::size_t byte_count) const {
  return s_->memory.dump(base, byte_count);
}

RunResult Testbench::run(std::uint64_t max_cycles) {
  if (max_cycles < 1) throw Error("max_cycles must be at least 1");
  if (s_->ran) throw Error("testbench already ran");
  s_->ran = true;

  auto& k = s_->kernel;
  Tracer tracer(k, s_->timing.clock_period);
  RunResult r;
  bool done_seen = false;
  for (std::uint64_t e = 0; e < max_cycles; ++e) {
    const auto changed = k.clock_edge();
    tracer.on_edge(e, changed);
    r.cycles_run = e + 1;
    if (!done_seen && k.value(s_->done)) {
      done_seen = true;
      r.done_cycle = e;
    }
    if (done_seen && e >= r.done_cycle + s_->timing.drain_cycles) break;
    if (s_->adapter && s_->adapter->engine().state() != ReplayState::Running) break;
  }
  r.status = done_seen ? RunStatus::DoneAsserted : RunStatus::Timeout;
  r.vcd = tracer.finish();
  if (s_->adapter) r.replay = s_->adapter->engine().report();
  return r;
}

namespace {

void add_boundary_nets(Kernel& k, const TestbenchTiming& timing) {
  k.add_net("rst_n", 1, timing.reset_cycles == 0 ? 1 : 0);
  for (const auto& p : kBoundary) k.add_net(p.name, p.width);
}

}  // namespace

Testbench build_ip_testbench(const ToyGpuConfig& cfg, const TestbenchTiming& timing) {
  cfg.validate();
  auto s = std::make_unique<Testbench::State>();
  s->timing = timing;
  auto& k = s->kernel;
  add_boundary_nets(k, timing);
  const auto p = Ports::lookup(k);
  s->done = p.done;

  k.attach(std::make_unique<ResetGen>(p.rst_n, timing.reset_cycles), std::array{p.rst_n});
  k.attach(std::make_unique<ToyGpu>(cfg, p),
           std::array{p.pm_req, p.fuse_ready, p.mem_valid, p.mem_addr, p.mem_wdata, p.done});
  k.attach(std::make_unique<AgentBfm>(cfg, p, s->memory),
           std::array{p.pm_ack, p.fuse_valid, p.fuse_data, p.mem_ready});
  return Testbench(std::move(s));
}

Testbench build_soc_testbench(std::shared_ptr<const ReplayArtifact> artifact, const ToyGpuConfig& cfg,
                              const ReplayOptions& opts, const TestbenchTiming& timing) {
  cfg.validate();
  if (!artifact) throw Error("SoC testbench needs an artifact");
  auto s = std::make_unique<Testbench::State>();
  s->timing = timing;
  auto& k = s->kernel;
  add_boundary_nets(k, timing);
  const auto p = Ports::lookup(k);
  s->done = p.done;

  std::vector<ReplayAdapter::Binding> agent, dut;
  std::vector<NetId> agent_nets;
  for (const auto& e : artifact->directory) {
    const BoundaryPort* port = nullptr;
    for (const auto& bp : kBoundary)
      if (e.name == bp.name) port = &bp;
    if (!port) throw Error("artifact signal '" + e.name + "' is not a GPU port");
    if (port->width != e.width) {
      throw Error("artifact signal '" + e.name + "' has width " + std::to_string(e.width) +
                  ", GPU port has " + std::to_string(port->width));
    }
    if (port->direction != e.direction) {
      throw Error("artifact signal '" + e.name + "' has direction " + std::string(to_string(e.direction)) +
                  ", GPU port is " + std::string(to_string(port->direction)));
    }
    const auto net = k.net(e.name);
    (e.direction == Direction::AgentDriven ? agent : dut).push_back({e.name, net, e.width});
    if (e.direction == Direction::AgentDriven) agent_nets.push_back(net);
  }
  for (const auto& bp : kBoundary) {
    if (bp.direction != Direction::AgentDriven) continue;
    bool found = false;
    for (const auto& b : agent) found = found || b.name == bp.name;
    if (!found) throw Error("GPU input '" + std::string(bp.name) + "' is not driven by the artifact");
  }

  k.attach(std::make_unique<ResetGen>(p.rst_n, timing.reset_cycles), std::array{p.rst_n});
  k.attach(std::make_unique<ToyGpu>(cfg, p),
           std::array{p.pm_req, p.fuse_ready, p.mem_valid, p.mem_addr, p.mem_wdata, p.done});
  auto adapter = std::make_unique<ReplayAdapter>(std::move(artifact), opts, p.rst_n, std::move(agent),
                                                 std::move(dut));
  adapter->drive_initial(k);
  s->adapter = adapter.get();
  k.attach(std::move(adapter), agent_nets);
  k.attach(std::make_unique<MemorySink>(p, s->memory), {});
  return Testbench(std::move(s));
}

}  // namespace replay::sim
