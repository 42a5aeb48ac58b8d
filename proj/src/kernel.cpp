// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/kernel.hpp"

#include <algorithm>

#include "replay/error.hpp"

namespace replay::sim {

std::uint64_t NetView::operator[](NetId id) const { return kernel_.nets_[id.index].value; }

void NetDriver::set(NetId id, std::uint64_t value) {
  auto& n = kernel_.nets_.at(id.index);
  if (n.driver != component_) {
    throw Error("component '" + std::string(kernel_.components_[component_]->name()) +
                "' wrote net '" + n.name + "' it does not drive");
  }
  n.next = value & n.mask;
}

void SparseMemory::write(std::uint64_t addr, std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint64_t a = addr + i;
    pages_.try_emplace(a / kPage).first->second[a % kPage] = bytes[i];
  }
}

void SparseMemory::write_le(std::uint64_t addr, std::uint64_t value, std::size_t size) {
  std::array<std::uint8_t, 8> b{};
  for (std::size_t i = 0; i < size && i < 8; ++i) b[i] = static_cast<std::uint8_t>(value >> (8 * i));
  write(addr, std::span<const std::uint8_t>(b.data(), std::min<std::size_t>(size, 8)));
}

std::uint8_t SparseMemory::read(std::uint64_t addr) const {
  auto it = pages_.find(addr / kPage);
  return it == pages_.end() ? 0 : it->second[addr % kPage];
}

std::vector<std::uint8_t> SparseMemory::dump(std::uint64_t base, std::size_t count) const {
  std::vector<std::uint8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = read(base + i);
  return out;
}

NetId Kernel::add_net(std::string name, std::size_t width, std::uint64_t initial) {
  if (width == 0 || width > 64) throw Error("net '" + name + "' width must be 1..64");
  for (const auto& n : nets_)
    if (n.name == name) throw Error("duplicate net '" + name + "'");
  const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  nets_.push_back({std::move(name), width, mask, initial & mask, initial & mask, kNoDriver});
  return {nets_.size() - 1};
}

NetId Kernel::net(std::string_view name) const {
  for (std::size_t i = 0; i < nets_.size(); ++i)
    if (nets_[i].name == name) return {i};
  throw Error("unknown net '" + std::string(name) + "'");
}

Component& Kernel::attach(std::unique_ptr<Component> c, std::span<const NetId> outputs) {
  const std::size_t index = components_.size();
  for (auto id : outputs) {
    auto& n = nets_.at(id.index);
    if (n.driver != kNoDriver) {
      throw Error("net '" + n.name + "' already driven by '" +
                  std::string(components_[n.driver]->name()) + "'");
    }
    n.driver = index;
  }
  components_.push_back(std::move(c));
  return *components_.back();
}

void Kernel::force_initial(NetId id, std::uint64_t value) {
  if (edges_ != 0) throw Error("initial values can only be set before the first edge");
  auto& n = nets_.at(id.index);
  n.value = n.next = value & n.mask;
}

std::vector<NetId> Kernel::clock_edge() {
  for (auto& n : nets_) n.next = n.value;
  NetView view(*this);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    NetDriver driver(*this, i);
    components_[i]->evaluate(view, driver);
  }
  std::vector<NetId> changed;
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    auto& n = nets_[i];
    if (n.next != n.value) {
      n.value = n.next;
      changed.push_back({i});
    }
  }
  ++edges_;
  return changed;
}

WaveformDb Kernel::make_trace_db(Timescale ts) const {
  WaveformDb db(ts);
  // VCD idcodes: printable characters '!'..'~', base 94.
  auto idcode = [](std::size_t n) {
    std::string s;
    do {
      s += static_cast<char>('!' + n % 94);
      n /= 94;
    } while (n);
    return s;
  };
  db.add_signal({idcode(0), scope_ + ".clk", 1});
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    db.add_signal({idcode(i + 1), scope_ + "." + nets_[i].name, nets_[i].width});
  }
  return db;
}

Tracer::Tracer(const Kernel& kernel, Tick period, Timescale ts)
    : kernel_(kernel), period_(period), db_(kernel.make_trace_db(ts)) {
  if (period < 2 || period % 2 != 0) throw Error("clock period must be an even number of ticks >= 2");
  db_.record(0, 0, FourStateVector::from_u64(1, 0));
  for (std::size_t i = 0; i < kernel.net_count(); ++i) {
    const NetId id{i};
    db_.record(i + 1, 0, FourStateVector::from_u64(kernel.net_width(id), kernel.value(id)));
  }
}

void Tracer::on_edge(std::uint64_t edge_index, std::span<const NetId> changed) {
  if (any_edge_) db_.record(0, edge_time(last_edge_) + period_ / 2, FourStateVector::from_u64(1, 0));
  const Tick t = edge_time(edge_index);
  db_.record(0, t, FourStateVector::from_u64(1, 1));
  for (auto id : changed) {
    db_.record(id.index + 1, t, FourStateVector::from_u64(kernel_.net_width(id), kernel_.value(id)));
  }
  last_edge_ = edge_index;
  any_edge_ = true;
}

WaveformDb Tracer::finish() {
  if (any_edge_) {
    db_.record(0, edge_time(last_edge_) + period_ / 2, FourStateVector::from_u64(1, 0));
    any_edge_ = false;
  }
  return db_;
}

}  // namespace replay::sim
