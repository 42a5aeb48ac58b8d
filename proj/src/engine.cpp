// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/engine.hpp"

#include <sstream>

#include "replay/error.hpp"

namespace replay {

ReplayEngine::ReplayEngine(std::shared_ptr<const ReplayArtifact> artifact, ReplayOptions options)
    : artifact_(std::move(artifact)), options_(options) {
  if (!artifact_) throw Error("replay engine needs an artifact");
  if (options_.max_recorded_mismatches < 1) throw Error("max_recorded_mismatches must be at least 1");
  artifact_->validate();
  for (std::size_t i = 0; i < artifact_->directory.size(); ++i) {
    const auto& e = artifact_->directory[i];
    (e.direction == Direction::AgentDriven ? agent_entries_ : dut_entries_).push_back(i);
    policy_masks_.push_back(e.check.effective_mask(e.width));
  }
  if (artifact_->frames.empty()) state_ = ReplayState::Done;
}

SignalValues ReplayEngine::drive_for(std::size_t frame) const {
  SignalValues out;
  const auto& data = artifact_->frames[frame].data;
  for (auto i : agent_entries_) {
    const auto& e = artifact_->directory[i];
    out.emplace(e.name, data.slice(e.offset, e.width));
  }
  return out;
}

SignalValues ReplayEngine::pending_drive() const {
  if (artifact_->frames.empty()) {
    SignalValues out;
    for (auto i : agent_entries_) {
      const auto& e = artifact_->directory[i];
      out.emplace(e.name, BitVector(e.width));
    }
    return out;
  }
  if (state_ == ReplayState::Running) return drive_for(cycle_);
  return drive_for(cycle_ - 1);
}

StepResult ReplayEngine::step(const SignalValues& observed) {
  if (state_ != ReplayState::Running) throw Error("replay engine stepped after completion");

  // Validate before touching any state.
  for (auto i : dut_entries_) {
    const auto& e = artifact_->directory[i];
    auto it = observed.find(e.name);
    if (it == observed.end()) throw Error("missing observed signal '" + e.name + "'");
    if (it->second.width() != e.width) {
      throw Error("observed signal '" + e.name + "' has width " + std::to_string(it->second.width()) +
                  ", expected " + std::to_string(e.width));
    }
  }

  const auto& frame = artifact_->frames[cycle_];
  StepResult result{drive_for(cycle_), false};

  bool mismatched = false;
  if (options_.check_enabled) {
    for (auto i : dut_entries_) {
      const auto& e = artifact_->directory[i];
      const auto& obs = observed.find(e.name)->second;
      BitVector mask = frame.care.slice(e.offset, e.width) & policy_masks_[i];
      BitVector expected = frame.data.slice(e.offset, e.width);
      if (((expected ^ obs) & mask).any()) {
        Mismatch m{cycle_, e.name, std::move(expected), obs, std::move(mask)};
        if (!first_) first_ = m;
        if (recorded_.size() < options_.max_recorded_mismatches) recorded_.push_back(std::move(m));
        ++mismatch_count_;
        mismatched = true;
      }
    }
  }

  ++cycle_;
  if (mismatched && options_.stop_on_first_mismatch) {
    state_ = ReplayState::Halted;
    result.done = true;
  } else if (cycle_ == artifact_->frames.size()) {
    state_ = ReplayState::Done;
    result.done = true;
  }
  return result;
}

ReplayReport ReplayEngine::report() const {
  ReplayReport r;
  r.cycles_executed = cycle_;
  r.cycle_count = artifact_->frames.size();
  r.mismatch_count = mismatch_count_;
  r.first_mismatch = first_;
  r.recorded = recorded_;
  r.state = state_;
  r.pass = state_ == ReplayState::Done && mismatch_count_ == 0;
  return r;
}

namespace {

void render(std::ostringstream& os, const Mismatch& m) {
  os << "cycle " << m.cycle << " signal " << m.signal << " expected 0x" << m.expected.to_hex()
     << " observed 0x" << m.observed.to_hex() << " mask 0x" << m.mask.to_hex();
}

}  // namespace

std::string ReplayReport::to_text() const {
  std::ostringstream os;
  os << "replay: " << (pass ? "PASS" : "FAIL") << "\n";
  os << "state: "
     << (state == ReplayState::Running ? "running" : state == ReplayState::Done ? "done" : "halted")
     << "\n";
  os << "cycles executed: " << cycles_executed << " / " << cycle_count << "\n";
  os << "mismatches: " << mismatch_count << "\n";
  os << "first mismatch: ";
  if (first_mismatch)
    render(os, *first_mismatch);
  else
    os << "none";
  os << "\n";
  for (const auto& m : recorded) {
    os << "  ";
    render(os, m);
    os << "\n";
  }
  if (recorded.size() < mismatch_count) {
    os << "  ... " << (mismatch_count - recorded.size()) << " more not recorded\n";
  }
  return os.str();
}

}  // namespace replay
