// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "replay/artifact.hpp"

namespace replay {

struct RomGenOptions {
  std::string module_name = "replay_rom";
  unsigned word_width = 32;
  bool include_checker = true;
};

struct RomGenOutput {
  std::string hdl;       // <module>.v
  std::string data_hex;  // <module>_data.hex
  std::string care_hex;  // <module>_care.hex
};

/// Generates a Verilog-2001 replay module backed by $readmemh-initialized
/// ROMs. Port names are the directory names; the module's own ports are
/// clk, rst (synchronous, active high), replay_done and, with the checker,
/// replay_mismatch and sticky replay_error. Names starting with "rp_" are
/// reserved for internals.
RomGenOutput emit_hdl_module(const ReplayArtifact& a, const RomGenOptions& opts);

bool is_hdl_identifier(std::string_view name);

}  // namespace replay
