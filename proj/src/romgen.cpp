// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/romgen.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>

#include "replay/error.hpp"

namespace replay {

namespace {

constexpr std::string_view kKeywords[] = {
    "always",    "and",        "assign",   "automatic", "begin",     "buf",        "case",
    "casex",     "casez",      "cell",     "config",    "deassign",  "default",    "defparam",
    "design",    "disable",    "edge",     "else",      "end",       "endcase",    "endconfig",
    "endfunction", "endgenerate", "endmodule", "endspecify", "endtask", "event",    "for",
    "force",     "forever",    "fork",     "function",  "generate",  "genvar",     "if",
    "initial",   "inout",      "input",    "integer",   "join",      "localparam", "module",
    "nand",      "negedge",    "nor",      "not",       "or",        "output",     "parameter",
    "posedge",   "real",       "reg",      "release",   "repeat",    "signed",     "specify",
    "task",      "time",       "tri",      "wait",      "while",     "wire"};

constexpr std::string_view kModulePorts[] = {"clk", "rst", "replay_done", "replay_mismatch",
                                                          "replay_error"};

unsigned bits_for(std::uint64_t max_value) {
  unsigned b = 1;
  while (b < 64 && (max_value >> b) != 0) ++b;
  return b;
}

std::string slice(const char* vec, std::size_t offset, std::size_t width) {
  std::ostringstream os;
  if (width == 1)
    os << vec << "[" << offset << "]";
  else
    os << vec << "[" << offset << " +: " << width << "]";
  return os.str();
}

std::string range(std::size_t width) {
  return width == 1 ? std::string() : "[" + std::to_string(width - 1) + ":0] ";
}

void rom_concat(std::ostringstream& os, const char* rom, std::size_t words) {
  if (words == 1) {
    os << rom << "[rp_base]";
    return;
  }
  os << "{";
  for (std::size_t k = words; k-- > 0;) {
    os << rom << "[rp_base + " << k << "]";
    if (k) os << ", ";
  }
  os << "}";
}

}  // namespace

bool is_hdl_identifier(std::string_view name) {
  if (name.empty()) return false;
  const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(name[0])) return false;
  for (char c : name)
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '$') return false;
  return std::find(std::begin(kKeywords), std::end(kKeywords), name) == std::end(kKeywords);
}

RomGenOutput emit_hdl_module(const ReplayArtifact& a, const RomGenOptions& opts) {
  a.validate();
  if (a.frames.empty()) throw Error("cannot generate a replay module for an artifact with no cycles");
  if (!is_hdl_identifier(opts.module_name)) {
    throw Error("module name '" + opts.module_name + "' is not a valid HDL identifier");
  }
  for (const auto& e : a.directory) {
    const bool reserved = e.name.rfind("rp_", 0) == 0 ||
                          std::find(std::begin(kModulePorts), std::end(kModulePorts), e.name) != std::end(kModulePorts);
    if (!is_hdl_identifier(e.name) || reserved || e.name == opts.module_name) {
      throw Error("signal '" + e.name + "' cannot be mapped to an HDL identifier");
    }
  }

  RomGenOutput out;
  out.data_hex = emit_hex(a, opts.word_width, HexPlane::Data);
  out.care_hex = emit_hex(a, opts.word_width, HexPlane::Care);

  const std::uint64_t n = a.frames.size();
  const std::size_t ww = opts.word_width;
  const std::size_t k = (a.frame_width + ww - 1) / ww;
  const std::uint64_t depth = n * k;
  const unsigned cw = bits_for(n);
  const unsigned aw = bits_for(depth - 1);
  const std::string data_file = opts.module_name + "_data.hex";
  const std::string care_file = opts.module_name + "_care.hex";

  std::ostringstream os;
  os << "// " << opts.module_name << ": replay ROM module generated by replaykit.\n";
  os << "//\n";
  os << "// cycles: " << n << "  frame width: " << a.frame_width << " bits  clock period: " << a.clock_period
     << " x " << a.timescale.to_string() << "  start: " << to_string(a.start_condition) << "\n";
  os << "// ROM: " << depth << " words of " << ww << " bits, " << k
     << " word(s) per frame; frame i occupies words i*" << k << " .. i*" << k << "+" << (k - 1)
     << ", lowest word holds the lowest frame bits.\n";
  os << "// data: " << data_file << "  care: " << care_file << "\n";
  os << "//\n";
  os << "// Frame layout (offset +: width, name, direction, check):\n";
  for (const auto& e : a.directory) {
    os << "//   [" << std::setw(4) << e.offset << " +: " << std::setw(3) << e.width << "] " << e.name << " "
       << to_string(e.direction);
    if (e.direction == Direction::DutDriven) os << " " << to_string(e.check.kind);
    os << "\n";
  }
  os << "//\n";
  os << "// While rst is high the cycle counter holds at 0. At cycle i (0 <= i < " << n
     << ") the agent outputs carry\n";
  os << "// frame i. At cycle " << n << " replay_done rises and the outputs hold frame " << (n - 1) << ".\n";
  if (opts.include_checker) {
    os << "// replay_mismatch flags a masked difference on the DUT inputs in the current cycle;\n";
    os << "// replay_error is sticky until rst.\n";
  }
  os << "\n";

  os << "module " << opts.module_name << " (\n";
  std::vector<std::string> ports;
  ports.push_back("input  wire clk");
  ports.push_back("input  wire rst");
  for (const auto& e : a.directory) {
    ports.push_back((e.direction == Direction::AgentDriven ? "output wire " : "input  wire ") + range(e.width) +
                    e.name);
  }
  if (opts.include_checker) {
    ports.push_back("output wire replay_mismatch");
    ports.push_back("output reg  replay_error");
  }
  ports.push_back("output wire replay_done");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    os << "  " << ports[i] << (i + 1 < ports.size() ? ",\n" : "\n");
  }
  os << ");\n\n";

  os << "  localparam integer CYCLES = " << n << ";\n";
  os << "  localparam integer WORDS_PER_FRAME = " << k << ";\n\n";
  os << "  reg [" << ww - 1 << ":0] rp_data_rom [0:" << depth - 1 << "];\n";
  if (opts.include_checker) os << "  reg [" << ww - 1 << ":0] rp_care_rom [0:" << depth - 1 << "];\n";
  os << "\n  initial begin\n";
  os << "    $readmemh(\"" << data_file << "\", rp_data_rom);\n";
  if (opts.include_checker) os << "    $readmemh(\"" << care_file << "\", rp_care_rom);\n";
  os << "  end\n\n";

  os << "  reg  [" << cw - 1 << ":0] rp_cycle;\n";
  os << "  wire [" << cw - 1 << ":0] rp_frame = (rp_cycle == CYCLES) ? CYCLES - 1 : rp_cycle;\n";
  os << "  wire [" << aw - 1 << ":0] rp_base = rp_frame * WORDS_PER_FRAME;\n";
  os << "  wire [" << k * ww - 1 << ":0] rp_data = ";
  rom_concat(os, "rp_data_rom", k);
  os << ";\n";
  if (opts.include_checker) {
    os << "  wire [" << k * ww - 1 << ":0] rp_care = ";
    rom_concat(os, "rp_care_rom", k);
    os << ";\n";
  }
  os << "\n  always @(posedge clk) begin\n";
  os << "    if (rst)\n";
  os << "      rp_cycle <= " << cw << "'d0;\n";
  os << "    else if (rp_cycle != CYCLES)\n";
  os << "      rp_cycle <= rp_cycle + " << cw << "'d1;\n";
  os << "  end\n\n";
  os << "  assign replay_done = (rp_cycle == CYCLES);\n\n";

  for (const auto& e : a.directory) {
    if (e.direction != Direction::AgentDriven) continue;
    os << "  assign " << e.name << " = " << slice("rp_data", e.offset, e.width) << ";\n";
  }

  if (opts.include_checker) {
    os << "\n";
    std::vector<std::string> terms;
    for (const auto& e : a.directory) {
      if (e.direction != Direction::DutDriven) continue;
      const auto policy = e.check.effective_mask(e.width);
      const std::string term = "rp_miss_" + e.name;
      os << "  wire " << term << " = |((" << e.name << " ^ " << slice("rp_data", e.offset, e.width) << ") & "
         << slice("rp_care", e.offset, e.width) << " & " << e.width << "'h" << policy.to_hex() << ");\n";
      terms.push_back(term);
    }
    os << "  assign replay_mismatch = !rst && !replay_done && ";
    if (terms.empty()) {
      os << "1'b0;\n";
    } else {
      os << "(";
      for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? " | " : "") << terms[i];
      os << ");\n";
    }
    os << "\n  always @(posedge clk) begin\n";
    os << "    if (rst)\n";
    os << "      replay_error <= 1'b0;\n";
    os << "    else if (replay_mismatch)\n";
    os << "      replay_error <= 1'b1;\n";
    os << "  end\n";
  }
  os << "\nendmodule\n";
  out.hdl = os.str();
  return out;
}

}  // namespace replay
