// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

// replaykit: capture, encode, replay, compare and ROM generation from one
// YAML configuration.

#include <CLI11.hpp>

#include <iostream>

#include "replay/flow.hpp"

namespace rf = replay::flow;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool no_randomization = false;
  std::optional<replay::Tick> period_tolerance;
  std::optional<unsigned> word_width;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("-c,--config", a.config, "flow configuration (YAML)")->required();
  cmd->add_option("--seed", a.seed, "randomization seed for both capture and replay GPUs");
  cmd->add_flag("--no-randomization", a.no_randomization, "disable GPU stall randomization on both sides");
  cmd->add_option("--period-tolerance", a.period_tolerance, "allowed clock interval deviation in ticks");
  cmd->add_option("--word-width", a.word_width, "ROM word width for romgen")->check(CLI::IsMember({8, 16, 32, 64}));
  cmd->add_option("-o,--out", a.out, "output directory (overrides output_dir)");
}

rf::FlowConfig load(const CommonArgs& a) {
  if (!std::filesystem::exists(a.config)) {
    throw rf::StageError("config", rf::kUsage, "config file '" + a.config + "' not found");
  }
  rf::FlowConfig cfg;
  try {
    cfg = rf::load_config(a.config);
  } catch (const std::exception& e) {
    throw rf::StageError("config", rf::kConfig, e.what());
  }
  rf::Overrides o;
  o.seed = a.seed;
  o.no_randomization = a.no_randomization;
  o.period_tolerance = a.period_tolerance;
  o.word_width = a.word_width;
  if (a.out) o.output_dir = *a.out;
  rf::apply_overrides(cfg, o);
  return cfg;
}

int finish(const char* stage, const rf::StageOutcome& outcome, rf::ExitCode fail_code) {
  std::cout << "[" << stage << "] " << outcome.summary << "\n";
  return outcome.pass ? rf::kOk : fail_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replaykit: waveform capture and deterministic interface replay"};
  app.require_subcommand(1);

  CommonArgs common;
  std::optional<std::string> vcd_in, artifact_in, sim_in, golden_in;

  auto* run_ip = app.add_subcommand("run-ip", "simulate the IP testbench; write capture VCD and memory dump");
  add_common(run_ip, common);

  auto* encode = app.add_subcommand("encode", "encode the capture VCD into a replay artifact");
  add_common(encode, common);
  encode->add_option("--vcd", vcd_in, "capture VCD (default: <out>/ip.vcd)");
  encode->add_option("--artifact", artifact_in, "artifact to write (default: <out>/replay.rpaf)");

  auto* replay = app.add_subcommand("replay", "run the SoC testbench driven by a replay artifact");
  add_common(replay, common);
  replay->add_option("--artifact", artifact_in, "artifact (default: <out>/replay.rpaf)");

  auto* compare = app.add_subcommand("compare", "compare a memory dump against a golden reference");
  add_common(compare, common);
  compare->add_option("--sim", sim_in, "simulation dump (default: <out>/soc_memory.txt)");
  compare->add_option("--golden", golden_in, "golden dump (default: compare.golden or <out>/ip_memory.txt)");

  auto* romgen = app.add_subcommand("romgen", "generate the Verilog replay module and hex ROM images");
  add_common(romgen, common);
  romgen->add_option("--artifact", artifact_in, "artifact (default: <out>/replay.rpaf)");

  auto* flow = app.add_subcommand("flow", "run-ip, encode, replay, compare and romgen in order");
  add_common(flow, common);

  std::string inspect_path;
  std::size_t from = 0;
  std::optional<std::size_t> to;
  std::uint64_t clocks = 1;
  auto* inspect = app.add_subcommand("inspect", "print an artifact's header, directory, footprint and frames");
  inspect->add_option("artifact", inspect_path, "artifact file")->required();
  inspect->add_option("--from", from, "first cycle to print");
  inspect->add_option("--to", to, "one past the last cycle to print");
  inspect->add_option("--clocks", clocks, "clock signals a naive capture would store per cycle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? rf::kOk : rf::kUsage;
  }

  auto opt_path = [](const std::optional<std::string>& s) -> std::optional<std::filesystem::path> {
    if (!s) return std::nullopt;
    return std::filesystem::path(*s);
  };

  try {
    if (*inspect) {
      try {
        const auto a = replay::deserialize_artifact(rf::read_bytes(inspect_path));
        std::cout << "artifact: " << inspect_path << "\n";
        std::cout << rf::inspect_text(a, {from, to, clocks});
        return rf::kOk;
      } catch (const std::exception& e) {
        throw rf::StageError("inspect", rf::kInspect, e.what());
      }
    }

    const auto cfg = load(common);
    if (*run_ip) return finish("run-ip", rf::run_ip(cfg, std::cout), rf::kRunIp);
    if (*encode) return finish("encode", rf::encode(cfg, std::cout, opt_path(vcd_in), opt_path(artifact_in)), rf::kEncode);
    if (*replay) return finish("replay", rf::replay(cfg, std::cout, opt_path(artifact_in)), rf::kReplay);
    if (*compare) {
      return finish("compare", rf::compare(cfg, std::cout, opt_path(sim_in), opt_path(golden_in)), rf::kCompare);
    }
    if (*romgen) return finish("romgen", rf::romgen(cfg, std::cout, opt_path(artifact_in)), rf::kRomgen);
    if (*flow) {
      const int rc = rf::run_flow(cfg, std::cout);
      std::cout << (rc == rf::kOk ? "flow: PASS" : "flow: FAIL") << "\n";
      return rc;
    }
  } catch (const rf::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rf::kUsage;
  }
  return rf::kUsage;
}
