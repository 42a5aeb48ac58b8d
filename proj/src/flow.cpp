// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/flow.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "replay/error.hpp"
#include "replay/waveform.hpp"

namespace replay::flow {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void reject_unknown_keys(const YAML::Node& node, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  if (!node.IsMap()) throw Error("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw Error("unknown key '" + key + "' in " + where);
  }
}

// Accepts decimal, 0x-prefixed hex and 0-prefixed octal like strtoull(.., 0).
std::uint64_t as_u64(const YAML::Node& n, const std::string& what) {
  const auto text = n.as<std::string>();
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error("'" + what + "' must be a non-negative integer, got '" + text + "'");
  }
}

bool as_bool(const YAML::Node& n, const std::string& what) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw Error("'" + what + "' must be true or false");
  }
}

void parse_randomization(const YAML::Node& n, sim::Randomization& r, const std::string& where) {
  reject_unknown_keys(n, {"enabled", "seed", "max_stall"}, where);
  if (n["enabled"]) r.enabled = as_bool(n["enabled"], where + ".enabled");
  if (n["seed"]) r.seed = as_u64(n["seed"], where + ".seed");
  if (n["max_stall"]) r.max_stall = as_u64(n["max_stall"], where + ".max_stall");
}

StageOutcome guarded(const char* stage, ExitCode code, const auto& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, code, e.what());
  }
}

void wrote(std::ostream& log, const fs::path& p) { log << "wrote " << p.string() << "\n"; }

ReplayArtifact load_artifact(const fs::path& p) { return deserialize_artifact(read_bytes(p)); }

}  // namespace

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  const auto s = read_text(p);
  return {s.begin(), s.end()};
}

void write_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + p.string() + "'");
}

FlowConfig parse_config(std::string_view yaml_text, const fs::path& base_dir) {
  FlowConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw Error("config must be a mapping");
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  try {
    reject_unknown_keys(root,
                        {"output_dir", "max_cycles", "timing", "gpu", "interface", "interface_file", "encode",
                         "replay", "compare", "romgen"},
                        "config");
    if (root["output_dir"]) cfg.output_dir = root["output_dir"].as<std::string>();
    if (root["max_cycles"]) cfg.max_cycles = as_u64(root["max_cycles"], "max_cycles");

    if (const auto t = root["timing"]) {
      reject_unknown_keys(t, {"clock_period", "reset_cycles", "drain_cycles"}, "timing");
      if (t["clock_period"]) cfg.timing.clock_period = as_u64(t["clock_period"], "timing.clock_period");
      if (t["reset_cycles"]) cfg.timing.reset_cycles = as_u64(t["reset_cycles"], "timing.reset_cycles");
      if (t["drain_cycles"]) cfg.timing.drain_cycles = as_u64(t["drain_cycles"], "timing.drain_cycles");
    }

    if (const auto g = root["gpu"]) {
      reject_unknown_keys(g, {"mem_base", "word_count", "fuse_words", "randomization"}, "gpu");
      if (g["mem_base"]) cfg.ip_gpu.mem_base = as_u64(g["mem_base"], "gpu.mem_base");
      if (g["word_count"]) cfg.ip_gpu.word_count = as_u64(g["word_count"], "gpu.word_count");
      if (const auto f = g["fuse_words"]) {
        if (!f.IsSequence()) throw Error("'gpu.fuse_words' must be a list");
        cfg.ip_gpu.fuse_words.clear();
        for (const auto& w : f) {
          const auto v = as_u64(w, "gpu.fuse_words");
          if (v > 0xFFFFFFFFull) throw Error("fuse words must fit in 32 bits");
          cfg.ip_gpu.fuse_words.push_back(static_cast<std::uint32_t>(v));
        }
      }
      if (g["randomization"]) parse_randomization(g["randomization"], cfg.ip_gpu.randomization, "gpu.randomization");
    }
    cfg.ip_gpu.validate();
    cfg.soc_gpu = cfg.ip_gpu;

    if (root["interface"] && root["interface_file"]) throw Error("give either 'interface' or 'interface_file'");
    if (root["interface"]) {
      cfg.interface = load_spec(YAML::Dump(root["interface"]));
    } else if (root["interface_file"]) {
      cfg.interface = load_spec(read_text(resolve(root["interface_file"].as<std::string>())));
    }

    if (const auto e = root["encode"]) {
      reject_unknown_keys(e, {"x_policy", "period_tolerance", "period"}, "encode");
      if (e["x_policy"]) {
        const auto p = lower(e["x_policy"].as<std::string>());
        if (p == "error")
          cfg.encode.x_policy = XPolicy::Error;
        else if (p == "zero" || p == "zero_with_warning")
          cfg.encode.x_policy = XPolicy::ZeroWithWarning;
        else
          throw Error("encode.x_policy must be error or zero");
      }
      if (e["period_tolerance"]) cfg.encode.period_tolerance = as_u64(e["period_tolerance"], "encode.period_tolerance");
      if (e["period"]) cfg.encode.explicit_period = as_u64(e["period"], "encode.period");
    }

    if (const auto r = root["replay"]) {
      reject_unknown_keys(r, {"check", "stop_on_first_mismatch", "max_recorded_mismatches", "randomization"},
                          "replay");
      if (r["check"]) cfg.replay.check_enabled = as_bool(r["check"], "replay.check");
      if (r["stop_on_first_mismatch"]) {
        cfg.replay.stop_on_first_mismatch = as_bool(r["stop_on_first_mismatch"], "replay.stop_on_first_mismatch");
      }
      if (r["max_recorded_mismatches"]) {
        cfg.replay.max_recorded_mismatches = as_u64(r["max_recorded_mismatches"], "replay.max_recorded_mismatches");
        if (cfg.replay.max_recorded_mismatches < 1) throw Error("replay.max_recorded_mismatches must be >= 1");
      }
      if (r["randomization"]) {
        parse_randomization(r["randomization"], cfg.soc_gpu.randomization, "replay.randomization");
      }
    }

    if (const auto c = root["compare"]) {
      reject_unknown_keys(c, {"golden", "base", "bytes", "word_size", "word_order", "byte_order"}, "compare");
      if (c["golden"]) cfg.compare.golden = resolve(c["golden"].as<std::string>());
      if (c["base"]) cfg.compare.base = as_u64(c["base"], "compare.base");
      if (c["bytes"]) cfg.compare.bytes = as_u64(c["bytes"], "compare.bytes");
      if (c["word_size"]) cfg.compare.norm.word_size = as_u64(c["word_size"], "compare.word_size");
      if (c["word_order"]) {
        const auto o = lower(c["word_order"].as<std::string>());
        if (o == "ascending")
          cfg.compare.norm.word_order = WordOrder::Ascending;
        else if (o == "descending")
          cfg.compare.norm.word_order = WordOrder::Descending;
        else
          throw Error("compare.word_order must be ascending or descending");
      }
      if (c["byte_order"]) {
        const auto o = lower(c["byte_order"].as<std::string>());
        if (o == "little")
          cfg.compare.norm.byte_order = ByteOrder::Little;
        else if (o == "big")
          cfg.compare.norm.byte_order = ByteOrder::Big;
        else
          throw Error("compare.byte_order must be little or big");
      }
    }

    if (const auto g = root["romgen"]) {
      reject_unknown_keys(g, {"enabled", "module", "word_width", "checker"}, "romgen");
      if (g["enabled"]) cfg.romgen.enabled = as_bool(g["enabled"], "romgen.enabled");
      if (g["module"]) cfg.romgen.options.module_name = g["module"].as<std::string>();
      if (g["word_width"]) cfg.romgen.options.word_width = static_cast<unsigned>(as_u64(g["word_width"], "romgen.word_width"));
      if (g["checker"]) cfg.romgen.options.include_checker = as_bool(g["checker"], "romgen.checker");
    }
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

FlowConfig load_config(const fs::path& path) {
  return parse_config(read_text(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void apply_overrides(FlowConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.ip_gpu.randomization.seed = *o.seed;
    cfg.soc_gpu.randomization.seed = *o.seed;
  }
  if (o.no_randomization) {
    cfg.ip_gpu.randomization.enabled = false;
    cfg.soc_gpu.randomization.enabled = false;
  }
  if (o.period_tolerance) cfg.encode.period_tolerance = *o.period_tolerance;
  if (o.word_width) cfg.romgen.options.word_width = *o.word_width;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
}

Paths Paths::in(const FlowConfig& cfg) {
  const auto& d = cfg.output_dir;
  const auto& m = cfg.romgen.options.module_name;
  return {d / "ip.vcd",
          d / "ip_memory.txt",
          d / "replay.rpaf",
          d / "soc.vcd",
          d / "soc_memory.txt",
          d / "replay_report.txt",
          d / "compare_report.txt",
          d / (m + ".v"),
          d / (m + "_data.hex"),
          d / (m + "_care.hex")};
}

StageOutcome run_ip(const FlowConfig& cfg, std::ostream& log) {
  return guarded("run-ip", kRunIp, [&] {
    const auto paths = Paths::in(cfg);
    auto tb = sim::build_ip_testbench(cfg.ip_gpu, cfg.timing);
    const auto result = tb.run(cfg.max_cycles);
    if (result.status != sim::RunStatus::DoneAsserted) {
      throw Error("IP testbench did not assert done within " + std::to_string(cfg.max_cycles) + " cycles");
    }
    write_file(paths.ip_vcd, write_vcd(result.vcd));
    wrote(log, paths.ip_vcd);
    write_file(paths.ip_memory, format_dump(cfg.compare.base, tb.dump_memory(cfg.compare.base, cfg.compare.bytes)));
    wrote(log, paths.ip_memory);
    return StageOutcome{true, "done asserted at cycle " + std::to_string(result.done_cycle) + ", " +
                                  std::to_string(result.cycles_run) + " cycles simulated"};
  });
}

StageOutcome encode(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& vcd,
                    const std::optional<fs::path>& artifact) {
  return guarded("encode", kEncode, [&] {
    const auto paths = Paths::in(cfg);
    const auto db = parse_vcd(read_text(vcd.value_or(paths.ip_vcd)));
    const auto result = encode_artifact(db, cfg.interface, cfg.encode);
    for (const auto& w : result.warnings) log << "warning: " << w << "\n";
    const auto bytes = serialize_artifact(result.artifact);
    const auto out = artifact.value_or(paths.artifact);
    write_file(out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    wrote(log, out);
    return StageOutcome{true, std::to_string(result.artifact.cycle_count()) + " cycles x " +
                                  std::to_string(result.artifact.frame_width) + " bits"};
  });
}

StageOutcome replay(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& artifact) {
  return guarded("replay", kReplay, [&] {
    const auto paths = Paths::in(cfg);
    auto a = std::make_shared<const ReplayArtifact>(load_artifact(artifact.value_or(paths.artifact)));
    auto tb = sim::build_soc_testbench(a, cfg.soc_gpu, cfg.replay, cfg.timing);
    const auto result = tb.run(cfg.max_cycles);
    const auto& report = *result.replay;
    write_file(paths.replay_report, report.to_text());
    wrote(log, paths.replay_report);
    write_file(paths.soc_vcd, write_vcd(result.vcd));
    wrote(log, paths.soc_vcd);
    write_file(paths.soc_memory, format_dump(cfg.compare.base, tb.dump_memory(cfg.compare.base, cfg.compare.bytes)));
    wrote(log, paths.soc_memory);
    std::string summary = report.pass ? "pass" : "FAIL";
    summary += ", " + std::to_string(report.mismatch_count) + " mismatch(es)";
    if (report.first_mismatch) {
      summary += ", first at cycle " + std::to_string(report.first_mismatch->cycle) + " on " +
                 report.first_mismatch->signal;
    }
    return StageOutcome{report.pass, summary};
  });
}

StageOutcome compare(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& sim,
                     const std::optional<fs::path>& golden) {
  return guarded("compare", kCompare, [&] {
    const auto paths = Paths::in(cfg);
    const auto sim_dump = parse_golden(read_text(sim.value_or(paths.soc_memory)));
    if (sim_dump.records.size() != 1) throw Error("simulation dump must be one contiguous region");
    const auto gold_path = golden ? *golden : cfg.compare.golden.value_or(paths.ip_memory);
    const auto gold = parse_golden(read_text(gold_path));
    const auto& region = sim_dump.records.front();
    const auto report = compare_memory(region.bytes, region.base, gold, cfg.compare.norm);
    write_file(paths.compare_report, report.to_text());
    wrote(log, paths.compare_report);
    return StageOutcome{report.pass, std::string(report.pass ? "pass" : "FAIL") + ", " +
                                         std::to_string(report.words_compared) + " words against " +
                                         gold_path.string()};
  });
}

StageOutcome romgen(const FlowConfig& cfg, std::ostream& log, const std::optional<fs::path>& artifact) {
  return guarded("romgen", kRomgen, [&] {
    const auto paths = Paths::in(cfg);
    const auto a = load_artifact(artifact.value_or(paths.artifact));
    const auto out = emit_hdl_module(a, cfg.romgen.options);
    write_file(paths.hdl, out.hdl);
    wrote(log, paths.hdl);
    write_file(paths.data_hex, out.data_hex);
    wrote(log, paths.data_hex);
    write_file(paths.care_hex, out.care_hex);
    wrote(log, paths.care_hex);
    return StageOutcome{true, cfg.romgen.options.module_name};
  });
}

int run_flow(const FlowConfig& cfg, std::ostream& log) {
  struct Stage {
    const char* name;
    ExitCode code;
    std::function<StageOutcome()> fn;
  };
  std::vector<Stage> stages = {
      {"run-ip", kRunIp, [&] { return run_ip(cfg, log); }},
      {"encode", kEncode, [&] { return encode(cfg, log); }},
      {"replay", kReplay, [&] { return replay(cfg, log); }},
      {"compare", kCompare, [&] { return compare(cfg, log); }},
  };
  if (cfg.romgen.enabled) stages.push_back({"romgen", kRomgen, [&] { return romgen(cfg, log); }});

  for (const auto& s : stages) {
    const auto outcome = s.fn();
    log << "[" << s.name << "] " << outcome.summary << "\n";
    if (!outcome.pass) return s.code;
  }
  return kOk;
}

std::string inspect_text(const ReplayArtifact& a, const InspectOptions& opts) {
  std::ostringstream os;
  os << "version: " << a.version << "\n";
  os << "frame width: " << a.frame_width << " bits\n";
  os << "cycles: " << a.cycle_count() << "\n";
  os << "clock period: " << a.clock_period << " x " << a.timescale.to_string() << "\n";
  os << "start condition: " << to_string(a.start_condition) << "\n";
  os << "directory:\n";
  os << "  offset  width  dir    check   name\n";
  for (const auto& e : a.directory) {
    os << "  " << std::setw(6) << e.offset << "  " << std::setw(5) << e.width << "  " << std::left << std::setw(5)
       << to_string(e.direction) << "  " << std::setw(6) << to_string(e.check.kind) << "  " << e.name << std::right;
    if (e.check.kind == CheckPolicy::Kind::Masked) os << " mask=" << e.check.mask.to_binary();
    os << "\n";
  }
  const auto fp = footprint_report(a, opts.captured_clocks);
  os << "footprint (" << opts.captured_clocks << " captured clock(s)): rom_bits " << fp.rom_bits << ", naive_bits "
     << fp.naive_bits << ", savings_bits " << fp.savings_bits << "\n";

  const std::size_t first = std::min(opts.first_cycle, a.cycle_count());
  const std::size_t last = std::min(opts.last_cycle.value_or(first + 16), a.cycle_count());
  os << "frames [" << first << ", " << last << "):\n";
  for (std::size_t i = first; i < last; ++i) {
    const auto& f = a.frames[i];
    os << "  " << std::setw(6) << i << "  data " << f.data.to_hex() << "  care " << f.care.to_hex() << "\n";
    for (const auto& e : a.directory) {
      os << "          " << std::left << std::setw(12) << e.name << std::right << " "
         << f.data.slice(e.offset, e.width).to_hex();
      if (f.care.slice(e.offset, e.width) != BitVector::ones(e.width)) {
        os << " (care " << f.care.slice(e.offset, e.width).to_hex() << ")";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace replay::flow
