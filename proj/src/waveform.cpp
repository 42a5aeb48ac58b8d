// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "replay/waveform.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <tuple>

#include "replay/error.hpp"

namespace replay {

namespace {

constexpr std::array<std::string_view, 6> kUnitNames = {"s", "ms", "us", "ns", "ps", "fs"};

Logic logic_from_char(char c, std::size_t line) {
  switch (c) {
    case '0': return Logic::Zero;
    case '1': return Logic::One;
    case 'x':
    case 'X': return Logic::X;
    case 'z':
    case 'Z': return Logic::Z;
    default: throw ParseError(std::string("invalid value character '") + c + "'", line);
  }
}

char logic_to_char(Logic l) {
  switch (l) {
    case Logic::Zero: return '0';
    case Logic::One: return '1';
    case Logic::X: return 'x';
    case Logic::Z: return 'z';
  }
  return '?';
}

// Whitespace tokenizer that tracks line numbers for error messages.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  bool next(std::string_view& tok) {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
      } else if (c != ' ' && c != '\t' && c != '\r' && c != '\f' && c != '\v') {
        break;
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') break;
      ++pos_;
    }
    tok = text_.substr(start, pos_ - start);
    return true;
  }

  std::string_view expect(const char* context) {
    std::string_view tok;
    if (!next(tok)) throw ParseError(std::string("unexpected end of input in ") + context, line_);
    return tok;
  }

  // Collects tokens up to (not including) $end.
  std::vector<std::string_view> until_end(const char* context) {
    std::vector<std::string_view> out;
    for (;;) {
      auto tok = expect(context);
      if (tok == "$end") return out;
      out.push_back(tok);
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::uint64_t parse_u64(std::string_view s, const char* what, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

std::string join(const std::vector<std::string>& parts, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += '.';
    out += parts[i];
  }
  return out;
}

}  // namespace

std::uint8_t Timescale::code() const {
  const std::uint8_t mag = magnitude == 1 ? 0 : magnitude == 10 ? 1 : 2;
  return static_cast<std::uint8_t>(static_cast<unsigned>(unit) * 3 + mag);
}

Timescale Timescale::from_code(std::uint8_t code) {
  if (code >= 18) throw Error("invalid timescale code " + std::to_string(code));
  static constexpr unsigned kMags[] = {1, 10, 100};
  return {kMags[code % 3], static_cast<TimeUnit>(code / 3)};
}

Timescale Timescale::parse(std::string_view text) {
  std::size_t digits = 0;
  while (digits < text.size() && text[digits] >= '0' && text[digits] <= '9') ++digits;
  std::size_t unit_start = digits;
  while (unit_start < text.size() && text[unit_start] == ' ') ++unit_start;
  const auto mag_text = text.substr(0, digits);
  const auto unit_text = text.substr(unit_start);
  if (mag_text != "1" && mag_text != "10" && mag_text != "100") {
    throw Error("invalid timescale '" + std::string(text) + "': magnitude must be 1, 10 or 100");
  }
  for (std::size_t u = 0; u < kUnitNames.size(); ++u) {
    if (unit_text == kUnitNames[u]) {
      return {static_cast<unsigned>(parse_u64(mag_text, "magnitude", 0)), static_cast<TimeUnit>(u)};
    }
  }
  throw Error("invalid timescale unit in '" + std::string(text) + "'");
}

std::string Timescale::to_string() const {
  return std::to_string(magnitude) + std::string(kUnitNames[static_cast<unsigned>(unit)]);
}

FourStateVector FourStateVector::from_u64(std::size_t width, std::uint64_t value) {
  FourStateVector v;
  v.bits.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    v.bits[i] = (i < 64 && ((value >> i) & 1u)) ? Logic::One : Logic::Zero;
  }
  return v;
}

FourStateVector FourStateVector::from_vcd(std::string_view text, std::size_t width) {
  if (text.empty()) throw Error("empty vector value");
  if (text.size() > width) {
    throw Error("vector value of " + std::to_string(text.size()) + " bits exceeds declared width " +
                std::to_string(width));
  }
  FourStateVector v;
  v.bits.resize(width);
  for (std::size_t i = 0; i < text.size(); ++i) {
    v.bits[i] = logic_from_char(text[text.size() - 1 - i], 0);
  }
  Logic fill = v.bits[text.size() - 1];
  if (fill == Logic::One) fill = Logic::Zero;
  for (std::size_t i = text.size(); i < width; ++i) v.bits[i] = fill;
  return v;
}

bool FourStateVector::is_known() const {
  return std::all_of(bits.begin(), bits.end(),
                     [](Logic l) { return l == Logic::Zero || l == Logic::One; });
}

std::string FourStateVector::to_string() const {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) s[bits.size() - 1 - i] = logic_to_char(bits[i]);
  return s;
}

std::size_t WaveformDb::add_signal(SignalDecl decl) {
  if (decl.width == 0) throw Error("signal '" + decl.path + "' has zero width");
  if (decl.idcode.empty()) throw Error("signal '" + decl.path + "' has an empty idcode");
  if (by_idcode_.count(decl.idcode)) throw Error("duplicate idcode '" + decl.idcode + "'");
  if (by_path_.count(decl.path)) throw Error("duplicate signal path '" + decl.path + "'");
  const std::size_t index = decls_.size();
  by_idcode_.emplace(decl.idcode, index);
  by_path_.emplace(decl.path, index);
  decls_.push_back(std::move(decl));
  changes_.emplace_back();
  return index;
}

void WaveformDb::record(std::size_t index, Tick time, FourStateVector value) {
  const auto& d = decls_.at(index);
  if (value.width() != d.width) {
    throw Error("value width " + std::to_string(value.width()) + " does not match '" + d.path +
                "' width " + std::to_string(d.width));
  }
  auto& list = changes_[index];
  if (!list.empty()) {
    if (time < list.back().time) throw Error("timestamp going backwards on '" + d.path + "'");
    if (time == list.back().time) {
      list.back().value = std::move(value);
      return;
    }
  }
  list.push_back({time, std::move(value)});
}

std::size_t WaveformDb::index_of(std::string_view path) const {
  auto it = by_path_.find(path);
  if (it == by_path_.end()) throw Error("unknown signal '" + std::string(path) + "'");
  return it->second;
}

bool WaveformDb::contains(std::string_view path) const { return by_path_.find(path) != by_path_.end(); }

WaveformDb parse_vcd(std::string_view text) {
  Tokenizer tz(text);
  WaveformDb db;
  bool have_timescale = false;
  std::vector<std::string> scopes;
  std::string_view tok;

  // Declarations.
  for (;;) {
    if (!tz.next(tok)) throw ParseError("missing $enddefinitions", tz.line());
    if (tok == "$enddefinitions") {
      tz.until_end("$enddefinitions");
      break;
    }
    if (tok == "$timescale") {
      auto parts = tz.until_end("$timescale");
      std::string joined;
      for (auto p : parts) joined += p;
      try {
        db.timescale_ = Timescale::parse(joined);
      } catch (const Error& e) {
        throw ParseError(e.what(), tz.line());
      }
      have_timescale = true;
    } else if (tok == "$scope") {
      auto parts = tz.until_end("$scope");
      if (parts.size() != 2) throw ParseError("malformed $scope", tz.line());
      scopes.emplace_back(parts[1]);
    } else if (tok == "$upscope") {
      tz.until_end("$upscope");
      if (scopes.empty()) throw ParseError("$upscope without open scope", tz.line());
      scopes.pop_back();
    } else if (tok == "$var") {
      auto parts = tz.until_end("$var");
      if (parts.size() < 4 || parts.size() > 5) throw ParseError("malformed $var", tz.line());
      const auto kind = parts[0];
      if (kind == "real" || kind == "realtime" || kind == "event" || kind == "string") {
        throw ParseError("unsupported variable kind '" + std::string(kind) + "'", tz.line());
      }
      if (parts.size() == 5 && parts[4].front() != '[') throw ParseError("malformed $var", tz.line());
      SignalDecl decl;
      decl.width = parse_u64(parts[1], "width", tz.line());
      decl.idcode = std::string(parts[2]);
      decl.path = join(scopes, scopes.size());
      if (!decl.path.empty()) decl.path += '.';
      decl.path += parts[3];
      try {
        db.add_signal(std::move(decl));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what(), tz.line());
      }
    } else if (!tok.empty() && tok.front() == '$') {
      // $date, $version, $comment and vendor extensions carry no data we need.
      tz.until_end("header section");
    } else {
      throw ParseError("unexpected token '" + std::string(tok) + "' in header", tz.line());
    }
  }
  if (!have_timescale) throw ParseError("missing $timescale", tz.line());
  if (!scopes.empty()) throw ParseError("unterminated $scope '" + scopes.back() + "'", tz.line());

  auto lookup = [&](std::string_view id) -> std::size_t {
    auto it = db.by_idcode_.find(id);
    if (it == db.by_idcode_.end()) throw ParseError("unknown idcode '" + std::string(id) + "'", tz.line());
    return it->second;
  };
  auto apply = [&](std::size_t index, std::string_view bits, Tick time) {
    try {
      db.record(index, time, FourStateVector::from_vcd(bits, db.decls_[index].width));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what() + (" on '" + db.decls_[index].path + "'"), tz.line());
    }
  };

  // Value changes.
  Tick now = 0;
  while (tz.next(tok)) {
    const char c = tok.front();
    if (c == '#') {
      const Tick t = parse_u64(tok.substr(1), "timestamp", tz.line());
      if (t < now) {
        throw ParseError("timestamp going backwards (" + std::to_string(t) + " after " +
                             std::to_string(now) + ")",
                         tz.line());
      }
      now = t;
    } else if (c == '$') {
      if (tok == "$comment") {
        tz.until_end("$comment");
      } else if (tok != "$dumpvars" && tok != "$dumpall" && tok != "$dumpon" && tok != "$dumpoff" &&
                 tok != "$end") {
        throw ParseError("unexpected keyword '" + std::string(tok) + "' in dump section", tz.line());
      }
    } else if (c == 'b' || c == 'B') {
      const auto bits = tok.substr(1);
      const auto id = tz.expect("vector change");
      apply(lookup(id), bits, now);
    } else if (c == 'r' || c == 'R') {
      throw ParseError("real value changes are not supported", tz.line());
    } else if (c == '0' || c == '1' || c == 'x' || c == 'X' || c == 'z' || c == 'Z') {
      if (tok.size() < 2) throw ParseError("scalar change without idcode", tz.line());
      apply(lookup(tok.substr(1)), tok.substr(0, 1), now);
    } else {
      throw ParseError("unexpected token '" + std::string(tok) + "' in dump section", tz.line());
    }
  }
  return db;
}

std::string write_vcd(const WaveformDb& db) {
  std::string out;
  out += "$timescale " + db.timescale().to_string() + " $end\n";

  std::vector<std::string> open;
  for (const auto& d : db.decls()) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      auto dot = d.path.find('.', start);
      if (dot == std::string::npos) break;
      parts.push_back(d.path.substr(start, dot - start));
      start = dot + 1;
    }
    const std::string leaf = d.path.substr(start);
    std::size_t common = 0;
    while (common < open.size() && common < parts.size() && open[common] == parts[common]) ++common;
    while (open.size() > common) {
      out += "$upscope $end\n";
      open.pop_back();
    }
    for (std::size_t i = common; i < parts.size(); ++i) {
      out += "$scope module " + parts[i] + " $end\n";
      open.push_back(parts[i]);
    }
    out += "$var wire " + std::to_string(d.width) + " " + d.idcode + " " + leaf + " $end\n";
  }
  while (!open.empty()) {
    out += "$upscope $end\n";
    open.pop_back();
  }
  out += "$enddefinitions $end\n";

  // Merge per-signal change lists into one time-ordered stream; ties keep
  // declaration order.
  std::vector<std::tuple<Tick, std::size_t, std::size_t>> events;
  for (std::size_t s = 0; s < db.decls().size(); ++s) {
    const auto& list = db.changes(s);
    for (std::size_t k = 0; k < list.size(); ++k) events.emplace_back(list[k].time, s, k);
  }
  std::sort(events.begin(), events.end());

  bool first = true;
  Tick last = 0;
  for (const auto& [t, s, k] : events) {
    if (first || t != last) {
      out += '#';
      out += std::to_string(t);
      out += '\n';
      first = false;
      last = t;
    }
    const auto& d = db.decls()[s];
    const auto bits = db.changes(s)[k].value.to_string();
    if (d.width == 1) {
      out += bits;
      out += d.idcode;
    } else {
      out += 'b';
      out += bits;
      out += ' ';
      out += d.idcode;
    }
    out += '\n';
  }
  return out;
}

FourStateVector value_before(const WaveformDb& db, std::string_view path, Tick time) {
  const std::size_t index = db.index_of(path);
  const auto& list = db.changes(index);
  auto it = std::lower_bound(list.begin(), list.end(), time,
                             [](const ValueChange& c, Tick t) { return c.time < t; });
  if (it == list.begin()) return FourStateVector::all(db.decls()[index].width, Logic::X);
  return std::prev(it)->value;
}

EdgeScan rising_edges(const WaveformDb& db, std::string_view clock) {
  const std::size_t index = db.index_of(clock);
  if (db.decls()[index].width != 1) {
    throw Error("clock '" + std::string(clock) + "' must be 1 bit wide, found " +
                std::to_string(db.decls()[index].width));
  }
  EdgeScan scan;
  Logic prev = Logic::X;
  for (const auto& c : db.changes(index)) {
    const Logic now = c.value.bits[0];
    if (now == Logic::One && prev != Logic::One) {
      if (prev == Logic::Zero)
        scan.edges.push_back(c.time);
      else
        ++scan.unknown_rises;
    }
    prev = now;
  }
  return scan;
}

}  // namespace replay
