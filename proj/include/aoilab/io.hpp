#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aoilab/error.hpp"
#include "aoilab/metrics.hpp"
#include "aoilab/model.hpp"

namespace aoilab::io {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kInstanceFormat = "aoilab-instance/1";
inline constexpr std::string_view kTraceFormat = "aoilab-trace/1";
inline constexpr std::string_view kReportFormat = "aoilab-report/1";

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

namespace detail {

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorCode::ParseError, std::string(what) + ": syntax error at " + line_col(text, at));
  }
}

[[noreturn]] inline void bad(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ParseError, "at " + path + ": " + why);
}

inline Ratio number(const json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return Ratio::parse(v.get<std::string>());
    } catch (const Error& e) {
      bad(path, e.what());
    }
  }
  if (v.is_number_integer()) return Ratio::parse(v.dump());
  bad(path, "expected a decimal or \"p/q\" string");
}

inline std::size_t index(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) bad(path, "expected a positive integer");
  return v.get<std::size_t>();
}

inline void only_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                      const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) bad(path, "unknown field '" + key + "'");
  }
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(path, std::string("missing field '") + key + "'");
  return *it;
}

inline void check_format(const json& doc, std::string_view expected) {
  if (auto it = doc.find("format"); it != doc.end() && (!it->is_string() || it->get<std::string>() != expected))
    bad("format", "expected \"" + std::string(expected) + "\"");
}

}  // namespace detail

/// Canonical instance document. Rationals are strings in "p/q" form.
inline std::string format_instance(const Instance& inst) {
  json doc;
  doc["format"] = kInstanceFormat;
  doc["horizon"] = inst.horizon().str();
  doc["initial_generation"] = inst.initial_generation().str();
  doc["updates"] = json::array();
  for (const auto& u : inst.updates()) doc["updates"].push_back({{"g", u.generation.str()}, {"s", u.size.str()}});
  return doc.dump(2) + "\n";
}

inline Instance parse_instance(std::string_view text) {
  json doc = detail::parse_json(text, "instance");
  detail::only_keys(doc, {"format", "horizon", "initial_generation", "updates"}, "$");
  detail::check_format(doc, kInstanceFormat);
  Ratio horizon = detail::number(detail::field(doc, "horizon", "$"), "horizon");
  Ratio lambda0(0);
  if (auto it = doc.find("initial_generation"); it != doc.end())
    lambda0 = detail::number(*it, "initial_generation");
  const json& list = detail::field(doc, "updates", "$");
  if (!list.is_array()) detail::bad("updates", "expected an array");
  std::vector<RawUpdate> raw;
  for (std::size_t k = 0; k < list.size(); ++k) {
    std::string path = "updates[" + std::to_string(k) + "]";
    detail::only_keys(list[k], {"g", "s"}, path);
    raw.push_back({detail::number(detail::field(list[k], "g", path), path + ".g"),
                   detail::number(detail::field(list[k], "s", path), path + ".s")});
  }
  return validate_instance(std::move(raw), std::move(horizon), std::move(lambda0));
}

inline Instance read_instance(const std::filesystem::path& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

/// SHA-256 of the canonical serialization, lowercase hex.
inline std::string instance_id(const Instance& inst) {
  std::string text = format_instance(inst);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

/// One row per segment ("segment,i,start,end") and per completion
/// ("completion,i,time,").
inline std::string format_trace_csv(const Trace& trace) {
  std::ostringstream out;
  out << "kind,update,start,end\n";
  for (const auto& s : trace.segments) out << "segment," << s.update << ',' << s.start << ',' << s.end << '\n';
  for (const auto& c : trace.completions) out << "completion," << c.update << ',' << c.time << ",\n";
  return out.str();
}

inline Trace parse_trace_csv(std::string_view text, std::string instance_id = {}) {
  Trace trace;
  trace.instance_id = std::move(instance_id);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "trace csv line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "kind,update,start,end") fail("unexpected header");
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 4) fail("expected 4 cells");
    UpdateIndex i = 0;
    try {
      i = std::stoul(cells[1]);
    } catch (const std::exception&) {
      fail("bad update index '" + cells[1] + "'");
    }
    try {
      if (cells[0] == "segment")
        trace.segments.push_back({i, Ratio::parse(cells[2]), Ratio::parse(cells[3])});
      else if (cells[0] == "completion" && cells[3].empty())
        trace.completions.push_back({i, Ratio::parse(cells[2])});
      else
        fail("unknown row kind '" + cells[0] + "'");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError || std::string_view(e.what()).find("trace csv") == 0) throw;
      fail(e.what());
    }
  }
  return trace;
}

inline std::string format_trace_json(const Trace& trace) {
  json doc;
  doc["format"] = kTraceFormat;
  doc["instance_id"] = trace.instance_id;
  doc["segments"] = json::array();
  for (const auto& s : trace.segments)
    doc["segments"].push_back({{"update", s.update}, {"start", s.start.str()}, {"end", s.end.str()}});
  doc["completions"] = json::array();
  for (const auto& c : trace.completions)
    doc["completions"].push_back({{"update", c.update}, {"time", c.time.str()}});
  return doc.dump(2) + "\n";
}

inline Trace parse_trace_json(std::string_view text) {
  json doc = detail::parse_json(text, "trace");
  detail::only_keys(doc, {"format", "instance_id", "segments", "completions"}, "$");
  detail::check_format(doc, kTraceFormat);
  Trace trace;
  if (auto it = doc.find("instance_id"); it != doc.end()) {
    if (!it->is_string()) detail::bad("instance_id", "expected a string");
    trace.instance_id = it->get<std::string>();
  }
  const json& segs = detail::field(doc, "segments", "$");
  const json& comps = detail::field(doc, "completions", "$");
  if (!segs.is_array()) detail::bad("segments", "expected an array");
  if (!comps.is_array()) detail::bad("completions", "expected an array");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    std::string path = "segments[" + std::to_string(k) + "]";
    detail::only_keys(segs[k], {"update", "start", "end"}, path);
    trace.segments.push_back({detail::index(detail::field(segs[k], "update", path), path + ".update"),
                              detail::number(detail::field(segs[k], "start", path), path + ".start"),
                              detail::number(detail::field(segs[k], "end", path), path + ".end")});
  }
  for (std::size_t k = 0; k < comps.size(); ++k) {
    std::string path = "completions[" + std::to_string(k) + "]";
    detail::only_keys(comps[k], {"update", "time"}, path);
    trace.completions.push_back({detail::index(detail::field(comps[k], "update", path), path + ".update"),
                                 detail::number(detail::field(comps[k], "time", path), path + ".time")});
  }
  return trace;
}

/// Per-update metrics, one row per update; undefined values are empty cells.
inline std::string format_metrics_csv(const Instance& inst, const PerUpdateMetrics& m) {
  std::ostringstream out;
  auto opt = [](const std::optional<Ratio>& v) { return v ? v->str() : std::string(); };
  out << "i,g,s,delta,b,r,w,d,nu,nu_min\n";
  for (UpdateIndex i = 1; i <= inst.size(); ++i) {
    const Update& u = inst.at(i);
    out << i << ',' << u.generation << ',' << u.size << ',' << m.delta[i] << ',' << opt(m.b[i]) << ','
        << opt(m.r[i]) << ',' << opt(m.w[i]) << ',' << opt(m.d[i]) << ',' << opt(m.nu[i]) << ','
        << m.nu_min[i] << '\n';
  }
  return out.str();
}

inline json report_json(const AoiReport& rep) {
  json doc;
  doc["horizon"] = rep.horizon.str();
  doc["integral"] = rep.integral.str();
  doc["integral_decimal"] = rep.integral.decimal();
  doc["average"] = rep.average.str();
  doc["average_decimal"] = rep.average.decimal();
  doc["completions"] = rep.completions;
  doc["terms"] = json::array();
  for (const auto& t : rep.terms) doc["terms"].push_back({{"update", t.update}, {"value", t.value.str()}});
  doc["tail"] = rep.tail.str();
  return doc;
}

inline std::string format_report(const AoiReport& rep, std::string_view instance_id, std::string_view policy) {
  json doc;
  doc["format"] = kReportFormat;
  doc["instance_id"] = instance_id;
  doc["policy"] = policy;
  json body = report_json(rep);
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

}  // namespace aoilab::io
