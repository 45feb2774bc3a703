#pragma once

// Result persistence: CSV tables with round-trip number formatting, named
// invariant checks, and the JSON run manifest written next to every table.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "helios/errors.hpp"
#include "helios/parallel.hpp"
#include "helios/version.hpp"

namespace helios {

using json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double, capped at 17
/// significant digits and independent of the locale.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// RFC-4180 field quoting: fields holding a comma, quote, CR or LF are
/// wrapped in quotes with inner quotes doubled.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// A CSV cell; monostate renders as an empty field (a value that is absent).
using CsvCell = std::variant<std::monostate, double, long long, bool, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }

  void add_row(std::vector<CsvCell> row) {
    if (row.size() != header_.size()) throw ArgumentError("CSV row width does not match the header");
    rows_.push_back(std::move(row));
  }

  /// Throws CheckFailed naming the first column holding NaN or Inf.
  void require_finite() const {
    for (const auto& row : rows_)
      for (std::size_t c = 0; c < row.size(); ++c)
        if (const double* v = std::get_if<double>(&row[c]); v && !std::isfinite(*v))
          throw CheckFailed("finite:" + header_[c], *v, 0.0);
  }

  std::string str() const {
    std::string out;
    for (std::size_t c = 0; c < header_.size(); ++c) out += (c ? "," : "") + csv_escape(header_[c]);
    out += "\r\n";
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(render(row[c]));
      }
      out += "\r\n";
    }
    return out;
  }

 private:
  static std::string render(const CsvCell& cell) {
    struct Visitor {
      std::string operator()(std::monostate) const { return {}; }
      std::string operator()(double v) const { return format_number(v); }
      std::string operator()(long long v) const { return std::to_string(v); }
      std::string operator()(bool v) const { return v ? "true" : "false"; }
      std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
  }

  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// A named invariant: measured `relation` threshold.
struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=" or "=="
  bool passed = false;
};

class CheckList {
 public:
  const Check& le(std::string name, double measured, double threshold) {
    return add({std::move(name), measured, threshold, "<=", measured <= threshold});
  }
  const Check& ge(std::string name, double measured, double threshold) {
    return add({std::move(name), measured, threshold, ">=", measured >= threshold});
  }
  const Check& eq(std::string name, double measured, double threshold) {
    return add({std::move(name), measured, threshold, "==", measured == threshold});
  }

  bool all_passed() const {
    for (const Check& c : checks_)
      if (!c.passed) return false;
    return true;
  }
  const std::vector<Check>& items() const { return checks_; }

  /// First failed check as an exception, if any.
  std::optional<CheckFailed> first_failure() const {
    for (const Check& c : checks_)
      if (!c.passed) return CheckFailed(c.name, c.measured, c.threshold);
    return std::nullopt;
  }

 private:
  const Check& add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
  }
  std::vector<Check> checks_;
};

/// 64-bit FNV-1a digest, used to tie a manifest to the bytes of its table.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// A finite double for JSON: NaN and Inf become null rather than invalid JSON.
inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RunManifest {
  std::string subcommand;
  json params = json::object();
  double duration_seconds = 0.0;
  std::vector<Check> checks;
  std::string data_file;
  std::string data_hash;
  std::string timestamp;
  unsigned threads = 1;
  int exit_status = 0;

  json to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["version"] = std::string(kVersion);
    j["timestamp"] = timestamp;
    j["params"] = params;
    j["threads"] = threads;
    j["duration_seconds"] = duration_seconds;
    j["data_file"] = data_file;
    j["data_fnv1a64"] = data_hash;
    json cs = json::array();
    for (const Check& c : checks) {
      cs.push_back({{"name", c.name},
                    {"measured", json_number(c.measured)},
                    {"relation", c.relation},
                    {"threshold", json_number(c.threshold)},
                    {"passed", c.passed}});
    }
    j["checks"] = cs;
    bool all = true;
    for (const Check& c : checks) all = all && c.passed;
    j["all_passed"] = all;
    j["exit_status"] = exit_status;
    return j;
  }
};

/// UTC timestamp with millisecond resolution, e.g. 20261014T093000.123Z.
inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t s = std::chrono::system_clock::to_time_t(t);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&s, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

/// `<sub>-<timestamp>.csv` and `.manifest.json` under dir; a numeric suffix
/// is appended to the timestamp if a file of that name already exists.
inline OutputPaths output_paths(const std::filesystem::path& dir, const std::string& sub,
                                const std::string& timestamp) {
  for (int n = 0;; ++n) {
    const std::string stem = sub + "-" + timestamp + (n ? "-" + std::to_string(n) : "");
    OutputPaths p{dir / (stem + ".csv"), dir / (stem + ".manifest.json")};
    if (!std::filesystem::exists(p.csv) && !std::filesystem::exists(p.manifest)) return p;
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace helios
