#pragma once

// Parameter schemas and resolution. Values come from schema defaults, then an
// optional JSON file (nested sections or dotted keys, or a run manifest whose
// "params" section is reused), then command-line overrides. Every value is
// validated against its schema entry; failures raise ConfigError naming the
// offending key path.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "helios/errors.hpp"
#include "helios/report.hpp"

namespace helios {

enum class ParamKind { real, integer, text, boolean, real_list };

struct ParamSpec {
  std::string key;   // dotted path, e.g. "grid.kmin"
  std::string flag;  // long option name without dashes, e.g. "kmin"
  ParamKind kind = ParamKind::real;
  json default_value;  // null means derived by the pipeline
  std::string help;
  std::optional<double> min{};
  std::optional<double> max{};
  bool min_exclusive = false;
  std::vector<std::string> choices{};
};

using Schema = std::vector<ParamSpec>;

/// Flattens nested objects into dotted keys; arrays and scalars are leaves.
inline void flatten_json(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out[prefix] = j;
  }
}

inline json unflatten_json(const std::map<std::string, json>& flat, const Schema& schema) {
  json out = json::object();
  for (const ParamSpec& p : schema) {
    json* node = &out;
    std::string rest = p.key;
    for (std::size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1)) {
      node = &(*node)[rest.substr(0, dot)];
    }
    (*node)[rest] = flat.at(p.key);
  }
  return out;
}

namespace detail {

inline double parse_real(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + s + "' is not a number");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ConfigError(key + ": '" + s + "' is not a number");
  return v;
}

inline json coerce(const ParamSpec& p, const json& v) {
  const std::string& key = p.key;
  switch (p.kind) {
    case ParamKind::real:
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_real(key, v.get<std::string>());
      break;
    case ParamKind::integer:
      if (v.is_number_integer()) return v.get<long long>();
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
      if (v.is_string()) {
        const double d = parse_real(key, v.get<std::string>());
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
        throw ConfigError(key + ": '" + v.get<std::string>() + "' is not an integer");
      }
      break;
    case ParamKind::text:
      if (v.is_string()) return v;
      break;
    case ParamKind::boolean:
      if (v.is_boolean()) return v;
      if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw ConfigError(key + ": '" + s + "' is not a boolean");
      }
      break;
    case ParamKind::real_list: {
      json arr = json::array();
      if (v.is_array()) {
        for (const json& e : v) {
          if (e.is_number()) arr.push_back(e.get<double>());
          else if (e.is_string()) arr.push_back(parse_real(key, e.get<std::string>()));
          else throw ConfigError(key + ": list entries must be numbers");
        }
        return arr;
      }
      if (v.is_number()) {
        arr.push_back(v.get<double>());
        return arr;
      }
      if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) arr.push_back(parse_real(key, item));
        return arr;
      }
      break;
    }
  }
  throw ConfigError(key + ": value " + v.dump() + " has the wrong type");
}

inline void check_range(const ParamSpec& p, double v) {
  if (!std::isfinite(v)) throw ConfigError(p.key + ": value must be finite");
  if (p.min && (p.min_exclusive ? !(v > *p.min) : !(v >= *p.min))) {
    throw ConfigError(p.key + ": value " + format_number(v) + " must be " + (p.min_exclusive ? "> " : ">= ") +
                      format_number(*p.min));
  }
  if (p.max && !(v <= *p.max)) {
    throw ConfigError(p.key + ": value " + format_number(v) + " must be <= " + format_number(*p.max));
  }
}

inline json validate(const ParamSpec& p, const json& raw) {
  if (raw.is_null()) return raw;
  json v = coerce(p, raw);
  switch (p.kind) {
    case ParamKind::real:
    case ParamKind::integer:
      check_range(p, v.get<double>());
      break;
    case ParamKind::real_list:
      if (v.empty()) throw ConfigError(p.key + ": list must not be empty");
      for (const json& e : v) check_range(p, e.get<double>());
      break;
    case ParamKind::text:
      if (!p.choices.empty() &&
          std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) == p.choices.end()) {
        std::string all;
        for (const std::string& c : p.choices) all += (all.empty() ? "" : ", ") + c;
        throw ConfigError(p.key + ": '" + v.get<std::string>() + "' is not one of {" + all + "}");
      }
      break;
    case ParamKind::boolean:
      break;
  }
  return v;
}

}  // namespace detail

/// Reads a config file. A run manifest contributes its "params" section and
/// must belong to the same subcommand.
inline json load_config_file(const std::string& path, const std::string& subcommand) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
  if (j.contains("params") && j.contains("subcommand")) {
    if (j["subcommand"] != subcommand) {
      throw ConfigError(path + ": manifest belongs to subcommand '" + j["subcommand"].get<std::string>() + "'");
    }
    return j["params"];
  }
  return j;
}

/// Resolved, validated parameters keyed by dotted path.
class Params {
 public:
  Params() = default;
  Params(const Schema& schema, std::map<std::string, json> values) : schema_(schema), values_(std::move(values)) {}

  bool is_set(const std::string& key) const { return !at(key).is_null(); }
  double real(const std::string& key) const { return at(key).get<double>(); }
  long long integer(const std::string& key) const { return at(key).get<long long>(); }
  std::string text(const std::string& key) const { return at(key).get<std::string>(); }
  bool boolean(const std::string& key) const { return at(key).get<bool>(); }
  std::vector<double> reals(const std::string& key) const { return at(key).get<std::vector<double>>(); }

  /// Fills a derived (null) parameter so the manifest stays self-contained.
  void derive(const std::string& key, json value) {
    const ParamSpec& p = spec(key);
    if (at(key).is_null()) values_[key] = detail::validate(p, value);
  }

  json nested() const { return unflatten_json(values_, schema_); }

 private:
  const json& at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("internal: parameter '" + key + "' is not in the schema");
    return it->second;
  }
  const ParamSpec& spec(const std::string& key) const {
    for (const ParamSpec& p : schema_)
      if (p.key == key) return p;
    throw ConfigError("internal: parameter '" + key + "' is not in the schema");
  }

  Schema schema_;
  std::map<std::string, json> values_;
};

/// Defaults, then file values, then overrides (flag values keyed by dotted
/// path). Unknown keys in the file raise ConfigError.
inline Params resolve_params(const Schema& schema, const json& file, const std::map<std::string, json>& overrides) {
  std::map<std::string, json> values;
  for (const ParamSpec& p : schema) values[p.key] = p.default_value;
  if (!file.is_null()) {
    std::map<std::string, json> flat;
    flatten_json(file, "", flat);
    for (const auto& [key, v] : flat) {
      if (!values.count(key)) throw ConfigError(key + ": unknown key");
      values[key] = v;
    }
  }
  for (const auto& [key, v] : overrides) {
    if (!values.count(key)) throw ConfigError(key + ": unknown key");
    values[key] = v;
  }
  for (const ParamSpec& p : schema) values[p.key] = detail::validate(p, values[p.key]);
  return Params(schema, std::move(values));
}

}  // namespace helios
