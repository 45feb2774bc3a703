// Command-line driver: one subcommand per experiment pipeline. Each run writes
// <subcommand>-<timestamp>.csv and a matching .manifest.json under --out.
// Exit status: 0 all checks passed, 1 a check failed or a computation error
// occurred, 2 invalid configuration.

#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "helios/pipelines.hpp"
#include "helios/version.hpp"

namespace {

struct SubOptions {
  CLI::App* app = nullptr;
  std::string config;
  std::string out = "results";
  std::map<std::string, std::string> values;  // dotted key -> flag text
  std::map<std::string, CLI::Option*> options;
};

const char* kind_name(helios::ParamKind k) {
  switch (k) {
    case helios::ParamKind::real: return "REAL";
    case helios::ParamKind::integer: return "INT";
    case helios::ParamKind::text: return "TEXT";
    case helios::ParamKind::boolean: return "BOOL";
    case helios::ParamKind::real_list: return "REAL,...";
  }
  return "VALUE";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helios: high-frequency scattering experiments"};
  app.set_version_flag("--version", std::string(helios::kVersion));
  app.require_subcommand(1);

  std::map<std::string, std::unique_ptr<SubOptions>> subs;
  for (const helios::Subcommand& s : helios::subcommands()) {
    auto o = std::make_unique<SubOptions>();
    o->app = app.add_subcommand(s.name, s.description);
    o->app->add_option("--config", o->config, "JSON config file or a previous run manifest");
    o->app->add_option("--out", o->out, "output directory")->capture_default_str();
    for (const helios::ParamSpec& p : s.schema) {
      std::string help = p.help + " [" + p.key + "]";
      if (!p.default_value.is_null()) help += " (default " + p.default_value.dump() + ")";
      CLI::Option* opt = o->app->add_option("--" + p.flag, o->values[p.key], help);
      opt->type_name(kind_name(p.kind));
      o->options[p.key] = opt;
    }
    subs[s.name] = std::move(o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, o] : subs) {
    if (!o->app->parsed()) continue;
    std::map<std::string, helios::json> overrides;
    for (const auto& [key, opt] : o->options) {
      if (opt->count() > 0) overrides[key] = o->values[key];
    }
    helios::json file;
    try {
      if (!o->config.empty()) file = helios::load_config_file(o->config, name);
    } catch (const helios::ConfigError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
    const helios::RunOutcome r = helios::run_subcommand(name, file, overrides, o->out);
    if (r.wrote_files) {
      std::printf("%s\n%s\n", r.paths.csv.string().c_str(), r.paths.manifest.string().c_str());
      for (const helios::Check& c : r.manifest.checks) {
        std::printf("%s %s %s %s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    helios::format_number(c.measured).c_str(), c.relation.c_str(),
                    helios::format_number(c.threshold).c_str());
      }
    }
    if (!r.message.empty()) std::fprintf(stderr, "error: %s\n", r.message.c_str());
    return r.exit_status;
  }
  return 2;
}
