#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <unistd.h>

#include "helios/pipelines.hpp"

using namespace helios;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("helios-test-" + std::to_string(::getpid()) + "-" + tag)) {
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string header_of(const fs::path& csv) {
  const std::string t = read_text(csv);
  return t.substr(0, t.find("\r\n"));
}

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    const std::string s = format_number(v);
    EXPECT_EQ(std::stod(s), v) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Csv, Rfc4180Quoting) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, TableRendering) {
  CsvTable t({"k", "label", "flag", "n", "maybe"});
  t.add_row({1.5, std::string("x,y"), true, 7LL, CsvCell()});
  EXPECT_EQ(t.str(), "k,label,flag,n,maybe\r\n1.5,\"x,y\",true,7,\r\n");
  EXPECT_THROW(t.add_row({1.0}), ArgumentError);
}

TEST(Csv, NonFiniteValuesAreRejected) {
  CsvTable t({"k", "sigma"});
  t.add_row({1.0, 2.0});
  EXPECT_NO_THROW(t.require_finite());
  t.add_row({2.0, std::numeric_limits<double>::quiet_NaN()});
  try {
    t.require_finite();
    FAIL() << "expected CheckFailed";
  } catch (const CheckFailed& e) {
    EXPECT_EQ(e.check(), "finite:sigma");
  }
  CsvTable u({"v"});
  u.add_row({std::numeric_limits<double>::infinity()});
  EXPECT_THROW(u.require_finite(), CheckFailed);
}

TEST(Checks, RelationsAndFirstFailure) {
  CheckList c;
  EXPECT_TRUE(c.le("a", 1.0, 2.0).passed);
  EXPECT_FALSE(c.ge("b", 1.0, 2.0).passed);
  EXPECT_TRUE(c.eq("c", 3.0, 3.0).passed);
  EXPECT_FALSE(c.le("d", std::numeric_limits<double>::quiet_NaN(), 1.0).passed);
  EXPECT_FALSE(c.all_passed());
  ASSERT_TRUE(c.first_failure().has_value());
  EXPECT_EQ(c.first_failure()->check(), "b");
}

TEST(Checks, ManifestJsonIsWellFormed) {
  RunManifest m;
  m.subcommand = "mie";
  m.checks = {{"x", std::numeric_limits<double>::infinity(), 1.0, "<=", false}};
  const json j = json::parse(m.to_json().dump());
  EXPECT_TRUE(j["checks"][0]["measured"].is_null());
  EXPECT_FALSE(j["all_passed"].get<bool>());
  EXPECT_EQ(j["version"], std::string(kVersion));
}

TEST(Config, PrecedenceDefaultsFileFlags) {
  const Schema& s = find_subcommand("mie").schema;
  const Params d = resolve_params(s, nullptr, {});
  EXPECT_EQ(d.real("grid.kmin"), 1.0);
  EXPECT_EQ(d.integer("grid.nk"), 200);
  const json file = json::parse(R"({"grid": {"kmin": 3, "nk": 50}, "obstacle.bc": "neumann"})");
  const Params f = resolve_params(s, file, {});
  EXPECT_EQ(f.real("grid.kmin"), 3.0);
  EXPECT_EQ(f.integer("grid.nk"), 50);
  EXPECT_EQ(f.text("obstacle.bc"), "neumann");
  const Params o = resolve_params(s, file, {{"grid.kmin", "4.5"}});
  EXPECT_EQ(o.real("grid.kmin"), 4.5);
  EXPECT_EQ(o.integer("grid.nk"), 50);
}

TEST(Config, ErrorsNameTheOffendingPath) {
  const Schema& s = find_subcommand("mie").schema;
  auto message = [&](const json& file, std::map<std::string, json> flags) {
    try {
      resolve_params(s, file, flags);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(json::parse(R"({"grid": {"kmiin": 3}})"), {}).find("grid.kmiin"), std::string::npos);
  EXPECT_NE(message(nullptr, {{"obstacle.radius", "-2"}}).find("obstacle.radius"), std::string::npos);
  EXPECT_NE(message(nullptr, {{"grid.nk", "2.5"}}).find("grid.nk"), std::string::npos);
  EXPECT_NE(message(nullptr, {{"obstacle.bc", "robin"}}).find("obstacle.bc"), std::string::npos);
  EXPECT_NE(message(json::parse(R"({"grid": {"kmax": "abc"}})"), {}).find("grid.kmax"), std::string::npos);
  EXPECT_NE(message(nullptr, {{"grid.kmax", "inf"}}).find("grid.kmax"), std::string::npos);
}

TEST(Config, ListsAcceptTextAndArrays) {
  const Schema& s = find_subcommand("dtn-norms").schema;
  EXPECT_EQ(resolve_params(s, nullptr, {{"grid.k", "20,40"}}).reals("grid.k"), (std::vector<double>{20.0, 40.0}));
  EXPECT_EQ(resolve_params(s, json::parse(R"({"grid": {"k": [5, 6.5]}})"), {}).reals("grid.k"),
            (std::vector<double>{5.0, 6.5}));
  EXPECT_THROW(resolve_params(s, nullptr, {{"grid.k", "20,-1"}}), ConfigError);
}

TEST(Run, MieWritesTableAndManifest) {
  TempDir dir("mie");
  const RunOutcome r = run_subcommand("mie", nullptr,
                                      {{"obstacle.radius", "1"}, {"obstacle.bc", "dirichlet"}, {"grid.kmin", "1"},
                                       {"grid.kmax", "100"}, {"grid.nk", "200"}},
                                      dir.path());
  ASSERT_EQ(r.exit_status, 0) << r.message;
  EXPECT_EQ(header_of(r.paths.csv), "k,sigma,sigma_over_2theta,optical_residual");
  const std::string name = r.paths.csv.filename().string();
  EXPECT_EQ(name.rfind("mie-", 0), 0u);
  EXPECT_EQ(r.paths.manifest.filename().string(), name.substr(0, name.size() - 4) + ".manifest.json");
  const auto rows = parse_csv(read_text(r.paths.csv));
  EXPECT_EQ(rows.size(), 201u);
  const json m = json::parse(read_text(r.paths.manifest));
  EXPECT_EQ(m["subcommand"], "mie");
  EXPECT_EQ(m["data_file"], name);
  EXPECT_EQ(m["data_fnv1a64"], hex64(fnv1a64(read_text(r.paths.csv))));
  EXPECT_EQ(m["params"]["grid"]["nk"], 200);
  EXPECT_TRUE(m["all_passed"].get<bool>());
  EXPECT_GE(m["duration_seconds"].get<double>(), 0.0);
  EXPECT_FALSE(m["checks"].empty());
  EXPECT_EQ(file_count(dir.path()), 2u);
}

TEST(Run, ManifestReproducesBytes) {
  TempDir dir("repro");
  for (const std::string sub : {"mie", "ap-eikonal", "window-average", "dtn-norms"}) {
    std::map<std::string, json> flags;
    if (sub == "mie") flags = {{"grid.nk", "37"}, {"obstacle.bc", "neumann"}};
    if (sub == "window-average") flags = {{"grid.kmax", "40"}, {"grid.nk", "201"}};
    const RunOutcome a = run_subcommand(sub, nullptr, flags, dir.path() / "a");
    ASSERT_EQ(a.exit_status, 0) << sub << ": " << a.message;
    const json file = load_config_file(a.paths.manifest.string(), sub);
    const RunOutcome b = run_subcommand(sub, file, {}, dir.path() / "b");
    ASSERT_EQ(b.exit_status, 0) << sub << ": " << b.message;
    EXPECT_EQ(read_text(a.paths.csv), read_text(b.paths.csv)) << sub;
    EXPECT_EQ(a.manifest.params, b.manifest.params) << sub;
  }
  EXPECT_THROW(load_config_file(fs::directory_iterator(dir.path() / "a")->path().string(), "no-such"), ConfigError);
}

TEST(Run, DerivedApertureIsRecorded) {
  TempDir dir("derived");
  const RunOutcome r = run_subcommand("xsect-bound", nullptr, {{"grid.k", "6"}, {"obstacle.radius", "0.5"}}, dir.path());
  ASSERT_EQ(r.exit_status, 0) << r.message;
  EXPECT_EQ(r.manifest.params["aperture"]["side"], 4.0);
  EXPECT_EQ(r.manifest.params["aperture"]["delta"], 0.5);
  EXPECT_EQ(header_of(r.paths.csv),
            "k,sigma_u0,norm_phi_out,norm_phi_in,eta_mass,bound_slack,balance_residual,balance_sign,"
            "balance_residual_other,identity_residual,consistency_residual,v_boundary_norm,sigma_v");
}

TEST(Run, DtnNormsSlopesOnLastRow) {
  TempDir dir("dtn");
  const RunOutcome r = run_subcommand("dtn-norms", nullptr, {{"obstacle.radius", "1"}, {"grid.k", "20,40,80,160"}}, dir.path());
  ASSERT_EQ(r.exit_status, 0) << r.message;
  const auto rows = parse_csv(read_text(r.paths.csv));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(header_of(r.paths.csv), "k,norm_D,norm_Dinv,slope_D,slope_Dinv");
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(rows[i][3], "");
    EXPECT_EQ(rows[i][4], "");
  }
  EXPECT_LE(std::stod(rows[4][3]), 1.1);
  EXPECT_LE(std::stod(rows[4][4]), 3.1);
}

TEST(Run, EikonalResonantRows) {
  TempDir dir("eik");
  const RunOutcome r =
      run_subcommand("ap-eikonal", nullptr, {{"eikonal.k0", "0"}, {"grid.kmin", "5"}, {"grid.kmax", "60"}, {"grid.nk", "1200"}}, dir.path());
  ASSERT_EQ(r.exit_status, 0) << r.message;
  EXPECT_EQ(header_of(r.paths.csv), "k,delta,sigma,is_resonant,is_invisible");
  const auto rows = parse_csv(read_text(r.paths.csv));
  int resonant = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][3] == "true") {
      ++resonant;
      EXPECT_NEAR(std::stod(rows[i][2]), 2.0, 1e-12);
    }
  }
  EXPECT_EQ(resonant, 4);
}

TEST(Run, FailedCheckExitsOneAndStillWrites) {
  TempDir dir("fail");
  const RunOutcome r = run_subcommand("window-average", nullptr,
                                      {{"grid.kmax", "40"}, {"grid.nk", "201"}, {"window.bound_factor", "0.1"}}, dir.path());
  EXPECT_EQ(r.exit_status, 1);
  EXPECT_TRUE(r.wrote_files);
  EXPECT_NE(r.message.find("averaged_bound"), std::string::npos);
  const json m = json::parse(read_text(r.paths.manifest));
  EXPECT_FALSE(m["all_passed"].get<bool>());
  EXPECT_EQ(m["exit_status"], 1);
  const auto rows = parse_csv(read_text(r.paths.csv));
  EXPECT_EQ(rows[1][2], "");  // window exits the grid at the first point
}

TEST(Run, ConfigErrorsExitTwoWithoutFiles) {
  TempDir dir("cfg");
  EXPECT_EQ(run_subcommand("mie", nullptr, {{"obstacle.radius", "-1"}}, dir.path()).exit_status, 2);
  EXPECT_EQ(run_subcommand("mie", json::parse(R"({"nope": 1})"), {}, dir.path()).exit_status, 2);
  EXPECT_EQ(run_subcommand("no-such", nullptr, {}, dir.path()).exit_status, 2);
  EXPECT_EQ(run_subcommand("window-average", nullptr, {{"grid.nk", "20"}}, dir.path()).exit_status, 2);
  EXPECT_EQ(run_subcommand("phi-check", nullptr, {{"compact.half", "3.5"}}, dir.path()).exit_status, 2);
  EXPECT_EQ(file_count(dir.path()), 0u);
}

TEST(Run, ThreadCountDoesNotChangeOutput) {
  TempDir dir("threads");
  ::setenv("HELIOS_THREADS", "1", 1);
  const RunOutcome a = run_subcommand("mie", nullptr, {{"grid.nk", "64"}}, dir.path());
  ::setenv("HELIOS_THREADS", "3", 1);
  const RunOutcome b = run_subcommand("mie", nullptr, {{"grid.nk", "64"}}, dir.path());
  EXPECT_EQ(b.manifest.threads, 3u);
  ::setenv("HELIOS_THREADS", "many", 1);
  const RunOutcome c = run_subcommand("mie", nullptr, {{"grid.nk", "64"}}, dir.path());
  ::unsetenv("HELIOS_THREADS");
  ASSERT_EQ(a.exit_status, 0);
  ASSERT_EQ(b.exit_status, 0);
  EXPECT_EQ(c.exit_status, 2);
  EXPECT_EQ(read_text(a.paths.csv), read_text(b.paths.csv));
  EXPECT_NE(a.paths.csv, b.paths.csv);
}

TEST(Slope, ExactPowerLaw) {
  const std::vector<double> x{20, 40, 80, 160};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-12);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), ArgumentError);
  EXPECT_THROW(loglog_slope({1.0, 2.0}, {1.0, -1.0}), ArgumentError);
}
