#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polykin/acceptance.hpp"
#include "polykin/common.hpp"
#include "polykin/config.hpp"

using namespace polykin;
using nlohmann::json;
using Catch::Matchers::ContainsSubstring;

namespace fs = std::filesystem;

namespace {

// Exit code of the installed binary run with the given argument string.
int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + POLYKIN_BIN + "\" " + args +
                    " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_tmp_config(const std::string& name, const json& j) {
  fs::create_directories("cli_tmp");
  std::string path = "cli_tmp/" + name;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

// Parses a CSV produced by the driver into header + numeric rows.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const std::string& path) {
  Csv c;
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) c.header.push_back(tok);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream rs(line);
    std::vector<double> row;
    while (std::getline(rs, tok, ',')) row.push_back(std::stod(tok));
    REQUIRE(row.size() == c.header.size());
    c.rows.push_back(row);
  }
  return c;
}

}  // namespace

TEST_CASE("config: defaults from an empty document", "[cli]") {
  RunConfig cfg = parse_config(json::object());
  CHECK(cfg.task.empty());
  CHECK(cfg.gas.delta == 2.0);
  CHECK(cfg.gas.alpha == 0.0);
  CHECK(cfg.gas.beta == 0.0);
  CHECK(cfg.gas.c_r == 1.0);
  // c_s is tied to c_r: Gamma(delta + alpha + (beta+3)/2) /
  // (Gamma((beta+3)/2) Gamma(delta + alpha)) = Gamma(3.5)/Gamma(1.5)/1 = 3.75
  CHECK(cfg.gas.c_s == Catch::Approx(3.75).epsilon(1e-12));
  CHECK_FALSE(cfg.c_s_overridden);
  CHECK(cfg.gas.theta == 0.5);
  CHECK(cfg.state.rho == 1.0);
  CHECK(cfg.state.t_tr == 1.25);
  CHECK(cfg.state.t_int == 0.625);
  CHECK(cfg.n_c == 8);
  CHECK(cfg.n_i == 4);
  CHECK(cfg.mc_samples == 1'000'000);
  CHECK(cfg.seed == 2026);
  CHECK(cfg.scaling_mode == ScalingMode::eps2);
  CHECK(cfg.with_dsmc);
  CHECK(cfg.out_dir.empty());
  CHECK(cfg.write_csv);
  CHECK(cfg.write_json);
}

TEST_CASE("config: velocity accepts scalar or 3-array", "[cli]") {
  RunConfig a = parse_config({{"state", {{"u", 0.3}}}});
  CHECK(a.state.u[0] == 0.3);
  CHECK(a.state.u[1] == 0.0);
  CHECK(a.state.u[2] == 0.0);

  RunConfig b = parse_config({{"state", {{"u", {0.1, -0.2, 0.3}}}}});
  CHECK(b.state.u[0] == 0.1);
  CHECK(b.state.u[1] == -0.2);
  CHECK(b.state.u[2] == 0.3);

  CHECK_THROWS_AS(parse_config({{"state", {{"u", {0.1, 0.2}}}}}),
                  validation_error);
  CHECK_THROWS_AS(parse_config({{"state", {{"u", "fast"}}}}), validation_error);
}

TEST_CASE("config: unknown keys are rejected with their dotted path", "[cli]") {
  CHECK_THROWS_WITH(parse_config({{"frobnicate", 1}}),
                    ContainsSubstring("<top>.frobnicate"));
  CHECK_THROWS_WITH(parse_config({{"gas", {{"mass", 1.0}}}}),
                    ContainsSubstring("gas.mass"));
  CHECK_THROWS_WITH(parse_config({{"state", {{"T", 1.0}}}}),
                    ContainsSubstring("state.T"));
  CHECK_THROWS_WITH(parse_config({{"numerics", {{"cells", 4}}}}),
                    ContainsSubstring("numerics.cells"));
  CHECK_THROWS_WITH(parse_config({{"riemann", {{"mid", 0.5}}}}),
                    ContainsSubstring("riemann.mid"));
  CHECK_THROWS_WITH(
      parse_config({{"riemann", {{"left", {{"p", 1.0}}}}}}),
      ContainsSubstring("riemann.left.p"));
  CHECK_THROWS_WITH(parse_config({{"output", {{"dir", "x"}}}}),
                    ContainsSubstring("output.dir"));
}

TEST_CASE("config: type and range validation", "[cli]") {
  auto bad = [](const json& j) {
    CHECK_THROWS_AS(parse_config(j), validation_error);
  };
  bad({{"task", 3}});
  bad({{"task", "fly"}});
  bad({{"gas", {{"delta", 1.0}}}});            // needs delta >= 2
  bad({{"gas", {{"alpha", 1.2}}}});            // needs alpha < delta/2
  bad({{"gas", {{"beta", 1.5}}}});             // needs beta <= 1
  bad({{"gas", {{"theta", 1.5}}}});            // needs theta in [0, 1]
  bad({{"gas", {{"c_r", -1.0}}}});
  bad({{"gas", {{"delta", "two"}}}});
  bad({{"state", {{"rho", -1.0}}}});
  bad({{"state", {{"t_tr", 0.0}}}});
  bad({{"numerics", {{"seed", -5}}}});
  bad({{"numerics", {{"seed", 2.5}}}});
  bad({{"numerics", {{"mc_samples", 10}}}});
  bad({{"numerics", {{"n_c", 0}}}});
  bad({{"numerics", {{"n_c", 100}}}});
  bad({{"numerics", {{"cfl", 0.0}}}});
  bad({{"numerics", {{"cfl", 1.2}}}});
  bad({{"numerics", {{"scaling_mode", "both"}}}});
  bad({{"numerics", {{"grid_cells", 2}}}});
  bad({{"numerics", {{"n_snapshots", 1}}}});
  bad({{"numerics", {{"n_particles", 10}}}});
  bad({{"numerics", {{"mach", 0.0}}}});
  bad({{"riemann", {{"x_left", 2.0}, {"x_right", 1.0}}}});

  // theta endpoints are legal
  CHECK_NOTHROW(parse_config({{"gas", {{"theta", 0.0}}}}));
  CHECK_NOTHROW(parse_config({{"gas", {{"theta", 1.0}}}}));
}

TEST_CASE("config: kernel constant override is verbatim and flagged", "[cli]") {
  RunConfig cfg = parse_config({{"gas", {{"c_s", 2.5}}}});
  CHECK(cfg.c_s_overridden);
  CHECK(cfg.gas.c_s == 2.5);  // not the derived 3.75
}

TEST_CASE("config: resolved document round-trips", "[cli]") {
  json in = {
      {"task", "coeffs"},
      {"gas",
       {{"delta", 3.0}, {"alpha", 0.25}, {"beta", 0.5}, {"c_r", 0.7},
        {"theta", 0.3}}},
      {"state",
       {{"rho", 1.3}, {"u", {0.1, 0.2, 0.3}}, {"t_tr", 1.1}, {"t_int", 0.9}}},
      {"numerics",
       {{"n_c", 5}, {"n_i", 3}, {"mc_samples", 20000}, {"seed", 7},
        {"scaling_mode", "eps1"}, {"use_k", true}}},
      {"riemann",
       {{"left", {{"rho", 2.0}}}, {"right", {{"t_int", 0.5}}},
        {"x_left", -1.0}, {"x_right", 3.0}}},
      {"output", {{"directory", "somewhere"}, {"csv", false}}}};
  RunConfig cfg = parse_config(in);
  json j1 = resolved_json(cfg);
  RunConfig cfg2 = parse_config(j1);
  json j2 = resolved_json(cfg2);
  CHECK(j1 == j2);
  CHECK(j1.dump(2) == j2.dump(2));

  json man = manifest_json(cfg);
  CHECK(man["version"] == std::string(kVersion));
  CHECK(man["config"] == j1);
}

TEST_CASE("config: invalid json text reports a parse failure", "[cli]") {
  fs::create_directories("cli_tmp");
  {
    std::ofstream out("cli_tmp/broken.json");
    out << "{ not json";
  }
  CHECK_THROWS_WITH(load_config_file("cli_tmp/broken.json"),
                    ContainsSubstring("parse failed"));
  CHECK_THROWS_WITH(load_config_file("cli_tmp/missing.json"),
                    ContainsSubstring("cannot open"));
}

TEST_CASE("output: doubles format shortest and round-trip", "[cli]") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e300, 12345.6789,
                   5.386196751199698}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
}

TEST_CASE("output: csv writer is deterministic and checks widths", "[cli]") {
  fs::create_directories("cli_tmp");
  std::vector<std::string> header{"a", "b"};
  std::vector<std::vector<double>> rows{{1.0, 0.25}, {2.0, 1.0 / 3.0}};
  write_csv_file("cli_tmp/w1.csv", header, rows);
  write_csv_file("cli_tmp/w2.csv", header, rows);
  CHECK(slurp("cli_tmp/w1.csv") == slurp("cli_tmp/w2.csv"));
  CHECK(slurp("cli_tmp/w1.csv").substr(0, 4) == "a,b\n");
  CHECK_THROWS_AS(write_csv_file("cli_tmp/w3.csv", header, {{1.0}}),
                  validation_error);
}

TEST_CASE("verification: inelastic checks are skipped when theta is zero",
          "[cli]") {
  RunConfig cfg;
  cfg.gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.0);
  AcceptanceReport rep = run_acceptance(cfg, {4, 10, 12});
  REQUIRE(rep.checks.size() == 3);
  for (const auto& c : rep.checks) {
    CHECK(c.status == "SKIP");
    CHECK(c.margin == 0.0);
    CHECK_THAT(c.detail, ContainsSubstring("theta is zero"));
  }
  CHECK(rep.all_ok());  // skipped is not failed
}

TEST_CASE("verification: corrupted kernel constant fails the frequency check",
          "[cli]") {
  RunConfig good;
  RunConfig bad = good;
  bad.gas.c_s = 0.7 * bad.gas.c_s;  // break the derived tie
  bad.c_s_overridden = true;
  AcceptanceReport rep = run_acceptance(bad, {3});
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].status == "FAIL");
  CHECK(rep.checks[0].margin >= 1.0);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("verification: conservation and reversibility checks pass", "[cli]") {
  RunConfig cfg;
  AcceptanceReport rep = run_acceptance(cfg, {1, 2});
  REQUIRE(rep.checks.size() == 2);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.status == "PASS");
    CHECK(c.margin < 1.0);
    CHECK(c.seconds > 0.0);
  }
  json j = report_json(rep);
  CHECK(j["all_ok"] == true);
  REQUIRE(j["checks"].size() == 2);
  for (const auto& cj : j["checks"]) {
    CHECK(cj.contains("id"));
    CHECK(cj.contains("name"));
    CHECK(cj.contains("status"));
    CHECK(cj.contains("margin"));
    CHECK(cj.contains("detail"));
    CHECK(cj.contains("seconds"));
  }
  std::string line = format_check_line(rep.checks[0]);
  CHECK_THAT(line, ContainsSubstring("PASS"));
  CHECK_THAT(line, ContainsSubstring(rep.checks[0].name));
}

TEST_CASE("verification: report treats only FAIL as failure", "[cli]") {
  AcceptanceReport rep;
  rep.checks.push_back({1, "x", "PASS", 0.1, "", 0.0});
  rep.checks.push_back({2, "y", "SKIP", 0.0, "", 0.0});
  CHECK(rep.all_ok());
  rep.checks.push_back({3, "z", "FAIL", 2.0, "", 0.0});
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("driver: argument and config errors exit with code 2", "[cli]") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);                       // subcommand required
  CHECK(run_cli("coeffs") == 2);                 // --config required
  CHECK(run_cli("verify --config cli_tmp/definitely_missing.json") == 2);

  std::string bad = write_tmp_config("badkey.json", {{"frobnicate", 1}});
  CHECK(run_cli("relax --config " + bad) == 2);

  std::string mism = write_tmp_config("mismatch.json", {{"task", "coeffs"}});
  CHECK(run_cli("verify --config " + mism) == 2);
}

TEST_CASE("driver: riemann run writes profile and reruns byte-identical",
          "[cli]") {
  json cfg = {
      {"task", "riemann"},
      {"numerics",
       {{"grid_cells", 64}, {"t_end", 0.05}, {"eps", 0.1}, {"kappa", 1.0}}}};
  std::string path = write_tmp_config("riemann.json", cfg);
  REQUIRE(run_cli("riemann --config " + path + " --out cli_tmp/ra") == 0);
  REQUIRE(run_cli("riemann --config " + path + " --out cli_tmp/rb") == 0);

  CHECK(fs::exists("cli_tmp/ra/manifest.json"));
  Csv prof = read_csv("cli_tmp/ra/riemann.csv");
  REQUIRE(prof.header ==
          std::vector<std::string>{"x", "rho", "u", "T_tr", "T_int", "p",
                                   "q_tr", "q_int"});
  REQUIRE(prof.rows.size() == 64);
  // left half still denser than right half after a short time
  CHECK(prof.rows.front()[1] > prof.rows.back()[1]);
  for (const auto& r : prof.rows) CHECK(r[5] == Catch::Approx(r[1] * r[3]));

  CHECK(slurp("cli_tmp/ra/riemann.csv") == slurp("cli_tmp/rb/riemann.csv"));

  json man = json::parse(slurp("cli_tmp/ra/manifest.json"));
  CHECK(man["config"]["task"] == "riemann");
  CHECK(man["config"]["numerics"]["grid_cells"] == 64);
  CHECK(man["config"]["output"]["directory"] == "cli_tmp/ra");
}

TEST_CASE("driver: relax with theta zero holds both temperatures constant",
          "[cli]") {
  json cfg = {{"gas", {{"theta", 0.0}}},
              {"state", {{"t_tr", 1.4}, {"t_int", 0.7}}},
              {"numerics",
               {{"t_end", 0.5}, {"n_snapshots", 6}, {"n_particles", 2000}}}};
  std::string path = write_tmp_config("relax0.json", cfg);
  REQUIRE(run_cli("relax --config " + path + " --out cli_tmp/rx") == 0);

  Csv ode = read_csv("cli_tmp/rx/relax.csv");
  REQUIRE(ode.header ==
          std::vector<std::string>{"t", "rho", "ux", "uy", "uz", "T_tr",
                                   "T_int"});
  REQUIRE(ode.rows.size() == 6);
  for (const auto& r : ode.rows) {
    CHECK(r[5] == 1.4);
    CHECK(r[6] == 0.7);
  }

  // resonant-only collisions preserve kinetic and internal energy separately,
  // so the particle run holds both temperatures too
  Csv dsmc = read_csv("cli_tmp/rx/relax_dsmc.csv");
  REQUIRE(dsmc.rows.size() == 6);
  for (const auto& r : dsmc.rows) {
    CHECK(r[1] == Catch::Approx(dsmc.rows[0][1]).epsilon(1e-10));
    CHECK(r[2] == Catch::Approx(dsmc.rows[0][2]).epsilon(1e-10));
  }
  CHECK(fs::exists("cli_tmp/rx/relax_compare.csv"));
}

TEST_CASE("driver: coeffs reruns identical, seed changes output, tiny budget "
          "exits 3",
          "[cli]") {
  json cfg = {{"task", "coeffs"},
              {"gas", {{"alpha", 0.5}, {"beta", 0.5}}},
              {"state", {{"t_tr", 1.2}, {"t_int", 0.8}}},
              {"numerics",
               {{"n_c", 3}, {"n_i", 2}, {"mc_samples", 50000},
                {"entry_rel_budget", 8.0}}}};
  std::string path = write_tmp_config("coeffs.json", cfg);
  REQUIRE(run_cli("coeffs --config " + path + " --out cli_tmp/ca") == 0);
  REQUIRE(run_cli("coeffs --config " + path + " --out cli_tmp/cb") == 0);
  CHECK(slurp("cli_tmp/ca/coeffs.json") == slurp("cli_tmp/cb/coeffs.json"));
  CHECK(slurp("cli_tmp/ca/coeffs.csv") == slurp("cli_tmp/cb/coeffs.csv"));

  REQUIRE(run_cli("coeffs --config " + path +
                  " --seed 777 --out cli_tmp/cc") == 0);
  CHECK(slurp("cli_tmp/ca/coeffs.json") != slurp("cli_tmp/cc/coeffs.json"));

  json jc = json::parse(slurp("cli_tmp/ca/coeffs.json"));
  CHECK(jc["coefficients"]["lambda_mu"]["value"].get<double>() > 0.0);
  CHECK(jc["coefficients"]["f_relax"]["value"].get<double>() > 0.0);
  CHECK(jc["diagnostics"]["basis"]["n_c"] == 3);

  std::string cc = slurp("cli_tmp/ca/coeffs.csv");
  CHECK(cc.starts_with("name,value,std_error\n"));
  CHECK_THAT(cc, ContainsSubstring("\nlambda_mu,"));
  CHECK_THAT(cc, ContainsSubstring("\nf_relax,"));

  json tight = cfg;
  tight["numerics"]["mc_samples"] = 1000;
  tight["numerics"]["entry_rel_budget"] = 1e-6;
  std::string tp = write_tmp_config("coeffs_tight.json", tight);
  CHECK(run_cli("coeffs --config " + tp + " --out cli_tmp/cd") == 3);
}

TEST_CASE("driver: output directory falls back to the environment", "[cli]") {
  json cfg = {{"gas", {{"theta", 0.0}}},
              {"numerics",
               {{"t_end", 0.2}, {"n_snapshots", 3}, {"n_particles", 500},
                {"with_dsmc", false}}}};
  std::string path = write_tmp_config("envout.json", cfg);
  fs::remove_all("cli_tmp/envdir");
  std::string cmd = std::string("POLYKIN_OUT=cli_tmp/envdir \"") + POLYKIN_BIN +
                    "\" relax --config " + path + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(fs::exists("cli_tmp/envdir/manifest.json"));
  CHECK(fs::exists("cli_tmp/envdir/relax.csv"));
}
