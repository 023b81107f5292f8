#include "polykin/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "polykin/common.hpp"

namespace polykin {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& block,
                    const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw validation_error("config: block '" + block + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw validation_error("config: unknown key '" + block + "." + it.key() +
                             "'");
}

double get_num(const json& j, const std::string& where) {
  if (!j.is_number())
    throw validation_error("config: '" + where + "' must be a number");
  return j.get<double>();
}

void opt_num(const json& j, const std::string& block, const char* key,
             double& target) {
  if (j.contains(key)) target = get_num(j.at(key), block + "." + key);
}

void opt_int(const json& j, const std::string& block, const char* key,
             int& target) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw validation_error("config: '" + block + "." + key +
                           "' must be an integer");
  target = v.get<int>();
}

void opt_i64(const json& j, const std::string& block, const char* key,
             std::int64_t& target) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw validation_error("config: '" + block + "." + key +
                           "' must be an integer");
  target = v.get<std::int64_t>();
}

void opt_bool(const json& j, const std::string& block, const char* key,
              bool& target) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean())
    throw validation_error("config: '" + block + "." + key +
                           "' must be a boolean");
  target = v.get<bool>();
}

Vec3 parse_velocity(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0, 0.0};
  if (v.is_array() && v.size() == 3) {
    Vec3 u{};
    for (int k = 0; k < 3; ++k) u[k] = get_num(v.at(k), where);
    return u;
  }
  throw validation_error("config: '" + where +
                         "' must be a number or an array of 3");
}

MacroState parse_state_block(const json& j, const std::string& block,
                             const MacroState& defaults) {
  reject_unknown(j, block, {"rho", "u", "t_tr", "t_int"});
  MacroState s = defaults;
  opt_num(j, block, "rho", s.rho);
  if (j.contains("u")) s.u = parse_velocity(j.at("u"), block + ".u");
  opt_num(j, block, "t_tr", s.t_tr);
  opt_num(j, block, "t_int", s.t_int);
  validate(s);
  return s;
}

const std::set<std::string> kTasks = {"coeffs", "verify", "relax", "shock",
                                      "riemann"};

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  reject_unknown(j, "<top>",
                 {"task", "gas", "state", "numerics", "riemann", "output"});

  if (j.contains("task")) {
    if (!j.at("task").is_string())
      throw validation_error("config: 'task' must be a string");
    cfg.task = j.at("task").get<std::string>();
    if (!kTasks.count(cfg.task))
      throw validation_error("config: unknown task '" + cfg.task + "'");
  }

  if (j.contains("gas")) {
    const json& g = j.at("gas");
    reject_unknown(g, "gas", {"delta", "alpha", "beta", "c_r", "c_s", "theta"});
    double delta = cfg.gas.delta, alpha = cfg.gas.alpha, beta = cfg.gas.beta;
    double c_r = cfg.gas.c_r, theta = cfg.gas.theta;
    opt_num(g, "gas", "delta", delta);
    opt_num(g, "gas", "alpha", alpha);
    opt_num(g, "gas", "beta", beta);
    opt_num(g, "gas", "c_r", c_r);
    opt_num(g, "gas", "theta", theta);
    cfg.gas = make_gas(delta, alpha, beta, c_r, theta);
    if (g.contains("c_s")) {
      // Verbatim override, bypassing the derived tie.  Exists so a broken
      // kernel-constant pair can be injected to prove the frequency-identity
      // check catches it.
      cfg.gas.c_s = get_num(g.at("c_s"), "gas.c_s");
      cfg.c_s_overridden = true;
    }
  }

  if (j.contains("state"))
    cfg.state = parse_state_block(j.at("state"), "state", cfg.state);

  if (j.contains("numerics")) {
    const json& n = j.at("numerics");
    reject_unknown(
        n, "numerics",
        {"n_c",        "n_i",         "mc_samples", "seed",
         "entry_rel_budget", "grid_cells", "cfl",        "eps",
         "kappa",      "scaling_mode", "use_k",      "mach",
         "domain_half", "steady_tol",  "t_max",      "t_end",
         "n_snapshots", "n_particles", "with_dsmc"});
    opt_int(n, "numerics", "n_c", cfg.n_c);
    opt_int(n, "numerics", "n_i", cfg.n_i);
    opt_i64(n, "numerics", "mc_samples", cfg.mc_samples);
    if (n.contains("seed")) {
      const json& v = n.at("seed");
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw validation_error(
            "config: 'numerics.seed' must be a nonnegative integer");
      cfg.seed = v.get<std::uint64_t>();
    }
    opt_num(n, "numerics", "entry_rel_budget", cfg.entry_rel_budget);
    opt_int(n, "numerics", "grid_cells", cfg.grid_cells);
    opt_num(n, "numerics", "cfl", cfg.cfl);
    opt_num(n, "numerics", "eps", cfg.eps);
    opt_num(n, "numerics", "kappa", cfg.kappa);
    if (n.contains("scaling_mode")) {
      const json& v = n.at("scaling_mode");
      std::string m = v.is_string() ? v.get<std::string>() : "";
      if (m == "eps2")
        cfg.scaling_mode = ScalingMode::eps2;
      else if (m == "eps1")
        cfg.scaling_mode = ScalingMode::eps1;
      else
        throw validation_error(
            "config: 'numerics.scaling_mode' must be \"eps2\" or \"eps1\"");
    }
    opt_bool(n, "numerics", "use_k", cfg.use_k);
    opt_num(n, "numerics", "mach", cfg.mach);
    opt_num(n, "numerics", "domain_half", cfg.domain_half);
    opt_num(n, "numerics", "steady_tol", cfg.steady_tol);
    opt_num(n, "numerics", "t_max", cfg.t_max);
    opt_num(n, "numerics", "t_end", cfg.t_end);
    opt_int(n, "numerics", "n_snapshots", cfg.n_snapshots);
    opt_i64(n, "numerics", "n_particles", cfg.n_particles);
    opt_bool(n, "numerics", "with_dsmc", cfg.with_dsmc);
  }

  if (j.contains("riemann")) {
    const json& r = j.at("riemann");
    reject_unknown(r, "riemann", {"left", "right", "x_left", "x_right"});
    if (r.contains("left"))
      cfg.riemann_left =
          parse_state_block(r.at("left"), "riemann.left", cfg.riemann_left);
    if (r.contains("right"))
      cfg.riemann_right =
          parse_state_block(r.at("right"), "riemann.right", cfg.riemann_right);
    opt_num(r, "riemann", "x_left", cfg.x_left);
    opt_num(r, "riemann", "x_right", cfg.x_right);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"directory", "csv", "json"});
    if (o.contains("directory")) {
      if (!o.at("directory").is_string())
        throw validation_error("config: 'output.directory' must be a string");
      cfg.out_dir = o.at("directory").get<std::string>();
    }
    opt_bool(o, "output", "csv", cfg.write_csv);
    opt_bool(o, "output", "json", cfg.write_json);
  }

  if (cfg.n_c < 1 || cfg.n_c > 64 || cfg.n_i < 1 || cfg.n_i > 64)
    throw validation_error("config: basis sizes must lie in [1, 64]");
  if (cfg.mc_samples < 1000)
    throw validation_error("config: 'numerics.mc_samples' must be >= 1000");
  if (cfg.entry_rel_budget <= 0.0)
    throw validation_error("config: 'numerics.entry_rel_budget' must be > 0");
  if (cfg.grid_cells < 3 || cfg.grid_cells > 2'000'000)
    throw validation_error("config: 'numerics.grid_cells' out of range");
  if (!(cfg.cfl > 0.0) || cfg.cfl > 0.9)
    throw validation_error("config: 'numerics.cfl' must lie in (0, 0.9]");
  if (cfg.eps < 0.0 || cfg.kappa < 0.0)
    throw validation_error("config: 'numerics.eps'/'kappa' must be >= 0");
  if (!(cfg.mach > 0.0))
    throw validation_error("config: 'numerics.mach' must be > 0");
  if (!(cfg.domain_half > 0.0))
    throw validation_error("config: 'numerics.domain_half' must be > 0");
  if (!(cfg.steady_tol > 0.0))
    throw validation_error("config: 'numerics.steady_tol' must be > 0");
  if (!(cfg.t_max > 0.0) || !(cfg.t_end > 0.0))
    throw validation_error("config: time horizons must be > 0");
  if (cfg.n_snapshots < 2 || cfg.n_snapshots > 100000)
    throw validation_error("config: 'numerics.n_snapshots' out of range");
  if (cfg.n_particles < 100)
    throw validation_error("config: 'numerics.n_particles' must be >= 100");
  if (!(cfg.x_left < cfg.x_right))
    throw validation_error("config: riemann domain needs x_left < x_right");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("config: JSON parse failed: ") +
                           e.what());
  }
  return parse_config(j);
}

nlohmann::json resolved_json(const RunConfig& cfg) {
  json j;
  j["task"] = cfg.task;
  j["gas"] = {{"delta", cfg.gas.delta},   {"alpha", cfg.gas.alpha},
              {"beta", cfg.gas.beta},     {"c_r", cfg.gas.c_r},
              {"c_s", cfg.gas.c_s},       {"theta", cfg.gas.theta}};
  j["state"] = {{"rho", cfg.state.rho},
                {"u", {cfg.state.u[0], cfg.state.u[1], cfg.state.u[2]}},
                {"t_tr", cfg.state.t_tr},
                {"t_int", cfg.state.t_int}};
  j["numerics"] = {
      {"n_c", cfg.n_c},
      {"n_i", cfg.n_i},
      {"mc_samples", cfg.mc_samples},
      {"seed", cfg.seed},
      {"entry_rel_budget", cfg.entry_rel_budget},
      {"grid_cells", cfg.grid_cells},
      {"cfl", cfg.cfl},
      {"eps", cfg.eps},
      {"kappa", cfg.kappa},
      {"scaling_mode", cfg.scaling_mode == ScalingMode::eps2 ? "eps2" : "eps1"},
      {"use_k", cfg.use_k},
      {"mach", cfg.mach},
      {"domain_half", cfg.domain_half},
      {"steady_tol", cfg.steady_tol},
      {"t_max", cfg.t_max},
      {"t_end", cfg.t_end},
      {"n_snapshots", cfg.n_snapshots},
      {"n_particles", cfg.n_particles},
      {"with_dsmc", cfg.with_dsmc}};
  auto state_obj = [](const MacroState& s) {
    return json{{"rho", s.rho},
                {"u", {s.u[0], s.u[1], s.u[2]}},
                {"t_tr", s.t_tr},
                {"t_int", s.t_int}};
  };
  j["riemann"] = {{"left", state_obj(cfg.riemann_left)},
                  {"right", state_obj(cfg.riemann_right)},
                  {"x_left", cfg.x_left},
                  {"x_right", cfg.x_right}};
  j["output"] = {{"directory", cfg.out_dir},
                 {"csv", cfg.write_csv},
                 {"json", cfg.write_json}};
  return j;
}

nlohmann::json manifest_json(const RunConfig& cfg) {
  json j;
  j["version"] = kVersion;
  j["config"] = resolved_json(cfg);
  return j;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out << ',';
    out << header[k];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw validation_error("csv: row width does not match header");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << format_double(row[k]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("output: cannot write '" + path + "'");
  f << text;
}

}  // namespace polykin
