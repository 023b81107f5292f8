#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polykin/fluid.hpp"
#include "polykin/gas.hpp"
#include "polykin/macro.hpp"

#include "json.hpp"

namespace polykin {

inline constexpr const char* kVersion = "1.0.0";

// Full run description parsed from one JSON config file.  Every key has a
// default except `task`; unknown keys anywhere are rejected so typos cannot
// silently fall back to defaults.
struct RunConfig {
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  bool c_s_overridden = false;  // gas.c_s taken verbatim from the file
                                // (fault-injection knob, skips the tie check)
  MacroState state{1.0, {0.0, 0.0, 0.0}, 1.25, 0.625};
  std::string task;  // coeffs | verify | relax | shock | riemann

  // numerics
  int n_c = 8;
  int n_i = 4;
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t seed = 2026;
  double entry_rel_budget = 0.5;
  int grid_cells = 400;
  double cfl = 0.4;
  double eps = 0.1;
  double kappa = 1.0;
  ScalingMode scaling_mode = ScalingMode::eps2;
  bool use_k = false;
  double mach = 2.0;
  double domain_half = 4.0;
  double steady_tol = 1e-6;
  double t_max = 60.0;
  double t_end = 4.0;
  int n_snapshots = 21;
  std::int64_t n_particles = 100'000;
  bool with_dsmc = true;

  // riemann block: piecewise-constant initial data on [x_left, x_right],
  // interface at the midpoint
  MacroState riemann_left{1.0, {0.0, 0.0, 0.0}, 1.0, 1.0};
  MacroState riemann_right{0.125, {0.0, 0.0, 0.0}, 0.8, 0.8};
  double x_left = 0.0;
  double x_right = 1.0;

  // output
  std::string out_dir;  // empty: resolved from --out / POLYKIN_OUT / "out"
  bool write_csv = true;
  bool write_json = true;
};

// Parses and validates; throws validation_error naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// Every field echoed back, fully resolved, in deterministic key order.
nlohmann::json resolved_json(const RunConfig& cfg);

// resolved config + code version; written next to every output set so any
// artifact can be regenerated from disk alone.
nlohmann::json manifest_json(const RunConfig& cfg);

// Deterministic shortest-round-trip formatting shared by all CSV output, so
// identical runs produce identical bytes.
std::string format_double(double v);
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace polykin
