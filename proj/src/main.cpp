#include <array>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "polykin/acceptance.hpp"
#include "polykin/chapman_enskog.hpp"
#include "polykin/common.hpp"
#include "polykin/config.hpp"
#include "polykin/fluid.hpp"
#include "polykin/particles.hpp"

namespace {

using namespace polykin;
using nlohmann::json;

std::string resolve_out_dir(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("POLYKIN_OUT"))
    if (*env) return env;
  return "out";
}

json estimate_entry(double value, double std_error) {
  return json{{"value", value}, {"std_error", std_error}};
}

// Temperature pair under pure homogeneous relaxation at the kinetic-level
// rate theta, integrated with classic fourth-order Runge-Kutta substeps fine
// enough that the result is exact to output precision.
std::vector<std::array<double, 2>> relax_ode_trajectory(const RunConfig& cfg) {
  const double theta = cfg.gas.theta;
  const double rho = cfg.state.rho;
  auto deriv = [&](const std::array<double, 2>& ts) {
    MacroState st = cfg.state;
    st.t_tr = ts[0];
    st.t_int = ts[1];
    double src = theta * relax_f(st, cfg.gas) * (ts[0] - ts[1]);
    return std::array<double, 2>{-2.0 * src / (3.0 * rho),
                                 2.0 * src / (cfg.gas.delta * rho)};
  };
  std::array<double, 2> ts{cfg.state.t_tr, cfg.state.t_int};
  std::vector<std::array<double, 2>> out{ts};
  double dt_out = cfg.t_end / (cfg.n_snapshots - 1);
  MacroState st0 = cfg.state;
  double gamma0 = theta * relax_f(st0, cfg.gas) *
                  (2.0 / (3.0 * rho) + 2.0 / (cfg.gas.delta * rho));
  int m = std::min(10000, std::max(20, static_cast<int>(50.0 * gamma0 * dt_out)));
  for (int k = 1; k < cfg.n_snapshots; ++k) {
    double h = dt_out / m;
    for (int s = 0; s < m; ++s) {
      auto k1 = deriv(ts);
      auto k2 = deriv({ts[0] + 0.5 * h * k1[0], ts[1] + 0.5 * h * k1[1]});
      auto k3 = deriv({ts[0] + 0.5 * h * k2[0], ts[1] + 0.5 * h * k2[1]});
      auto k4 = deriv({ts[0] + h * k3[0], ts[1] + h * k3[1]});
      ts[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      ts[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    out.push_back(ts);
  }
  return out;
}

// Coefficient source for the fluid commands: closed forms where they exist,
// otherwise a temperature table sampled from Galerkin solves.
CoefficientProvider make_provider(const RunConfig& cfg, double t_lo,
                                  double t_hi) {
  if (cfg.gas.alpha == 0.0 && cfg.gas.beta == 0.0)
    return CoefficientProvider::analytic_maxwell(cfg.gas);
  if (cfg.eps == 0.0 && cfg.kappa == 0.0) {
    // Neither diffusion nor relaxation is active; any fixed positive
    // coefficients are inert.
    FluidCoeffs fc{1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0};
    return CoefficientProvider::constant(fc);
  }
  SpectralBasis basis{cfg.n_c, cfg.n_i};
  McParams mc{cfg.mc_samples, cfg.seed, cfg.entry_rel_budget};
  bool with_k = cfg.use_k && cfg.scaling_mode == ScalingMode::eps1;
  CoefficientProvider live =
      CoefficientProvider::live(cfg.gas, basis, mc, with_k);
  std::vector<double> nodes;
  for (int k = 0; k < 4; ++k)
    nodes.push_back(t_lo + (t_hi - t_lo) * k / 3.0);
  return CoefficientProvider::tabulated(cfg.gas, live, nodes, nodes);
}

void write_profile_csv(const std::string& path, const FluidState1D& s,
                       const CoefficientProvider& cp) {
  auto q = heat_flux_cells(s, cp);
  std::vector<std::vector<double>> rows;
  rows.reserve(s.n);
  for (int j = 0; j < s.n; ++j) {
    MacroState st = cell_state(s, j);
    rows.push_back({s.x_center(j), st.rho, st.u[0], st.t_tr, st.t_int,
                    st.rho * st.t_tr, q[j][0], q[j][1]});
  }
  write_csv_file(path, {"x", "rho", "u", "T_tr", "T_int", "p", "q_tr", "q_int"},
                 rows);
}

int cmd_coeffs(const RunConfig& cfg) {
  SpectralBasis basis{cfg.n_c, cfg.n_i};
  McParams mc{cfg.mc_samples, cfg.seed, cfg.entry_rel_budget};
  CESolution sol = solve_abc(cfg.state, cfg.gas, basis, mc);
  TransportCoefficients tc = transport_coeffs(sol, cfg.state, cfg.gas);
  std::optional<McEstimate> k;
  if (cfg.use_k) k = relax_k(cfg.state, cfg.gas, basis, mc);

  SpectralBasis rbasis{std::max(2, cfg.n_c - 2), std::max(1, cfg.n_i - 1)};
  CESolution rsol = solve_abc(cfg.state, cfg.gas, rbasis, mc);
  TransportCoefficients rtc = transport_coeffs(rsol, cfg.state, cfg.gas);
  auto rel_change = [](double a, double b) {
    double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
  };

  json j;
  j["state"] = {{"rho", cfg.state.rho},
                {"t_tr", cfg.state.t_tr},
                {"t_int", cfg.state.t_int}};
  j["coefficients"] = {
      {"lambda_mu", estimate_entry(tc.lambda_mu, tc.se_lambda_mu)},
      {"lambda_trtr", estimate_entry(tc.lambda_trtr, tc.se_lambda_trtr)},
      {"lambda_inttr", estimate_entry(tc.lambda_inttr, tc.se_lambda_inttr)},
      {"lambda_trint", estimate_entry(tc.lambda_trint, tc.se_lambda_trint)},
      {"lambda_intint", estimate_entry(tc.lambda_intint, tc.se_lambda_intint)},
      {"f_relax", estimate_entry(tc.f_relax, 0.0)}};
  if (k)
    j["coefficients"]["k_relax"] = estimate_entry(k->value, k->std_error);
  j["diagnostics"] = {
      {"basis", {{"n_c", cfg.n_c}, {"n_i", cfg.n_i}}},
      {"gram_residual", sol.gram_residual},
      {"gram_min_eig", sol.gram_min_eig},
      {"max_entry_rel_std_error", sol.mc_error_budget},
      {"reduced_basis",
       {{"n_c", rbasis.n_c},
        {"n_i", rbasis.n_i},
        {"rel_change_lambda_mu", rel_change(tc.lambda_mu, rtc.lambda_mu)},
        {"rel_change_lambda_trtr", rel_change(tc.lambda_trtr, rtc.lambda_trtr)},
        {"rel_change_lambda_intint",
         rel_change(tc.lambda_intint, rtc.lambda_intint)}}}};

  if (cfg.write_json)
    write_text_file(cfg.out_dir + "/coeffs.json", j.dump(2) + "\n");
  if (cfg.write_csv) {
    std::ostringstream csv;
    csv << "name,value,std_error\n";
    auto row = [&](const char* nm, double v, double se) {
      csv << nm << ',' << format_double(v) << ',' << format_double(se) << '\n';
    };
    row("lambda_mu", tc.lambda_mu, tc.se_lambda_mu);
    row("lambda_trtr", tc.lambda_trtr, tc.se_lambda_trtr);
    row("lambda_inttr", tc.lambda_inttr, tc.se_lambda_inttr);
    row("lambda_trint", tc.lambda_trint, tc.se_lambda_trint);
    row("lambda_intint", tc.lambda_intint, tc.se_lambda_intint);
    row("f_relax", tc.f_relax, 0.0);
    if (k) row("k_relax", k->value, k->std_error);
    write_text_file(cfg.out_dir + "/coeffs.csv", csv.str());
  }

  std::cout << "transport coefficients at rho=" << cfg.state.rho
            << " T_tr=" << cfg.state.t_tr << " T_int=" << cfg.state.t_int
            << "\n"
            << "  lambda_mu     " << tc.lambda_mu << " +- " << tc.se_lambda_mu
            << "\n"
            << "  lambda_trtr   " << tc.lambda_trtr << " +- "
            << tc.se_lambda_trtr << "\n"
            << "  lambda_inttr  " << tc.lambda_inttr << " +- "
            << tc.se_lambda_inttr << "\n"
            << "  lambda_trint  " << tc.lambda_trint << " +- "
            << tc.se_lambda_trint << "\n"
            << "  lambda_intint " << tc.lambda_intint << " +- "
            << tc.se_lambda_intint << "\n"
            << "  f_relax       " << tc.f_relax << "\n";
  if (k)
    std::cout << "  k_relax       " << k->value << " +- " << k->std_error
              << "\n";
  std::cout << "wrote " << cfg.out_dir << "/coeffs.{json,csv}\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  AcceptanceReport rep = run_acceptance(cfg);
  int pass = 0, fail = 0, skip = 0;
  for (const auto& c : rep.checks) {
    std::cout << format_check_line(c) << "\n";
    if (c.status == "PASS") ++pass;
    if (c.status == "FAIL") ++fail;
    if (c.status == "SKIP") ++skip;
  }
  if (cfg.write_json)
    write_text_file(cfg.out_dir + "/verify.json",
                    report_json(rep).dump(2) + "\n");
  std::cout << pass << " passed, " << fail << " failed, " << skip
            << " skipped\n";
  return rep.all_ok() ? 0 : 4;
}

int cmd_relax(const RunConfig& cfg) {
  auto ode = relax_ode_trajectory(cfg);
  double dt_out = cfg.t_end / (cfg.n_snapshots - 1);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < cfg.n_snapshots; ++k)
    rows.push_back({k * dt_out, cfg.state.rho, cfg.state.u[0], cfg.state.u[1],
                    cfg.state.u[2], ode[k][0], ode[k][1]});
  if (cfg.write_csv)
    write_csv_file(cfg.out_dir + "/relax.csv",
                   {"t", "rho", "ux", "uy", "uz", "T_tr", "T_int"}, rows);

  if (cfg.with_dsmc) {
    auto snaps =
        dsmc_relaxation_run(cfg.state, cfg.gas, cfg.gas.theta, cfg.n_particles,
                            cfg.t_end, cfg.n_snapshots, cfg.seed);
    std::vector<std::vector<double>> drows, crows;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const auto& s = snaps[k];
      drows.push_back(
          {s.t, s.state.t_tr, s.state.t_int, s.se_t_tr, s.se_t_int});
      crows.push_back({s.t, ode[k][1], s.state.t_int,
                       std::abs(ode[k][1] - s.state.t_int), s.se_t_int});
    }
    if (cfg.write_csv) {
      write_csv_file(cfg.out_dir + "/relax_dsmc.csv",
                     {"t", "T_tr", "T_int", "se_T_tr", "se_T_int"}, drows);
      write_csv_file(cfg.out_dir + "/relax_compare.csv",
                     {"t", "T_int_ode", "T_int_dsmc", "abs_diff", "se_T_int"},
                     crows);
    }
  }
  std::cout << "relaxation from T_tr=" << cfg.state.t_tr
            << " T_int=" << cfg.state.t_int << " over t=" << cfg.t_end
            << ": final T_tr=" << ode.back()[0] << " T_int=" << ode.back()[1]
            << "\nwrote " << cfg.out_dir << "/relax*.csv\n";
  return 0;
}

int cmd_shock(const RunConfig& cfg) {
  RankineHugoniot jump =
      equilibrium_jump(cfg.mach, cfg.state.t_tr, cfg.gas.delta);
  double t2 = cfg.state.t_tr * jump.temperature_ratio;
  double t_lo = 0.8 * std::min(cfg.state.t_tr, t2);
  double t_hi = 1.25 * std::max(cfg.state.t_tr, t2);
  CoefficientProvider cp = make_provider(cfg, t_lo, t_hi);

  ShockOptions opt;
  opt.n_cells = cfg.grid_cells;
  opt.domain_half = cfg.domain_half;
  opt.t_max = cfg.t_max;
  opt.steady_tol = cfg.steady_tol;
  opt.cfl = cfg.cfl;
  opt.use_k = cfg.use_k;
  ShockResult sr =
      shock_structure(cfg.state, cfg.mach, cp, cfg.gas.delta, cfg.scaling_mode,
                      cfg.eps, cfg.kappa, opt);

  if (cfg.write_csv) write_profile_csv(cfg.out_dir + "/shock.csv", sr.profile, cp);
  if (cfg.write_json) {
    json j;
    j["mach"] = cfg.mach;
    j["specific_heat_ratio"] = specific_heat_ratio(cfg.gas.delta);
    j["rankine_hugoniot"] = {{"rho_ratio", jump.rho_ratio},
                             {"pressure_ratio", jump.pressure_ratio},
                             {"temperature_ratio", jump.temperature_ratio},
                             {"u_upstream", jump.u_upstream},
                             {"u_downstream", jump.u_downstream}};
    j["measured"] = {{"rho_ratio", sr.rho_ratio_measured},
                     {"t_tr_downstream", sr.t_tr_downstream},
                     {"t_int_downstream", sr.t_int_downstream},
                     {"residual", sr.residual},
                     {"t_elapsed", sr.t_elapsed},
                     {"steps", sr.steps}};
    write_text_file(cfg.out_dir + "/shock.json", j.dump(2) + "\n");
  }
  std::cout << "Mach " << cfg.mach << " shock, delta=" << cfg.gas.delta
            << ": density ratio " << jump.rho_ratio << " (jump conditions), "
            << sr.rho_ratio_measured << " (profile plateau), residual "
            << sr.residual << "\nwrote " << cfg.out_dir
            << "/shock.csv, shock.json\n";
  return 0;
}

int cmd_riemann(const RunConfig& cfg) {
  double temps[] = {cfg.riemann_left.t_tr, cfg.riemann_left.t_int,
                    cfg.riemann_right.t_tr, cfg.riemann_right.t_int};
  double t_lo = 1e300, t_hi = 0.0;
  for (double t : temps) {
    t_lo = std::min(t_lo, t);
    t_hi = std::max(t_hi, t);
  }
  CoefficientProvider cp = make_provider(cfg, 0.6 * t_lo, 1.6 * t_hi);

  FluidState1D s =
      make_grid(cfg.x_left, cfg.x_right, cfg.grid_cells, cfg.gas.delta,
                cfg.scaling_mode, cfg.eps, cfg.kappa);
  double x_mid = 0.5 * (cfg.x_left + cfg.x_right);
  for (int j = 0; j < s.n; ++j)
    set_cell(s, j,
             s.x_center(j) < x_mid ? cfg.riemann_left : cfg.riemann_right);

  AdvanceOptions opt;
  opt.cfl = cfg.cfl;
  opt.bc = FluidBc::transmissive;
  opt.use_k = cfg.use_k;
  advance(s, cp, cfg.t_end, opt);

  if (cfg.write_csv) write_profile_csv(cfg.out_dir + "/riemann.csv", s, cp);
  std::cout << "Riemann problem advanced to t=" << cfg.t_end << " on "
            << cfg.grid_cells << " cells\nwrote " << cfg.out_dir
            << "/riemann.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed resonant/inelastic kinetic model: transport "
               "coefficients, relaxation, shock and Riemann runs"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  std::uint64_t seed_flag = 0;
  const struct {
    const char* name;
    const char* desc;
  } subs[] = {
      {"coeffs", "transport and relaxation coefficient report"},
      {"verify", "run the verification suite"},
      {"relax", "homogeneous two-temperature relaxation trajectory"},
      {"shock", "steady shock profile in the shock frame"},
      {"riemann", "piecewise-constant initial data run"}};
  for (const auto& sc : subs) {
    CLI::App* sub = app.add_subcommand(sc.name, sc.desc);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed_flag, "override numerics.seed");
    sub->add_option("--out", out_flag, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  std::string task = active->get_name();
  try {
    RunConfig cfg = load_config_file(config_path);
    if (!cfg.task.empty() && cfg.task != task)
      throw validation_error("config task '" + cfg.task +
                             "' does not match subcommand '" + task + "'");
    cfg.task = task;
    if (active->count("--seed")) cfg.seed = seed_flag;
    cfg.out_dir = resolve_out_dir(cfg, out_flag);
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/manifest.json",
                    manifest_json(cfg).dump(2) + "\n");

    if (task == "coeffs") return cmd_coeffs(cfg);
    if (task == "verify") return cmd_verify(cfg);
    if (task == "relax") return cmd_relax(cfg);
    if (task == "shock") return cmd_shock(cfg);
    return cmd_riemann(cfg);
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
