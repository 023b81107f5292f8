#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polykin/chapman_enskog.hpp"
#include "polykin/common.hpp"
#include "polykin/gas.hpp"
#include "polykin/macro.hpp"
#include "polykin/spectral.hpp"

namespace polykin {

// theta = kappa eps^2 (eps2) or theta = kappa eps (eps1); the relaxation
// source strength differs by a factor 1/eps between them and eps1
// optionally carries the first-order correction factor.
enum class ScalingMode { eps2, eps1 };

enum class FluidBc { periodic, transmissive, inflow_outflow };

// Transport/relaxation closure at one thermodynamic point.
struct FluidCoeffs {
  double lambda_mu = 0.0;
  double lambda_trtr = 0.0;
  double lambda_inttr = 0.0;
  double lambda_trint = 0.0;
  double lambda_intint = 0.0;
  double f_relax = 0.0;
  double k_relax = 0.0;
};

// Closure source for the fluid solver.  The transport coefficients of this
// model are density-independent (the collision operator is bilinear), so
// tables are laid out over the two temperatures only and the rho^2 law of
// the relaxation coefficient is restored on evaluation.
class CoefficientProvider {
 public:
  using Fn = std::function<FluidCoeffs(double rho, double t_tr, double t_int)>;

  // Closed forms, valid only for alpha = beta = 0 (where the first-order
  // source correction vanishes identically).
  static CoefficientProvider analytic_maxwell(const GasModel& gas);

  // Galerkin solve per evaluation; too slow to drive a grid, meant for
  // table construction and spot validation.  with_k adds the stochastic
  // first-order source correction.
  static CoefficientProvider live(const GasModel& gas,
                                  const SpectralBasis& basis,
                                  const McParams& mc, bool with_k);

  // Bilinear interpolation of `source` sampled on the temperature grid.
  // Evaluation clamps to the grid hull.
  static CoefficientProvider tabulated(const GasModel& gas,
                                       const CoefficientProvider& source,
                                       std::vector<double> t_tr_nodes,
                                       std::vector<double> t_int_nodes);

  // State-independent coefficients, for manufactured-solution checks.
  static CoefficientProvider constant(const FluidCoeffs& fc);

  FluidCoeffs eval(double rho, double t_tr, double t_int) const;
  const std::string& mode() const { return mode_; }

 private:
  CoefficientProvider(std::string mode, Fn fn);
  std::string mode_;
  Fn fn_;
};

using Cons4 = std::array<double, 4>;  // rho, rho u, E_tr, rho e_int

// Uniform finite-volume line of conserved cells.
struct FluidState1D {
  double x_left = 0.0;
  double dx = 0.0;
  int n = 0;
  double delta = 2.0;
  ScalingMode mode = ScalingMode::eps2;
  double eps = 0.1;
  double kappa = 1.0;
  std::vector<double> rho, mom, e_tr, e_int;

  double x_center(int j) const { return x_left + dx * (j + 0.5); }
};

FluidState1D make_grid(double x_left, double x_right, int n, double delta,
                       ScalingMode mode, double eps, double kappa);

// Cell accessors in primitive form; u lives in the x component.
void set_cell(FluidState1D& s, int j, const MacroState& prim);
MacroState cell_state(const FluidState1D& s, int j);
Cons4 conserved_of(const MacroState& prim, double delta);

// HLL interface flux of the hyperbolic core: the translational-pressure
// Euler system (sound speed sqrt((5/3) T_tr)) with the internal energy
// advected as a passive conserved scalar.
Cons4 hyperbolic_flux(const Cons4& left, const Cons4& right);

// Exact exponential integration of the two-temperature relaxation source
// over dt with coefficients frozen at the cell state; conserves mass,
// momentum, and the thermal energy sum bitwise.  use_k applies the
// [1 + eps K] factor in eps1 mode.
void relaxation_update(FluidState1D& s, const CoefficientProvider& coeffs,
                       double dt, bool use_k);

// Per-cell time derivative contribution of the viscous and heat-flux terms,
// central second order.  Components: (rho, rho u, E_tr, rho e_int); the
// mass component is identically zero.
std::vector<Cons4> ns_diffusion(const FluidState1D& s,
                                const CoefficientProvider& coeffs, FluidBc bc,
                                const Cons4* inflow_left = nullptr,
                                const Cons4* inflow_right = nullptr);

struct AdvanceOptions {
  double cfl = 0.4;
  FluidBc bc = FluidBc::periodic;
  bool use_k = false;
  std::int64_t max_steps = 5'000'000;
  // Fixed upstream/downstream states for inflow-outflow boundaries.
  Cons4 inflow_left{};
  Cons4 inflow_right{};
  bool outflow_right = true;  // transmissive right ghost when inflow bc
};

struct AdvanceDiag {
  std::int64_t steps = 0;
  double t = 0.0;
  double dt_last = 0.0;
};

// Strang-split step loop to t_end: half relaxation, one SSP-RK2 stage of
// MUSCL/HLL transport plus explicit diffusion, half relaxation.
AdvanceDiag advance(FluidState1D& s, const CoefficientProvider& coeffs,
                    double t_end, const AdvanceOptions& opt);

// Equilibrium jump conditions of the combined system at specific-heat ratio
// (delta+5)/(delta+3).
struct RankineHugoniot {
  double rho_ratio = 1.0;
  double pressure_ratio = 1.0;
  double temperature_ratio = 1.0;
  double u_upstream = 0.0;
  double u_downstream = 0.0;
};
RankineHugoniot equilibrium_jump(double mach, double t_upstream, double delta);

// steady_tol is the L1 density change rate per unit time at which the march
// stops.  Captured standing shocks flicker at ~1e-7 and creep slowly under
// wide relaxation layers, so tolerances well below 1e-7 are unreachable.
struct ShockOptions {
  int n_cells = 400;
  double domain_half = 4.0;
  double t_max = 60.0;
  double steady_tol = 1e-6;
  double cfl = 0.4;
  bool use_k = false;
};

struct ShockResult {
  FluidState1D profile;
  RankineHugoniot jump;
  double rho_ratio_measured = 0.0;
  double t_tr_downstream = 0.0;
  double t_int_downstream = 0.0;
  double residual = 0.0;
  double t_elapsed = 0.0;
  std::int64_t steps = 0;
};

// Steady shock in its own frame: upstream equilibrium state enters from the
// left at Mach `mach` (equilibrium sound speed), the downstream half starts
// at the equilibrium jump state, and the profile is marched to steady state.
ShockResult shock_structure(const MacroState& upstream, double mach,
                            const CoefficientProvider& coeffs, double delta,
                            ScalingMode mode, double eps, double kappa,
                            const ShockOptions& opt);

// Cell-centered heat fluxes (q_tr, q_int) for output, central differences.
std::vector<std::array<double, 2>> heat_flux_cells(
    const FluidState1D& s, const CoefficientProvider& coeffs);

}  // namespace polykin
