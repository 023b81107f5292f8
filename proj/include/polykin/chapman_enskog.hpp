#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polykin/collision_integrals.hpp"
#include "polykin/common.hpp"
#include "polykin/estimate.hpp"
#include "polykin/gas.hpp"
#include "polykin/macro.hpp"
#include "polykin/spectral.hpp"

namespace polykin {

// Monte Carlo controls for the Galerkin assembly: sample count, base seed,
// and the per-entry error gate.  An entry's standard error is compared
// against entry_rel_budget * sqrt(G_aa G_bb); exceeding it aborts the
// assembly, which signals that the basis is too large for the sample count.
struct McParams {
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 2026;
  double entry_rel_budget = 0.5;
};

// One family's Galerkin system: the matrix of Dirichlet forms
// G_ab = (L_r phi_a, M_r phi_b) with entrywise batch-means standard errors,
// plus the exactly integrated right-hand sides (one for the tensor family,
// two -- the T_tr and T_int drives -- for the vector family, none for the
// scalar family, whose source is assembled by the relaxation routine).
struct AssembledSystem {
  SpectralBasis basis;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gram_se;
  std::vector<Eigen::VectorXd> rhs;
  double max_rel_se = 0.0;
};

AssembledSystem assemble_system(const SpectralBasis& basis,
                                const MacroState& state, const GasModel& gas,
                                const McParams& mc);

// Coefficients of the three (optionally four) expansion solutions on the
// product basis.  Vectors run over the full flat index set; entries pinned
// by the kernel constraints are stored as exact zeros.  se_* are first-order
// error propagations of the Gram noise through the solves (entry
// correlations from the shared sample stream are ignored, so they are
// estimates, not guarantees).
struct CESolution {
  int n_c = 0;
  int n_i = 0;
  Eigen::VectorXd coeff_a, coeff_b, coeff_c;
  std::optional<Eigen::VectorXd> coeff_d;
  Eigen::VectorXd se_a, se_b, se_c;
  double gram_residual = 0.0;    // max relative |G x - r| over the solves
  double mc_error_budget = 0.0;  // achieved max per-entry relative std error
  double gram_min_eig = 0.0;     // smallest constrained-Gram eigenvalue seen
};

CESolution solve_abc(const MacroState& state, const GasModel& gas,
                     const SpectralBasis& basis, const McParams& mc);

// Scalar profiles of the solved expansions: the viscous weight, the two
// heat-flux weights, and the relaxation correction.
enum class CEComponent { cal_a, cal_b, cal_c, d_tilde };

double eval_ce(const CESolution& sol, CEComponent which,
               const MacroState& state, const GasModel& gas, double c_mag,
               double i);

// Navier-Stokes level coefficients.  lambda_mu multiplies the rate-of-strain
// deviator in the stress; lambda_trtr / lambda_inttr multiply grad(ln T_tr) /
// grad(ln T_int) in the translational heat flux; lambda_trint / lambda_intint
// the same gradients in the internal heat flux.  f_relax is the equilibrium
// energy-exchange rate per unit temperature gap; k_relax its first-order
// correction factor (filled only when the relaxation solve is requested).
// se_* carry propagated Monte Carlo uncertainties of the Lambda block.
struct TransportCoefficients {
  double lambda_mu = 0.0;
  double lambda_trtr = 0.0;
  double lambda_inttr = 0.0;
  double lambda_trint = 0.0;
  double lambda_intint = 0.0;
  double f_relax = 0.0;
  std::optional<double> k_relax;
  std::optional<double> k_relax_se;
  double se_lambda_mu = 0.0;
  double se_lambda_trtr = 0.0;
  double se_lambda_inttr = 0.0;
  double se_lambda_trint = 0.0;
  double se_lambda_intint = 0.0;
};

TransportCoefficients transport_coeffs(const CESolution& sol,
                                       const MacroState& state,
                                       const GasModel& gas);

// Equilibrium energy-exchange rate: (I, Q_s(M_r, M_r)) = relax_f * (T_tr -
// T_int), in closed form.
double relax_f(const MacroState& state, const GasModel& gas);

// Pointwise right-hand side of the relaxation-correction equation: a closed
// two-moment bracket plus the pointwise inelastic source divided by
// M_r * relax_f * (T_tr - T_int).  Smooth and bounded even as the
// temperature gap closes.
double relax_source_d(const MacroState& state, const GasModel& gas,
                      double c_mag, double i);

// First-order correction factor of the energy-exchange rate:
// 2 (I, Q_s(M_r, M_r D_tilde)) with D_tilde the Galerkin solution driven by
// relax_source_d.  Near temperature equality the value is the average of the
// two one-sided evaluations.
McEstimate relax_k(const MacroState& state, const GasModel& gas,
                   const SpectralBasis& basis, const McParams& mc);

// Closed-form Lambda block for the Maxwell-type kernel (alpha = beta = 0
// only): the expansion profiles collapse to single modes and every integral
// is elementary.
TransportCoefficients maxwell_closed_form_lambda(const MacroState& state,
                                                 const GasModel& gas);

}  // namespace polykin
