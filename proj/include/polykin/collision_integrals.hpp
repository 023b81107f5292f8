#pragma once

#include <cstdint>
#include <functional>

#include "polykin/common.hpp"
#include "polykin/estimate.hpp"
#include "polykin/gas.hpp"
#include "polykin/macro.hpp"
#include "polykin/rng.hpp"

namespace polykin {

// Test function g(xi, I) paired against the collision operator in weak form.
// Tagged instances are the conserved quantities: every standard collision
// conserves {1, xi, |xi|^2 + 2I}; resonant collisions conserve |xi|^2 and I
// separately.
struct TestFunction {
  enum class Tag {
    general,
    unity,
    xi_x,
    xi_y,
    xi_z,
    energy_total,
    kinetic_energy,
    internal_energy
  };
  std::function<double(const Vec3&, double)> evaluator;
  Tag tag = Tag::general;
  double operator()(const Vec3& xi, double i) const { return evaluator(xi, i); }
};

TestFunction tf_unity();
TestFunction tf_xi(int axis);
TestFunction tf_energy_total();     // |xi|^2 + 2 I
TestFunction tf_kinetic_energy();   // |xi|^2
TestFunction tf_internal_energy();  // I
TestFunction tf_general(std::function<double(const Vec3&, double)> f);

// One importance-sampled collision candidate.  Velocities are absolute
// (bulk velocity included), energies from the equilibrium Gamma law,
// sigma uniform on the sphere, r ~ Beta(delta/2, delta/2) and, when
// requested, R ~ Beta((beta+3)/2, alpha+delta); those proposal shapes, the
// equilibrium factors, and the kernel's own R, r powers cancel so that the
// residual weight is just (I+I*)^alpha |g|^beta.
struct PairSample {
  Vec3 xi, xi_star, sigma;
  double i, i_star;
  double r_split;
  double r_frac = 0.0;
  double w_kernel;  // (I+I*)^alpha |g|^beta
};
PairSample draw_pair(const MacroState& s, const GasModel& gas, StreamRng& rng,
                     bool with_r_frac);

// Constant multiplying E[w_kernel (...)] so the sample mean estimates the
// weak form (Q(f,f), g) with f = M_r; branch selects the kernel constant.
double weak_prefactor_resonant(const MacroState& s, const GasModel& gas);
double weak_prefactor_standard(const MacroState& s, const GasModel& gas);

// Weak form (Q_theta(M_r, M_r), g): theta-weighted mix of the standard and
// resonant branches, sharing every draw except the extra R of the standard
// transform.
McEstimate weak_q_mc(const MacroState& f_state, const TestFunction& g,
                     const GasModel& gas, double theta, std::int64_t n,
                     std::uint64_t seed);

// Weak form (Q_s(M_r, M_r h), psi) of the symmetrized bilinear standard
// operator; feeds the inelastic source corrections.
McEstimate weak_q_s_bilinear_mc(const MacroState& state, const TestFunction& h,
                                const TestFunction& psi, const GasModel& gas,
                                std::int64_t n, std::uint64_t seed);

// Dirichlet form (L_r h, M_r g) of the resonant linearized operator,
// estimated as a quarter of the mean of (Delta h)(Delta g) over the
// M_r x M_r-weighted resonant collision measure.  Symmetric in (h, g) by
// construction, sample by sample.
McEstimate dirichlet_form(const TestFunction& h, const TestFunction& g,
                          const MacroState& state, const GasModel& gas,
                          std::int64_t n, std::uint64_t seed);

// f specified as M_r (1 + h) with h > -1.
struct PerturbedEquilibrium {
  MacroState state;
  std::function<double(const Vec3&, double)> h;
};

// Entropy-production functional (Q_theta(f,f), ln(f / I^{delta/2-1})),
// nonpositive for any admissible f; used as a sign sanity check.
McEstimate h_functional_rate(const PerturbedEquilibrium& f_spec,
                             const GasModel& gas, double theta, std::int64_t n,
                             std::uint64_t seed);

// Collision frequency against an equilibrium background, reduced to
// nu = 4 pi C Gamma^2(delta/2)/Gamma(delta) * rho * A(I) * V(|xi - u|)
// with A the energy average of (I + I*)^alpha and V the Gaussian average of
// |g|^beta.  The two branch constants coincide when c_s is tied to c_r.
struct NuPair {
  double nu_s;
  double nu_r;
};
NuPair nu_model_branches(const Vec3& xi, double i, const MacroState& background,
                         const GasModel& gas);
// Checks branch agreement to 1e-10 relative and quadrature convergence,
// then returns the resonant value.
double nu_model(const Vec3& xi, double i, const MacroState& background,
                const GasModel& gas);

// Pointwise inelastic source Q_s(M_r, M_r) at speed |c| (peculiar) and
// internal energy I, by adaptive quadrature of the reduced 4-D integral
// over (R, |c_*|, |g|, I_*).  Zero when the temperatures coincide.
double q_s_mr_mr_pointwise(double c_mag, double i, const MacroState& state,
                           const GasModel& gas);

// Same field divided by I^{delta/2-1} e^{-c^2/(2 T_tr)} e^{-I/s} with
// s = max(T_tr, T_int); this quotient is smooth and subexponential, which is
// what outer Gauss-Laguerre projections want.
double q_s_mr_mr_reduced(double c_mag, double i, const MacroState& state,
                         const GasModel& gas);

// Monte-Carlo route to the same pointwise value at a full 3-vector c
// (peculiar); used to cross-check the quadrature and the spherical symmetry.
McEstimate q_s_mr_mr_pointwise_mc(const Vec3& c, double i,
                                  const MacroState& state, const GasModel& gas,
                                  std::int64_t n, std::uint64_t seed);

}  // namespace polykin
