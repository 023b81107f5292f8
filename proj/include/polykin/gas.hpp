#pragma once

#include "polykin/common.hpp"

namespace polykin {

// Gas and collision-kernel parameters, dimensionless with m = k_B = 1.
// delta counts the internal degrees of freedom, alpha and beta are the
// energy/speed exponents of the variable-hard-sphere-type kernels, c_r is the
// resonant kernel constant and c_s the standard one tied to it so that both
// branches produce the same collision frequency.  theta is the fraction of
// standard (inelastic) collisions.
struct GasModel {
  double delta = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  double c_r = 1.0;
  double c_s = 0.0;
  double theta = 0.0;
};

// c_s = c_r * Gamma(delta+alpha+(beta+3)/2) / (Gamma((beta+3)/2) Gamma(delta+alpha))
double cs_from_cr(double delta, double alpha, double beta, double c_r);

// Validates ranges and derives c_s.  Throws validation_error.
GasModel make_gas(double delta, double alpha, double beta, double c_r,
                  double theta);

// Throws validation_error if ranges or the c_s tie are violated.
void validate(const GasModel& gas);

// Ratio of specific heats for delta internal degrees of freedom.
inline double specific_heat_ratio(double delta) {
  return (delta + 5.0) / (delta + 3.0);
}

// One pre/post collision record with its importance weight.  Velocities are
// in the peculiar frame of whatever distribution generated the sample.
struct CollisionSample {
  Vec3 c{}, c_star{};
  double i = 0.0, i_star = 0.0;
  double r_frac = 0.0;   // share R of the total energy going kinetic
  double r_split = 0.0;  // share r of the post-collision internal energy
  Vec3 sigma_dir{};
  Vec3 c_prime{}, c_star_prime{};
  double i_prime = 0.0, i_star_prime = 0.0;
  double weight = 0.0;
};

struct CollisionOut {
  Vec3 c_prime, c_star_prime;
  double i_prime, i_star_prime;
};

// Standard (inelastic) exchange: the total energy E = |g|^2/4 + i + i_star is
// redistributed, a fraction R kinetic and (1-R) internal, the latter split r
// to one partner.  Conserves momentum exactly and total energy to round-off.
CollisionOut bl_collide_standard(const Vec3& c, const Vec3& c_star, double i,
                                 double i_star, double r_frac, double r_split,
                                 const Vec3& sigma_dir);

// Resonant (elastic-in-|g|) exchange: |g| and i + i_star are separately
// conserved; only the direction of g and the internal split r change.
CollisionOut bl_collide_resonant(const Vec3& c, const Vec3& c_star, double i,
                                 double i_star, double r_split,
                                 const Vec3& sigma_dir);

// Cross sections.  Primed arguments must be consistent with some (R, r):
// for sigma_s this fixes |g'| through energy balance, for sigma_r the caller
// guarantees i_prime + i_star_prime = i + i_star.
double sigma_s(double g_mag, double i, double i_star, double i_prime,
               double i_star_prime, const GasModel& gas);
double sigma_r(double g_mag, double i, double i_star, double i_prime,
               double i_star_prime, const GasModel& gas);

// Collision kernels in Borgnakke-Larsen form.
// B_s = c_s (i+i*)^alpha g^beta R^{beta/2} (1-R)^alpha,
// B_r = c_r (i+i*)^alpha g^beta.
double kernel_b_s(double g_mag, double i, double i_star, double r_frac,
                  const GasModel& gas);
double kernel_b_r(double g_mag, double i, double i_star, const GasModel& gas);

}  // namespace polykin
