#include "polykin/gas.hpp"

#include <cmath>

namespace polykin {

double cs_from_cr(double delta, double alpha, double beta, double c_r) {
  double lg = std::lgamma(delta + alpha + (beta + 3.0) / 2.0) -
              std::lgamma((beta + 3.0) / 2.0) - std::lgamma(delta + alpha);
  return c_r * std::exp(lg);
}

GasModel make_gas(double delta, double alpha, double beta, double c_r,
                  double theta) {
  GasModel g;
  g.delta = delta;
  g.alpha = alpha;
  g.beta = beta;
  g.c_r = c_r;
  g.theta = theta;
  g.c_s = cs_from_cr(delta, alpha, beta, c_r);
  validate(g);
  return g;
}

void validate(const GasModel& gas) {
  if (!(gas.delta >= 2.0))
    throw validation_error("gas: delta must be >= 2");
  if (!(gas.alpha >= 0.0 && gas.alpha < gas.delta / 2.0))
    throw validation_error("gas: alpha must lie in [0, delta/2)");
  if (!(gas.beta >= 0.0 && gas.beta <= 1.0))
    throw validation_error("gas: beta must lie in [0, 1]");
  if (!(gas.c_r > 0.0)) throw validation_error("gas: c_r must be positive");
  if (!(gas.theta >= 0.0 && gas.theta <= 1.0))
    throw validation_error("gas: theta must lie in [0, 1]");
  double want = cs_from_cr(gas.delta, gas.alpha, gas.beta, gas.c_r);
  if (!(std::abs(gas.c_s - want) <= 1e-12 * want))
    throw validation_error("gas: c_s is not tied to c_r");
}

CollisionOut bl_collide_standard(const Vec3& c, const Vec3& c_star, double i,
                                 double i_star, double r_frac, double r_split,
                                 const Vec3& sigma_dir) {
  Vec3 g_mid = 0.5 * (c + c_star);
  double e_tot = 0.25 * norm2(c - c_star) + i + i_star;
  double v = std::sqrt(r_frac * e_tot);
  double e_int = (1.0 - r_frac) * e_tot;
  CollisionOut out;
  out.c_prime = g_mid + v * sigma_dir;
  out.c_star_prime = g_mid - v * sigma_dir;
  out.i_prime = r_split * e_int;
  out.i_star_prime = (1.0 - r_split) * e_int;
  return out;
}

CollisionOut bl_collide_resonant(const Vec3& c, const Vec3& c_star, double i,
                                 double i_star, double r_split,
                                 const Vec3& sigma_dir) {
  Vec3 g_mid = 0.5 * (c + c_star);
  double half_g = 0.5 * norm(c - c_star);
  double e_int = i + i_star;
  CollisionOut out;
  out.c_prime = g_mid + half_g * sigma_dir;
  out.c_star_prime = g_mid - half_g * sigma_dir;
  out.i_prime = r_split * e_int;
  out.i_star_prime = (1.0 - r_split) * e_int;
  return out;
}

double sigma_s(double g_mag, double i, double i_star, double i_prime,
               double i_star_prime, const GasModel& gas) {
  double e_tot = 0.25 * g_mag * g_mag + i + i_star;
  if (!(e_tot > 0.0)) throw validation_error("sigma_s: zero total energy");
  double gp2 = 4.0 * (e_tot - i_prime - i_star_prime);
  if (gp2 < 0.0)
    throw validation_error("sigma_s: primed energies exceed total energy");
  double gp = std::sqrt(gp2);
  double d = gas.delta, a = gas.alpha, b = gas.beta;
  return gas.c_s * std::pow(0.25, (b + 1.0) / 2.0) * std::pow(i + i_star, a) *
         std::pow(i_prime + i_star_prime, a) *
         std::pow(i_prime * i_star_prime, d / 2.0 - 1.0) *
         std::pow(e_tot, -(d + a + (b + 1.0) / 2.0)) * std::pow(g_mag, b - 1.0) *
         std::pow(gp, b + 1.0);
}

double sigma_r(double g_mag, double i, double i_star, double i_prime,
               double i_star_prime, const GasModel& gas) {
  double d = gas.delta, a = gas.alpha, b = gas.beta;
  if (!(i + i_star > 0.0) && a < d - 1.0)
    throw validation_error("sigma_r: singular at i + i_star = 0");
  return gas.c_r * std::pow(i_prime * i_star_prime, d / 2.0 - 1.0) *
         std::pow(i + i_star, -(d - 1.0 - a)) * std::pow(g_mag, b - 1.0);
}

double kernel_b_s(double g_mag, double i, double i_star, double r_frac,
                  const GasModel& gas) {
  return gas.c_s * std::pow(i + i_star, gas.alpha) *
         std::pow(g_mag, gas.beta) * std::pow(r_frac, gas.beta / 2.0) *
         std::pow(1.0 - r_frac, gas.alpha);
}

double kernel_b_r(double g_mag, double i, double i_star, const GasModel& gas) {
  return gas.c_r * std::pow(i + i_star, gas.alpha) * std::pow(g_mag, gas.beta);
}

}  // namespace polykin
