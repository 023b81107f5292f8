#pragma once

#include <span>
#include <vector>

#include "polykin/common.hpp"
#include "polykin/gas.hpp"
#include "polykin/rng.hpp"

namespace polykin {

// Hydrodynamic state of a two-temperature gas: mass density, bulk velocity,
// translational and internal temperatures (m = k_B = 1 units).
struct MacroState {
  double rho = 1.0;
  Vec3 u{0.0, 0.0, 0.0};
  double t_tr = 1.0;
  double t_int = 1.0;
};

void validate(const MacroState& s);

// Energy-weighted mean (3 T_tr + delta T_int) / (3 + delta).
double equilibrium_temperature(const MacroState& s, double delta);

// zeta = T_tr T_int / |T_tr - T_int|, eta = sign(T_tr - T_int);
// zeta is +inf with eta = 0 when the temperatures coincide.
struct TempGap {
  double zeta;
  double eta;
};
TempGap temp_gap(const MacroState& s);

// Two-temperature local equilibrium: Gaussian in velocity at T_tr,
// Gamma(delta/2, T_int) in internal energy.
struct TwoTempMaxwellian {
  MacroState state;
  GasModel gas;
};

double eval_m_r(const TwoTempMaxwellian& mx, const Vec3& xi, double i);

// M_r without the I^{delta/2-1} factor; finite and positive everywhere,
// which the pointwise collision-source routines rely on.
double eval_m_r_reduced(const TwoTempMaxwellian& mx, const Vec3& xi, double i);

// One-temperature equilibrium at the energy-weighted mean temperature of mx.
double eval_m_s(const TwoTempMaxwellian& mx, const Vec3& xi, double i);

// Draw (xi, I) from the two-temperature equilibrium. Exact: independent
// Gaussians (variance T_tr) plus a Gamma(delta/2, scale T_int) energy.
struct EquilibriumDraw {
  Vec3 xi;
  double i;
};
EquilibriumDraw sample_m_r(const MacroState& s, const GasModel& gas,
                           StreamRng& rng);

struct WeightedParticle {
  Vec3 xi;
  double i;
  double w = 1.0;
};

// Recover (rho, u, T_tr, T_int) from a weighted sample cloud.
MacroState moments_from_samples(std::span<const WeightedParticle> particles,
                                double delta);

// Reference scales: number density n0, temperature temp0, macroscopic length
// and time, particle mass, Boltzmann constant. Derived: xi0 = sqrt(k_B T0/m),
// p0 = k_B n0 T0, mean free time tau0 = 1/(n0 w0) for a reference collision
// rate w0, Strouhal number L0/(t0 xi0), Knudsen-like ratio xi0 tau0 / L0.
struct ReferenceSet {
  double n0 = 1.0;
  double temp0 = 1.0;
  double length0 = 1.0;
  double time0 = 1.0;
  double mass = 1.0;
  double k_b = 1.0;

  double xi0() const;
  double p0() const;
  double tau0(double w0) const;
  double strouhal() const;
  double knudsen(double w0) const;
};

void validate(const ReferenceSet& ref);

enum class Quantity {
  time,
  position,
  velocity,
  internal_energy,
  number_density,
  mass_density,
  temperature,
  pressure,
  heat_flux,
  distribution
};

double to_dimensionless(double value, Quantity q, const ReferenceSet& ref);
double from_dimensionless(double value, Quantity q, const ReferenceSet& ref);

}  // namespace polykin
