#include "polykin/macro.hpp"

#include <cmath>
#include <limits>

namespace polykin {

void validate(const MacroState& s) {
  if (!(s.rho > 0.0)) throw validation_error("state: rho must be positive");
  if (!(s.t_tr > 0.0)) throw validation_error("state: t_tr must be positive");
  if (!(s.t_int > 0.0)) throw validation_error("state: t_int must be positive");
}

double equilibrium_temperature(const MacroState& s, double delta) {
  return (3.0 * s.t_tr + delta * s.t_int) / (3.0 + delta);
}

TempGap temp_gap(const MacroState& s) {
  double diff = s.t_tr - s.t_int;
  if (diff == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  return {s.t_tr * s.t_int / std::abs(diff), diff > 0.0 ? 1.0 : -1.0};
}

namespace {

double maxwellian_value(double rho, const Vec3& u, double t_tr, double t_int,
                        double delta, const Vec3& xi, double i) {
  double c2 = norm2(xi - u);
  double lognorm = 1.5 * std::log(2.0 * pi * t_tr) +
                   0.5 * delta * std::log(t_int) + std::lgamma(delta / 2.0);
  double logi = (delta / 2.0 - 1.0) * std::log(i);
  if (i == 0.0) {
    if (delta == 2.0)
      logi = 0.0;  // I^0 = 1
    else
      return 0.0;
  }
  return rho * std::exp(logi - lognorm - 0.5 * c2 / t_tr - i / t_int);
}

}  // namespace

double eval_m_r(const TwoTempMaxwellian& mx, const Vec3& xi, double i) {
  if (i < 0.0) throw validation_error("eval_m_r: negative internal energy");
  const MacroState& s = mx.state;
  return maxwellian_value(s.rho, s.u, s.t_tr, s.t_int, mx.gas.delta, xi, i);
}

double eval_m_r_reduced(const TwoTempMaxwellian& mx, const Vec3& xi, double i) {
  if (i < 0.0) throw validation_error("eval_m_r_reduced: negative internal energy");
  const MacroState& s = mx.state;
  double delta = mx.gas.delta;
  double lognorm = 1.5 * std::log(2.0 * pi * s.t_tr) +
                   0.5 * delta * std::log(s.t_int) + std::lgamma(delta / 2.0);
  return s.rho *
         std::exp(-lognorm - 0.5 * norm2(xi - s.u) / s.t_tr - i / s.t_int);
}

double eval_m_s(const TwoTempMaxwellian& mx, const Vec3& xi, double i) {
  if (i < 0.0) throw validation_error("eval_m_s: negative internal energy");
  const MacroState& s = mx.state;
  double t = equilibrium_temperature(s, mx.gas.delta);
  return maxwellian_value(s.rho, s.u, t, t, mx.gas.delta, xi, i);
}

EquilibriumDraw sample_m_r(const MacroState& s, const GasModel& gas,
                           StreamRng& rng) {
  EquilibriumDraw d;
  d.xi = s.u + rng.maxwellian(s.t_tr);
  d.i = s.t_int * rng.gamma(gas.delta / 2.0);
  return d;
}

MacroState moments_from_samples(std::span<const WeightedParticle> particles,
                                double delta) {
  if (particles.empty())
    throw validation_error("moments_from_samples: empty particle list");
  KahanSum wsum;
  KahanSum usum[3];
  for (const auto& p : particles) {
    wsum.add(p.w);
    for (int a = 0; a < 3; ++a) usum[a].add(p.w * p.xi[a]);
  }
  double w = wsum.value();
  if (!(w > 0.0))
    throw validation_error("moments_from_samples: nonpositive total weight");
  MacroState out;
  out.rho = w;
  out.u = {usum[0].value() / w, usum[1].value() / w, usum[2].value() / w};
  KahanSum c2sum, isum;
  for (const auto& p : particles) {
    c2sum.add(p.w * norm2(p.xi - out.u));
    isum.add(p.w * p.i);
  }
  out.t_tr = c2sum.value() / (3.0 * w);
  out.t_int = 2.0 * isum.value() / (delta * w);
  return out;
}

double ReferenceSet::xi0() const { return std::sqrt(k_b * temp0 / mass); }
double ReferenceSet::p0() const { return k_b * n0 * temp0; }
double ReferenceSet::tau0(double w0) const { return 1.0 / (n0 * w0); }
double ReferenceSet::strouhal() const { return length0 / (time0 * xi0()); }
double ReferenceSet::knudsen(double w0) const {
  return xi0() * tau0(w0) / length0;
}

void validate(const ReferenceSet& ref) {
  if (!(ref.n0 > 0.0 && ref.temp0 > 0.0 && ref.length0 > 0.0 &&
        ref.time0 > 0.0 && ref.mass > 0.0 && ref.k_b > 0.0))
    throw validation_error("reference set: all scales must be positive");
}

namespace {

double quantity_scale(Quantity q, const ReferenceSet& ref) {
  switch (q) {
    case Quantity::time:
      return ref.time0;
    case Quantity::position:
      return ref.length0;
    case Quantity::velocity:
      return ref.xi0();
    case Quantity::internal_energy:
      return ref.k_b * ref.temp0;
    case Quantity::number_density:
      return ref.n0;
    case Quantity::mass_density:
      return ref.mass * ref.n0;
    case Quantity::temperature:
      return ref.temp0;
    case Quantity::pressure:
      return ref.p0();
    case Quantity::heat_flux:
      return ref.p0() * ref.xi0();
    case Quantity::distribution: {
      double x = ref.xi0();
      return ref.n0 / (ref.mass * x * x * x * x * x);
    }
  }
  throw validation_error("unknown quantity kind");
}

}  // namespace

double to_dimensionless(double value, Quantity q, const ReferenceSet& ref) {
  validate(ref);
  return value / quantity_scale(q, ref);
}

double from_dimensionless(double value, Quantity q, const ReferenceSet& ref) {
  validate(ref);
  return value * quantity_scale(q, ref);
}

}  // namespace polykin
