#include "polykin/particles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polykin {

namespace {

// Kernel constant of the pair collision rate
// k(i, j) = k0 (I_i + I_j)^alpha |g_ij|^beta, shared by both branches
// because the inelastic normalization ties C_s to C_r.
double rate_constant(const GasModel& gas) {
  return 4.0 * pi * gas.c_r *
         std::exp(2.0 * std::lgamma(0.5 * gas.delta) - std::lgamma(gas.delta));
}

double pair_rate(const GasModel& gas, double k0, const Vec3& xi_a,
                 const Vec3& xi_b, double i_a, double i_b) {
  double g = norm(xi_a - xi_b);
  return k0 * std::pow(i_a + i_b, gas.alpha) * std::pow(g, gas.beta);
}

// Majorant of the pair rate: scan of sampled pairs with a safety factor,
// re-estimated from the current ensemble.  The constant kernel needs no
// slack, and gets an exact majorant (every candidate is then accepted).
double estimate_k_max(const ParticleEnsemble& ens, const GasModel& gas,
                      double k0, StreamRng& rng) {
  if (gas.alpha == 0.0 && gas.beta == 0.0) return k0;
  std::uint64_t n = ens.xi.size();
  std::uint64_t n_probe = std::min<std::uint64_t>(5000, n * (n - 1) / 2);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < n_probe; ++s) {
    std::uint64_t a = rng.pick(n);
    std::uint64_t b = rng.pick(n - 1);
    if (b >= a) ++b;
    worst = std::max(worst,
                     pair_rate(gas, k0, ens.xi[a], ens.xi[b], ens.eint[a],
                               ens.eint[b]));
  }
  return 1.5 * worst;
}

std::int64_t poisson_knuth(StreamRng& rng, double mean) {
  std::int64_t count = 0;
  // Chunk so exp(-mean) never underflows.
  while (mean > 500.0) {
    double lhs = -500.0;
    double acc = 0.0;
    std::int64_t k = -1;
    while (acc > lhs) {
      acc += std::log(rng.uniform());
      ++k;
    }
    count += k;
    mean -= 500.0;
  }
  double lhs = -mean;
  double acc = 0.0;
  std::int64_t k = -1;
  while (acc > lhs) {
    acc += std::log(rng.uniform());
    ++k;
  }
  return count + k;
}

}  // namespace

ParticleEnsemble make_ensemble(const MacroState& s, const GasModel& gas,
                               std::int64_t n_particles, std::uint64_t seed) {
  validate(s);
  validate(gas);
  if (n_particles < 2)
    throw validation_error("ensemble: need at least two particles");
  ParticleEnsemble ens;
  ens.xi.resize(n_particles);
  ens.eint.resize(n_particles);
  ens.weight = s.rho / static_cast<double>(n_particles);
  for (std::int64_t k = 0; k < n_particles; ++k) {
    StreamRng rng(seed, streams::sampling, static_cast<std::uint64_t>(k));
    EquilibriumDraw d = sample_m_r(s, gas, rng);
    ens.xi[k] = d.xi;
    ens.eint[k] = d.i;
  }
  ens.time = 0.0;
  return ens;
}

MacroState ensemble_moments(const ParticleEnsemble& ens, double delta) {
  if (ens.xi.size() != ens.eint.size() || ens.xi.empty())
    throw validation_error("ensemble: inconsistent particle arrays");
  std::vector<WeightedParticle> cloud(ens.xi.size());
  for (std::size_t k = 0; k < ens.xi.size(); ++k)
    cloud[k] = WeightedParticle{ens.xi[k], ens.eint[k], ens.weight};
  return moments_from_samples(cloud, delta);
}

TemperatureErrors ensemble_temperature_errors(const ParticleEnsemble& ens,
                                              double delta) {
  MacroState m = ensemble_moments(ens, delta);
  std::size_t n = ens.xi.size();
  KahanSum var_tr, var_int;
  for (std::size_t k = 0; k < n; ++k) {
    double s_tr = norm2(ens.xi[k] - m.u) / 3.0;
    double s_int = ens.eint[k] / (0.5 * delta);
    var_tr.add(sq(s_tr - m.t_tr));
    var_int.add(sq(s_int - m.t_int));
  }
  double denom = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  TemperatureErrors e;
  e.se_t_tr = std::sqrt(var_tr.value() / denom);
  e.se_t_int = std::sqrt(var_int.value() / denom);
  return e;
}

DsmcStepStats dsmc_step(ParticleEnsemble& ens, const GasModel& gas,
                        double theta, double dt, StreamRng& rng) {
  validate(gas);
  if (theta < 0.0 || theta > 1.0)
    throw validation_error("dsmc: theta must lie in [0, 1]");
  if (!(dt > 0.0)) throw validation_error("dsmc: dt must be positive");
  std::uint64_t n = ens.xi.size();
  if (n < 2 || ens.eint.size() != n)
    throw validation_error("dsmc: need at least two particles");
  if (!(ens.weight > 0.0))
    throw validation_error("dsmc: nonpositive particle weight");

  double k0 = rate_constant(gas);
  DsmcStepStats st;
  st.k_max = estimate_k_max(ens, gas, k0, rng);
  double per_particle =
      ens.weight * st.k_max * static_cast<double>(n - 1) * dt;
  if (per_particle > 1.0)
    throw validation_error(
        "dsmc: dt too large for the majorant collision frequency (expected "
        "more than one candidate per particle per step)");
  double n_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  double mean_candidates = n_pairs * ens.weight * st.k_max * dt;
  st.candidates = poisson_knuth(rng, mean_candidates);
  for (std::int64_t c = 0; c < st.candidates; ++c) {
    std::uint64_t a = rng.pick(n);
    std::uint64_t b = rng.pick(n - 1);
    if (b >= a) ++b;
    double k_ab =
        pair_rate(gas, k0, ens.xi[a], ens.xi[b], ens.eint[a], ens.eint[b]);
    double p = k_ab / st.k_max;
    if (p > 1.0 + 1e-12)
      throw numerical_error(
          "dsmc: majorant violated by sampled pair (rate " +
          std::to_string(k_ab) + " vs bound " + std::to_string(st.k_max) +
          ")");
    if (rng.uniform() >= p) continue;
    ++st.accepted;
    Vec3 sigma = rng.unit_sphere();
    double r_split = rng.beta(0.5 * gas.delta, 0.5 * gas.delta);
    CollisionOut out;
    if (rng.uniform() < theta) {
      ++st.standard_accepted;
      double r_frac =
          rng.beta(0.5 * (gas.beta + 3.0), gas.alpha + gas.delta);
      out = bl_collide_standard(ens.xi[a], ens.xi[b], ens.eint[a],
                                ens.eint[b], r_frac, r_split, sigma);
    } else {
      out = bl_collide_resonant(ens.xi[a], ens.xi[b], ens.eint[a],
                                ens.eint[b], r_split, sigma);
    }
    ens.xi[a] = out.c_prime;
    ens.xi[b] = out.c_star_prime;
    ens.eint[a] = out.i_prime;
    ens.eint[b] = out.i_star_prime;
  }
  ens.time += dt;
  return st;
}

std::vector<RelaxationSnapshot> dsmc_relaxation_run(const MacroState& initial,
                                                    const GasModel& gas,
                                                    double theta,
                                                    std::int64_t n_particles,
                                                    double t_end,
                                                    int n_snapshots,
                                                    std::uint64_t seed) {
  validate(initial);
  validate(gas);
  if (n_particles < 10000)
    throw validation_error(
        "dsmc run: need at least 1e4 particles for a usable oracle");
  if (!(t_end > 0.0)) throw validation_error("dsmc run: t_end must be positive");
  if (n_snapshots < 2)
    throw validation_error("dsmc run: need at least two snapshots");

  ParticleEnsemble ens = make_ensemble(initial, gas, n_particles, seed);
  StreamRng rng(seed, streams::dsmc, 0);
  double k0 = rate_constant(gas);

  std::vector<RelaxationSnapshot> out;
  out.reserve(n_snapshots);
  auto record = [&]() {
    RelaxationSnapshot snap;
    snap.t = ens.time;
    snap.state = ensemble_moments(ens, gas.delta);
    TemperatureErrors e = ensemble_temperature_errors(ens, gas.delta);
    snap.se_t_tr = e.se_t_tr;
    snap.se_t_int = e.se_t_int;
    out.push_back(snap);
  };
  record();
  double interval = t_end / (n_snapshots - 1);
  for (int s = 1; s < n_snapshots; ++s) {
    // Target a fifth of the per-particle majorant budget per substep.
    double k_max = estimate_k_max(ens, gas, k0, rng);
    double dt_target =
        0.2 / (ens.weight * k_max * static_cast<double>(n_particles - 1));
    int substeps = std::max(1, static_cast<int>(std::ceil(interval / dt_target)));
    double dt = interval / substeps;
    for (int q = 0; q < substeps; ++q) dsmc_step(ens, gas, theta, dt, rng);
    record();
  }
  return out;
}

}  // namespace polykin
