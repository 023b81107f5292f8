#pragma once

#include <cstdint>
#include <vector>

#include "polykin/common.hpp"
#include "polykin/gas.hpp"
#include "polykin/macro.hpp"
#include "polykin/rng.hpp"

namespace polykin {

// Spatially homogeneous particle cloud.  Each sample carries the same
// density weight, so the represented density is weight * count and stays
// constant over a run.
struct ParticleEnsemble {
  std::vector<Vec3> xi;
  std::vector<double> eint;
  double weight = 1.0;
  double time = 0.0;
};

// Two-temperature equilibrium draw of n_particles samples carrying total
// density s.rho.
ParticleEnsemble make_ensemble(const MacroState& s, const GasModel& gas,
                               std::int64_t n_particles, std::uint64_t seed);

MacroState ensemble_moments(const ParticleEnsemble& ens, double delta);

// Ensemble-spread standard errors of the temperature estimators.
struct TemperatureErrors {
  double se_t_tr = 0.0;
  double se_t_int = 0.0;
};
TemperatureErrors ensemble_temperature_errors(const ParticleEnsemble& ens,
                                              double delta);

struct DsmcStepStats {
  std::int64_t candidates = 0;
  std::int64_t accepted = 0;
  std::int64_t standard_accepted = 0;
  double k_max = 0.0;
};

// One majorant-frequency collision step over dt.  Candidate pairs are drawn
// at the majorant pair rate and accepted with the ratio of the true pair
// rate (I+I*)^alpha |g|^beta to the majorant; accepted pairs take the
// inelastic transform with probability theta, the resonant one otherwise.
// The per-R and per-r kernel shape factors are folded into the Beta draws of
// the transforms, which is what makes the acceptance factor branch-free.
// Mutates the ensemble in place and advances its clock.
DsmcStepStats dsmc_step(ParticleEnsemble& ens, const GasModel& gas,
                        double theta, double dt, StreamRng& rng);

struct RelaxationSnapshot {
  double t = 0.0;
  MacroState state;
  double se_t_tr = 0.0;
  double se_t_int = 0.0;
};

// Homogeneous relaxation trajectory: equilibrium-sampled start at `initial`,
// stepped to t_end with n_snapshots evenly spaced records (including t = 0).
std::vector<RelaxationSnapshot> dsmc_relaxation_run(const MacroState& initial,
                                                    const GasModel& gas,
                                                    double theta,
                                                    std::int64_t n_particles,
                                                    double t_end,
                                                    int n_snapshots,
                                                    std::uint64_t seed);

}  // namespace polykin
