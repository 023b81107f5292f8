#include <catch2/catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "polykin/chapman_enskog.hpp"
#include "polykin/particles.hpp"

using namespace polykin;

namespace {

MacroState two_to_one() {
  MacroState s;
  s.rho = 1.0;
  s.u = {0.0, 0.0, 0.0};
  s.t_tr = 1.25;
  s.t_int = 0.625;
  return s;
}

struct Totals {
  Vec3 mom{};
  double kin = 0.0;
  double internal = 0.0;
};

Totals totals_of(const ParticleEnsemble& ens) {
  Totals t;
  KahanSum mx, my, mz, kin, internal;
  for (std::size_t k = 0; k < ens.xi.size(); ++k) {
    mx.add(ens.xi[k][0]);
    my.add(ens.xi[k][1]);
    mz.add(ens.xi[k][2]);
    kin.add(norm2(ens.xi[k]));
    internal.add(ens.eint[k]);
  }
  t.mom = {mx.value(), my.value(), mz.value()};
  t.kin = kin.value();
  t.internal = internal.value();
  return t;
}

// Equiprobable-bin chi^2 statistic of gamma-distributed samples against
// shape a and the given scale.
double chi2_gamma(const std::vector<double>& samples, double shape,
                  double scale, int bins) {
  std::vector<int> counts(bins, 0);
  for (double v : samples) {
    double u = boost::math::gamma_p(shape, v / scale);
    int b = std::min(bins - 1, static_cast<int>(u * bins));
    counts[b] += 1;
  }
  double expect = static_cast<double>(samples.size()) / bins;
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) chi2 += sq(counts[b] - expect) / expect;
  return chi2;
}

}  // namespace

TEST_CASE("equilibrium ensembles reproduce the requested moments") {
  MacroState s;
  s.rho = 1.7;
  s.u = {0.4, -0.2, 0.1};
  s.t_tr = 1.8;
  s.t_int = 0.6;
  GasModel gas = make_gas(3.0, 0.0, 0.5, 1.0, 0.3);
  ParticleEnsemble ens = make_ensemble(s, gas, 40000, 4);
  MacroState m = ensemble_moments(ens, gas.delta);
  TemperatureErrors e = ensemble_temperature_errors(ens, gas.delta);
  CHECK(m.rho == Catch::Approx(s.rho).epsilon(1e-12));
  CHECK(std::abs(m.t_tr - s.t_tr) < 4.0 * e.se_t_tr);
  CHECK(std::abs(m.t_int - s.t_int) < 4.0 * e.se_t_int);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(m.u[k] - s.u[k]) <
          4.0 * std::sqrt(s.t_tr / ens.xi.size()));
}

TEST_CASE("resonant-only stepping conserves kinetic and internal energy "
          "separately") {
  MacroState s = two_to_one();
  GasModel gas = make_gas(2.0, 0.5, 0.5, 1.0, 0.5);
  ParticleEnsemble ens = make_ensemble(s, gas, 5000, 9);
  Totals before = totals_of(ens);
  StreamRng rng(11, streams::dsmc, 5);
  std::int64_t accepted = 0, standard = 0;
  for (int q = 0; q < 40; ++q) {
    DsmcStepStats st = dsmc_step(ens, gas, 0.0, 0.004, rng);
    accepted += st.accepted;
    standard += st.standard_accepted;
  }
  Totals after = totals_of(ens);
  CHECK(accepted > 5000);
  CHECK(standard == 0);
  double kin_scale = before.kin;
  CHECK(std::abs(after.kin - before.kin) < 1e-10 * kin_scale);
  CHECK(std::abs(after.internal - before.internal) < 1e-10 * kin_scale);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(after.mom[k] - before.mom[k]) < 1e-10 * std::sqrt(kin_scale));
}

TEST_CASE("inelastic stepping conserves only the total energy and moves the "
          "internal share") {
  MacroState s = two_to_one();
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  ParticleEnsemble ens = make_ensemble(s, gas, 5000, 21);
  Totals before = totals_of(ens);
  StreamRng rng(3, streams::dsmc, 0);
  std::int64_t accepted = 0, candidates = 0, standard = 0;
  for (int q = 0; q < 40; ++q) {
    DsmcStepStats st = dsmc_step(ens, gas, 1.0, 0.004, rng);
    accepted += st.accepted;
    candidates += st.candidates;
    standard += st.standard_accepted;
  }
  Totals after = totals_of(ens);
  // Constant kernel: the majorant is exact, every candidate collides.
  CHECK(accepted == candidates);
  CHECK(standard == accepted);
  double total_before = before.kin + 2.0 * before.internal;
  double total_after = after.kin + 2.0 * after.internal;
  CHECK(std::abs(total_after - total_before) < 1e-10 * total_before);
  // The internal pool genuinely trades with the kinetic one.
  CHECK(std::abs(after.internal - before.internal) > 1e-3 * before.internal);
}

TEST_CASE("runs are reproducible and seed-sensitive") {
  MacroState s = two_to_one();
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  auto a = dsmc_relaxation_run(s, gas, 0.2, 10000, 0.5, 4, 42);
  auto b = dsmc_relaxation_run(s, gas, 0.2, 10000, 0.5, 4, 42);
  auto c = dsmc_relaxation_run(s, gas, 0.2, 10000, 0.5, 4, 43);
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].state.t_tr == b[k].state.t_tr);
    CHECK(a[k].state.t_int == b[k].state.t_int);
  }
  CHECK(a[3].state.t_tr != c[3].state.t_tr);
}

TEST_CASE("the one-temperature equilibrium is a fixed point of the mixed "
          "dynamics") {
  MacroState s;
  s.rho = 1.0;
  s.u = {0.2, 0.0, -0.1};
  s.t_tr = 0.9;
  s.t_int = 0.9;
  GasModel gas = make_gas(2.5, 0.5, 0.5, 1.0, 0.5);
  auto run = dsmc_relaxation_run(s, gas, 0.5, 20000, 2.0, 5, 7);
  for (const auto& snap : run) {
    CHECK(std::abs(snap.state.t_tr - 0.9) < 4.0 * snap.se_t_tr);
    CHECK(std::abs(snap.state.t_int - 0.9) < 4.0 * snap.se_t_int);
  }
}

TEST_CASE("temperature relaxation follows the closed two-temperature source "
          "of the constant kernel") {
  MacroState s = two_to_one();
  double delta = 2.0, theta = 0.05;
  GasModel gas = make_gas(delta, 0.0, 0.0, 1.0, theta);
  auto run = dsmc_relaxation_run(s, gas, theta, 30000, 5.0, 11, 2027);
  double f_val = relax_f(s, gas);
  double gamma = theta * f_val * (2.0 / (3.0 * s.rho) + 2.0 / (delta * s.rho));
  // Initial condition from the measured t = 0 snapshot, not the target
  // state, so draw noise does not masquerade as dynamics.
  double tbar = (3.0 * run[0].state.t_tr + delta * run[0].state.t_int) /
                (3.0 + delta);
  double dt0 = run[0].state.t_tr - run[0].state.t_int;
  for (const auto& snap : run) {
    double gap = dt0 * std::exp(-gamma * snap.t);
    double want_int = tbar - 3.0 / (3.0 + delta) * gap;
    double want_tr = tbar + delta / (3.0 + delta) * gap;
    CHECK(std::abs(snap.state.t_int - want_int) < 4.0 * snap.se_t_int);
    CHECK(std::abs(snap.state.t_tr - want_tr) < 4.0 * snap.se_t_tr);
  }
  // Weighted-energy conservation along the trajectory.
  for (const auto& snap : run) {
    double bar = (3.0 * snap.state.t_tr + delta * snap.state.t_int) /
                 (3.0 + delta);
    CHECK(std::abs(bar - tbar) < 1e-3 * tbar);
  }
}

TEST_CASE("relaxed ensembles pass marginal distribution tests against the "
          "two-temperature equilibrium") {
  MacroState s = two_to_one();
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  ParticleEnsemble ens = make_ensemble(s, gas, 30000, 77);
  StreamRng rng(77, streams::dsmc, 1);
  for (int q = 0; q < 160; ++q) dsmc_step(ens, gas, 0.5, 0.008, rng);
  MacroState m = ensemble_moments(ens, gas.delta);
  std::vector<double> xc(ens.xi.size()), yi(ens.xi.size());
  for (std::size_t k = 0; k < ens.xi.size(); ++k) {
    xc[k] = norm2(ens.xi[k] - m.u) / (2.0 * m.t_tr);
    yi[k] = ens.eint[k] / m.t_int;
  }
  boost::math::chi_squared dist(19);
  double crit = boost::math::quantile(dist, 0.99);
  CHECK(chi2_gamma(xc, 1.5, 1.0, 20) < crit);
  CHECK(chi2_gamma(yi, 0.5 * gas.delta, 1.0, 20) < crit);
}

TEST_CASE("step and run guards reject unusable inputs") {
  MacroState s = two_to_one();
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  ParticleEnsemble ens = make_ensemble(s, gas, 1000, 5);
  StreamRng rng(1, streams::dsmc, 0);
  CHECK_THROWS_AS(dsmc_step(ens, gas, 0.5, 1e9, rng), validation_error);
  CHECK_THROWS_AS(dsmc_step(ens, gas, -0.1, 0.001, rng), validation_error);
  CHECK_THROWS_AS(dsmc_step(ens, gas, 0.5, -1.0, rng), validation_error);
  CHECK_THROWS_AS(dsmc_relaxation_run(s, gas, 0.5, 100, 1.0, 4, 1),
                  validation_error);
  CHECK_THROWS_AS(dsmc_relaxation_run(s, gas, 0.5, 10000, -1.0, 4, 1),
                  validation_error);
}
