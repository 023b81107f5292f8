#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polykin/gas.hpp"
#include "polykin/rng.hpp"

using namespace polykin;

TEST_CASE("kernel constant ratio matches gamma-function expression") {
  // delta=2, alpha=0, beta=0: Gamma(3.5)/(Gamma(1.5) Gamma(2)) = 2.5*1.5
  GasModel g = make_gas(2.0, 0.0, 0.0, 1.0, 0.0);
  CHECK(g.c_s == Catch::Approx(3.75).epsilon(1e-13));
  // delta=3, alpha=0.5, beta=1: Gamma(5.5)/(Gamma(2) Gamma(3.5)) = 4.5*3.5
  GasModel g2 = make_gas(3.0, 0.5, 1.0, 2.0, 0.0);
  CHECK(g2.c_s == Catch::Approx(2.0 * 15.75).epsilon(1e-13));
}

TEST_CASE("kernel constant ratio equals inverse beta function") {
  // c_s * B((beta+3)/2, delta+alpha) = c_r, the identity that makes the
  // standard and resonant collision frequencies coincide.
  for (double delta : {2.0, 3.0, 4.5}) {
    for (double alpha : {0.0, 0.4, 0.9}) {
      for (double beta : {0.0, 0.5, 1.0}) {
        if (!(alpha < delta / 2.0)) continue;
        GasModel g = make_gas(delta, alpha, beta, 1.7, 0.0);
        double a = (beta + 3.0) / 2.0, b = delta + alpha;
        double log_beta_fn =
            std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        CHECK(g.c_s * std::exp(log_beta_fn) ==
              Catch::Approx(g.c_r).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gas validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(make_gas(1.5, 0.0, 0.0, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, 1.0, 0.0, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, -0.1, 0.0, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, 0.0, 1.5, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, 0.0, -0.2, 1.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, 0.0, 0.0, 0.0, 0.0), validation_error);
  CHECK_THROWS_AS(make_gas(2.0, 0.0, 0.0, 1.0, 1.2), validation_error);
  GasModel g = make_gas(2.0, 0.0, 0.0, 1.0, 0.5);
  g.c_s = 1.0;  // break the tie
  CHECK_THROWS_AS(validate(g), validation_error);
}

TEST_CASE("standard exchange worked example") {
  Vec3 c{1.0, 0.0, 0.0}, cs{-1.0, 0.0, 0.0}, sigma{0.0, 1.0, 0.0};
  // E = |g|^2/4 + i + i* = 1 + 1 = 2; R = r = 1/2.
  CollisionOut out = bl_collide_standard(c, cs, 0.5, 0.5, 0.5, 0.5, sigma);
  CHECK(out.c_prime[0] == 0.0);
  CHECK(out.c_prime[1] == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(out.c_prime[2] == 0.0);
  CHECK(out.c_star_prime[1] == Catch::Approx(-1.0).epsilon(1e-15));
  CHECK(out.i_prime == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(out.i_star_prime == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("standard exchange conserves momentum and total energy") {
  StreamRng rng(7, 1, 0);
  for (int k = 0; k < 2000; ++k) {
    Vec3 c = rng.maxwellian(1.3), cs = rng.maxwellian(0.6);
    double i = 2.0 * rng.uniform(), is = 3.0 * rng.uniform();
    double rr = rng.uniform(), rs = rng.uniform();
    Vec3 sigma = rng.unit_sphere();
    CollisionOut out = bl_collide_standard(c, cs, i, is, rr, rs, sigma);
    Vec3 dp = (out.c_prime + out.c_star_prime) - (c + cs);
    REQUIRE(norm(dp) <= 1e-14 * (norm(c) + norm(cs) + 1.0));
    double e0 = 0.5 * (norm2(c) + norm2(cs)) + i + is;
    double e1 = 0.5 * (norm2(out.c_prime) + norm2(out.c_star_prime)) +
                out.i_prime + out.i_star_prime;
    REQUIRE(std::abs(e1 - e0) <= 1e-12 * e0);
    REQUIRE(out.i_prime >= 0.0);
    REQUIRE(out.i_star_prime >= 0.0);
  }
}

TEST_CASE("resonant exchange conserves relative speed and internal energy") {
  StreamRng rng(7, 2, 0);
  for (int k = 0; k < 2000; ++k) {
    Vec3 c = rng.maxwellian(1.0), cs = rng.maxwellian(2.0);
    double i = 2.0 * rng.uniform(), is = 3.0 * rng.uniform();
    double rs = rng.uniform();
    Vec3 sigma = rng.unit_sphere();
    CollisionOut out = bl_collide_resonant(c, cs, i, is, rs, sigma);
    Vec3 dp = (out.c_prime + out.c_star_prime) - (c + cs);
    REQUIRE(norm(dp) <= 1e-14 * (norm(c) + norm(cs) + 1.0));
    double g0 = norm(c - cs), g1 = norm(out.c_prime - out.c_star_prime);
    REQUIRE(std::abs(g1 - g0) <= 1e-13 * (g0 + 1.0));
    double s0 = i + is, s1 = out.i_prime + out.i_star_prime;
    REQUIRE(std::abs(s1 - s0) <= 1e-14 * s0);
  }
}

TEST_CASE("cross sections satisfy detailed-balance symmetry") {
  StreamRng rng(11, 3, 0);
  for (double delta : {2.0, 3.0}) {
    for (double alpha : {0.0, 0.5}) {
      for (double beta : {0.0, 1.0}) {
        GasModel gas = make_gas(delta, alpha, beta, 1.0, 0.0);
        for (int k = 0; k < 200; ++k) {
          Vec3 c = rng.maxwellian(1.0), cs = rng.maxwellian(1.0);
          double i = 0.1 + rng.uniform(), is = 0.1 + rng.uniform();
          double rr = rng.uniform(), rsp = rng.uniform();
          Vec3 sigma = rng.unit_sphere();
          double g = norm(c - cs);
          double e = 0.25 * g * g + i + is;

          CollisionOut so = bl_collide_standard(c, cs, i, is, rr, rsp, sigma);
          double gp = norm(so.c_prime - so.c_star_prime);
          double lhs = std::pow(i * is, delta / 2.0 - 1.0) * g * g *
                       sigma_s(g, i, is, so.i_prime, so.i_star_prime, gas);
          double rhs = std::pow(so.i_prime * so.i_star_prime,
                                delta / 2.0 - 1.0) *
                       gp * gp *
                       sigma_s(gp, so.i_prime, so.i_star_prime, i, is, gas);
          REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));

          double ip = rsp * (i + is), isp = (1.0 - rsp) * (i + is);
          double lr = std::pow(i * is, delta / 2.0 - 1.0) *
                      sigma_r(g, i, is, ip, isp, gas);
          double rr2 = std::pow(ip * isp, delta / 2.0 - 1.0) *
                       sigma_r(g, ip, isp, i, is, gas);
          REQUIRE(lr == Catch::Approx(rr2).epsilon(1e-12));
          (void)e;
        }
      }
    }
  }
}

TEST_CASE("cross section and kernel forms agree") {
  // |g| sigma_s (1-R) E^2 = B_s [r(1-r)]^{delta/2-1} (1-R)^{delta-1} R^{1/2}
  // ties the differential form to the Borgnakke-Larsen kernel.
  StreamRng rng(13, 4, 0);
  for (double delta : {2.0, 3.0, 4.0}) {
    for (double alpha : {0.0, 0.5}) {
      for (double beta : {0.0, 0.5, 1.0}) {
        GasModel gas = make_gas(delta, alpha, beta, 2.3, 0.0);
        for (int k = 0; k < 100; ++k) {
          double g = 0.1 + 2.0 * rng.uniform();
          double i = 0.05 + rng.uniform(), is = 0.05 + rng.uniform();
          double rr = rng.uniform(), rsp = rng.uniform();
          double e = 0.25 * g * g + i + is;
          double ip = rsp * (1.0 - rr) * e;
          double isp = (1.0 - rsp) * (1.0 - rr) * e;
          double lhs = g * sigma_s(g, i, is, ip, isp, gas) * (1.0 - rr) * e * e;
          double rhs = kernel_b_s(g, i, is, rr, gas) *
                       std::pow(rsp * (1.0 - rsp), delta / 2.0 - 1.0) *
                       std::pow(1.0 - rr, delta - 1.0) * std::sqrt(rr);
          REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("cross section worked values") {
  GasModel gas = make_gas(2.0, 0.0, 1.0, 1.0, 0.0);
  // delta=2, alpha=0, beta=1: sigma_r = (i+i*)^{-1} with c_r = 1.
  CHECK(sigma_r(3.0, 1.0, 1.0, 0.5, 1.5, gas) ==
        Catch::Approx(0.5).epsilon(1e-14));
  // B_s = c_s g R^{1/2} = 6 * 3 * 0.5 at delta=2, alpha=0, beta=1.
  CHECK(gas.c_s == Catch::Approx(6.0).epsilon(1e-13));
  CHECK(kernel_b_s(3.0, 1.0, 1.0, 0.25, gas) ==
        Catch::Approx(9.0).epsilon(1e-13));
  CHECK(kernel_b_r(3.0, 1.0, 1.0, gas) == Catch::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("cross sections reject unreachable outcomes") {
  GasModel gas = make_gas(2.0, 0.0, 0.0, 1.0, 0.0);
  // primed internal energies exceeding the total energy
  CHECK_THROWS_AS(sigma_s(1.0, 0.1, 0.1, 5.0, 5.0, gas), validation_error);
  // zero total energy
  CHECK_THROWS_AS(sigma_s(0.0, 0.0, 0.0, 0.0, 0.0, gas), validation_error);
  // resonant singularity at vanishing internal energy
  CHECK_THROWS_AS(sigma_r(1.0, 0.0, 0.0, 0.0, 0.0, gas), validation_error);
}

TEST_CASE("specific heat ratio") {
  CHECK(specific_heat_ratio(2.0) == Catch::Approx(7.0 / 5.0).epsilon(1e-15));
  CHECK(specific_heat_ratio(3.0) == Catch::Approx(8.0 / 6.0).epsilon(1e-15));
}
