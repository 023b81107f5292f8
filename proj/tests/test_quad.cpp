#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polykin/quad.hpp"

using namespace polykin;

TEST_CASE("generalized Gauss-Laguerre reproduces gamma-function moments") {
  for (double a : {0.0, 0.5, 1.0, 2.5}) {
    QuadRule q = gauss_laguerre(8, a);
    REQUIRE(q.x.size() == 8);
    // integral of x^k x^a e^{-x} = Gamma(a+k+1), exact through k = 15
    for (int k = 0; k <= 15; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.x.size(); ++j)
        s += q.w[j] * std::pow(q.x[j], k);
      double want = std::exp(std::lgamma(a + k + 1.0));
      REQUIRE(s == Catch::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gauss-Laguerre nodes are positive and increasing") {
  QuadRule q = gauss_laguerre(20, 1.5);
  REQUIRE(q.x.front() > 0.0);
  for (std::size_t j = 1; j < q.x.size(); ++j) REQUIRE(q.x[j] > q.x[j - 1]);
  for (double w : q.w) REQUIRE(w > 0.0);
}

TEST_CASE("Gauss-Hermite reproduces Gaussian moments") {
  QuadRule q = gauss_hermite(12);
  auto moment = [&](int k) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.x.size(); ++j)
      s += q.w[j] * std::pow(q.x[j], k);
    return s;
  };
  double rp = std::sqrt(pi);
  CHECK(moment(0) == Catch::Approx(rp).epsilon(1e-13));
  CHECK(std::abs(moment(1)) <= 1e-13);
  CHECK(moment(2) == Catch::Approx(0.5 * rp).epsilon(1e-13));
  CHECK(std::abs(moment(3)) <= 1e-12);
  CHECK(moment(4) == Catch::Approx(0.75 * rp).epsilon(1e-13));
  // double factorial growth at the exactness edge k = 22
  double want = rp;
  for (int m = 1; m <= 11; ++m) want *= (2.0 * m - 1.0) / 2.0;
  CHECK(moment(22) == Catch::Approx(want).epsilon(1e-11));
}

TEST_CASE("quadrature rejects invalid orders") {
  CHECK_THROWS_AS(gauss_laguerre(0, 0.0), validation_error);
  CHECK_THROWS_AS(gauss_laguerre(4, -1.5), validation_error);
  CHECK_THROWS_AS(gauss_hermite(0), validation_error);
}
