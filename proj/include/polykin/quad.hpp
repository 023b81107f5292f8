#pragma once

#include <vector>

#include "polykin/common.hpp"

namespace polykin {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Generalized Gauss-Laguerre: integrates f(x) x^a e^{-x} on (0, inf)
// exactly for polynomial f up to degree 2n-1. Requires a > -1.
QuadRule gauss_laguerre(int n, double a);

// Gauss-Hermite with weight e^{-x^2} on the real line.
QuadRule gauss_hermite(int n);

}  // namespace polykin
