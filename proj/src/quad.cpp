#include "polykin/quad.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace polykin {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the orthogonal
// polynomial recurrence; weights are mu0 * (first eigenvector component)^2.
QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                      double mu0) {
  int n = static_cast<int>(diag.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jac(k, k) = diag(k);
    if (k + 1 < n) {
      jac(k, k + 1) = off(k);
      jac(k + 1, k) = off(k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.x[k] = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    rule.w[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadRule gauss_laguerre(int n, double a) {
  if (n < 1) throw validation_error("gauss_laguerre: n must be >= 1");
  if (!(a > -1.0)) throw validation_error("gauss_laguerre: need a > -1");
  Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + a + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k * (k + a));
  return golub_welsch(diag, off, std::exp(std::lgamma(a + 1.0)));
}

QuadRule gauss_hermite(int n) {
  if (n < 1) throw validation_error("gauss_hermite: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  return golub_welsch(diag, off, std::sqrt(pi));
}

}  // namespace polykin
