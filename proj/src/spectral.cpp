#include "polykin/spectral.hpp"

#include <cmath>

#include "polykin/gas.hpp"

namespace polykin {

void validate(const SpectralBasis& b) {
  if (b.n_c < 2) throw validation_error("spectral basis: n_c must be >= 2");
  if (b.n_i < 1) throw validation_error("spectral basis: n_i must be >= 1");
  if (b.n_c > 64 || b.n_i > 64 || b.n_c * b.n_i > 256)
    throw validation_error("spectral basis: size exceeds the supported cap");
}

double radial_weight_exponent(BasisKind kind) {
  switch (kind) {
    case BasisKind::tensorial_a:
      return 2.5;
    case BasisKind::vector_bc:
      return 1.5;
    case BasisKind::scalar_d:
      return 0.5;
  }
  throw validation_error("spectral basis: unknown kind");
}

int prefactor_components(BasisKind kind) {
  switch (kind) {
    case BasisKind::tensorial_a:
      return 6;
    case BasisKind::vector_bc:
      return 3;
    case BasisKind::scalar_d:
      return 1;
  }
  throw validation_error("spectral basis: unknown kind");
}

const double* contraction_weights(BasisKind kind) {
  static const double tensor_w[6] = {1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
  static const double vector_w[3] = {1.0, 1.0, 1.0};
  static const double scalar_w[1] = {1.0};
  switch (kind) {
    case BasisKind::tensorial_a:
      return tensor_w;
    case BasisKind::vector_bc:
      return vector_w;
    case BasisKind::scalar_d:
      return scalar_w;
  }
  throw validation_error("spectral basis: unknown kind");
}

void eval_prefactor(BasisKind kind, const Vec3& c, double* comps) {
  switch (kind) {
    case BasisKind::tensorial_a: {
      double third = norm2(c) / 3.0;
      comps[0] = c[0] * c[0] - third;
      comps[1] = c[1] * c[1] - third;
      comps[2] = c[2] * c[2] - third;
      comps[3] = c[0] * c[1];
      comps[4] = c[0] * c[2];
      comps[5] = c[1] * c[2];
      return;
    }
    case BasisKind::vector_bc:
      comps[0] = c[0];
      comps[1] = c[1];
      comps[2] = c[2];
      return;
    case BasisKind::scalar_d:
      comps[0] = 1.0;
      return;
  }
  throw validation_error("spectral basis: unknown kind");
}

double mass_norm(BasisKind kind, const MacroState& s) {
  switch (kind) {
    case BasisKind::tensorial_a:
      // (A:A p, p M_r): (2/3) E[c^4] with the x^{5/2} measure folded in.
      return 10.0 * s.rho * s.t_tr * s.t_tr;
    case BasisKind::vector_bc:
      return 3.0 * s.rho * s.t_tr;
    case BasisKind::scalar_d:
      return s.rho;
  }
  throw validation_error("spectral basis: unknown kind");
}

std::vector<int> constrained_indices(const SpectralBasis& b) {
  switch (b.kind) {
    case BasisKind::tensorial_a:
      return {};
    case BasisKind::vector_bc:
      return {basis_index(b, 0, 0)};
    case BasisKind::scalar_d: {
      std::vector<int> out = {basis_index(b, 0, 0), basis_index(b, 1, 0)};
      if (b.n_i > 1) out.push_back(basis_index(b, 0, 1));
      return out;
    }
  }
  throw validation_error("spectral basis: unknown kind");
}

LaguerreFamily::LaguerreFamily(int n, double a) : n_(n), a_(a) {
  if (n < 1) throw validation_error("laguerre family: need n >= 1");
  if (!(a > -1.0)) throw validation_error("laguerre family: need a > -1");
  inv_norm_.resize(n);
  for (int k = 0; k < n; ++k) {
    // ||L_k||^2 = Gamma(k+a+1) / (k! Gamma(a+1)) under the normalized weight.
    double log_n2 =
        std::lgamma(k + a + 1.0) - std::lgamma(k + 1.0) - std::lgamma(a + 1.0);
    inv_norm_[k] = std::exp(-0.5 * log_n2);
  }
}

void LaguerreFamily::eval(double x, double* out) const {
  double lm = 1.0;  // L_0
  out[0] = inv_norm_[0];
  if (n_ == 1) return;
  double l = 1.0 + a_ - x;  // L_1
  out[1] = l * inv_norm_[1];
  for (int k = 1; k + 1 < n_; ++k) {
    double ln = ((2.0 * k + a_ + 1.0 - x) * l - (k + a_) * lm) / (k + 1.0);
    lm = l;
    l = ln;
    out[k + 1] = l * inv_norm_[k + 1];
  }
}

BasisEvaluator::BasisEvaluator(const SpectralBasis& b, const MacroState& s,
                               double delta)
    : basis_(b),
      u_(s.u),
      t_tr_(s.t_tr),
      t_int_(s.t_int),
      n_(basis_size(b)),
      comps_(prefactor_components(b.kind)),
      lc_(b.n_c, radial_weight_exponent(b.kind)),
      li_(b.n_i, 0.5 * delta - 1.0) {
  validate(b);
  validate(s);
}

void BasisEvaluator::eval_scalar(double c_mag, double i, double* out) const {
  double xc = 0.5 * c_mag * c_mag / t_tr_;
  double xi = i / t_int_;
  double vc[64], vi[64];
  lc_.eval(xc, vc);
  li_.eval(xi, vi);
  for (int p = 0; p < basis_.n_c; ++p)
    for (int q = 0; q < basis_.n_i; ++q) out[p * basis_.n_i + q] = vc[p] * vi[q];
}

void BasisEvaluator::eval(const Vec3& xi_vel, double i, double* out) const {
  Vec3 c = xi_vel - u_;
  double pref[6];
  eval_prefactor(basis_.kind, c, pref);
  double scal[256];
  eval_scalar(norm(c), i, scal);
  for (int a = 0; a < n_; ++a)
    for (int k = 0; k < comps_; ++k) out[a * comps_ + k] = scal[a] * pref[k];
}

void BasisEvaluator::eval_add(const Vec3& xi_vel, double i, double sign,
                              double* out) const {
  Vec3 c = xi_vel - u_;
  double pref[6];
  eval_prefactor(basis_.kind, c, pref);
  double scal[256];
  eval_scalar(norm(c), i, scal);
  for (int a = 0; a < n_; ++a)
    for (int k = 0; k < comps_; ++k)
      out[a * comps_ + k] += sign * scal[a] * pref[k];
}

}  // namespace polykin
