#pragma once

#include <vector>

#include "polykin/common.hpp"
#include "polykin/macro.hpp"

namespace polykin {

// The three Galerkin families used to expand the linearized-equation
// solutions: a traceless tensor in c for the viscous problem, a vector in c
// for the two heat-flux problems, and a plain scalar for the relaxation
// correction.
enum class BasisKind { tensorial_a, vector_bc, scalar_d };

// Product basis p_{pq}(x_c, x_I) = Lhat_p(x_c) Lhat_q(x_I) with
// x_c = |c|^2/(2 T_tr), x_I = I/T_int, times the family prefactor
// (c_i c_j - |c|^2 delta_ij / 3, c_i, or 1).  The radial Laguerre parameter
// is chosen per family so that the prefactor-contracted M_r inner product
// is exactly diagonal.
struct SpectralBasis {
  int n_c = 8;  // radial polynomial count (orders 0 .. n_c-1)
  int n_i = 4;  // internal-energy polynomial count
  BasisKind kind = BasisKind::vector_bc;
};

void validate(const SpectralBasis& b);

inline int basis_size(const SpectralBasis& b) { return b.n_c * b.n_i; }
inline int basis_index(const SpectralBasis& b, int p, int q) {
  return p * b.n_i + q;
}

// Laguerre parameter of the radial factor: 5/2, 3/2, 1/2.  The extra weight
// over the bare 1/2 of the 3-D radial Gaussian absorbs the contracted
// prefactor (A:A = (2/3)c^4 and c_i c_i = c^2 respectively).
double radial_weight_exponent(BasisKind kind);

// Packed prefactor component count: 6 (symmetric tensor), 3, 1.
int prefactor_components(BasisKind kind);

// Frobenius weights of the packed components; off-diagonal tensor slots
// count twice.
const double* contraction_weights(BasisKind kind);

// Fills comps[] with the prefactor values at peculiar velocity c, packed as
// [xx, yy, zz, xy, xz, yz] / [x, y, z] / [1].
void eval_prefactor(BasisKind kind, const Vec3& c, double* comps);

// (phi_a, M_r phi_b) = mass_norm * delta_ab for the orthonormal product
// basis: 10 rho T_tr^2, 3 rho T_tr, rho.
double mass_norm(BasisKind kind, const MacroState& s);

// Flat indices removed from the solve: the overlap of the family with the
// kernel of the resonant linearized operator.  vector_bc: the c_i direction
// (p=q=0); scalar_d: the span of {1, |c|^2, I} ((0,0), (1,0), (0,1)).
std::vector<int> constrained_indices(const SpectralBasis& b);

// Orthonormal generalized Laguerre family w.r.t. x^a e^{-x} / Gamma(a+1) on
// (0, inf); values by the three-term recurrence with precomputed norms.
class LaguerreFamily {
 public:
  LaguerreFamily(int n, double a);
  void eval(double x, double* out) const;
  int size() const { return n_; }
  double alpha() const { return a_; }

 private:
  int n_;
  double a_;
  std::vector<double> inv_norm_;
};

// Evaluates all scalar parts (and optionally the prefactor-multiplied
// components) of a basis against a fixed macroscopic state.
class BasisEvaluator {
 public:
  BasisEvaluator(const SpectralBasis& b, const MacroState& s, double delta);

  int size() const { return n_; }
  int comps() const { return comps_; }
  const SpectralBasis& basis() const { return basis_; }

  // out[a] = p_a at x_c = c_mag^2/(2 T_tr), x_I = i/T_int.
  void eval_scalar(double c_mag, double i, double* out) const;

  // out[a * comps() + k] = p_a(x_c, x_I) * prefactor_k(xi - u);
  // components packed as in eval_prefactor.
  void eval(const Vec3& xi, double i, double* out) const;

  // As eval, but accumulates sign * phi into out (collision differences).
  void eval_add(const Vec3& xi, double i, double sign, double* out) const;

 private:
  SpectralBasis basis_;
  Vec3 u_;
  double t_tr_, t_int_;
  int n_, comps_;
  LaguerreFamily lc_, li_;
};

}  // namespace polykin
