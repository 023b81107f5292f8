#include "polykin/chapman_enskog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "polykin/quad.hpp"

namespace polykin {

namespace {

void check_mc(const McParams& mc) {
  if (mc.n_samples < 1000)
    throw validation_error("galerkin assembly: need at least 1000 samples");
  if (!(mc.entry_rel_budget > 0.0))
    throw validation_error("galerkin assembly: error budget must be positive");
}

// Exact right-hand sides (source, M_r phi_a).  The sources contract against
// the family prefactor to a polynomial in (x_c, x_I), so a small
// Gauss-Laguerre product rule is exact.
std::vector<Eigen::VectorXd> exact_rhs(const SpectralBasis& b,
                                       const MacroState& s, double delta) {
  if (b.kind == BasisKind::scalar_d) return {};
  int nq_c = b.n_c + 2;
  int nq_i = b.n_i + 2;
  QuadRule qc = gauss_laguerre(nq_c, 0.5);
  QuadRule qi = gauss_laguerre(nq_i, 0.5 * delta - 1.0);
  LaguerreFamily lc(b.n_c, radial_weight_exponent(b.kind));
  LaguerreFamily li(b.n_i, 0.5 * delta - 1.0);
  double meas_norm = std::tgamma(1.5) * std::tgamma(0.5 * delta);
  int n_rhs = b.kind == BasisKind::tensorial_a ? 1 : 2;
  std::vector<Eigen::VectorXd> rhs(n_rhs,
                                   Eigen::VectorXd::Zero(basis_size(b)));
  std::vector<double> vc(b.n_c), vi(b.n_i);
  double two_t = 2.0 * s.t_tr;
  for (int j = 0; j < nq_c; ++j) {
    double x = qc.x[j];
    lc.eval(x, vc.data());
    for (int k = 0; k < nq_i; ++k) {
      double y = qi.x[k];
      li.eval(y, vi.data());
      double w = s.rho * qc.w[j] * qi.w[k] / meas_norm;
      // Prefactor-contracted sources: A:A p, c^2 (x_c - 5/2) p, and
      // c^2 (x_I - delta/2) p.
      double src0, src1 = 0.0;
      if (b.kind == BasisKind::tensorial_a) {
        src0 = (2.0 / 3.0) * two_t * two_t * x * x;
      } else {
        src0 = two_t * x * (x - 2.5);
        src1 = two_t * x * (y - 0.5 * delta);
      }
      for (int p = 0; p < b.n_c; ++p)
        for (int q = 0; q < b.n_i; ++q) {
          double pa = vc[p] * vi[q];
          rhs[0][p * b.n_i + q] += w * src0 * pa;
          if (n_rhs == 2) rhs[1][p * b.n_i + q] += w * src1 * pa;
        }
    }
  }
  return rhs;
}

struct ConstrainedSolve {
  Eigen::VectorXd x;   // full-length, dropped entries exact zero
  Eigen::VectorXd se;  // propagated first-order errors, same layout
  double residual = 0.0;
  double min_eig = 0.0;
};

ConstrainedSolve solve_constrained(const AssembledSystem& sys,
                                   const Eigen::VectorXd& rhs,
                                   const std::vector<int>& drop) {
  int n = static_cast<int>(sys.gram.rows());
  std::vector<int> keep;
  keep.reserve(n);
  for (int a = 0; a < n; ++a)
    if (std::find(drop.begin(), drop.end(), a) == drop.end()) keep.push_back(a);
  int m = static_cast<int>(keep.size());
  Eigen::MatrixXd g(m, m), se(m, m);
  Eigen::VectorXd r(m);
  for (int i = 0; i < m; ++i) {
    r[i] = rhs[keep[i]];
    for (int j = 0; j < m; ++j) {
      g(i, j) = sys.gram(keep[i], keep[j]);
      se(i, j) = sys.gram_se(keep[i], keep[j]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  double lo = es.eigenvalues()(0);
  double hi = es.eigenvalues()(m - 1);
  if (!(lo > 0.0) || lo < 1e-12 * hi)
    throw numerical_error(
        "galerkin solve: gram matrix is indefinite or near singular on the "
        "constrained subspace (basis too large for the sample budget)");
  Eigen::VectorXd proj = es.eigenvectors().transpose() * r;
  Eigen::VectorXd xk =
      es.eigenvectors() * (proj.array() / es.eigenvalues().array()).matrix();
  ConstrainedSolve out;
  out.min_eig = lo;
  double rn = r.norm();
  out.residual = rn > 0.0 ? (g * xk - r).norm() / rn : 0.0;
  // First-order noise propagation dx = -G^{-1} dG x over independent
  // symmetric entry perturbations.
  Eigen::MatrixXd ginv =
      es.eigenvectors() *
      es.eigenvalues().array().inverse().matrix().asDiagonal() *
      es.eigenvectors().transpose();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      double diag_term = ginv(j, a) * xk[a] * se(a, a);
      acc += diag_term * diag_term;
      for (int b = a + 1; b < m; ++b) {
        double t = se(a, b) * (ginv(j, a) * xk[b] + ginv(j, b) * xk[a]);
        acc += t * t;
      }
    }
    var[j] = acc;
  }
  out.x = Eigen::VectorXd::Zero(n);
  out.se = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    out.x[keep[i]] = xk[i];
    out.se[keep[i]] = std::sqrt(var[i]);
  }
  return out;
}

}  // namespace

AssembledSystem assemble_system(const SpectralBasis& basis,
                                const MacroState& state, const GasModel& gas,
                                const McParams& mc) {
  validate(basis);
  validate(state);
  validate(gas);
  check_mc(mc);
  const int n = basis_size(basis);
  const int comps = prefactor_components(basis.kind);
  BasisEvaluator ev(basis, state, gas.delta);
  const double* cw = contraction_weights(basis.kind);
  double sqrt_cw[6];
  for (int k = 0; k < comps; ++k) sqrt_cw[k] = std::sqrt(cw[k]);
  // Same quarter prefactor as the scalar Dirichlet form.
  const double pref = 0.5 * weak_prefactor_resonant(state, gas);

  constexpr int kBatches = BatchAccumulator::kBatches;
  std::vector<Eigen::MatrixXd> batch(kBatches,
                                     Eigen::MatrixXd::Zero(n, n));
  std::array<std::int64_t, kBatches> counts{};
  Eigen::MatrixXd d(n, comps);
  std::vector<double> buf(static_cast<std::size_t>(n) * comps);
  const std::int64_t nsamp = mc.n_samples;
  for (std::int64_t k = 0; k < nsamp; ++k) {
    StreamRng rng(mc.seed, streams::gram, static_cast<std::uint64_t>(k));
    PairSample p = draw_pair(state, gas, rng, false);
    CollisionOut out = bl_collide_resonant(p.xi, p.xi_star, p.i, p.i_star,
                                           p.r_split, p.sigma);
    std::fill(buf.begin(), buf.end(), 0.0);
    ev.eval_add(p.xi, p.i, 1.0, buf.data());
    ev.eval_add(p.xi_star, p.i_star, 1.0, buf.data());
    ev.eval_add(out.c_prime, out.i_prime, -1.0, buf.data());
    ev.eval_add(out.c_star_prime, out.i_star_prime, -1.0, buf.data());
    if (!std::isfinite(p.w_kernel))
      throw numerical_error("galerkin assembly: non-finite kernel weight");
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < comps; ++c)
        d(a, c) = buf[static_cast<std::size_t>(a) * comps + c] * sqrt_cw[c];
    int b = static_cast<int>(k * kBatches / nsamp);
    batch[b].selfadjointView<Eigen::Upper>().rankUpdate(d, p.w_kernel);
    counts[b] += 1;
  }

  AssembledSystem sys;
  sys.basis = basis;
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < kBatches; ++b) total += batch[b];
  double inv_n = 1.0 / static_cast<double>(nsamp);
  sys.gram = Eigen::MatrixXd(n, n);
  sys.gram_se = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b2 = a; b2 < n; ++b2) {
      double mean = pref * total(a, b2) * inv_n;
      double var = 0.0;
      for (int b = 0; b < kBatches; ++b) {
        double bm = pref * batch[b](a, b2) / static_cast<double>(counts[b]);
        var += (bm - mean) * (bm - mean);
      }
      var /= static_cast<double>(kBatches) * (kBatches - 1);
      sys.gram(a, b2) = mean;
      sys.gram(b2, a) = mean;
      double s = std::sqrt(var);
      sys.gram_se(a, b2) = s;
      sys.gram_se(b2, a) = s;
    }

  // Per-entry error gate against the Cauchy-Schwarz scale of the entry.
  // Rows spanned by collision invariants are structurally null (their
  // differences vanish identically) and are excluded.
  std::vector<int> drop = constrained_indices(basis);
  auto dropped = [&](int a) {
    return std::find(drop.begin(), drop.end(), a) != drop.end();
  };
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    if (dropped(a)) continue;
    for (int b2 = a; b2 < n; ++b2) {
      if (dropped(b2)) continue;
      double scale = std::sqrt(sys.gram(a, a) * sys.gram(b2, b2));
      if (!(scale > 0.0))
        throw numerical_error("galerkin assembly: vanishing diagonal entry");
      worst = std::max(worst, sys.gram_se(a, b2) / scale);
    }
  }
  sys.max_rel_se = worst;
  if (worst > mc.entry_rel_budget)
    throw numerical_error(
        "galerkin assembly: matrix entry std error exceeds the Monte Carlo "
        "budget; increase the sample count or shrink the basis");
  sys.rhs = exact_rhs(basis, state, gas.delta);
  return sys;
}

CESolution solve_abc(const MacroState& state, const GasModel& gas,
                     const SpectralBasis& basis, const McParams& mc) {
  SpectralBasis ba{basis.n_c, basis.n_i, BasisKind::tensorial_a};
  SpectralBasis bv{basis.n_c, basis.n_i, BasisKind::vector_bc};
  AssembledSystem sys_a = assemble_system(ba, state, gas, mc);
  AssembledSystem sys_v = assemble_system(bv, state, gas, mc);
  ConstrainedSolve sa = solve_constrained(sys_a, sys_a.rhs[0], {});
  std::vector<int> drop_v = constrained_indices(bv);
  ConstrainedSolve sb = solve_constrained(sys_v, sys_v.rhs[0], drop_v);
  ConstrainedSolve sc = solve_constrained(sys_v, sys_v.rhs[1], drop_v);
  CESolution sol;
  sol.n_c = basis.n_c;
  sol.n_i = basis.n_i;
  sol.coeff_a = sa.x;
  sol.coeff_b = sb.x;
  sol.coeff_c = sc.x;
  sol.se_a = sa.se;
  sol.se_b = sb.se;
  sol.se_c = sc.se;
  sol.gram_residual = std::max({sa.residual, sb.residual, sc.residual});
  sol.mc_error_budget = std::max(sys_a.max_rel_se, sys_v.max_rel_se);
  sol.gram_min_eig = std::min(sa.min_eig, sb.min_eig);
  return sol;
}

double eval_ce(const CESolution& sol, CEComponent which,
               const MacroState& state, const GasModel& gas, double c_mag,
               double i) {
  BasisKind kind = BasisKind::scalar_d;
  const Eigen::VectorXd* coeff = nullptr;
  switch (which) {
    case CEComponent::cal_a:
      kind = BasisKind::tensorial_a;
      coeff = &sol.coeff_a;
      break;
    case CEComponent::cal_b:
      kind = BasisKind::vector_bc;
      coeff = &sol.coeff_b;
      break;
    case CEComponent::cal_c:
      kind = BasisKind::vector_bc;
      coeff = &sol.coeff_c;
      break;
    case CEComponent::d_tilde:
      if (!sol.coeff_d)
        throw validation_error("eval: no relaxation correction was solved");
      coeff = &*sol.coeff_d;
      break;
  }
  SpectralBasis b{sol.n_c, sol.n_i, kind};
  if (coeff->size() != basis_size(b))
    throw validation_error("eval: coefficient vector does not match basis");
  BasisEvaluator ev(b, state, gas.delta);
  double buf[256];
  ev.eval_scalar(c_mag, i, buf);
  double acc = 0.0;
  for (int a = 0; a < basis_size(b); ++a) acc += (*coeff)[a] * buf[a];
  return acc;
}

TransportCoefficients transport_coeffs(const CESolution& sol,
                                       const MacroState& state,
                                       const GasModel& gas) {
  validate(state);
  validate(gas);
  if (sol.n_c < 2 || sol.n_i < 1)
    throw validation_error("transport: empty expansion solution");
  double delta = gas.delta;
  double gam_half = std::tgamma(0.5 * delta);
  int nq_c = sol.n_c + 4;
  int nq_i = sol.n_i + 4;
  QuadRule qc6 = gauss_laguerre(nq_c, 2.5);
  QuadRule qc4 = gauss_laguerre(nq_c, 1.5);
  QuadRule qi0 = gauss_laguerre(nq_i, 0.5 * delta - 1.0);
  QuadRule qiU = gauss_laguerre(nq_i, 0.5 * delta);

  // Linear functionals ell such that Lambda = ell . coeff; built by
  // evaluating the scalar basis on the product rule.
  auto functional = [&](BasisKind kind, const QuadRule& qx,
                        const QuadRule& qy) {
    SpectralBasis b{sol.n_c, sol.n_i, kind};
    LaguerreFamily lc(b.n_c, radial_weight_exponent(kind));
    LaguerreFamily li(b.n_i, 0.5 * delta - 1.0);
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(basis_size(b));
    std::vector<double> vc(b.n_c), vi(b.n_i);
    for (std::size_t j = 0; j < qx.x.size(); ++j) {
      lc.eval(qx.x[j], vc.data());
      for (std::size_t k = 0; k < qy.x.size(); ++k) {
        li.eval(qy.x[k], vi.data());
        double w = qx.w[j] * qy.w[k];
        for (int p = 0; p < b.n_c; ++p)
          for (int q = 0; q < b.n_i; ++q)
            ell[p * b.n_i + q] += w * vc[p] * vi[q];
      }
    }
    return ell;
  };
  double rho = state.rho, t_tr = state.t_tr, t_int = state.t_int;
  double sqrt_pi = std::sqrt(pi);

  Eigen::VectorXd ell_mu = functional(BasisKind::tensorial_a, qc6, qi0) *
                           (8.0 / (15.0 * sqrt_pi) * rho * t_tr / gam_half);
  Eigen::VectorXd ell_tr = functional(BasisKind::vector_bc, qc6, qi0) *
                           (2.0 / (3.0 * sqrt_pi) * 2.0 * rho * t_tr * t_tr /
                            gam_half);
  Eigen::VectorXd ell_int = functional(BasisKind::vector_bc, qc4, qiU) *
                            (4.0 / (3.0 * sqrt_pi) * rho * t_tr * t_int /
                             gam_half);
  auto apply = [](const Eigen::VectorXd& ell, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& se) {
    double v = ell.dot(x);
    double var = 0.0;
    for (int a = 0; a < ell.size(); ++a) var += sq(ell[a] * se[a]);
    return std::pair<double, double>(v, std::sqrt(var));
  };
  TransportCoefficients tc;
  std::tie(tc.lambda_mu, tc.se_lambda_mu) = apply(ell_mu, sol.coeff_a, sol.se_a);
  std::tie(tc.lambda_trtr, tc.se_lambda_trtr) =
      apply(ell_tr, sol.coeff_b, sol.se_b);
  std::tie(tc.lambda_inttr, tc.se_lambda_inttr) =
      apply(ell_tr, sol.coeff_c, sol.se_c);
  std::tie(tc.lambda_trint, tc.se_lambda_trint) =
      apply(ell_int, sol.coeff_b, sol.se_b);
  std::tie(tc.lambda_intint, tc.se_lambda_intint) =
      apply(ell_int, sol.coeff_c, sol.se_c);
  tc.f_relax = relax_f(state, gas);
  if (!(tc.lambda_mu > 0.0) || !(tc.lambda_trtr > 0.0) ||
      !(tc.lambda_intint > 0.0))
    throw numerical_error(
        "transport: a principal coefficient came out nonpositive");
  return tc;
}

double relax_f(const MacroState& state, const GasModel& gas) {
  validate(state);
  validate(gas);
  double d = gas.delta, a = gas.alpha, b = gas.beta;
  double log_c = (b + 2.0) * std::log(2.0) + 0.5 * std::log(pi) +
                 std::lgamma(d + a + 1.0) + 2.0 * std::lgamma(0.5 * d) +
                 std::lgamma(0.5 * (b + 5.0)) - 2.0 * std::lgamma(d) -
                 std::log(d + a + 0.5 * (b + 3.0));
  double c_const = std::exp(log_c) * gas.c_r;
  return c_const * state.rho * state.rho * std::pow(state.t_tr, 0.5 * b) *
         std::pow(state.t_int, a);
}

double relax_source_d(const MacroState& state, const GasModel& gas,
                      double c_mag, double i) {
  validate(state);
  validate(gas);
  double t_tr = state.t_tr, t_int = state.t_int;
  if (t_tr == t_int)
    throw validation_error(
        "relax source: needs a temperature gap; average one-sided states for "
        "the limit");
  double d1 = (1.0 / state.rho) *
              ((1.0 / t_tr) * (c_mag * c_mag / (3.0 * t_tr) - 1.0) -
               (1.0 / t_int) * (2.0 * i / (gas.delta * t_int) - 1.0));
  double s = std::max(t_tr, t_int);
  TwoTempMaxwellian mx{state, gas};
  double m_pref = eval_m_r_reduced(mx, state.u, 0.0);
  double f_val = relax_f(state, gas);
  double d2 = q_s_mr_mr_reduced(c_mag, i, state, gas) *
              std::exp(i * (1.0 / t_int - 1.0 / s)) /
              (m_pref * f_val * (t_tr - t_int));
  return d1 + d2;
}

McEstimate relax_k(const MacroState& state, const GasModel& gas,
                   const SpectralBasis& basis, const McParams& mc) {
  validate(state);
  validate(gas);
  validate(basis);
  check_mc(mc);
  double tbar = equilibrium_temperature(state, gas.delta);
  double dt = state.t_tr - state.t_int;
  if (std::abs(dt) < 1e-3 * tbar) {
    // Two-sided limit: evaluate at a small gap on either side of equality
    // in T_int and average.
    double gap = 5e-3 * tbar;
    MacroState plus = state;
    plus.t_int = state.t_tr - gap;
    MacroState minus = state;
    minus.t_int = state.t_tr + gap;
    McEstimate kp = relax_k(plus, gas, basis, mc);
    McEstimate km = relax_k(minus, gas, basis, mc);
    McEstimate out;
    out.value = 0.5 * (kp.value + km.value);
    out.std_error = 0.5 * std::hypot(kp.std_error, km.std_error);
    out.n_samples = kp.n_samples + km.n_samples;
    out.seed = mc.seed;
    return out;
  }
  if (state.t_tr >= 2.0 * state.t_int)
    throw validation_error(
        "relax_k: needs T_tr < 2 T_int for a square-integrable source");
  SpectralBasis sd{basis.n_c, basis.n_i, BasisKind::scalar_d};
  AssembledSystem sys = assemble_system(sd, state, gas, mc);

  // Source projection (D, M_r phi_a) by a generous product rule; the closed
  // bracket is polynomial, the pointwise-source part smooth by construction.
  int nq_c = std::max(basis.n_c + 6, 16);
  int nq_i = std::max(basis.n_i + 6, 16);
  QuadRule qc = gauss_laguerre(nq_c, 0.5);
  QuadRule qi = gauss_laguerre(nq_i, 0.5 * gas.delta - 1.0);
  LaguerreFamily lc(basis.n_c, 0.5);
  LaguerreFamily li(basis.n_i, 0.5 * gas.delta - 1.0);
  double meas_norm = std::tgamma(1.5) * std::tgamma(0.5 * gas.delta);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis_size(sd));
  std::vector<double> vc(basis.n_c), vi(basis.n_i);
  for (int j = 0; j < nq_c; ++j) {
    double c_mag = std::sqrt(2.0 * state.t_tr * qc.x[j]);
    lc.eval(qc.x[j], vc.data());
    for (int k = 0; k < nq_i; ++k) {
      double i_val = state.t_int * qi.x[k];
      li.eval(qi.x[k], vi.data());
      double dval = relax_source_d(state, gas, c_mag, i_val);
      double w = state.rho * qc.w[j] * qi.w[k] / meas_norm;
      for (int p = 0; p < basis.n_c; ++p)
        for (int q = 0; q < basis.n_i; ++q)
          rhs[p * basis.n_i + q] += w * dval * vc[p] * vi[q];
    }
  }
  ConstrainedSolve sol = solve_constrained(sys, rhs, constrained_indices(sd));

  auto ev = std::make_shared<BasisEvaluator>(sd, state, gas.delta);
  Eigen::VectorXd coeff = sol.x;
  Vec3 u = state.u;
  int n_modes = basis_size(sd);
  TestFunction d_tilde = tf_general([ev, coeff, u, n_modes](const Vec3& xi,
                                                           double i) {
    double buf[256];
    ev->eval_scalar(norm(xi - u), i, buf);
    double acc = 0.0;
    for (int a = 0; a < n_modes; ++a) acc += coeff[a] * buf[a];
    return acc;
  });
  McEstimate est = weak_q_s_bilinear_mc(state, d_tilde, tf_internal_energy(),
                                        gas, mc.n_samples, mc.seed + 0x9e37);
  est.value *= 2.0;
  est.std_error *= 2.0;
  return est;
}

TransportCoefficients maxwell_closed_form_lambda(const MacroState& state,
                                                 const GasModel& gas) {
  validate(state);
  validate(gas);
  if (gas.alpha != 0.0 || gas.beta != 0.0)
    throw validation_error(
        "closed-form transport block exists only for the energy- and "
        "speed-independent kernel (alpha = beta = 0)");
  double d = gas.delta;
  double gam_ratio = std::exp(2.0 * std::lgamma(0.5 * d) - std::lgamma(d));
  double lam_a = 2.0 * pi * state.rho * gas.c_r * gam_ratio;
  double lam_b = (2.0 / 3.0) * lam_a;
  double lam_c = lam_a;
  TransportCoefficients tc;
  tc.lambda_mu = state.rho * state.t_tr / lam_a;
  tc.lambda_trtr = 2.5 * state.rho * state.t_tr * state.t_tr / lam_b;
  tc.lambda_intint = 0.5 * d * state.rho * state.t_tr * state.t_int / lam_c;
  tc.lambda_inttr = 0.0;
  tc.lambda_trint = 0.0;
  tc.f_relax = relax_f(state, gas);
  return tc;
}

}  // namespace polykin
