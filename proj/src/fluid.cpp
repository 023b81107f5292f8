#include "polykin/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace polykin {

namespace {

constexpr double kGammaTr = 5.0 / 3.0;

struct Prim {
  double rho, u, t_tr, t_int;
};

Prim prim_of(const Cons4& c, double delta, const char* where) {
  if (!(c[0] > 0.0)) {
    throw numerical_error(std::string(where) + ": nonpositive density");
  }
  const double u = c[1] / c[0];
  const double t_tr = (c[2] - 0.5 * c[0] * u * u) * 2.0 / (3.0 * c[0]);
  const double t_int = 2.0 * c[3] / (delta * c[0]);
  if (!(t_tr > 0.0) || !(t_int > 0.0)) {
    throw numerical_error(std::string(where) + ": nonpositive temperature");
  }
  return {c[0], u, t_tr, t_int};
}

Cons4 cons_of(const Prim& w, double delta) {
  return {w.rho, w.rho * w.u,
          1.5 * w.rho * w.t_tr + 0.5 * w.rho * w.u * w.u,
          0.5 * delta * w.rho * w.t_int};
}

Cons4 physical_flux(const Prim& w, double delta) {
  const Cons4 c = cons_of(w, delta);
  const double p = w.rho * w.t_tr;
  return {c[1], c[1] * w.u + p, (c[2] + p) * w.u, c[3] * w.u};
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Cell lookup with boundary ghosts.  Periodic wraps, transmissive clamps,
// inflow holds the fixed left state and (optionally) clamps on the right.
struct Stencil {
  const std::vector<double>&r, &m, &et, &ei;
  int n;
  FluidBc bc;
  Cons4 gl{}, gr{};
  bool right_clamp = true;

  Cons4 cell(int j) const {
    if (bc == FluidBc::periodic) {
      j = ((j % n) + n) % n;
    } else if (bc == FluidBc::transmissive) {
      j = std::clamp(j, 0, n - 1);
    } else {
      if (j < 0) return gl;
      if (j >= n) {
        if (right_clamp) {
          j = n - 1;
        } else {
          return gr;
        }
      }
    }
    return {r[j], m[j], et[j], ei[j]};
  }
};

double relax_rate_coefficient(const FluidState1D& s, const FluidCoeffs& fc,
                              bool use_k) {
  double coef;
  if (s.mode == ScalingMode::eps2) {
    coef = s.eps * s.kappa;
  } else {
    coef = s.kappa * (use_k ? (1.0 + s.eps * fc.k_relax) : 1.0);
  }
  return coef;
}

}  // namespace

CoefficientProvider::CoefficientProvider(std::string mode, Fn fn)
    : mode_(std::move(mode)), fn_(std::move(fn)) {}

FluidCoeffs CoefficientProvider::eval(double rho, double t_tr,
                                      double t_int) const {
  if (!(rho > 0.0) || !(t_tr > 0.0) || !(t_int > 0.0)) {
    throw validation_error("coefficient lookup needs positive density and temperatures");
  }
  return fn_(rho, t_tr, t_int);
}

CoefficientProvider CoefficientProvider::analytic_maxwell(const GasModel& gas) {
  validate(gas);
  if (gas.alpha != 0.0 || gas.beta != 0.0) {
    throw validation_error(
        "closed-form coefficients exist only for the alpha = beta = 0 kernel");
  }
  return CoefficientProvider(
      "analytic-alpha0beta0", [gas](double rho, double t_tr, double t_int) {
        MacroState st{rho, {0.0, 0.0, 0.0}, t_tr, t_int};
        const TransportCoefficients tc = maxwell_closed_form_lambda(st, gas);
        FluidCoeffs fc;
        fc.lambda_mu = tc.lambda_mu;
        fc.lambda_trtr = tc.lambda_trtr;
        fc.lambda_inttr = tc.lambda_inttr;
        fc.lambda_trint = tc.lambda_trint;
        fc.lambda_intint = tc.lambda_intint;
        fc.f_relax = tc.f_relax;
        fc.k_relax = 0.0;  // the first-order source correction vanishes here
        return fc;
      });
}

CoefficientProvider CoefficientProvider::live(const GasModel& gas,
                                              const SpectralBasis& basis,
                                              const McParams& mc, bool with_k) {
  validate(gas);
  validate(basis);
  return CoefficientProvider(
      "live", [gas, basis, mc, with_k](double rho, double t_tr, double t_int) {
        MacroState st{rho, {0.0, 0.0, 0.0}, t_tr, t_int};
        const CESolution sol = solve_abc(st, gas, basis, mc);
        const TransportCoefficients tc = transport_coeffs(sol, st, gas);
        FluidCoeffs fc;
        fc.lambda_mu = tc.lambda_mu;
        fc.lambda_trtr = tc.lambda_trtr;
        fc.lambda_inttr = tc.lambda_inttr;
        fc.lambda_trint = tc.lambda_trint;
        fc.lambda_intint = tc.lambda_intint;
        fc.f_relax = tc.f_relax;
        fc.k_relax = with_k ? relax_k(st, gas, basis, mc).value : 0.0;
        return fc;
      });
}

CoefficientProvider CoefficientProvider::tabulated(
    const GasModel& gas, const CoefficientProvider& source,
    std::vector<double> t_tr_nodes, std::vector<double> t_int_nodes) {
  validate(gas);
  for (auto* nodes : {&t_tr_nodes, &t_int_nodes}) {
    if (nodes->size() < 2 || !std::is_sorted(nodes->begin(), nodes->end())) {
      throw validation_error("temperature table needs at least two sorted nodes per axis");
    }
    for (std::size_t k = 1; k < nodes->size(); ++k) {
      if ((*nodes)[k] <= (*nodes)[k - 1]) {
        throw validation_error("temperature table nodes must be strictly increasing");
      }
    }
  }
  const std::size_t ni = t_int_nodes.size();
  // Transport coefficients are density independent, so sample at rho = 1.
  std::vector<FluidCoeffs> table(t_tr_nodes.size() * ni);
  for (std::size_t a = 0; a < t_tr_nodes.size(); ++a) {
    for (std::size_t b = 0; b < ni; ++b) {
      table[a * ni + b] = source.eval(1.0, t_tr_nodes[a], t_int_nodes[b]);
    }
  }
  auto cell_of = [](const std::vector<double>& nodes, double x) {
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    hi = std::clamp<std::size_t>(hi, 1, nodes.size() - 1);
    const double w =
        std::clamp((x - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]), 0.0, 1.0);
    return std::pair<std::size_t, double>(hi - 1, w);
  };
  return CoefficientProvider(
      "tabulated",
      [gas, t_tr_nodes = std::move(t_tr_nodes),
       t_int_nodes = std::move(t_int_nodes), table = std::move(table), ni,
       cell_of](double rho, double t_tr, double t_int) {
        const auto [a, wa] = cell_of(t_tr_nodes, t_tr);
        const auto [b, wb] = cell_of(t_int_nodes, t_int);
        auto pick = [&](std::size_t i, std::size_t j) -> const FluidCoeffs& {
          return table[i * ni + j];
        };
        auto lerp2 = [&](auto field) {
          const double f00 = pick(a, b).*field, f01 = pick(a, b + 1).*field;
          const double f10 = pick(a + 1, b).*field,
                       f11 = pick(a + 1, b + 1).*field;
          return (1.0 - wa) * ((1.0 - wb) * f00 + wb * f01) +
                 wa * ((1.0 - wb) * f10 + wb * f11);
        };
        FluidCoeffs fc;
        fc.lambda_mu = lerp2(&FluidCoeffs::lambda_mu);
        fc.lambda_trtr = lerp2(&FluidCoeffs::lambda_trtr);
        fc.lambda_inttr = lerp2(&FluidCoeffs::lambda_inttr);
        fc.lambda_trint = lerp2(&FluidCoeffs::lambda_trint);
        fc.lambda_intint = lerp2(&FluidCoeffs::lambda_intint);
        // The exchange rate has a closed form at every kernel; use it
        // directly instead of interpolating.
        MacroState st{rho, {0.0, 0.0, 0.0}, t_tr, t_int};
        fc.f_relax = relax_f(st, gas);
        fc.k_relax = lerp2(&FluidCoeffs::k_relax);
        return fc;
      });
}

CoefficientProvider CoefficientProvider::constant(const FluidCoeffs& fc) {
  return CoefficientProvider("constant",
                             [fc](double, double, double) { return fc; });
}

FluidState1D make_grid(double x_left, double x_right, int n, double delta,
                       ScalingMode mode, double eps, double kappa) {
  if (!(x_right > x_left) || n < 1) {
    throw validation_error("grid needs x_right > x_left and at least one cell");
  }
  if (!(delta >= 2.0)) {
    throw validation_error("internal degrees of freedom must be at least 2");
  }
  if (!(eps >= 0.0) || !(kappa >= 0.0)) {
    throw validation_error("eps and kappa must be nonnegative");
  }
  FluidState1D s;
  s.x_left = x_left;
  s.dx = (x_right - x_left) / n;
  s.n = n;
  s.delta = delta;
  s.mode = mode;
  s.eps = eps;
  s.kappa = kappa;
  s.rho.assign(n, 1.0);
  s.mom.assign(n, 0.0);
  s.e_tr.assign(n, 1.5);
  s.e_int.assign(n, 0.5 * delta);
  return s;
}

Cons4 conserved_of(const MacroState& prim, double delta) {
  return cons_of({prim.rho, prim.u[0], prim.t_tr, prim.t_int}, delta);
}

void set_cell(FluidState1D& s, int j, const MacroState& prim) {
  if (j < 0 || j >= s.n) throw validation_error("cell index out of range");
  validate(prim);
  const Cons4 c = conserved_of(prim, s.delta);
  s.rho[j] = c[0];
  s.mom[j] = c[1];
  s.e_tr[j] = c[2];
  s.e_int[j] = c[3];
}

MacroState cell_state(const FluidState1D& s, int j) {
  if (j < 0 || j >= s.n) throw validation_error("cell index out of range");
  const Prim w = prim_of({s.rho[j], s.mom[j], s.e_tr[j], s.e_int[j]}, s.delta,
                         "cell_state");
  return MacroState{w.rho, {w.u, 0.0, 0.0}, w.t_tr, w.t_int};
}

Cons4 hyperbolic_flux(const Cons4& left, const Cons4& right) {
  // delta only enters via e_int, which is carried as a conserved scalar, so
  // any positive value works for the primitive conversion here.
  const Prim wl = prim_of(left, 2.0, "hyperbolic_flux");
  const Prim wr = prim_of(right, 2.0, "hyperbolic_flux");
  const double al = std::sqrt(kGammaTr * wl.t_tr);
  const double ar = std::sqrt(kGammaTr * wr.t_tr);
  const double s_l = std::min(wl.u - al, wr.u - ar);
  const double s_r = std::max(wl.u + al, wr.u + ar);
  const Cons4 fl = physical_flux(wl, 2.0);
  const Cons4 fr = physical_flux(wr, 2.0);
  if (s_l >= 0.0) return fl;
  if (s_r <= 0.0) return fr;
  Cons4 out;
  const double inv = 1.0 / (s_r - s_l);
  for (int k = 0; k < 4; ++k) {
    out[k] =
        (s_r * fl[k] - s_l * fr[k] + s_l * s_r * (right[k] - left[k])) * inv;
  }
  return out;
}

void relaxation_update(FluidState1D& s, const CoefficientProvider& coeffs,
                       double dt, bool use_k) {
  if (!(dt >= 0.0)) throw validation_error("relaxation needs dt >= 0");
  const double delta = s.delta;
  for (int j = 0; j < s.n; ++j) {
    const Prim w = prim_of({s.rho[j], s.mom[j], s.e_tr[j], s.e_int[j]}, delta,
                           "relaxation_update");
    const double gap = w.t_tr - w.t_int;
    if (gap == 0.0) continue;
    const FluidCoeffs fc = coeffs.eval(w.rho, w.t_tr, w.t_int);
    const double coef = relax_rate_coefficient(s, fc, use_k);
    const double gamma =
        coef * fc.f_relax * (2.0 / (3.0 * w.rho) + 2.0 / (delta * w.rho));
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw numerical_error("relaxation rate is negative or non-finite");
    }
    const double gap_new = gap * std::exp(-gamma * dt);
    // Move one energy parcel between the pools so the total is conserved
    // bitwise: T_int changes by -3/(3+delta) times the gap change.
    const double transfer =
        (3.0 * delta * w.rho / (2.0 * (3.0 + delta))) * (gap - gap_new);
    s.e_int[j] += transfer;
    s.e_tr[j] -= transfer;
  }
}

namespace {

// Combined MUSCL/HLL transport and central diffusion residual.
std::vector<Cons4> transport_residual(const FluidState1D& s,
                                      const CoefficientProvider& coeffs,
                                      const Stencil& st) {
  const int n = s.n;
  const double inv_dx = 1.0 / s.dx;
  std::vector<Prim> w(n + 4);  // two ghosts each side, shifted by 2
  for (int j = -2; j < n + 2; ++j) {
    w[j + 2] = prim_of(st.cell(j), s.delta, "advance");
  }
  auto wat = [&](int j) -> const Prim& { return w[j + 2]; };

  // Limited primitive slopes; slopes that would push a face value out of
  // the positive cone are dropped.
  std::vector<std::array<double, 4>> slope(n + 2);
  for (int j = -1; j <= n; ++j) {
    const Prim &lo = wat(j - 1), &mi = wat(j), &hi = wat(j + 1);
    const std::array<double, 4> c{mi.rho, mi.u, mi.t_tr, mi.t_int};
    const std::array<double, 4> dl{mi.rho - lo.rho, mi.u - lo.u,
                                   mi.t_tr - lo.t_tr, mi.t_int - lo.t_int};
    const std::array<double, 4> dr{hi.rho - mi.rho, hi.u - mi.u,
                                   hi.t_tr - mi.t_tr, hi.t_int - mi.t_int};
    std::array<double, 4>& sl = slope[j + 1];
    for (int k = 0; k < 4; ++k) {
      sl[k] = minmod(dl[k], dr[k]);
      if (k != 1 && c[k] - 0.5 * std::abs(sl[k]) <= 0.0) sl[k] = 0.0;
    }
  }
  auto face_prim = [&](int j, double side) {
    const Prim& c = wat(j);
    const std::array<double, 4>& sl = slope[j + 1];
    return Prim{c.rho + side * 0.5 * sl[0], c.u + side * 0.5 * sl[1],
                c.t_tr + side * 0.5 * sl[2], c.t_int + side * 0.5 * sl[3]};
  };

  std::vector<Cons4> res(n, Cons4{0.0, 0.0, 0.0, 0.0});
  Cons4 f_prev{};
  for (int f = 0; f <= n; ++f) {
    // Face f sits between cells f-1 and f.
    const Cons4 ul = cons_of(face_prim(f - 1, +1.0), s.delta);
    const Cons4 ur = cons_of(face_prim(f, -1.0), s.delta);
    const Cons4 flux = hyperbolic_flux(ul, ur);
    if (f > 0) {
      for (int k = 0; k < 4; ++k) {
        res[f - 1][k] = (f_prev[k] - flux[k]) * inv_dx;
      }
    }
    f_prev = flux;
  }

  if (s.eps > 0.0) {
    std::vector<FluidCoeffs> fc(n + 2);
    for (int j = -1; j <= n; ++j) {
      const Prim& c = wat(j);
      fc[j + 1] = coeffs.eval(c.rho, c.t_tr, c.t_int);
    }
    double fm_prev = 0.0, fw_prev = 0.0, ftr_prev = 0.0, fint_prev = 0.0;
    for (int f = 0; f <= n; ++f) {
      const Prim &a = wat(f - 1), &b = wat(f);
      const FluidCoeffs &ca = fc[f], &cb = fc[f + 1];
      const double du = (b.u - a.u) * inv_dx;
      const double dttr = (b.t_tr - a.t_tr) * inv_dx;
      const double dtint = (b.t_int - a.t_int) * inv_dx;
      const double t_tr_f = 0.5 * (a.t_tr + b.t_tr);
      const double t_int_f = 0.5 * (a.t_int + b.t_int);
      const double u_f = 0.5 * (a.u + b.u);
      const double mu_f =
          s.eps * (4.0 / 3.0) * 0.5 * (ca.lambda_mu + cb.lambda_mu);
      const double fm = mu_f * du;
      const double fw = u_f * fm;
      const double ftr =
          s.eps * (0.5 * (ca.lambda_trtr + cb.lambda_trtr) * dttr / t_tr_f +
                   0.5 * (ca.lambda_trint + cb.lambda_trint) * dtint / t_int_f);
      const double fint =
          s.eps * (0.5 * (ca.lambda_inttr + cb.lambda_inttr) * dttr / t_tr_f +
                   0.5 * (ca.lambda_intint + cb.lambda_intint) * dtint / t_int_f);
      if (f > 0) {
        res[f - 1][1] += (fm - fm_prev) * inv_dx;
        res[f - 1][2] += (fw - fw_prev + ftr - ftr_prev) * inv_dx;
        res[f - 1][3] += (fint - fint_prev) * inv_dx;
      }
      fm_prev = fm;
      fw_prev = fw;
      ftr_prev = ftr;
      fint_prev = fint;
    }
  }
  return res;
}

double stable_dt(const FluidState1D& s, const CoefficientProvider& coeffs,
                 double cfl) {
  double a_max = 0.0;
  double d_max = 0.0;
  for (int j = 0; j < s.n; ++j) {
    const Prim w = prim_of({s.rho[j], s.mom[j], s.e_tr[j], s.e_int[j]},
                           s.delta, "advance");
    a_max = std::max(a_max, std::abs(w.u) + std::sqrt(kGammaTr * w.t_tr));
    if (s.eps > 0.0) {
      const FluidCoeffs fc = coeffs.eval(w.rho, w.t_tr, w.t_int);
      const double d_u = s.eps * (4.0 / 3.0) * fc.lambda_mu / w.rho;
      const double d_tr =
          s.eps *
          (fc.lambda_trtr / w.t_tr + std::abs(fc.lambda_trint) / w.t_int) /
          (1.5 * w.rho);
      const double d_int =
          s.eps *
          (fc.lambda_intint / w.t_int + std::abs(fc.lambda_inttr) / w.t_tr) /
          (0.5 * s.delta * w.rho);
      d_max = std::max({d_max, d_u, d_tr, d_int});
    }
  }
  double dt = cfl * s.dx / std::max(a_max, 1e-300);
  if (d_max > 0.0) dt = std::min(dt, 0.2 * s.dx * s.dx / d_max);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw numerical_error("no positive stable time step");
  }
  return dt;
}

void check_positive(const FluidState1D& s, const char* where) {
  for (int j = 0; j < s.n; ++j) {
    const double rho = s.rho[j];
    const double ke = rho > 0.0 ? 0.5 * s.mom[j] * s.mom[j] / rho : 0.0;
    if (!(rho > 0.0) || !(s.e_tr[j] - ke > 0.0) || !(s.e_int[j] > 0.0)) {
      throw numerical_error(std::string(where) +
                            ": positivity failed at cell " + std::to_string(j));
    }
  }
}

}  // namespace

std::vector<Cons4> ns_diffusion(const FluidState1D& s,
                                const CoefficientProvider& coeffs, FluidBc bc,
                                const Cons4* inflow_left,
                                const Cons4* inflow_right) {
  if (s.n < 3) throw validation_error("diffusion needs at least three cells");
  Stencil st{s.rho, s.mom, s.e_tr, s.e_int, s.n, bc};
  if (bc == FluidBc::inflow_outflow) {
    if (inflow_left == nullptr) {
      throw validation_error("inflow boundary needs a fixed left state");
    }
    st.gl = *inflow_left;
    if (inflow_right != nullptr) {
      st.gr = *inflow_right;
      st.right_clamp = false;
    }
  }
  // Reuse the combined residual and subtract the hyperbolic part evaluated
  // on the same stencil; cheaper to split here than to duplicate the face
  // loops.
  FluidState1D hyp = s;
  hyp.eps = 0.0;
  std::vector<Cons4> full = transport_residual(s, coeffs, st);
  std::vector<Cons4> adv = transport_residual(hyp, coeffs, st);
  for (int j = 0; j < s.n; ++j) {
    for (int k = 0; k < 4; ++k) full[j][k] -= adv[j][k];
  }
  return full;
}

AdvanceDiag advance(FluidState1D& s, const CoefficientProvider& coeffs,
                    double t_end, const AdvanceOptions& opt) {
  if (!(t_end >= 0.0)) throw validation_error("advance needs t_end >= 0");
  if (!(opt.cfl > 0.0) || opt.cfl > 0.9) {
    throw validation_error("cfl must lie in (0, 0.9]");
  }
  if (s.n < 3) throw validation_error("advance needs at least three cells");
  Stencil st{s.rho, s.mom, s.e_tr, s.e_int, s.n, opt.bc};
  if (opt.bc == FluidBc::inflow_outflow) {
    st.gl = opt.inflow_left;
    st.gr = opt.inflow_right;
    st.right_clamp = opt.outflow_right;
  }
  AdvanceDiag diag;
  double t = 0.0;
  while (t < t_end * (1.0 - 1e-14)) {
    if (diag.steps >= opt.max_steps) {
      throw numerical_error("advance exceeded the step budget");
    }
    check_positive(s, "advance");
    double dt = stable_dt(s, coeffs, opt.cfl);
    dt = std::min(dt, t_end - t);

    relaxation_update(s, coeffs, 0.5 * dt, opt.use_k);

    // SSP-RK2 on the transport + diffusion residual.
    const std::vector<double> r0 = s.rho, m0 = s.mom, et0 = s.e_tr,
                              ei0 = s.e_int;
    std::vector<Cons4> k1 = transport_residual(s, coeffs, st);
    for (int j = 0; j < s.n; ++j) {
      s.rho[j] += dt * k1[j][0];
      s.mom[j] += dt * k1[j][1];
      s.e_tr[j] += dt * k1[j][2];
      s.e_int[j] += dt * k1[j][3];
    }
    check_positive(s, "advance");
    std::vector<Cons4> k2 = transport_residual(s, coeffs, st);
    for (int j = 0; j < s.n; ++j) {
      s.rho[j] = 0.5 * (r0[j] + s.rho[j] + dt * k2[j][0]);
      s.mom[j] = 0.5 * (m0[j] + s.mom[j] + dt * k2[j][1]);
      s.e_tr[j] = 0.5 * (et0[j] + s.e_tr[j] + dt * k2[j][2]);
      s.e_int[j] = 0.5 * (ei0[j] + s.e_int[j] + dt * k2[j][3]);
    }
    check_positive(s, "advance");

    relaxation_update(s, coeffs, 0.5 * dt, opt.use_k);

    t += dt;
    ++diag.steps;
    diag.dt_last = dt;
  }
  diag.t = t;
  return diag;
}

RankineHugoniot equilibrium_jump(double mach, double t_upstream, double delta) {
  if (!(mach >= 1.0)) {
    throw validation_error("equilibrium jump needs Mach >= 1");
  }
  if (!(t_upstream > 0.0) || !(delta >= 2.0)) {
    throw validation_error("equilibrium jump needs T > 0 and delta >= 2");
  }
  const double g = specific_heat_ratio(delta);
  const double m2 = mach * mach;
  RankineHugoniot rh;
  rh.rho_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
  rh.pressure_ratio = (2.0 * g * m2 - (g - 1.0)) / (g + 1.0);
  rh.temperature_ratio = rh.pressure_ratio / rh.rho_ratio;
  rh.u_upstream = mach * std::sqrt(g * t_upstream);
  rh.u_downstream = rh.u_upstream / rh.rho_ratio;
  return rh;
}

ShockResult shock_structure(const MacroState& upstream, double mach,
                            const CoefficientProvider& coeffs, double delta,
                            ScalingMode mode, double eps, double kappa,
                            const ShockOptions& opt) {
  validate(upstream);
  if (std::abs(upstream.t_tr - upstream.t_int) >
      1e-12 * (upstream.t_tr + upstream.t_int)) {
    throw validation_error("upstream state must be in equilibrium");
  }
  if (!(mach > 1.0)) {
    throw validation_error("shock structure needs a supersonic upstream Mach number");
  }
  if (opt.n_cells < 16 || !(opt.domain_half > 0.0)) {
    throw validation_error("shock grid needs at least 16 cells and a positive half width");
  }

  const double t1 = upstream.t_tr;
  const RankineHugoniot rh = equilibrium_jump(mach, t1, delta);
  MacroState up = upstream;
  up.u = {rh.u_upstream, 0.0, 0.0};
  MacroState down;
  down.rho = upstream.rho * rh.rho_ratio;
  down.u = {rh.u_downstream, 0.0, 0.0};
  down.t_tr = down.t_int = t1 * rh.temperature_ratio;

  FluidState1D s = make_grid(-opt.domain_half, opt.domain_half, opt.n_cells,
                             delta, mode, eps, kappa);
  for (int j = 0; j < s.n; ++j) {
    set_cell(s, j, s.x_center(j) < 0.0 ? up : down);
  }

  AdvanceOptions aopt;
  aopt.cfl = opt.cfl;
  aopt.bc = FluidBc::inflow_outflow;
  aopt.use_k = opt.use_k;
  aopt.inflow_left = conserved_of(up, delta);
  aopt.outflow_right = true;

  ShockResult out;
  out.jump = rh;
  const double chunk = std::max(0.05 * opt.domain_half / rh.u_downstream,
                                4.0 * s.dx / rh.u_downstream);
  double t = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  std::vector<double> rho_prev = s.rho;
  while (t < opt.t_max) {
    const double step = std::min(chunk, opt.t_max - t);
    const AdvanceDiag d = advance(s, coeffs, step, aopt);
    out.steps += d.steps;
    t += d.t;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < s.n; ++j) {
      num += std::abs(s.rho[j] - rho_prev[j]);
      den += std::abs(s.rho[j]);
    }
    residual = num / (den * step);
    rho_prev = s.rho;
    if (residual < opt.steady_tol) break;
  }
  if (!(residual < opt.steady_tol)) {
    throw numerical_error(
        "shock profile did not reach steady state; residual " +
        std::to_string(residual));
  }

  // Downstream plateau average, away from both the layer and the boundary.
  double rho_sum = 0.0, ttr_sum = 0.0, tint_sum = 0.0;
  int count = 0;
  for (int j = 0; j < s.n; ++j) {
    const double x = s.x_center(j);
    if (x > 0.70 * opt.domain_half && x < 0.92 * opt.domain_half) {
      const MacroState c = cell_state(s, j);
      rho_sum += c.rho;
      ttr_sum += c.t_tr;
      tint_sum += c.t_int;
      ++count;
    }
  }
  if (count == 0) throw numerical_error("shock grid too coarse for a downstream plateau");
  out.profile = std::move(s);
  out.rho_ratio_measured = rho_sum / count / upstream.rho;
  out.t_tr_downstream = ttr_sum / count;
  out.t_int_downstream = tint_sum / count;
  out.residual = residual;
  out.t_elapsed = t;
  return out;
}

std::vector<std::array<double, 2>> heat_flux_cells(
    const FluidState1D& s, const CoefficientProvider& coeffs) {
  std::vector<std::array<double, 2>> q(s.n, {0.0, 0.0});
  if (s.n < 2 || s.eps <= 0.0) return q;
  std::vector<Prim> w(s.n);
  for (int j = 0; j < s.n; ++j) {
    w[j] = prim_of({s.rho[j], s.mom[j], s.e_tr[j], s.e_int[j]}, s.delta,
                   "heat_flux_cells");
  }
  for (int j = 0; j < s.n; ++j) {
    const int lo = std::max(j - 1, 0);
    const int hi = std::min(j + 1, s.n - 1);
    const double span = (hi - lo) * s.dx;
    const double dttr = (w[hi].t_tr - w[lo].t_tr) / span;
    const double dtint = (w[hi].t_int - w[lo].t_int) / span;
    const FluidCoeffs fc = coeffs.eval(w[j].rho, w[j].t_tr, w[j].t_int);
    q[j][0] = -s.eps * (fc.lambda_trtr * dttr / w[j].t_tr +
                        fc.lambda_trint * dtint / w[j].t_int);
    q[j][1] = -s.eps * (fc.lambda_inttr * dttr / w[j].t_tr +
                        fc.lambda_intint * dtint / w[j].t_int);
  }
  return q;
}

}  // namespace polykin
