// SPDX-License-Identifier: MIT
/**
 * @file resummation.cpp
 * @brief Rotated double-Borel summation with conformal series acceleration.
 *
 * See resummation.hpp for the construction.  Numerical notes:
 *
 *  - The quadrature is a tensor product of exp-sinh (double-exponential)
 *    rules, x = exp((pi/2) sinh(t)) on each semi-axis, with the complex
 *    node weights E_k = h (pi/2) cosh(t_k) x_k e^{-alpha x_k} precomputed
 *    per level.  The integrand is symmetric under x <-> y (it depends on
 *    the product only), so the pair loop runs over i <= j with factor 2.
 *
 *  - Node ranges are trimmed with a per-axis score
 *        s(x) = ln w(x) - x cos(phi) + deg ln(max(x,1)),
 *    dropping nodes more than (digits+guard+12) decades below the maximum:
 *    the head polynomial of degree M-1 and the z^3-bounded hat part are
 *    both covered by deg = Mmax + 4.
 *
 *  - Working precision absorbs the mild pointwise-vs-result mismatch of
 *    the rotated integrand, which is only e^{2 m* ln(1/cos phi)} (about
 *    0.15 (N+1/2) digits at phi = pi/8).
 */
#include "qwkb/resummation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qwkb/errors.hpp"

namespace qwkb {

namespace {

// Real from an exact integer at the given precision.
Real real_from_integer(const Integer& z, mpfr_prec_t bits) {
  Real r(bits);
  mpfr_set_z(r.raw(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

// 10^-k at the given precision.
Real pow10_neg(long k, mpfr_prec_t bits) {
  return pow(Real::from_long(10, bits), -k);
}

// Residue-class fold f^(p)_l = (-1)^l tau_{4l+p} of a t-tilde series.
std::vector<Real> class_fold(const CoefficientSeries& tt, int p,
                             mpfr_prec_t bits) {
  std::vector<Real> f;
  for (std::size_t m = static_cast<std::size_t>(p); m < tt.size(); m += 4) {
    Real v = tt.coeffs[m].round_to(bits);
    if ((((m - static_cast<std::size_t>(p)) / 4) & 1U) != 0U) v = -v;
    f.push_back(std::move(v));
  }
  return f;
}

// Geometric tail ratio observed over the last few coefficients before the
// truncation point; robust against single zero-crossings by using the
// 5-step geometric mean.  Returns a value in (0, inf); callers clamp.
double observed_tail_ratio(const std::vector<Real>& h, std::size_t terms) {
  if (terms < 7 || h.size() < terms) return 0.9375;  // 15/16 structural guess
  const double hi = std::abs(h[terms - 1].to_double());
  const double lo = std::abs(h[terms - 6].to_double());
  if (hi == 0.0 || lo == 0.0) return 0.9375;
  return std::pow(hi / lo, 0.2);
}

// Shared validation for plan phases.
void require_allowed_phase(const Real& phi) {
  if (!phase_is_allowed(phi)) {
    throw DomainError(
        "alpha_phase must be pi/8 or 3pi/8 (the residue-class fold is real "
        "exactly there)");
  }
}

}  // namespace

bool phase_is_allowed(const Real& phi) {
  if (!phi.is_finite() || phi.sign() <= 0) return false;
  const mpfr_prec_t bits = phi.prec() > 128 ? phi.prec() : 128;
  const Real pi = Real::pi(bits);
  const Real tol = Real::from_long(1, bits).mul_2si(-40) * pi;
  return abs(phi - pi / 8) < tol || abs(phi - (3 * pi) / 8) < tol;
}

CoefficientSeries borel_transform(const CoefficientSeries& t,
                                  const BorelPlan& plan) {
  if (t.kind != SeriesKind::t)
    throw DomainError("borel_transform: input must be the kind=t series");
  if (t.size() == 0) throw DomainError("borel_transform: empty series");
  if (!plan.a_t.is_finite() || plan.a_t.sign() <= 0)
    throw DomainError("borel_transform: a_t must be positive");
  require_allowed_phase(plan.alpha_phase);

  const mpfr_prec_t bits =
      std::max<mpfr_prec_t>(plan.ctx.bits(), t.coeffs[0].prec());
  CoefficientSeries tt;
  tt.kind = SeriesKind::t_tilde;
  tt.precision = t.precision;
  tt.meta = t.meta;
  tt.meta["a_t"] = plan.a_t.to_string();
  tt.meta["alpha_phase"] = plan.alpha_phase.to_string();
  tt.meta["source_kind"] = "t";
  tt.coeffs.reserve(t.size());

  // denom_m = m!^2 a_t^m, built incrementally; MPFR's exponent range makes
  // the direct quotient safe for any practical order.
  Real denom = Real::from_long(1, bits);
  const Real a = plan.a_t.round_to(bits);
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (m > 0) {
      denom *= static_cast<long>(m) * static_cast<long>(m);
      denom *= a;
    }
    tt.coeffs.push_back(t.coeffs[m].round_to(bits) / denom);
  }

  // Radius-one monitor: |tau_m|^{1/m} at the last index (context only).
  const std::size_t last = t.size() - 1;
  if (last >= 8 && !tt.coeffs[last].is_zero()) {
    const double probe =
        std::pow(10.0, tt.coeffs[last].log10_abs_estimate() /
                           static_cast<double>(last));
    tt.meta["radius_probe"] = std::to_string(probe);
  }
  return tt;
}

Complex tilde_coeff(const CoefficientSeries& tt, std::size_t m,
                    const Real& phi) {
  if (tt.kind != SeriesKind::t_tilde)
    throw DomainError("tilde_coeff: input must be a kind=t_tilde series");
  if (m >= tt.size()) throw DomainError("tilde_coeff: index out of range");
  require_allowed_phase(phi);
  const mpfr_prec_t bits = tt.coeffs[m].prec();
  const Real angle =
      2 * phi.round_to(bits) * Real::from_long(static_cast<long>(m) + 1, bits);
  return Complex::unit_phase(angle) * tt.coeffs[m];
}

HatSeries conformal_reexpand(const CoefficientSeries& tt) {
  if (tt.kind != SeriesKind::t_tilde)
    throw DomainError("conformal_reexpand: input must be kind=t_tilde");
  if (tt.size() < 4)
    throw DomainError("conformal_reexpand: need at least 4 coefficients");

  const long solve_digits = (tt.precision > 0 ? tt.precision : 30) + 80;
  const mpfr_prec_t bits = PrecisionContext(solve_digits, 0).bits();

  HatSeries hat;
  hat.precision = tt.precision;
  auto it = tt.meta.find("a_t");
  hat.a_t = it != tt.meta.end()
                ? Real::from_string(it->second, bits)
                : Real::nan();
  hat.meta["source_count"] = std::to_string(tt.size());

  for (int p = 0; p < 4; ++p) {
    const std::vector<Real> f = class_fold(tt, p, bits);
    std::vector<Real>& h = hat.h[p];
    h.reserve(f.size());
    for (std::size_t L = 0; L < f.size(); ++L) {
      Real v = f[L];
      // hat_0 never re-enters: C(L-1, L) = 0 for L >= 1.
      for (std::size_t l = 1; l < L; ++l) {
        Integer binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(L - 1),
                     static_cast<unsigned long>(L - l));
        Real term = h[l] * real_from_integer(binom, bits);
        if (((L - l) & 1U) != 0U) term = -term;
        v -= term;
      }
      h.push_back(std::move(v));
    }
  }
  return hat;
}

Real hat_roundtrip_error(const HatSeries& hat, const CoefficientSeries& tt) {
  if (tt.kind != SeriesKind::t_tilde)
    throw DomainError("hat_roundtrip_error: source must be kind=t_tilde");
  const long solve_digits = (tt.precision > 0 ? tt.precision : 30) + 80;
  const mpfr_prec_t bits = PrecisionContext(solve_digits, 0).bits();

  Real worst = Real::from_long(0, bits);
  for (int p = 0; p < 4; ++p) {
    const std::vector<Real> f = class_fold(tt, p, bits);
    const std::vector<Real>& h = hat.h[p];
    const std::size_t n = std::min(f.size(), h.size());
    for (std::size_t L = 0; L < n; ++L) {
      Real back = Real::from_long(0, bits);
      for (std::size_t l = (L == 0 ? 0 : 1); l <= L; ++l) {
        Integer binom;
        if (L == 0) {
          binom = 1;
        } else {
          mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(L - 1),
                       static_cast<unsigned long>(L - l));
        }
        Real term = h[l] * real_from_integer(binom, bits);
        if (((L - l) & 1U) != 0U) term = -term;
        back += term;
      }
      const Real scale = max(abs(f[L]), pow10_neg(solve_digits, bits));
      worst = max(worst, abs(back - f[L]) / scale);
    }
  }
  return worst;
}

Complex hat_eval(const HatSeries& hat, int p, const Complex& z,
                 std::size_t terms, Real* tail_out) {
  if (p < 0 || p > 3) throw DomainError("hat_eval: class index out of range");
  const std::vector<Real>& h = hat.h[p];
  if (h.empty()) throw DomainError("hat_eval: empty class");
  std::size_t L = terms == 0 ? h.size() : terms;
  if (L > h.size())
    throw DomainError("hat_eval: requested terms exceed stored coefficients");

  const mpfr_prec_t bits = std::max<mpfr_prec_t>(z.prec(), h[0].prec());
  const Complex z2 = z * z;
  const Complex z4 = z2 * z2;
  const Complex one(Real::from_long(1, bits), Real::from_long(0, bits));
  const Complex w = one + z4;
  if (abs(w).is_zero())
    throw ConvergenceError("hat_eval: z^4 = -1 conformal singularity");
  const Complex u = z4 / w;
  const Real au = abs(u);
  if (!(au < Real::from_long(1, bits)))
    throw ConvergenceError("hat_eval: |z^4/(1+z^4)| >= 1, outside the "
                           "u-series convergence domain");

  Complex acc(Real::from_long(0, bits), Real::from_long(0, bits));
  for (std::size_t l = L; l-- > 0;) {
    acc *= u;
    acc += Complex(h[l].round_to(bits));
  }

  const double rho = observed_tail_ratio(h, L);
  const double au_d = au.to_double();
  if (rho * au_d >= 1.0)
    throw ConvergenceError(
        "hat_eval: observed tail ratio times |u| reaches 1; truncated "
        "u-series tail is not summable here");
  if (tail_out != nullptr) {
    // First omitted term ~ |h_{L-1}| rho |u|^L, geometric thereafter;
    // factor 10 safety (the ratio is observed, not proven).
    Real t = abs(h[L - 1].round_to(bits)) * pow(au, static_cast<long>(L));
    t *= Real::from_double(10.0 * rho / (1.0 - rho * au_d), bits);
    *tail_out = t;
  }
  return acc;
}

Complex tilde_eval_hat(const HatSeries& hat, const Real& phi,
                       const Complex& z, std::size_t terms, Real* tail_out) {
  require_allowed_phase(phi);
  const mpfr_prec_t bits = std::max<mpfr_prec_t>(z.prec(), hat.h[0].empty()
                                                     ? 64
                                                     : hat.h[0][0].prec());
  Complex total(Real::from_long(0, bits), Real::from_long(0, bits));
  Real tail_total = Real::from_long(0, bits);
  Complex zp(Real::from_long(1, bits), Real::from_long(0, bits));
  const Real phi_b = phi.round_to(bits);
  for (int p = 0; p < 4; ++p) {
    Real tail = Real::from_long(0, bits);
    const Complex hp = hat_eval(hat, p, z, terms, &tail);
    const Real angle = 2 * phi_b * Real::from_long(p + 1, bits);
    total += Complex::unit_phase(angle) * (zp * hp);
    tail_total += abs(zp) * tail;
    zp *= z;
  }
  if (tail_out != nullptr) *tail_out = tail_total;
  return total;
}

// ---------------------------------------------------------------------------
// Tensor exp-sinh quadrature
// ---------------------------------------------------------------------------

namespace {

struct NodeSet {
  std::vector<Real> x;        // abscissas (ascending)
  std::vector<Complex> E;     // h * (pi/2) cosh(t) x e^{-alpha x}
  std::vector<double> absE;   // |E| (for absolute-weight accumulation)
  std::vector<double> logx10; // log10(x) (for pair-level skip decisions)
};

// Build the level-`level` exp-sinh node set, trimmed by the score
// s = ln w - x cos(phi) + deg ln(max(x,1)) at `cut_decades` below its max.
NodeSet build_nodes(int level, const Real& phi, long degree_hint,
                    mpfr_prec_t bits, double cut_decades) {
  const double h_d = std::ldexp(1.0, -level);
  const double lambda_d = 1.5707963267948966;
  const double cphi_d = std::cos(phi.to_double());
  const double deg = static_cast<double>(degree_hint);
  const double cut = cut_decades * 2.302585092994046;

  const Real h = Real::from_long(1, bits).mul_2si(-level);
  const Real lambda = Real::pi(bits) / 2;
  const Real phi_b = phi.round_to(bits);
  const Real cphi = cos(phi_b);
  const Real sphi = sin(phi_b);

  auto score = [&](long k) {
    const double t = static_cast<double>(k) * h_d;
    const double lx = lambda_d * std::sinh(t);
    // ln cosh(t) computed stably.
    const double lcosh =
        std::abs(t) + std::log1p(std::exp(-2.0 * std::abs(t))) -
        0.6931471805599453;
    const double x = std::exp(std::min(lx, 700.0));
    return std::log(h_d * lambda_d) + lcosh + lx - x * cphi_d +
           deg * std::log(std::max(x, 1.0));
  };

  long k_hi = 0;
  double smax = score(0);
  for (long k = 1;; ++k) {
    const double s = score(k);
    smax = std::max(smax, s);
    if (s < smax - cut) {
      k_hi = k;
      break;
    }
    if (k > 2000000) throw ConvergenceError("exp-sinh node range blow-up");
  }
  long k_lo = 0;
  for (long k = -1;; --k) {
    if (score(k) < smax - cut) {
      k_lo = k;
      break;
    }
    if (k < -2000000) throw ConvergenceError("exp-sinh node range blow-up");
  }

  NodeSet ns;
  ns.x.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  ns.E.reserve(ns.x.capacity());
  ns.absE.reserve(ns.x.capacity());
  ns.logx10.reserve(ns.x.capacity());
  for (long k = k_lo; k <= k_hi; ++k) {
    const Real t = Real::from_long(k, bits) * h;
    const Real x = exp(lambda * sinh(t));
    const Real w = h * lambda * cosh(t) * x;
    const Real decay = exp(-(x * cphi));
    const Real angle = x * sphi;
    Complex E = Complex(cos(angle), -sin(angle)) * (w * decay);
    ns.logx10.push_back(lambda_d * std::sinh(static_cast<double>(k) * h_d) /
                        2.302585092994046);
    ns.x.push_back(x);
    ns.absE.push_back(abs(E).to_double());
    ns.E.push_back(std::move(E));
  }
  return ns;
}

}  // namespace

int exp_sinh_product_quad(
    const std::function<void(const Real& xi, Complex* out)>& g, int K,
    const Real& phi, long degree_hint, const PrecisionContext& ctx,
    const QuadSpec& spec, std::vector<Complex>& results,
    std::vector<Real>& errs, bool last_abs_weight, double log10_xi_floor) {
  if (K <= 0) throw DomainError("exp_sinh_product_quad: K must be positive");
  if (!phi.is_finite() || phi.sign() <= 0 ||
      !(phi < Real::pi(128) / 2))
    throw DomainError("exp_sinh_product_quad: need 0 < phi < pi/2");
  if (spec.level_min < 1 || spec.level_max < spec.level_min)
    throw DomainError("exp_sinh_product_quad: bad level range");

  const mpfr_prec_t bits = ctx.bits();
  const double cut_decades =
      static_cast<double>(ctx.digits + (ctx.guard > 0 ? ctx.guard : 0)) + 12.0;
  const Real tol = spec.tol_abs.is_nan()
                       ? pow10_neg(ctx.digits > 9 ? ctx.digits - 8 : 1, bits)
                       : spec.tol_abs;

  std::vector<Complex> prev;
  std::vector<Complex> cur(static_cast<std::size_t>(K));
  std::vector<Complex> out(static_cast<std::size_t>(K));
  errs.assign(static_cast<std::size_t>(K), Real::nan());

  int level_used = spec.level_min;
  for (int level = spec.level_min; level <= spec.level_max; ++level) {
    level_used = level;
    const NodeSet ns = build_nodes(level, phi, degree_hint, bits,
                                   cut_decades);
    const std::size_t n = ns.x.size();
    for (int c = 0; c < K; ++c)
      cur[static_cast<std::size_t>(c)] =
          Complex(Real::from_long(0, bits), Real::from_long(0, bits));

    const int K_complex = last_abs_weight ? K - 1 : K;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j0 = i;
      if (log10_xi_floor > -1.0e307) {
        // x is ascending, so the first admissible partner is found by a
        // binary search on log10(x_j) >= floor - log10(x_i); pairs below
        // the floor are exactly those the caller's kernel zeroes out.
        const double need = log10_xi_floor - ns.logx10[i];
        const auto it = std::lower_bound(ns.logx10.begin(), ns.logx10.end(),
                                         need);
        j0 = std::max<std::size_t>(
            i, static_cast<std::size_t>(it - ns.logx10.begin()));
      }
      for (std::size_t j = j0; j < n; ++j) {
        g(ns.x[i] * ns.x[j], out.data());
        Complex cross = ns.E[i] * ns.E[j];
        if (i != j) cross *= Real::from_long(2, bits);
        for (int c = 0; c < K_complex; ++c) {
          const std::size_t cc = static_cast<std::size_t>(c);
          cur[cc] += cross * out[cc];
        }
        if (last_abs_weight) {
          const std::size_t cc = static_cast<std::size_t>(K - 1);
          double aw = ns.absE[i] * ns.absE[j];
          if (i != j) aw *= 2.0;
          cur[cc].re() += Real::from_double(aw, 64) * out[cc].re();
        }
      }
    }

    bool converged = false;
    if (!prev.empty()) {
      Real worst = Real::from_long(0, bits);
      for (int c = 0; c < K; ++c) {
        const std::size_t cc = static_cast<std::size_t>(c);
        errs[cc] = abs(cur[cc] - prev[cc]);
        // The abs-weighted component is itself an error bound; it only
        // needs an order of magnitude, so it does not gate convergence.
        if (!(last_abs_weight && c == K - 1)) worst = max(worst, errs[cc]);
      }
      converged = worst < tol;
    }
    prev = cur;
    if (converged) break;
  }

  // Single-level runs report a scale-based placeholder error.
  for (int c = 0; c < K; ++c) {
    const std::size_t cc = static_cast<std::size_t>(c);
    if (errs[cc].is_nan())
      errs[cc] = abs(cur[cc]) * pow10_neg(ctx.digits, bits);
  }
  results = cur;
  return level_used;
}

// ---------------------------------------------------------------------------
// M-corrected Borel evaluation
// ---------------------------------------------------------------------------

std::vector<ResummationResult> borel_window(const Real& delta,
                                            const BorelPlan& plan,
                                            const CoefficientSeries& t,
                                            const HatSeries& hat,
                                            const std::vector<long>& Ms) {
  if (t.kind != SeriesKind::t)
    throw DomainError("borel_window: series must be kind=t");
  if (!delta.is_finite() || delta.sign() <= 0)
    throw DomainError("borel_window: delta must be positive");
  if (Ms.empty()) throw DomainError("borel_window: empty M list");
  for (std::size_t i = 0; i < Ms.size(); ++i) {
    if (Ms[i] < 0 || (i > 0 && Ms[i] <= Ms[i - 1]))
      throw DomainError("borel_window: M list must be strictly increasing "
                        "and non-negative");
  }
  if (static_cast<std::size_t>(Ms.back()) > t.size())
    throw DomainError("borel_window: M exceeds available coefficients");
  require_allowed_phase(plan.alpha_phase);
  if (!plan.a_t.is_finite() || plan.a_t.sign() <= 0)
    throw DomainError("borel_window: a_t must be positive");
  if (hat.a_t.is_finite()) {
    const Real rel = abs(plan.a_t - hat.a_t) / plan.a_t;
    if (!(rel < Real::from_double(1e-12, 64)))
      throw DomainError("borel_window: hat series built with a different "
                        "a_t than the plan");
  }
  std::size_t stored = hat.h[0].size();
  for (int p = 1; p < 4; ++p) stored = std::min(stored, hat.h[p].size());
  if (plan.hat_terms <= 0 ||
      static_cast<std::size_t>(plan.hat_terms) > stored)
    throw DomainError("borel_window: hat_terms exceeds stored coefficients");

  const mpfr_prec_t bits = plan.ctx.bits();
  const long Mmin = Ms.front();
  const long Mmax = Ms.back();
  const int K = static_cast<int>(Ms.size());
  const std::size_t L = static_cast<std::size_t>(plan.hat_terms);

  // --- precomputations shared by every quadrature node ---------------------
  const Real a = plan.a_t.round_to(bits);
  const Real dlt = delta.round_to(bits);
  const Real s = a * dlt;  // z = xi * s

  // tau_m = t_m/(m!^2 a^m) for the head, m < Mmax.
  std::vector<Real> tau;
  tau.reserve(static_cast<std::size_t>(Mmax));
  {
    Real denom = Real::from_long(1, bits);
    for (long m = 0; m < Mmax; ++m) {
      if (m > 0) {
        denom *= m * m;
        denom *= a;
      }
      tau.push_back(t.coeffs[static_cast<std::size_t>(m)].round_to(bits) /
                    denom);
    }
  }

  // Phase table ph[j] = e^{2 i phi j}; the (m+1) and (p+1) indices are
  // taken mod 8 (2 phi * 8 is a multiple of 2 pi for both allowed phases).
  const Real phi_b = plan.alpha_phase.round_to(bits);
  Complex ph[8];
  for (int j = 0; j < 8; ++j)
    ph[j] = Complex::unit_phase(2 * phi_b * Real::from_long(j, bits));

  // Hat coefficients at working precision.
  std::vector<Real> hc[4];
  for (int p = 0; p < 4; ++p) {
    hc[p].reserve(L);
    for (std::size_t l = 0; l < L; ++l)
      hc[p].push_back(hat.h[p][l].round_to(bits));
  }

  // Tail-density constants (double precision is ample for an error bound).
  double rho = 0.0;
  double tail_amp = 0.0;
  for (int p = 0; p < 4; ++p) {
    rho = std::max(rho, observed_tail_ratio(hat.h[p], L));
    tail_amp += std::abs(hat.h[p][L - 1].to_double());
  }
  if (rho >= 1.0)
    throw ConvergenceError(
        "borel_window: hat coefficients do not decay geometrically at the "
        "requested truncation (tail ratio >= 1)");
  const double log10_tail_amp =
      std::log10(std::max(tail_amp, 1e-300) * 10.0 * rho / (1.0 - rho));
  const double digits_all =
      static_cast<double>(plan.ctx.digits +
                          (plan.ctx.guard > 0 ? plan.ctx.guard : 0));

  // --- kernel ---------------------------------------------------------------
  const Real one = Real::from_long(1, bits);
  std::vector<std::size_t> m_stops(Ms.begin(), Ms.end());
  auto kernel = [&](const Real& xi, Complex* out) {
    const Real z = xi * s;
    const double lz = z.log10_abs_estimate();

    // Components are ~ tau_M z^M; when even the smallest power is beyond
    // the precision floor relative to the result scale, skip the work.
    if (Mmin >= 1 &&
        static_cast<double>(Mmin) * lz < -(digits_all + 16.0)) {
      for (int c = 0; c <= K; ++c)
        out[c] = Complex(Real::from_long(0, bits), Real::from_long(0, bits));
      return;
    }

    const Real z2 = z * z;
    const Real z4 = z2 * z2;
    const Real inv = one / (one + z4);
    const Real u = z4 * inv;

    // T(z) = sum_p ph[p+1] z^p H_p(u), all-real Horner per class.
    Complex T(Real::from_long(0, bits), Real::from_long(0, bits));
    {
      Real zp = one;
      for (int p = 0; p < 4; ++p) {
        Real H(bits);
        mpfr_set_zero(H.raw(), 1);
        for (std::size_t l = L; l-- > 0;) {
          // H = H*u + hc[p][l], one rounding via fma.
          mpfr_fma(H.raw(), H.raw(), u.raw(), hc[p][l].raw(), MPFR_RNDN);
        }
        T += ph[(p + 1) & 7] * (H * zp);
        if (p < 3) zp *= z;
      }
    }

    // Heads S_M = sum_{m<M} ttilde_m z^m with checkpoints at each M in Ms.
    {
      Complex S(Real::from_long(0, bits), Real::from_long(0, bits));
      Real zm = one;
      std::size_t idx = 0;
      for (long m = 0; m <= Mmax; ++m) {
        if (idx < m_stops.size() &&
            static_cast<std::size_t>(m) == m_stops[idx]) {
          out[idx] = T - S;
          ++idx;
        }
        if (m == Mmax) break;
        S += ph[(m + 1) & 7] * (tau[static_cast<std::size_t>(m)] * zm);
        zm *= z;
      }
    }

    // Hat-truncation error density (real, absolute-weight component):
    // ~ tail_amp (1+z)^3 |u|^L rho/(1-rho) * 10.
    {
      const double lu = u.log10_abs_estimate();
      double le = static_cast<double>(L) * lu + log10_tail_amp;
      if (lz > 0.0) le += 3.0 * lz;
      const double density = le < -290.0 ? 0.0 : std::pow(10.0, le);
      out[K] = Complex(Real::from_double(density, 64),
                       Real::from_long(0, 64));
    }
  };

  // --- quadrature ------------------------------------------------------------
  // Pair-skip floor matching the kernel's small-z zero cut (with one decade
  // of slack so the skip is strictly more conservative than the kernel).
  double xi_floor = -1.0e308;
  if (Mmin >= 1) {
    xi_floor = -(digits_all + 16.0) / static_cast<double>(Mmin) -
               s.log10_abs_estimate() - 1.0;
  }
  std::vector<Complex> integrals;
  std::vector<Real> qerrs;
  QuadSpec spec = plan.quad;
  const int level = exp_sinh_product_quad(kernel, K + 1, plan.alpha_phase,
                                          Mmax + 4, plan.ctx, spec,
                                          integrals, qerrs, true, xi_floor);

  const Real err_tail = abs(integrals[static_cast<std::size_t>(K)].re());

  // --- heads (exact in delta) and assembly -----------------------------------
  std::vector<ResummationResult> res;
  res.reserve(static_cast<std::size_t>(K));
  for (int c = 0; c < K; ++c) {
    const long M = Ms[static_cast<std::size_t>(c)];
    Real head = Real::from_long(0, bits);
    Real dm = one;
    for (long m = 0; m < M; ++m) {
      head.add_mul(t.coeffs[static_cast<std::size_t>(m)].round_to(bits), dm);
      dm *= dlt;
    }
    const std::size_t cc = static_cast<std::size_t>(c);
    ResummationResult r;
    r.M = M;
    r.corr = integrals[cc].re();
    r.value = head + r.corr;
    r.imag_residual = abs(integrals[cc].im());
    // Quadrature estimate plus an ulp floor on the assembled value.
    r.err_quad = qerrs[cc];
    r.err_quad += max(abs(r.value), one).mul_2si(-(static_cast<long>(bits) - 8));
    r.err_tail = err_tail;
    r.level_used = level;
    res.push_back(std::move(r));
  }
  return res;
}

ResummationResult borel_integral(const Real& delta, const BorelPlan& plan,
                                 const CoefficientSeries& t) {
  const CoefficientSeries tt = borel_transform(t, plan);
  const HatSeries hat = conformal_reexpand(tt);
  std::vector<long> Ms{plan.M};
  return borel_window(delta, plan, t, hat, Ms).front();
}

OaaResult oaa_sum(const CoefficientSeries& t, const Real& delta) {
  if (t.kind != SeriesKind::t)
    throw DomainError("oaa_sum: series must be kind=t");
  if (!delta.is_finite() || delta.sign() <= 0)
    throw DomainError("oaa_sum: delta must be positive");
  if (t.size() < 3) throw DomainError("oaa_sum: series too short");

  const mpfr_prec_t bits = t.coeffs[0].prec();
  const Real dlt = delta.round_to(bits);

  // Global minimum of |t_m delta^m| (first index on ties).
  std::size_t stop = 0;
  Real best = abs(t.coeffs[0]);
  Real dm = Real::from_long(1, bits);
  for (std::size_t m = 1; m < t.size(); ++m) {
    dm *= dlt;
    const Real term = abs(t.coeffs[m]) * dm;
    if (term < best) {
      best = term;
      stop = m;
    }
  }
  if (stop + 1 == t.size())
    throw NoMinimumError(
        "oaa_sum: terms still decreasing at the last available coefficient; "
        "more series orders are needed for this delta");

  Real value = Real::from_long(0, bits);
  dm = Real::from_long(1, bits);
  for (std::size_t m = 0; m < stop; ++m) {
    value.add_mul(t.coeffs[m], dm);
    dm *= dlt;
  }
  OaaResult r;
  r.value = std::move(value);
  r.stop = static_cast<long>(stop);
  r.floor_term = std::move(best);
  return r;
}

}  // namespace qwkb
