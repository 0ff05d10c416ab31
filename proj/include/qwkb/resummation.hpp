// SPDX-License-Identifier: MIT
/**
 * @file resummation.hpp
 * @brief Extended Borel summation of the eigenvalue coefficient series.
 *
 * The divergent series t(delta) = sum_m t_m delta^m (|t_m| ~ m!^2 a_t^m
 * (m+1)^{-5/2}) is given a value through the rotated double-Borel
 * representation
 *
 *   m!^2 = alpha^{2(m+1)} Int_0^inf dx x^m e^{-alpha x}
 *                         Int_0^inf dy y^m e^{-alpha y},
 *   alpha = e^{i phi},
 *
 *   t(delta) = Re Int Int e^{-alpha(x+y)} ttilde(z) dx dy,
 *   z = x y a_t delta,   ttilde(z) = sum_m ttilde_m z^m,
 *   ttilde_m = alpha^{2(m+1)} t_m / (m!^2 a_t^m).
 *
 * ttilde(z) converges only for |z| < 1 (singularities at z^2 = -1, with
 * more on the negative real z^4-axis), so each residue class
 *
 *   sum_l ttilde_{4l+p} z^{4l}   (p = 0..3)
 *
 * is re-expanded in the conformal variable u = z^4/(1+z^4), which maps the
 * integration range to u in [0,1) and pushes the z^4 = -1 singularity to
 * infinity; the re-expanded (hat) series converges over the whole path.
 *
 * Phase structure: phi is restricted to {pi/8, 3pi/8}. Exactly there
 * e^{8 i phi l} = (-1)^l, so ttilde_m = e^{2 i phi (m+1)} tau_m with REAL
 * tau_m = t_m/(m!^2 a_t^m), and the class fold f^(p)_l = (-1)^l tau_{4l+p}
 * is real and phi-independent. All stored series (kind=t_tilde caches, hat
 * coefficients) are therefore real; the complex phases are structural
 * constants applied at evaluation time.
 *
 * Small-delta evaluation uses the M-corrected form
 *
 *   t(delta) = sum_{m<M} t_m delta^m + t_corr^{(M)}(delta),
 *
 * where t_corr^{(M)} is the same double integral with the degree-(M-1)
 * Taylor head of ttilde(z) subtracted inside the integrand (equivalent to
 * M repeated partial integrations, which regenerate exactly those head
 * terms). Consistency across a window of M values is the standard check
 * that the construction converged.
 */
#pragma once

#include <functional>
#include <vector>

#include "qwkb/complexval.hpp"
#include "qwkb/precision.hpp"
#include "qwkb/series.hpp"

namespace qwkb {

// ---------------------------------------------------------------------------
// Plans and results
// ---------------------------------------------------------------------------

/// Controls for the tensor exp-sinh quadrature on (0,inf)^2.
struct QuadSpec {
  int level_min = 4;  ///< first trapezoid level (step h = 2^-level)
  int level_max = 9;  ///< hard refinement cap
  /// Absolute stopping tolerance on the integral; NaN => derived from the
  /// working precision as 10^{-(digits-8)}.
  Real tol_abs = Real::nan();
};

/// Parameters of one rotated double-Borel evaluation.
struct BorelPlan {
  Real alpha_phase;     ///< phi; must be pi/8 or 3pi/8 (checked)
  Real a_t;             ///< growth constant (> 0), unit-disc normalization
  long M = 0;           ///< partial-integration order (head length)
  long hat_terms = 53;  ///< u-series terms used per residue class
  QuadSpec quad;
  PrecisionContext ctx;  ///< working precision of the evaluation
};

/// Value + error budget of one M-corrected Borel evaluation.
struct ResummationResult {
  long M = 0;
  Real value;     ///< t(delta) = head + corr
  Real corr;      ///< correction integral t_corr^{(M)}(delta)
  Real err_quad;  ///< absolute quadrature error estimate
  Real err_tail;  ///< absolute hat-series truncation estimate
  /// |Im| of the accumulated rotated integral.  The full transform sums to a
  /// real value term by term, but the resummed correction integral carries a
  /// genuine imaginary part at the nonperturbative scale exp(-c/sqrt(delta))
  /// set by the nearest Borel-plane singularity: the usual lateral-summation
  /// ambiguity.  It is independent of the truncation order M and of the
  /// number of hat terms, and shrinks much faster than any power of delta.
  Real imag_residual;
  int level_used = 0;
};

/// Optimal asymptotic approximation: sum up to (excluding) the smallest term.
struct OaaResult {
  Real value;      ///< sum_{m<stop} t_m delta^m
  long stop = 0;   ///< index of the smallest |t_m delta^m|
  Real floor_term; ///< |t_stop delta^stop|: irreducible-ambiguity scale
};

// ---------------------------------------------------------------------------
// Conformally re-expanded (hat) series
// ---------------------------------------------------------------------------

/**
 * Four residue classes p = 0..3 of the conformal re-expansion.  Class p
 * stores real coefficients hat^(p)_l with
 *
 *   sum_l f^(p)_l z^{4l} = sum_l hat^(p)_l u^l,   u = z^4/(1+z^4),
 *   f^(p)_l = (-1)^l tau_{4l+p},
 *
 * so the full transform evaluates as
 *
 *   ttilde(z) = sum_p e^{2 i phi (p+1)} z^p sum_l hat^(p)_l u^l.
 */
struct HatSeries {
  std::vector<Real> h[4];
  long precision = 0;  ///< decimal digits of the source t-tilde series
  Real a_t;
  std::map<std::string, std::string> meta;

  std::size_t terms(int p) const { return h[p].size(); }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// True iff phi equals pi/8 or 3pi/8 to within 2^-40 relative.
bool phase_is_allowed(const Real& phi);

/**
 * Borel transform of a kind=t series: returns a kind=t_tilde series with
 * real coefficients tau_m = t_m / (m!^2 a_t^m); meta records a_t and
 * alpha_phase.  The full complex coefficient is
 * ttilde_m = e^{2 i phi (m+1)} tau_m (see tilde_coeff).  MPFR's huge
 * exponent range absorbs the m!^2 division directly, no log-magnitude
 * detour is needed.  Throws DomainError for wrong kind, non-positive a_t,
 * or a phase outside {pi/8, 3pi/8}.
 */
CoefficientSeries borel_transform(const CoefficientSeries& t,
                                  const BorelPlan& plan);

/// Complex Borel-transformed coefficient ttilde_m = e^{2 i phi (m+1)} tau_m.
Complex tilde_coeff(const CoefficientSeries& tt, std::size_t m,
                    const Real& phi);

/**
 * Conformal re-expansion: solves the triangular relation
 *   f^(p)_L = sum_{l<=L} hat^(p)_l (-1)^{L-l} C(L-1, L-l)
 * for the hat coefficients of each residue class (C(L-1, L) = 0, so hat_0
 * only enters at L = 0).  Runs at tt.precision + 80 guard digits to absorb
 * the ~2^L binomial growth.  Input must be a kind=t_tilde series with at
 * least 4 coefficients.
 */
HatSeries conformal_reexpand(const CoefficientSeries& tt);

/**
 * Round-trip check: re-expands every class of `hat` back into powers of
 * z^4 and compares with the source folds f^(p)_l from `tt`.  Returns the
 * maximum relative deviation (the structural invariant demands it be at
 * the guard-digit floor, far below 10^{-(precision-10)}).
 */
Real hat_roundtrip_error(const HatSeries& hat, const CoefficientSeries& tt);

/**
 * Evaluate one residue class: sum_l hat^(p)_l u^l at u = z^4/(1+z^4)
 * (complex z supported; the z^p factor and the class phase are NOT
 * included).  Summation is truncated at `terms` coefficients (<= stored;
 * 0 => all).  The geometric tail estimate from the observed ratio of the
 * last coefficients is written to *tail_out when non-null.  Throws
 * ConvergenceError when |u| >= 1 or the observed tail ratio times |u|
 * reaches 1 (outside the convergence domain).
 */
Complex hat_eval(const HatSeries& hat, int p, const Complex& z,
                 std::size_t terms = 0, Real* tail_out = nullptr);

/**
 * Full transform value ttilde(z) = sum_p phase_p z^p hat^(p)(u) for
 * phi in {pi/8, 3pi/8}; used by audits and tests (the quadrature uses an
 * internal real-z fast path).
 */
Complex tilde_eval_hat(const HatSeries& hat, const Real& phi,
                       const Complex& z, std::size_t terms = 0,
                       Real* tail_out = nullptr);

/**
 * Tensor exp-sinh quadrature of K product-form rotated integrals
 *
 *   I_c = Int_0^inf Int_0^inf e^{-alpha(x+y)} g_c(x*y) dx dy,
 *
 * alpha = e^{i phi}.  `g` fills out[0..K-1] with the kernel values at the
 * product xi = x*y.  `degree_hint` bounds the polynomial growth of g
 * (node-range cutoff); tol/levels from `spec` at precision `ctx`.
 * Per-component quadrature errors |I^(L) - I^(L-1)| are written to
 * errs[0..K-1]; returns the level used.  When `last_abs_weight` is set the
 * final component is accumulated with |e^{-alpha(x+y)}| instead of the
 * complex weight (used to integrate error densities).  Node pairs with
 * log10(x*y) below `log10_xi_floor` are skipped entirely (callers whose
 * kernels vanish like xi^Mmin pass the matching cutoff).  Used directly by
 * the toy-kernel tests; borel_window builds on it.
 */
int exp_sinh_product_quad(
    const std::function<void(const Real& xi, Complex* out)>& g, int K,
    const Real& phi, long degree_hint, const PrecisionContext& ctx,
    const QuadSpec& spec, std::vector<Complex>& results,
    std::vector<Real>& errs, bool last_abs_weight = false,
    double log10_xi_floor = -1.0e308);

/**
 * Evaluate the M-corrected Borel sum for every M in `Ms` (ascending) in a
 * single quadrature sweep: the hat evaluation T(z) at each node pair is
 * shared, each component subtracts its own numerically-integrated head.
 * `t` must be the kind=t series; plan.M is ignored in favor of Ms.
 * Requires max(Ms) <= t.size() and hat built from the same a_t.
 */
std::vector<ResummationResult> borel_window(const Real& delta,
                                            const BorelPlan& plan,
                                            const CoefficientSeries& t,
                                            const HatSeries& hat,
                                            const std::vector<long>& Ms);

/**
 * Single-M convenience wrapper: builds the transform and hat series on the
 * fly (or accepts them via borel_window for cached use) and evaluates at
 * plan.M.  value = sum_{m<M} t_m delta^m + corr by construction.
 */
ResummationResult borel_integral(const Real& delta, const BorelPlan& plan,
                                 const CoefficientSeries& t);

/**
 * Optimal asymptotic approximation at delta > 0: locates the global
 * minimum of |t_m delta^m| over the available coefficients and returns the
 * sum of all terms strictly before it.  Throws NoMinimumError when the
 * terms are still decreasing at the last available index (more
 * coefficients needed), DomainError for delta <= 0.
 */
OaaResult oaa_sum(const CoefficientSeries& t, const Real& delta);

}  // namespace qwkb
