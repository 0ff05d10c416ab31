// SPDX-License-Identifier: MIT
/**
 * @file series.hpp
 * @brief Formal power-series algebra at arbitrary precision and the
 *        quantization-to-eigenvalue coefficient chain.
 *
 * Chain implemented here, starting from the exact quantization data
 * (B = B(1/4,1/2), B' = B(3/4,1/2)):
 *
 *   r_0 = -1,                    r_{2l}   = 3 (B^4/81pi^4)^l q_even[l],
 *   r_1 = 1/(12 pi),             r_{2l+1} = (4/3pi)(B^4/81pi^4)^l q_odd[l];
 *
 *   G(v) = sum_m (-1)^{floor(m/2)+1} r_m v^m           (G_0 = 1),
 *   solve  v = delta G(v)^2  for  v(delta) = delta + sum_{m>=2} s_m delta^m
 *   by Newton iteration with order doubling;
 *
 *   t = (v/delta)^{-2/3}:  E_N = [3pi/B]^{4/3} delta_N^{-2/3}
 *                                 (1 + sum_{m>=1} t_m delta_N^m),
 *   with delta_N = (N + 1/2)^{-2}.
 *
 * Checked closed forms: s_2 = -1/(6pi),
 *   s_3 = 5/(144 pi^2) + 11 B^4/(20736 pi^4),
 *   t_1 = 1/(9 pi),  t_2 = -5/(648 pi^2) - 11 B^4/(31104 pi^4).
 * Sign pattern: sign(t_{2l}) = sign(t_{2l+1}) = (-1)^l for l >= 1.
 *
 * The factorial growth |t_m| ~ const m!^2 a^m (m+1)^nu is fitted from
 * two-step magnitude ratios (same index parity, cancelling the even/odd
 * family constants) with Richardson extrapolation in 1/m.
 */
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qwkb/precision.hpp"
#include "qwkb/rational.hpp"
#include "qwkb/real.hpp"
#include "qwkb/wkb.hpp"

namespace qwkb {

// ---------------------------------------------------------------------------
// Dense truncated power series over Real, uniform precision per vector.
// All helpers truncate to `n` coefficients (powers 0 .. n-1).
// ---------------------------------------------------------------------------
using SeriesVec = std::vector<Real>;

SeriesVec series_zero(std::size_t n, mpfr_prec_t bits);
SeriesVec series_mul(const SeriesVec& a, const SeriesVec& b, std::size_t n);
SeriesVec series_inverse(const SeriesVec& a, std::size_t n);  ///< a[0] != 0
SeriesVec series_log(const SeriesVec& a, std::size_t n);      ///< a[0] == 1
SeriesVec series_exp(const SeriesVec& a, std::size_t n);      ///< a[0] == 0
/// a[0] == 1; arbitrary rational exponent via exp(e log a).
SeriesVec series_pow(const SeriesVec& a, const Rational& e, std::size_t n);
/// Horner composition outer(inner); requires inner[0] == 0.
SeriesVec series_compose(const SeriesVec& outer, const SeriesVec& inner,
                         std::size_t n);
/// Multiply by the series variable: res[i+1] = a[i], res[0] = 0.
SeriesVec series_shift_up(const SeriesVec& a, std::size_t n);

/**
 * Solve v = x G(v)^2 for v(x) = x + O(x^2) through order M (inclusive),
 * given G with G[0] = 1.  Newton iteration, order-doubling.  Returns a
 * vector of M+1 coefficients (index = power of x).
 */
SeriesVec series_revert_quadratic(const SeriesVec& G, std::size_t M);

// ---------------------------------------------------------------------------
// Named coefficient series with provenance metadata
// ---------------------------------------------------------------------------
enum class SeriesKind { r, s, t, t_tilde, t_hat };

std::string series_kind_name(SeriesKind k);
SeriesKind series_kind_from_name(const std::string& name);

struct CoefficientSeries {
  SeriesKind kind = SeriesKind::r;
  std::vector<Real> coeffs;  ///< index = series order (0..M)
  long precision = 0;        ///< decimal digits used to generate
  std::map<std::string, std::string> meta;  ///< generation parameters

  std::size_t size() const { return coeffs.size(); }
  const Real& operator[](std::size_t i) const { return coeffs[i]; }
};

/// Result of the factorial-growth fit |c_m| ~ const m!^2 a^m (m+1)^nu.
struct GrowthModel {
  Real a;             ///< growth constant (> 0)
  Rational nu;        ///< fixed subleading exponent
  long window_lo = 0; ///< fit window, inclusive
  long window_hi = 0;
  Real residual;      ///< max relative deviation of the rescaled sequence
};

/**
 * Build the r-series from exact quantization data.  r_0 = -1 and all later
 * r_m > 0; throws SignViolationError on violation and PrecisionLossError if
 * r_1 disagrees with 1/(12 pi) beyond 10^{-digits+5}.
 */
CoefficientSeries r_series(const QuantizationSeries& q,
                           const PrecisionContext& ctx);

/**
 * Revert the quantization relation to s_m: v(delta) = delta + sum_{m>=2}
 * s_m delta^m with v = delta G(v)^2.  Requires M <= r.size().  The stored
 * vector has M+1 entries (index = power, coeffs[0] = 0, coeffs[1] = 1).
 * Verifies the round trip delta G(v)^2 == v; throws PrecisionLossError if
 * the relative residual exceeds 10^{-digits} (guard digits exhausted).
 */
CoefficientSeries s_series(const CoefficientSeries& r,
                           const PrecisionContext& ctx, long M);

/**
 * Eigenvalue coefficients t = (v/delta)^{-2/3}; coeffs[0] = 1.  Enforces
 * sign(t_{2l}) = sign(t_{2l+1}) = (-1)^l for l >= 1 (SignViolationError
 * with the offending index otherwise).
 */
CoefficientSeries t_series(const CoefficientSeries& s,
                           const PrecisionContext& ctx);

/**
 * Fit the growth constant with nu fixed.  a^2 is estimated from the
 * two-step ratio |c_{m+2}|/|c_m| / ((m+1)(m+2))^2 * ((m+1)/(m+3))^nu and
 * Richardson-extrapolated in 1/m (3 levels, parity-respecting nodes: the
 * even- and odd-index families carry distinct prefactors) over
 * [window_lo, window_hi].
 * Throws ConvergenceError if the extrapolated tail is not Cauchy at
 * relative tolerance `tol` (default 1e-5).
 */
GrowthModel fit_growth(const CoefficientSeries& series, const Rational& nu,
                       long window_lo, long window_hi, double tol = 1e-5);

/// Serialize / restore a coefficient series (checksummed text format).
void save_series(const std::string& path, const CoefficientSeries& cs);
CoefficientSeries load_series(const std::string& path);

}  // namespace qwkb
