// SPDX-License-Identifier: MIT
/**
 * @file wkb.hpp
 * @brief Exact all-order WKB expansion for the quartic potential and its
 *        reduction to a quantization series.
 *
 * The correction functions T_n (real-normalized: T_0 = Q^{1/2}, Q = z^4 - E)
 * obey
 *     T_n = -( T'_{n-1} + sum_{j=1}^{n-1} T_j T_{n-j} ) / (2 T_0),
 * and every order is the single canonical shape
 *     T_n = z^{a_n} * sum_i c_i Q^{b_n - i} E^i ,      a_n in {0,1,2,3},
 * where every monomial has the same scaling degree a_n + 4 b_n = 2 - 3n
 * (under z -> s z, E -> s^4 E the recursion forces deg T_n = 2 - 3n), so the
 * top Q-power is b_n = (2 - 3n - a_n)/4 — half-integer at even n, integer at
 * odd n — the deepest is -(3n-1)/2, and the list has (3n - a_n)/4 + 1
 * coefficients for n >= 1.  The engine below works directly on those
 * coefficient vectors with GMP integers over a power-of-two denominator,
 * which keeps the recursion exact and fast.
 *
 * Contour reduction: for even z-powers and half-integer Q-powers,
 *     (1/2i) oint z^a Q^{-k-1/2} dz
 *        = (-1)^k (1/2) B((a+1)/4, 1/2-k) E^{(a+1)/4 - k - 1/2}
 * around the branch cut between the real turning points (counterclockwise);
 * odd z-powers integrate to zero.  First-argument Beta shifts reduce every
 * row to the base families B(1/4, .) and B(3/4, .).
 */
#pragma once

#include <string>
#include <vector>

#include "qwkb/rational.hpp"
#include "qwkb/termlist.hpp"

namespace qwkb {

/// One reduced contour row: coeff * B(base, 1/2 - k) * E^epow, where base is
/// 1/4 (family 0) or 3/4 (family 1).
struct ReducedRow {
  Rational coeff;
  Rational epow;
  long k = 0;
  int family = 0;
};

/**
 * Exact quantization data extracted from the expansion:
 *     (1/(3 eps)) B E^{3/4}
 *   + sum_{l>=1} (-1)^{l+1} B  q_even[l] eps^{4l-1} E^{-(12l-3)/4}
 *   + sum_{l>=0} (-1)^{l+1} B' q_odd[l]  eps^{4l+1} E^{-(12l+3)/4}
 *   = (N + 1/2) pi ,
 * with B = B(1/4,1/2), B' = B(3/4,1/2), and all q > 0.  The p-coefficients
 * are the same data normalized against the direct contour integrals
 * I_k = (-1)^k (1/2) B(base, 1/2-k) E^{base-k-1/2}:
 *   p_even[l] =  2 q_even[l] / rho_e(l),  rho_e(l) = B(1/4, 3/2-6l)/B(1/4,1/2)
 *   p_odd[l]  = -2 q_odd[l]  / rho_o(l),  rho_o(l) = B(3/4,-3/2-6l)/B(3/4,1/2)
 */
struct QuantizationSeries {
  long n_max = 0;
  std::vector<Rational> q_even;  ///< q_even[l-1] holds l = 1, 2, ...
  std::vector<Rational> q_odd;   ///< q_odd[l]   holds l = 0, 1, ...

  long even_count() const { return static_cast<long>(q_even.size()); }
  long odd_count() const { return static_cast<long>(q_odd.size()); }
  const Rational& q_e(long l) const;  ///< l >= 1
  const Rational& q_o(long l) const;  ///< l >= 0
  Rational p_e(long l) const;         ///< l >= 1
  Rational p_o(long l) const;         ///< l >= 0
};

/**
 * Compute the canonical correction functions T_0..T_n_max.
 * progress: if nonzero, prints one status line every `progress` orders.
 */
std::vector<TermList> compute_orders(long n_max, long progress = 0);

/**
 * Residual of the defining identity at order n >= 1:
 *     T'_{n-1} + sum_{j=0}^{n} T_j T_{n-j}
 * computed with the generic term algebra; exact zero (empty list) when the
 * orders are consistent.
 */
TermList recursion_residual(const std::vector<TermList>& orders, long n);

/**
 * Reduce an even-order list (even z-powers, half-integer Q-powers) to Beta
 * rows.  Terms with odd z-power reduce to zero and are dropped; integer
 * Q-powers throw UnsupportedTermError.
 */
std::vector<ReducedRow> reduce_contour(const TermList& list);

/**
 * Full quantization extraction to order n_max (q_even through l = n_max/4,
 * q_odd through l = (n_max-2)/4).  Asserts, exactly:
 *   - the n = 0 and n = 2 leading contributions (1/3 and 1/16),
 *   - T_1 = -z^3 Q^{-1} (the Maslov 1/2 shift),
 *   - vanishing of every odd order n >= 3 (integration-by-parts residue sum),
 *   - uniform E-power per order,
 *   - positivity of every q (SignViolationError otherwise).
 */
QuantizationSeries quantization_series(long n_max, long progress = 0);

/// Text export: header + one "q_e <l> <num>/<den>" or "q_o <l> ..." per line.
void write_quantization(const std::string& path, const QuantizationSeries& qs);
QuantizationSeries read_quantization(const std::string& path);

}  // namespace qwkb
