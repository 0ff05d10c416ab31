// SPDX-License-Identifier: MIT
/**
 * @file special.hpp
 * @brief Euler Beta with exact pole handling, plus the exact rational
 *        Beta-ratio chains used by the quantization reduction.
 */
#pragma once

#include "qwkb/precision.hpp"
#include "qwkb/rational.hpp"
#include "qwkb/real.hpp"

namespace qwkb {

/// pi at the context precision.
Real pi_value(const PrecisionContext& ctx);

/// True iff r is an integer <= 0.
bool is_nonpositive_integer(const Rational& r);
/// True iff r is an integer >= 1.
bool is_positive_integer(const Rational& r);

/**
 * Euler Beta B(a, b) for rational arguments.
 *
 * Pole accounting: P = [a in Z<=0] + [b in Z<=0] - [a+b in Z<=0].
 *   P > 0  -> PoleError (genuine pole of the continuation).
 *   P < 0  -> exactly zero (denominator Gamma pole wins).
 *   P == 0 -> finite: either no Gamma pole is involved (direct evaluation via
 *             MPFR Gamma) or one argument is a positive integer m, in which
 *             case the value is the exact rational
 *             (m-1)! / (x (x+1) ... (x+m-1)).
 */
Real beta(const Rational& a, const Rational& b, const PrecisionContext& ctx);

/**
 * Exact rational B(x, m) for integer m >= 1 (finite by the P-accounting
 * above; throws PoleError/DomainError otherwise).
 */
Rational beta_rational(const Rational& x, long m);

/**
 * Exact ratio B(a, b0 - k) / B(a, b0) for integer k (either sign), via the
 * second-argument descent B(a, b-1) = B(a, b) * (a+b-1)/(b-1):
 *   k >= 0:  ratio = prod_{i=1..k} (a + b0 - i) / (b0 - i)
 *   k <  0:  ratio = prod_{i=0..|k|-1} (b0 + i) / (a + b0 + i)
 * Throws DomainError if a chain factor hits a zero denominator.
 */
Rational beta_second_shift_ratio(const Rational& a, const Rational& b0,
                                 long k);

/**
 * Exact ratio B(base + j, y) / B(base, y) for integer j >= 0, via the
 * first-argument ascent B(x+1, y) = B(x, y) * x/(x+y):
 *   ratio = prod_{i=0..j-1} (base + i) / (base + i + y).
 */
Rational beta_first_shift_ratio(const Rational& base, const Rational& y,
                                long j);

/**
 * Scale constant of the eigenvalue law E_N ~ L * (N+1/2)^{4/3}:
 * L = (3 pi / B(1/4,1/2))^{4/3}.
 */
Real leading_const(const PrecisionContext& ctx);

}  // namespace qwkb
