// SPDX-License-Identifier: MIT
/**
 * @file precision.hpp
 * @brief Decimal-digit precision policy mapped onto MPFR bit precisions.
 */
#pragma once

#include <mpfr.h>

#include <cmath>

#include "qwkb/errors.hpp"

namespace qwkb {

/**
 * Precision policy for a computation: requested decimal digits plus guard
 * digits.  All routines derive their MPFR working precision from this and
 * round deterministically (round-to-nearest) so results are reproducible
 * bit-for-bit across runs.
 */
struct PrecisionContext {
  long digits = 30;   ///< decimal digits the caller wants to trust
  long guard = 20;    ///< extra decimal digits carried internally

  constexpr PrecisionContext() = default;
  constexpr explicit PrecisionContext(long d, long g = 20)
      : digits(d), guard(g) {}

  /// MPFR bit precision implementing digits+guard decimal digits.
  mpfr_prec_t bits() const {
    if (digits < 1) throw DomainError("PrecisionContext: digits must be >= 1");
    double dec = static_cast<double>(digits + (guard > 0 ? guard : 0));
    return static_cast<mpfr_prec_t>(std::ceil(dec * 3.3219280948873623)) + 16;
  }

  /// Same digits with a different guard (used for automatic guard doubling).
  constexpr PrecisionContext with_guard(long g) const {
    PrecisionContext c(*this);
    c.guard = g;
    return c;
  }

  /// Same guard with different digits.
  constexpr PrecisionContext with_digits(long d) const {
    PrecisionContext c(*this);
    c.digits = d;
    return c;
  }
};

}  // namespace qwkb
