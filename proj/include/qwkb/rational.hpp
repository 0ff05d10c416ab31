// SPDX-License-Identifier: MIT
/**
 * @file rational.hpp
 * @brief Exact rational arithmetic (GMP mpq_class) plus small helpers.
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "qwkb/errors.hpp"

namespace qwkb {

using Integer = mpz_class;

/**
 * Exact rational number; always kept in canonical (reduced) form.
 *
 * Thin wrapper over mpq_class whose numerator/denominator constructors
 * canonicalize immediately: gmpxx leaves two-argument construction
 * unreduced, while its equality operator calls mpq_equal, which is only
 * correct on canonical operands.  All other operations come from the base
 * class and preserve canonical form.
 */
class Rational : public mpq_class {
 public:
  Rational() : mpq_class() {}
  Rational(int n) : mpq_class(n) {}
  Rational(long n) : mpq_class(n) {}
  Rational(const Integer& n) : mpq_class(n) {}
  Rational(long num, long den) : mpq_class(num, den) { reduce(); }
  Rational(const Integer& num, const Integer& den) : mpq_class(num, den) {
    reduce();
  }
  template <class T, class U>
  Rational(const __gmp_expr<T, U>& e) : mpq_class(e) {}
  using mpq_class::operator=;

 private:
  void reduce() {
    if (sgn(get_den()) == 0) throw DomainError("zero denominator");
    canonicalize();
  }
};

/// Parse "num/den" or "num"; throws DomainError on malformed input.
inline Rational rational_from_string(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) {
    throw DomainError("malformed rational literal: '" + text + "'");
  }
  r.canonicalize();
  return r;
}

/// Render as "num/den" (or "num" when the denominator is 1).
inline std::string rational_to_string(const Rational& r) {
  return r.get_str(10);
}

/// r^k for integer k (k may be negative; r must be nonzero then).
inline Rational rational_pow(const Rational& r, long k) {
  if (k == 0) return Rational(1);
  if (r == 0 && k < 0) throw DomainError("0 raised to a negative power");
  Rational base = k > 0 ? r : Rational(1) / r;
  unsigned long n = static_cast<unsigned long>(k > 0 ? k : -k);
  Rational acc(1);
  while (n != 0) {
    if (n & 1UL) acc *= base;
    base *= base;
    n >>= 1UL;
  }
  return acc;
}

/// Exact binomial coefficient C(n, k) as an Integer (0 when k < 0 or k > n).
inline Integer binomial(long n, long k) {
  if (k < 0 || k > n) return Integer(0);
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return out;
}

/// Sign of a rational: -1, 0, or +1.
inline int sign_of(const Rational& r) { return sgn(r); }

}  // namespace qwkb
