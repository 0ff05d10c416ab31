// SPDX-License-Identifier: MIT
#include "qwkb/special.hpp"

#include "qwkb/errors.hpp"

namespace qwkb {

Real pi_value(const PrecisionContext& ctx) { return Real::pi(ctx.bits()); }

bool is_nonpositive_integer(const Rational& r) {
  return r.get_den() == 1 && r.get_num() <= 0;
}

bool is_positive_integer(const Rational& r) {
  return r.get_den() == 1 && r.get_num() >= 1;
}

Rational beta_rational(const Rational& x, long m) {
  if (m < 1) throw DomainError("beta_rational: m must be a positive integer");
  // (m-1)! / (x (x+1) ... (x+m-1))
  Rational den(1);
  for (long i = 0; i < m; ++i) {
    Rational factor = x + i;
    if (factor == 0) {
      throw PoleError("beta_rational: pole at x = " + rational_to_string(x) +
                      ", m = " + std::to_string(m));
    }
    den *= factor;
  }
  Integer num;
  mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(m - 1));
  Rational out(num);
  out /= den;
  out.canonicalize();
  return out;
}

Real beta(const Rational& a, const Rational& b, const PrecisionContext& ctx) {
  const int pole_count = (is_nonpositive_integer(a) ? 1 : 0) +
                         (is_nonpositive_integer(b) ? 1 : 0) -
                         (is_nonpositive_integer(a + b) ? 1 : 0);
  if (pole_count > 0) {
    throw PoleError("beta: pole at (" + rational_to_string(a) + ", " +
                    rational_to_string(b) + ")");
  }
  const mpfr_prec_t bits = ctx.bits();
  if (pole_count < 0) return Real(bits);  // exact zero
  if (is_positive_integer(b)) {
    return Real::from_rational(beta_rational(a, b.get_num().get_si()), bits);
  }
  if (is_positive_integer(a)) {
    return Real::from_rational(beta_rational(b, a.get_num().get_si()), bits);
  }
  // No Gamma pole involved: direct evaluation.
  Real ga = gamma(Real::from_rational(a, bits));
  Real gb = gamma(Real::from_rational(b, bits));
  Real gab = gamma(Real::from_rational(a + b, bits));
  return ga * gb / gab;
}

Rational beta_second_shift_ratio(const Rational& a, const Rational& b0,
                                 long k) {
  Rational ratio(1);
  if (k >= 0) {
    for (long i = 1; i <= k; ++i) {
      Rational den = b0 - i;
      if (den == 0) {
        throw DomainError("beta_second_shift_ratio: zero chain factor");
      }
      ratio *= (a + b0 - i) / den;
    }
  } else {
    for (long i = 0; i < -k; ++i) {
      Rational den = a + b0 + i;
      if (den == 0) {
        throw DomainError("beta_second_shift_ratio: zero chain factor");
      }
      ratio *= (b0 + i) / den;
    }
  }
  ratio.canonicalize();
  return ratio;
}

Rational beta_first_shift_ratio(const Rational& base, const Rational& y,
                                long j) {
  if (j < 0) throw DomainError("beta_first_shift_ratio: j must be >= 0");
  Rational ratio(1);
  for (long i = 0; i < j; ++i) {
    Rational den = base + i + y;
    if (den == 0) {
      throw DomainError("beta_first_shift_ratio: zero chain factor");
    }
    ratio *= (base + i) / den;
  }
  ratio.canonicalize();
  return ratio;
}

Real leading_const(const PrecisionContext& ctx) {
  const mpfr_prec_t bits = ctx.bits();
  Real b = beta(Rational(1, 4), Rational(1, 2), ctx);
  Real base = Real::pi(bits) * 3 / b;
  return pow(base, Real::from_rational(Rational(4, 3), bits));
}

}  // namespace qwkb
