// SPDX-License-Identifier: MIT
/**
 * @file real.hpp
 * @brief RAII arbitrary-precision real number over MPFR.
 *
 * Semantics chosen for reproducibility:
 *   - every value carries its own bit precision;
 *   - binary operators allocate the result at max(precision of operands);
 *   - compound assignments keep the precision of the left operand;
 *   - all roundings are MPFR_RNDN.
 */
#pragma once

#include <mpfr.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>

#include "qwkb/errors.hpp"
#include "qwkb/precision.hpp"
#include "qwkb/rational.hpp"

namespace qwkb {

class Real {
 public:
  Real() { mpfr_init2(v_, 64); }
  explicit Real(mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, 2);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  // ---- factories -----------------------------------------------------
  static Real from_long(long x, mpfr_prec_t bits = 64) {
    Real r(bits);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }
  static Real from_double(double x, mpfr_prec_t bits = 64) {
    Real r(bits);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }
  static Real from_rational(const Rational& q, mpfr_prec_t bits) {
    Real r(bits);
    mpfr_set_q(r.v_, q.get_mpq_t(), MPFR_RNDN);
    return r;
  }
  static Real from_string(const std::string& s, mpfr_prec_t bits) {
    Real r(bits);
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
      throw DomainError("malformed real literal: '" + s + "'");
    }
    return r;
  }
  static Real pi(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real nan(mpfr_prec_t bits = 64) {
    Real r(bits);
    mpfr_set_nan(r.v_);
    return r;
  }

  // ---- queries ---------------------------------------------------------
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  /// Base-2 exponent of the leading bit (0 for zero/non-finite values).
  long exponent2() const {
    if (!is_finite() || is_zero()) return 0;
    return static_cast<long>(mpfr_get_exp(v_));
  }
  /// Cheap log10(|x|) estimate from the binary exponent.
  double log10_abs_estimate() const {
    if (is_zero()) return -1e300;
    return static_cast<double>(exponent2()) * 0.30102999566398120;
  }

  /// Copy rounded to a new precision.
  Real round_to(mpfr_prec_t bits) const {
    Real r(bits);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  // ---- compound assignment (keeps LHS precision) -----------------------
  Real& operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(long k) {
    mpfr_mul_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(long k) {
    mpfr_div_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }
  /// *this += a*b without an intermediate rounding.
  Real& add_mul(const Real& a, const Real& b) {
    mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN);
    return *this;
  }
  /// Multiply by 2^k exactly.
  Real& mul_2si(long k) {
    mpfr_mul_2si(v_, v_, k, MPFR_RNDN);
    return *this;
  }

  // ---- string I/O -------------------------------------------------------
  /// Scientific notation with `digits` significant digits (0 = all carried).
  std::string to_string(size_t digits = 0) const {
    if (is_nan()) return "nan";
    if (!is_finite()) return sign() > 0 ? "inf" : "-inf";
    if (digits == 0) {
      digits = static_cast<size_t>(
          static_cast<double>(prec()) * 0.30102999566398120) + 2;
    }
    if (is_zero()) return "0";
    mpfr_exp_t e;
    char* raw = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
    std::string mant(raw);
    mpfr_free_str(raw);
    std::string out;
    size_t first = 0;
    if (!mant.empty() && mant[0] == '-') {
      out += '-';
      first = 1;
    }
    out += mant.substr(first, 1);
    out += '.';
    out += mant.substr(first + 1);
    out += 'e';
    out += std::to_string(static_cast<long>(e) - 1);
    return out;
  }

  const mpfr_t& raw() const { return v_; }
  mpfr_t& raw() { return v_; }

 private:
  mpfr_t v_;
};

// ---- free operators (result at max precision of the operands) ----------
namespace detail {
inline mpfr_prec_t max_prec(const Real& a, const Real& b) {
  return a.prec() > b.prec() ? a.prec() : b.prec();
}
}  // namespace detail

#define QWKB_REAL_BINOP(op, fn)                         \
  inline Real operator op(const Real& a, const Real& b) { \
    Real r(detail::max_prec(a, b));                     \
    fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);           \
    return r;                                           \
  }
QWKB_REAL_BINOP(+, mpfr_add)
QWKB_REAL_BINOP(-, mpfr_sub)
QWKB_REAL_BINOP(*, mpfr_mul)
QWKB_REAL_BINOP(/, mpfr_div)
#undef QWKB_REAL_BINOP

inline Real operator-(const Real& a) {
  Real r(a.prec());
  mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
inline Real operator*(const Real& a, long k) {
  Real r(a.prec());
  mpfr_mul_si(r.raw(), a.raw(), k, MPFR_RNDN);
  return r;
}
inline Real operator*(long k, const Real& a) { return a * k; }
inline Real operator/(const Real& a, long k) {
  Real r(a.prec());
  mpfr_div_si(r.raw(), a.raw(), k, MPFR_RNDN);
  return r;
}
inline Real operator/(long k, const Real& a) {
  Real r(a.prec());
  mpfr_si_div(r.raw(), k, a.raw(), MPFR_RNDN);
  return r;
}
inline Real operator+(const Real& a, long k) {
  Real r(a.prec());
  mpfr_add_si(r.raw(), a.raw(), k, MPFR_RNDN);
  return r;
}
inline Real operator-(const Real& a, long k) {
  Real r(a.prec());
  mpfr_sub_si(r.raw(), a.raw(), k, MPFR_RNDN);
  return r;
}

inline bool operator<(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) < 0;
}
inline bool operator>(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) > 0;
}
inline bool operator<=(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) <= 0;
}
inline bool operator>=(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) >= 0;
}
inline bool operator==(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) == 0;
}
inline bool operator!=(const Real& a, const Real& b) {
  return mpfr_cmp(a.raw(), b.raw()) != 0;
}

// ---- elementary functions ----------------------------------------------
#define QWKB_REAL_UNFN(name, fn)       \
  inline Real name(const Real& a) {    \
    Real r(a.prec());                  \
    fn(r.raw(), a.raw(), MPFR_RNDN);   \
    return r;                          \
  }
QWKB_REAL_UNFN(abs, mpfr_abs)
QWKB_REAL_UNFN(sqrt, mpfr_sqrt)
QWKB_REAL_UNFN(cbrt, mpfr_cbrt)
QWKB_REAL_UNFN(exp, mpfr_exp)
QWKB_REAL_UNFN(log, mpfr_log)
QWKB_REAL_UNFN(log10, mpfr_log10)
QWKB_REAL_UNFN(sin, mpfr_sin)
QWKB_REAL_UNFN(cos, mpfr_cos)
QWKB_REAL_UNFN(tan, mpfr_tan)
QWKB_REAL_UNFN(sinh, mpfr_sinh)
QWKB_REAL_UNFN(cosh, mpfr_cosh)
QWKB_REAL_UNFN(atan, mpfr_atan)
QWKB_REAL_UNFN(gamma, mpfr_gamma)
#undef QWKB_REAL_UNFN

inline Real floor_r(const Real& a) {
  Real r(a.prec());
  mpfr_floor(r.raw(), a.raw());
  return r;
}
inline Real ceil_r(const Real& a) {
  Real r(a.prec());
  mpfr_ceil(r.raw(), a.raw());
  return r;
}

inline Real pow(const Real& a, const Real& b) {
  Real r(detail::max_prec(a, b));
  mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, long k) {
  Real r(a.prec());
  mpfr_pow_si(r.raw(), a.raw(), k, MPFR_RNDN);
  return r;
}
inline Real atan2(const Real& y, const Real& x) {
  Real r(detail::max_prec(y, x));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}
inline Real min(const Real& a, const Real& b) { return a < b ? a : b; }
inline Real max(const Real& a, const Real& b) { return a > b ? a : b; }

/// Factorial n! as a Real at the given precision.
inline Real factorial(unsigned long n, mpfr_prec_t bits) {
  Real r(bits);
  mpfr_fac_ui(r.raw(), n, MPFR_RNDN);
  return r;
}

}  // namespace qwkb
