// SPDX-License-Identifier: MIT
/**
 * @file complexval.hpp
 * @brief Arbitrary-precision complex value as a pair of Real.
 */
#pragma once

#include "qwkb/real.hpp"

namespace qwkb {

class Complex {
 public:
  Complex() = default;
  explicit Complex(mpfr_prec_t bits) : re_(bits), im_(bits) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  explicit Complex(Real re) : re_(std::move(re)), im_(re_.prec()) {}

  static Complex from_polar(const Real& r, const Real& theta) {
    return Complex(r * cos(theta), r * sin(theta));
  }
  /// exp(i*theta)
  static Complex unit_phase(const Real& theta) {
    return Complex(cos(theta), sin(theta));
  }

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  Real& re() { return re_; }
  Real& im() { return im_; }

  mpfr_prec_t prec() const {
    return re_.prec() > im_.prec() ? re_.prec() : im_.prec();
  }
  bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

  Complex conj() const { return Complex(re_, -im_); }

  Complex& operator+=(const Complex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  /// In-place multiply (keeps operand precisions).
  Complex& operator*=(const Complex& o) {
    Real r = re_ * o.re_ - im_ * o.im_;
    Real i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re_ *= s;
    im_ *= s;
    return *this;
  }

 private:
  Real re_, im_;
};

inline Complex operator+(const Complex& a, const Complex& b) {
  return Complex(a.re() + b.re(), a.im() + b.im());
}
inline Complex operator-(const Complex& a, const Complex& b) {
  return Complex(a.re() - b.re(), a.im() - b.im());
}
inline Complex operator-(const Complex& a) {
  return Complex(-a.re(), -a.im());
}
inline Complex operator*(const Complex& a, const Complex& b) {
  return Complex(a.re() * b.re() - a.im() * b.im(),
                 a.re() * b.im() + a.im() * b.re());
}
inline Complex operator*(const Complex& a, const Real& s) {
  return Complex(a.re() * s, a.im() * s);
}
inline Complex operator*(const Real& s, const Complex& a) { return a * s; }
inline Complex operator/(const Complex& a, const Complex& b) {
  Real d = b.re() * b.re() + b.im() * b.im();
  return Complex((a.re() * b.re() + a.im() * b.im()) / d,
                 (a.im() * b.re() - a.re() * b.im()) / d);
}
inline Complex operator/(const Complex& a, const Real& s) {
  return Complex(a.re() / s, a.im() / s);
}

inline Real abs(const Complex& a) {
  Real r(a.prec());
  mpfr_hypot(r.raw(), a.re().raw(), a.im().raw(), MPFR_RNDN);
  return r;
}
/// exp(z) for complex z.
inline Complex exp(const Complex& z) {
  Real m = exp(z.re());
  return Complex(m * cos(z.im()), m * sin(z.im()));
}
/// Integer power by repeated squaring.
inline Complex pow(const Complex& z, unsigned long k) {
  Complex acc(Real::from_long(1, z.prec()), Real::from_long(0, z.prec()));
  Complex base = z;
  while (k != 0) {
    if (k & 1UL) acc *= base;
    base *= base;
    k >>= 1UL;
  }
  return acc;
}

}  // namespace qwkb
