// SPDX-License-Identifier: MIT
// Rotated double-Borel summation: transform, conformal acceleration,
// tensor exp-sinh quadrature, M-corrected windows, optimal truncation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle_values.hpp"
#include "qwkb/errors.hpp"
#include "qwkb/rational.hpp"
#include "qwkb/resummation.hpp"
#include "qwkb/series.hpp"

using namespace qwkb;
using namespace qwkb::oracle;

namespace {

Real tol10(long e, mpfr_prec_t bits) {
  return pow(Real::from_long(10, bits), e);
}

bool near(const Real& x, const Real& y, const Real& tol) {
  return abs(x - y) < tol * (abs(y) + 1L);
}

// Synthetic coefficient family with the physical singularity layout: the
// residue-class fold of tau recovers g(Z) = ((1+Z/16)/(1+Z))^{1/2} (scaled
// by 1/(p+1) per class), singular at Z = -1 (mapped to u-infinity) and
// Z = -16 (|u| = 16/15) and bounded at Z-infinity, so its u-expansion is
// exactly (1 - (15/16)u)^{1/2} -- pure geometric decay at rate 15/16 --
// while the raw power series in z has radius 1.
struct Model {
  SeriesVec g;              // fold-class generator, L coefficients in Z
  std::vector<Real> tau;    // tau_m for m < 4L
  CoefficientSeries t;      // t_m = tau_m m!^2 a^m
  Real a;
};

Model make_model(std::size_t L, long digits) {
  const mpfr_prec_t bits = PrecisionContext(digits).bits();
  Model m;
  SeriesVec onepz;
  onepz.push_back(Real::from_long(1, bits));
  onepz.push_back(Real::from_long(1, bits));
  SeriesVec onepz16;
  onepz16.push_back(Real::from_long(1, bits));
  onepz16.push_back(Real::from_rational(Rational(1, 16), bits));
  m.g = series_mul(series_pow(onepz, Rational(-1, 2), L),
                   series_pow(onepz16, Rational(1, 2), L), L);
  m.a = Real::from_rational(Rational(1, 4), bits);

  m.tau.reserve(4 * L);
  for (std::size_t mm = 0; mm < 4 * L; ++mm) {
    const std::size_t l = mm / 4;
    const int p = static_cast<int>(mm % 4);
    Real v = m.g[l] / static_cast<long>(p + 1);
    if ((l & 1U) != 0U) v = -v;
    m.tau.push_back(std::move(v));
  }

  m.t.kind = SeriesKind::t;
  m.t.precision = digits;
  Real scale = Real::from_long(1, bits);  // m!^2 a^m
  for (std::size_t mm = 0; mm < 4 * L; ++mm) {
    if (mm > 0) {
      scale *= static_cast<long>(mm) * static_cast<long>(mm);
      scale *= m.a;
    }
    m.t.coeffs.push_back(m.tau[mm] * scale);
  }
  return m;
}

// tau_m = 0.9^m / (m+1)^2 for the frozen micro oracle.
CoefficientSeries micro_tilde(std::size_t n, long digits) {
  const mpfr_prec_t bits = PrecisionContext(digits).bits();
  CoefficientSeries tt;
  tt.kind = SeriesKind::t_tilde;
  tt.precision = digits;
  tt.meta["a_t"] = "1";
  const Real q = Real::from_rational(Rational(9, 10), bits);
  Real qm = Real::from_long(1, bits);
  for (std::size_t m = 0; m < n; ++m) {
    if (m > 0) qm *= q;
    const long d = static_cast<long>(m + 1) * static_cast<long>(m + 1);
    tt.coeffs.push_back(qm / d);
  }
  return tt;
}

// Re-expansion of sum_l c_l Y^l around Y = v/(1-v): identical triangular
// recurrence as the library's 4-fold version, usable at any stride.
std::vector<Real> mobius_reexpand(const std::vector<Real>& c,
                                  mpfr_prec_t bits) {
  std::vector<Real> hh;
  hh.reserve(c.size());
  for (std::size_t L = 0; L < c.size(); ++L) {
    Real v = c[L].round_to(bits);
    Real binom = Real::from_long(1, bits);  // C(L-1, j) built incrementally
    for (std::size_t j = 1; L >= 2 && j <= L - 1; ++j) {
      binom *= static_cast<long>(L - j);
      binom /= static_cast<long>(j);
      Real term = hh[L - j] * binom;
      if ((j & 1U) != 0U) term = -term;
      v -= term;
    }
    hh.push_back(std::move(v));
  }
  return hh;
}

CoefficientSeries series_of_kind(SeriesKind k, std::initializer_list<double> cs,
                                 long digits) {
  const mpfr_prec_t bits = PrecisionContext(digits).bits();
  CoefficientSeries s;
  s.kind = k;
  s.precision = digits;
  for (double c : cs) s.coeffs.push_back(Real::from_double(c, bits));
  return s;
}

}  // namespace

TEST_CASE("phase gate admits exactly the two real-fold angles") {
  const mpfr_prec_t bits = PrecisionContext(40).bits();
  const Real pi = Real::pi(bits);
  CHECK(phase_is_allowed(pi / 8));
  CHECK(phase_is_allowed((3 * pi) / 8));
  CHECK_FALSE(phase_is_allowed(pi / 4));
  CHECK_FALSE(phase_is_allowed(pi / 5));
  CHECK_FALSE(phase_is_allowed(-(pi / 8)));
  CHECK_FALSE(phase_is_allowed(Real::from_long(0, bits)));
  CHECK_FALSE(phase_is_allowed(Real::nan()));
}

TEST_CASE("borel transform divides out m!^2 a^m and keeps the phase apart") {
  Model model = make_model(16, 40);
  const mpfr_prec_t bits = PrecisionContext(40).bits();
  const Real pi = Real::pi(bits);

  BorelPlan plan;
  plan.alpha_phase = pi / 8;
  plan.a_t = model.a;
  plan.ctx = PrecisionContext(40);

  CoefficientSeries tt = borel_transform(model.t, plan);
  CHECK(tt.kind == SeriesKind::t_tilde);
  CHECK(tt.size() == model.t.size());
  const Real tol = tol10(-34, bits);
  for (std::size_t m : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                        std::size_t{7}, std::size_t{40}})
    CHECK(near(tt.coeffs[m], model.tau[m], tol));

  // ttilde_0 = e^{2 i phi} tau_0 and tau_0 = 1 here, so it is exactly the
  // unit phase at 2 phi; the modulus never depends on the phase choice.
  const Complex t0 = tilde_coeff(tt, 0, pi / 8);
  CHECK(near(t0.re(), cos(pi / 4), tol));
  CHECK(near(t0.im(), sin(pi / 4), tol));
  const Complex t5a = tilde_coeff(tt, 5, pi / 8);
  const Complex t5b = tilde_coeff(tt, 5, (3 * pi) / 8);
  CHECK(near(abs(t5a), abs(t5b), tol));
  CHECK(near(abs(t5a), abs(model.tau[5]), tol));

  // Radius-one monitor is recorded for long series.
  REQUIRE(tt.meta.count("radius_probe") == 1);
  const double probe = std::stod(tt.meta.at("radius_probe"));
  CHECK(probe > 0.85);
  CHECK(probe < 1.1);

  // Guards: wrong kind, bad a_t, disallowed phase, bad index.
  CoefficientSeries rk = series_of_kind(SeriesKind::r, {1.0, 0.5}, 30);
  CHECK_THROWS_AS(borel_transform(rk, plan), DomainError);
  BorelPlan bad = plan;
  bad.a_t = Real::from_long(0, bits);
  CHECK_THROWS_AS(borel_transform(model.t, bad), DomainError);
  bad = plan;
  bad.alpha_phase = pi / 4;
  CHECK_THROWS_AS(borel_transform(model.t, bad), DomainError);
  CHECK_THROWS_AS(tilde_coeff(tt, tt.size(), pi / 8), DomainError);
  CHECK_THROWS_AS(tilde_coeff(model.t, 0, pi / 8), DomainError);
}

TEST_CASE("conformal re-expansion matches the frozen micro series") {
  CoefficientSeries tt = micro_tilde(48, 35);
  const mpfr_prec_t bits = PrecisionContext(35).bits();
  HatSeries hat = conformal_reexpand(tt);

  for (int p = 0; p < 4; ++p) REQUIRE(hat.terms(p) == 12);
  CHECK(near(hat.a_t, Real::from_long(1, bits), tol10(-30, bits)));

  // Frozen class-1 coefficients.
  const Real tol = tol10(-24, bits);
  for (std::size_t l = 0; l < 10; ++l)
    CHECK(near(hat.h[1][l], Real::from_string(kHatMicro[l], bits), tol));

  // Structural identities: hhat_0 = tau_p, hhat_1 = -tau_{p+4},
  // hhat_2 = tau_{p+8} - tau_{p+4}.
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(near(hat.h[p][0], tt.coeffs[p], tol));
    CHECK(near(hat.h[p][1], -tt.coeffs[p + 4], tol));
    CHECK(near(hat.h[p][2], tt.coeffs[p + 8] - tt.coeffs[p + 4], tol));
  }

  // The triangular solve runs with 80 extra digits, so the roundtrip
  // residual sits far below the series precision.
  CHECK(hat_roundtrip_error(hat, tt) < tol10(-60, bits));

  CoefficientSeries tk = series_of_kind(SeriesKind::t, {1.0, 0.5, 0.2}, 30);
  CHECK_THROWS_AS(conformal_reexpand(tk), DomainError);
  CoefficientSeries shorttt = micro_tilde(3, 30);
  CHECK_THROWS_AS(conformal_reexpand(shorttt), DomainError);
}

TEST_CASE("hat evaluation agrees with direct summation inside the disc") {
  CoefficientSeries tt = micro_tilde(48, 35);
  const mpfr_prec_t bits = PrecisionContext(35).bits();
  HatSeries hat = conformal_reexpand(tt);
  const Real pi = Real::pi(bits);

  // z = 0 returns the constant term of each class.
  const Complex zero(Real::from_long(0, bits), Real::from_long(0, bits));
  for (int p = 0; p < 4; ++p) {
    const Complex v = hat_eval(hat, p, zero);
    CHECK(near(v.re(), hat.h[p][0], tol10(-30, bits)));
    CHECK(abs(v.im()) < tol10(-30, bits));
  }

  // Against the direct phase-weighted sum at a well-converged point, for
  // both admitted phases.
  const Complex z(Real::from_double(0.3, bits), Real::from_double(0.2, bits));
  for (int which = 0; which < 2; ++which) {
    const Real phi = which == 0 ? pi / 8 : (3 * pi) / 8;
    Complex direct(Real::from_long(0, bits), Real::from_long(0, bits));
    for (std::size_t m = tt.size(); m-- > 0;) {
      direct *= z;
      direct += Complex::unit_phase(2 * phi * static_cast<long>(m + 1)) *
                tt.coeffs[m];
    }
    Real tail = Real::nan();
    const Complex via_hat = tilde_eval_hat(hat, phi, z, 0, &tail);
    CHECK(abs(via_hat - direct) < tol10(-20, bits));
    CHECK(tail >= Real::from_long(0, bits));
    CHECK(tail < tol10(-10, bits));
  }

  // Tail estimate is available and small at a modest real point.  (This
  // family's fold has a logarithmic u = 1 singularity, so the decay is
  // only algebraic and the estimate stays conservative.)
  Real tail = Real::nan();
  const Complex at07 =
      hat_eval(hat, 1, Complex(Real::from_double(0.7, bits)), 0, &tail);
  CHECK(at07.is_finite());
  CHECK(tail < tol10(-8, bits));

  // Outside the u-disc the evaluation refuses: z^4 near -1 and |u| > 1.
  const Complex on_sing = Complex::unit_phase(pi / 4);
  CHECK_THROWS_AS(hat_eval(hat, 0, on_sing), ConvergenceError);
  const Complex past =
      Complex::unit_phase(pi / 4) * Real::from_double(1.05, bits);
  CHECK_THROWS_AS(hat_eval(hat, 0, past), ConvergenceError);

  CHECK_THROWS_AS(hat_eval(hat, 4, zero), DomainError);
  CHECK_THROWS_AS(hat_eval(hat, 0, zero, 999), DomainError);
}

TEST_CASE("conformal acceleration on the physical singularity layout") {
  Model model = make_model(64, 50);
  const mpfr_prec_t bits = PrecisionContext(50).bits();
  const Real pi = Real::pi(bits);

  BorelPlan plan;
  plan.alpha_phase = pi / 8;
  plan.a_t = model.a;
  plan.ctx = PrecisionContext(50);
  CoefficientSeries tt = borel_transform(model.t, plan);
  HatSeries hat = conformal_reexpand(tt);
  for (int p = 0; p < 4; ++p) REQUIRE(hat.terms(p) == 64);

  // Independent algebra path: the class functions are g(Z)/(p+1), so the
  // hat coefficients must match the Taylor expansion of g composed with
  // Z = u/(1-u) computed by ordinary series composition.
  SeriesVec inner;
  inner.push_back(Real::from_long(0, bits));
  for (std::size_t k = 1; k < 64; ++k)
    inner.push_back(Real::from_long(1, bits));
  const SeriesVec composed = series_compose(model.g, inner, 64);
  const Real tol = tol10(-28, bits);
  for (int p = 0; p < 4; ++p) {
    for (std::size_t l : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                          std::size_t{5}, std::size_t{20}, std::size_t{40},
                          std::size_t{63}})
      CHECK(near(hat.h[p][l], composed[l] / (p + 1L), tol));
  }

  // Closed form: g(u/(1-u)) = (1 - (15/16) u)^{1/2}, so the class-0 hat
  // coefficients are exactly the binomial expansion of that square root.
  SeriesVec shifted;
  shifted.push_back(Real::from_long(1, bits));
  shifted.push_back(Real::from_rational(Rational(-15, 16), bits));
  const SeriesVec closed_hat = series_pow(shifted, Rational(1, 2), 64);
  for (std::size_t l = 0; l < 64; ++l)
    CHECK(near(hat.h[0][l], closed_hat[l], tol));

  // Geometric decay at the rate set by the Z = -16 image (|u| = 16/15).
  double gm = 1.0;
  for (std::size_t l = 54; l < 64; ++l)
    gm *= std::fabs(hat.h[0][l].to_double() / hat.h[0][l - 1].to_double());
  gm = std::pow(gm, 0.1);
  CHECK(gm > 0.90);
  CHECK(gm < 0.97);

  // Raw summation diverges just outside |z| = 1 (radius set by the
  // singularities the fold rotates onto the negative Z axis).
  const double zr = 1.06;
  double mn = 1e300;
  std::size_t mn_at = 0;
  std::vector<double> mag(model.tau.size());
  for (std::size_t m = 0; m < model.tau.size(); ++m) {
    mag[m] = std::fabs(model.tau[m].to_double()) * std::pow(zr, double(m));
    if (mag[m] < mn && mag[m] > 0.0) {
      mn = mag[m];
      mn_at = m;
    }
  }
  CHECK(mn_at > 4);
  CHECK(mn_at < 200);
  CHECK(mag.back() > 100.0 * mn);
  CHECK(mag.back() > mag[0]);

  // Negative test: the stride-2 fold leaves a singularity at Y = +1, whose
  // v = Y/(1+Y) image sits at v = 1/2 inside the disc; its re-expansion
  // has radius 1/2 and blows up on the integration path, at points where
  // the stride-4 version converges comfortably.
  const mpfr_prec_t sbits = PrecisionContext(80).bits();
  std::vector<Real> c2;
  for (std::size_t l = 0; 2 * l < model.tau.size(); ++l) {
    Real v = model.tau[2 * l].round_to(sbits);
    if ((l & 1U) != 0U) v = -v;
    c2.push_back(std::move(v));
  }
  const std::vector<Real> vh = mobius_reexpand(c2, sbits);
  REQUIRE(vh.size() == 128);
  double gm2 = 1.0;
  for (std::size_t l = 118; l < 128; ++l)
    gm2 *= std::fabs(vh[l].to_double() / vh[l - 1].to_double());
  gm2 = std::pow(gm2, 0.1);
  CHECK(gm2 > 1.8);
  CHECK(gm2 < 2.2);
  // Partial-sum terms at the z = 7 image v = 49/50 grow without bound...
  const double lv = std::log10(0.98);
  const double t0_log = std::log10(std::fabs(vh[0].to_double()));
  const double t99_log =
      std::log10(std::fabs(vh[99].to_double())) + 99.0 * lv;
  CHECK(t99_log - t0_log > 10.0);

  // ...while the u-series at the same point converges to the analytic
  // continuation, known in closed form for the model.
  Real tail = Real::nan();
  const Complex at7 =
      hat_eval(hat, 0, Complex(Real::from_long(7, bits)), 0, &tail);
  const Real Z = Real::from_long(2401, bits);
  const Real closed = sqrt((Z / 16 + 1L) / (Z + 1L));
  CHECK(abs(at7.im()) < tol10(-20, bits) * closed);
  CHECK(abs(at7.re() - closed) < tail + tol10(-20, bits) * closed);
  CHECK(tail < closed * tol10(-2, bits));
}

TEST_CASE("tensor exp-sinh quadrature reproduces the toy integral") {
  PrecisionContext ctx(32);
  const mpfr_prec_t bits = ctx.bits();
  const Real pi = Real::pi(bits);
  const Real phi = pi / 8;
  const Complex a2 = Complex::unit_phase(pi / 4);
  const Real c = Real::from_rational(Rational(3, 20), bits);
  const Complex one(Real::from_long(1, bits), Real::from_long(0, bits));

  auto g = [&](const Real& xi, Complex* out) {
    out[0] = a2 / (one - a2 * (xi * c));
  };

  QuadSpec spec;
  spec.level_min = 3;
  spec.level_max = 9;
  spec.tol_abs = tol10(-30, bits);

  std::vector<Complex> res;
  std::vector<Real> errs;
  const int lvl = exp_sinh_product_quad(g, 1, phi, 0, ctx, spec, res, errs);
  const Real ref = Real::from_string(kBorelToyReal, bits);
  CHECK(abs(res[0].re() - ref) < tol10(-25, bits));
  CHECK(errs[0] < tol10(-28, bits));
  CHECK(lvl >= 4);
  CHECK(lvl <= 9);

  // Absolute-weight accumulation dominates the complex magnitude.
  auto g2 = [&](const Real& xi, Complex* out) {
    out[0] = a2 / (one - a2 * (xi * c));
    out[1] = Complex(abs(out[0]), Real::from_long(0, bits));
  };
  std::vector<Complex> res2;
  std::vector<Real> errs2;
  exp_sinh_product_quad(g2, 2, phi, 0, ctx, spec, res2, errs2, true);
  CHECK(abs(res2[0].re() - ref) < tol10(-25, bits));
  CHECK(res2[1].re() + tol10(-20, bits) > abs(res[0]));
  CHECK(res2[1].im().is_zero());

  // The pair-skip floor leaves a convergent integral untouched (the
  // dropped corner carries weight below the floor by construction).
  std::vector<Complex> res3;
  std::vector<Real> errs3;
  exp_sinh_product_quad(g, 1, phi, 0, ctx, spec, res3, errs3, false, -30.0);
  CHECK(abs(res3[0].re() - ref) < tol10(-25, bits));

  // Guards.
  CHECK_THROWS_AS(
      exp_sinh_product_quad(g, 0, phi, 0, ctx, spec, res, errs), DomainError);
  CHECK_THROWS_AS(exp_sinh_product_quad(g, 1, Real::from_long(0, bits), 0, ctx,
                                        spec, res, errs),
                  DomainError);
  QuadSpec badspec = spec;
  badspec.level_min = 0;
  CHECK_THROWS_AS(
      exp_sinh_product_quad(g, 1, phi, 0, ctx, badspec, res, errs),
      DomainError);
  badspec = spec;
  badspec.level_max = 2;
  CHECK_THROWS_AS(
      exp_sinh_product_quad(g, 1, phi, 0, ctx, badspec, res, errs),
      DomainError);
}

TEST_CASE("monomial kernels integrate back to exact head terms") {
  Model model = make_model(8, 40);
  PrecisionContext ctx(35);
  const mpfr_prec_t bits = ctx.bits();
  const Real pi = Real::pi(bits);
  const Real phi = pi / 8;
  const Real delta = Real::from_rational(Rational(3, 10), bits);
  const Real s = model.a.round_to(bits) * delta;

  QuadSpec spec;
  spec.level_min = 4;
  spec.level_max = 9;
  spec.tol_abs = tol10(-30, bits);

  for (long m : {0L, 1L, 4L, 9L}) {
    const Real tau = model.tau[static_cast<std::size_t>(m)].round_to(bits);
    auto g = [&](const Real& xi, Complex* out) {
      const Real zm = pow(xi * s, m);
      out[0] = Complex::unit_phase(2 * phi * (m + 1L)) * (tau * zm);
    };
    std::vector<Complex> res;
    std::vector<Real> errs;
    exp_sinh_product_quad(g, 1, phi, m, ctx, spec, res, errs);
    const Real expect =
        model.t.coeffs[static_cast<std::size_t>(m)].round_to(bits) *
        pow(delta, m);
    CHECK(abs(res[0].re() - expect) < tol10(-26, bits) * (abs(expect) + 1L));
    CHECK(abs(res[0].im()) < tol10(-26, bits) * (abs(expect) + 1L));
  }
}

TEST_CASE("window evaluations are M-independent, real, and consistent") {
  Model model = make_model(64, 50);
  const mpfr_prec_t bits = PrecisionContext(50).bits();
  const Real pi = Real::pi(bits);

  BorelPlan plan;
  plan.alpha_phase = pi / 8;
  plan.a_t = model.a;
  plan.hat_terms = 60;
  plan.ctx = PrecisionContext(35);
  CoefficientSeries tt = borel_transform(model.t, plan);
  HatSeries hat = conformal_reexpand(tt);
  CHECK(hat_roundtrip_error(hat, tt) < tol10(-60, bits));

  const Real delta = Real::from_rational(Rational(1, 50), bits);
  std::vector<long> Ms{11, 12, 13, 14, 15, 16, 17};
  const std::vector<ResummationResult> res =
      borel_window(delta, plan, model.t, hat, Ms);
  REQUIRE(res.size() == Ms.size());

  Real vmin = res[0].value;
  Real vmax = res[0].value;
  Real emax = Real::from_long(0, bits);
  for (const ResummationResult& r : res) {
    CHECK(r.level_used >= plan.quad.level_min);
    CHECK(r.level_used <= plan.quad.level_max);
    CHECK(r.imag_residual < tol10(-9, bits));
    CHECK(r.err_quad < tol10(-20, bits));
    CHECK(r.err_tail < tol10(-12, bits));
    vmin = min(vmin, r.value);
    vmax = max(vmax, r.value);
    emax = max(emax, r.err_quad + r.err_tail);

    // value = head + corr with the head summed exactly in delta.
    Real head = Real::from_long(0, bits);
    Real dm = Real::from_long(1, bits);
    for (long m = 0; m < r.M; ++m) {
      head.add_mul(model.t.coeffs[static_cast<std::size_t>(m)], dm);
      dm *= delta;
    }
    CHECK(abs(r.value - head - r.corr) < tol10(-45, bits));
  }
  const Real spread = vmax - vmin;
  CHECK(spread < 3 * emax);
  CHECK(spread < tol10(-22, bits));

  // The imaginary part is the lateral-summation ambiguity, not an error:
  // every checkpoint sees the same rotated integral of the resummed tail, so
  // it is M-uniform, genuinely nonzero, and of order exp(-c/sqrt(delta)) --
  // far below every retained term yet far above the quadrature floor.
  Real imin = res[0].imag_residual;
  Real imax = res[0].imag_residual;
  for (const ResummationResult& r : res) {
    imin = min(imin, r.imag_residual);
    imax = max(imax, r.imag_residual);
  }
  CHECK(imax - imin < tol10(-25, bits));
  CHECK(imin > tol10(-14, bits));

  // Halving delta must crush the ambiguity much faster than any power:
  // exp(-c/sqrt(delta)) drops by ~1e-5 from 1/50 to 1/100 (c ~ 3.9 here).
  const std::vector<ResummationResult> amb = borel_window(
      Real::from_rational(Rational(1, 100), bits), plan, model.t, hat, {0});
  CHECK(amb[0].imag_residual < imax * tol10(-3, bits));

  // Heads differ wildly across the window even though values agree: the
  // correction really absorbs the M-dependence.
  CHECK(abs(res.front().corr - res.back().corr) > tol10(-16, bits));

  // Single-M convenience wrapper lands on the same value.
  plan.M = 14;
  const ResummationResult single = borel_integral(delta, plan, model.t);
  CHECK(abs(single.value - res[3].value) < tol10(-22, bits));

  // Optimal truncation agrees with the resummed value to a few floor
  // terms, and its bookkeeping is self-consistent.
  const OaaResult oaa = oaa_sum(model.t, delta);
  CHECK(oaa.stop > 8);
  CHECK(oaa.stop < 20);
  const Real floor_expected =
      abs(model.t.coeffs[static_cast<std::size_t>(oaa.stop)]) *
      pow(delta, oaa.stop);
  CHECK(near(oaa.floor_term, floor_expected, tol10(-40, bits)));
  Real head = Real::from_long(0, bits);
  Real dm = Real::from_long(1, bits);
  for (long m = 0; m < oaa.stop; ++m) {
    head.add_mul(model.t.coeffs[static_cast<std::size_t>(m)], dm);
    dm *= delta;
  }
  CHECK(near(oaa.value, head, tol10(-40, bits)));
  CHECK(abs(oaa.value - res[3].value) < 100 * oaa.floor_term);

  // Smaller delta pushes the optimal stop outward.
  const OaaResult oaa2 =
      oaa_sum(model.t, Real::from_rational(Rational(1, 200), bits));
  CHECK(oaa2.stop > oaa.stop);

  // delta -> 0: the value approaches t_0 and the correction approaches
  // the first omitted term.
  plan.M = 2;
  const Real tiny = Real::from_rational(Rational(1, 1000000), bits);
  const ResummationResult lim = borel_integral(tiny, plan, model.t);
  const Real expect2 = model.t.coeffs[0] + model.t.coeffs[1] * tiny;
  CHECK(abs(lim.value - expect2) < tol10(-10, bits));
  CHECK(abs(lim.value - 1L) < tol10(-5, bits));
  const Real t2d2 = model.t.coeffs[2] * tiny * tiny;
  CHECK(abs(lim.corr - t2d2) < tol10(-18, bits));

  // Guards: list shape, bounds, phase, a_t consistency, hat budget.
  CHECK_THROWS_AS(borel_window(delta, plan, model.t, hat, {}), DomainError);
  CHECK_THROWS_AS(borel_window(delta, plan, model.t, hat, {3, 3}),
                  DomainError);
  CHECK_THROWS_AS(borel_window(delta, plan, model.t, hat, {-1, 2}),
                  DomainError);
  CHECK_THROWS_AS(borel_window(delta, plan, model.t, hat, {400}),
                  DomainError);
  CHECK_THROWS_AS(
      borel_window(Real::from_long(0, bits), plan, model.t, hat, {3}),
      DomainError);
  BorelPlan bad = plan;
  bad.alpha_phase = pi / 4;
  CHECK_THROWS_AS(borel_window(delta, bad, model.t, hat, {3}), DomainError);
  bad = plan;
  bad.a_t = Real::from_double(0.3, bits);
  CHECK_THROWS_AS(borel_window(delta, bad, model.t, hat, {3}), DomainError);
  bad = plan;
  bad.hat_terms = 65;
  CHECK_THROWS_AS(borel_window(delta, bad, model.t, hat, {3}), DomainError);
  bad.hat_terms = 0;
  CHECK_THROWS_AS(borel_window(delta, bad, model.t, hat, {3}), DomainError);
  CoefficientSeries rk = series_of_kind(SeriesKind::r, {1.0, 0.5}, 30);
  CHECK_THROWS_AS(borel_window(delta, plan, rk, hat, {1}), DomainError);

  // Growing hat coefficients are refused at evaluation time.
  CoefficientSeries grow;
  grow.kind = SeriesKind::t_tilde;
  grow.precision = 30;
  grow.meta["a_t"] = plan.a_t.to_string();
  const mpfr_prec_t gb = PrecisionContext(30).bits();
  Real gc = Real::from_long(1, gb);
  for (int m = 0; m < 64; ++m) {
    grow.coeffs.push_back(gc);
    gc *= 2L;
  }
  HatSeries ghat = conformal_reexpand(grow);
  BorelPlan gplan = plan;
  gplan.hat_terms = 16;
  CHECK_THROWS_AS(borel_window(delta, gplan, model.t, ghat, {2}),
                  ConvergenceError);
}

TEST_CASE("optimal truncation bookkeeping and failure modes") {
  const mpfr_prec_t bits = PrecisionContext(40).bits();

  // Terms still decreasing at the end of the series: no reliable minimum.
  CoefficientSeries dec;
  dec.kind = SeriesKind::t;
  dec.precision = 40;
  Real c = Real::from_long(1, bits);
  for (int m = 0; m < 20; ++m) {
    dec.coeffs.push_back(c);
    c /= 2L;
  }
  CHECK_THROWS_AS(oaa_sum(dec, Real::from_long(1, bits)), NoMinimumError);

  // Domain guards.
  CHECK_THROWS_AS(oaa_sum(dec, Real::from_long(0, bits)), DomainError);
  CHECK_THROWS_AS(oaa_sum(dec, Real::from_long(-1, bits)), DomainError);
  CoefficientSeries rk = series_of_kind(SeriesKind::r, {1.0, 0.5, 0.1}, 30);
  CHECK_THROWS_AS(oaa_sum(rk, Real::from_long(1, bits)), DomainError);
  CoefficientSeries tiny = series_of_kind(SeriesKind::t, {1.0, 0.5}, 30);
  CHECK_THROWS_AS(oaa_sum(tiny, Real::from_long(1, bits)), DomainError);
}
