// SPDX-License-Identifier: MIT
#include "qwkb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qwkb/errors.hpp"
#include "qwkb/special.hpp"

namespace qwkb {

namespace {

// Keep magnitudes near 1; only ratios and signs matter downstream.
void renormalize(Real& psi, Real& dpsi) {
  long e1 = psi.is_zero() ? 0 : psi.exponent2();
  long e2 = dpsi.is_zero() ? 0 : dpsi.exponent2();
  long e = std::max(e1, e2);
  if (e > 512 || e < -512) {
    psi.mul_2si(-e);
    dpsi.mul_2si(-e);
  }
}

struct SweepResult {
  Real psi;
  Real dpsi;
  long zeros = 0;  ///< sign changes of psi strictly inside the sweep
};

/**
 * Integrate from `from` to `to` (either direction).  Step size resolves the
 * local oscillation phase (|step| * sqrt|x^4-E| <= 0.5), so endpoint sign
 * checks count each zero once.
 */
SweepResult sweep(const Real& E, const Real& psi0, const Real& dpsi0,
                  const Real& from, const Real& to,
                  const PrecisionContext& ctx) {
  const mpfr_prec_t bits = ctx.bits();
  const long order_cap = 64 + 4 * (ctx.digits + ctx.guard);
  const int dir = (to > from) ? 1 : -1;

  ShootState st{from, psi0, dpsi0};
  SweepResult res;
  int last_sign = psi0.sign();

  while (true) {
    Real remain = to - st.x;
    if (remain.is_zero()) break;
    // local scale: sqrt|Q| for the phase/decay rate plus x^2 for the
    // coefficient variation.  In the oscillatory region the 0.5 phase cap
    // guarantees at most one zero per step (for exact counting); in the
    // forbidden region only convergence speed matters and a few units of
    // decay per step cost just ~1 digit of cancellation.
    Real q = pow(st.x, 4) - E;
    double scale = std::sqrt(std::abs(q.to_double())) +
                   st.x.to_double() * st.x.to_double() + 1.0;
    double bound = (q.sign() < 0 ? 0.5 : 2.5) / scale;
    if (bound < 1e-9)
      throw ConvergenceError("shooting sweep: step-size underflow");
    bool landing = std::abs(remain.to_double()) <= bound;
    Real h = landing ? remain : Real::from_double(dir * bound, bits);
    st = taylor_step(st, E, h, order_cap);
    renormalize(st.psi, st.dpsi);
    int s = st.psi.sign();
    if (s != 0 && last_sign != 0 && s != last_sign) ++res.zeros;
    if (s != 0) last_sign = s;
    if (landing) break;
  }
  res.psi = st.psi;
  res.dpsi = st.dpsi;
  return res;
}

/// Tail start: x_max^3/3 - 0.85 E^{3/4} >= W_target makes the growing
/// admixture e^{-2W} < 10^{-(digits+guard+10)}.
Real tail_point(const Real& E, const PrecisionContext& ctx, double pad) {
  double d = static_cast<double>(ctx.digits + ctx.guard + 10);
  double w_target = 0.5 * d * 2.302585 * 1.10;
  double e34 = std::pow(E.to_double(), 0.75);
  double x = std::cbrt(3.0 * (w_target + 0.85 * e34)) + 0.5;
  x *= (1.0 + pad);
  return Real::from_double(x, ctx.bits());
}

struct MismatchResult {
  Real value;
  long zeros = 0;
  Real x_max;
};

MismatchResult mismatch_full(const Real& E, int parity,
                             const PrecisionContext& ctx, double pad) {
  if (!(E.sign() > 0)) throw DomainError("mismatch: E must be positive");
  const mpfr_prec_t bits = ctx.bits();
  Real xt = sqrt(sqrt(E));
  Real xm = xt * Real::from_double(0.7, bits);
  Real x_max = tail_point(E, ctx, pad);

  // outward: parity data at the origin
  Real zero(bits);
  Real one = Real::from_long(1, bits);
  SweepResult out = parity == 0 ? sweep(E, one, zero, zero, xm, ctx)
                                : sweep(E, zero, one, zero, xm, ctx);

  // inward: decaying WKB data at x_max:  psi'/psi = -sqrt(Q) - x^3/Q
  Real q = pow(x_max, 4) - E;
  Real logd = -sqrt(q) - pow(x_max, 3) / q;
  SweepResult in = sweep(E, one, logd, x_max, xm, ctx);

  // scale-normalized Wronskian at the matching point
  Real s = sqrt(abs(E - pow(xm, 4))) + 1L;
  Real w = out.dpsi * in.psi - out.psi * in.dpsi;
  Real norm = (abs(out.psi) + abs(out.dpsi) / s) *
              (abs(in.psi) + abs(in.dpsi) / s) * s;
  MismatchResult r;
  r.value = w / norm;
  r.zeros = out.zeros + in.zeros;
  r.x_max = x_max;
  return r;
}

}  // namespace

ShootState taylor_step(const ShootState& s, const Real& E, const Real& h,
                       long order) {
  if (h.is_zero()) throw DomainError("taylor_step: zero step");
  if (order < 20) throw DomainError("taylor_step: order must be >= 20");
  const mpfr_prec_t bits = std::max(s.psi.prec(), E.prec());

  // h-scaled coefficients e_n = c_n h^n:
  //   (n+1)(n+2) e_{n+2} = (x0^4 - E) h^2 e_n
  //                        + sum_{k=1..4} C(4,k) x0^{4-k} h^{k+2} e_{n-k}
  Real h2 = h * h;
  Real w0 = (pow(s.x, 4) - E) * h2;
  Real w1 = pow(s.x, 3) * h2 * h * 4L;
  Real w2 = (s.x * s.x) * h2 * h2 * 6L;
  Real w3 = s.x * h2 * h2 * h * 4L;
  Real w4 = h2 * h2 * h2;

  std::vector<Real> e;
  e.reserve(static_cast<std::size_t>(order) + 1);
  e.push_back(s.psi);
  e.push_back(s.dpsi * h);

  Real psi = e[0] + e[1];
  Real dpsi = e[1];  // sum k e_k, divided by h at the end
  long max_exp = std::max(psi.is_zero() ? -999999 : psi.exponent2(),
                          e[1].is_zero() ? -999999 : e[1].exponent2());
  const long cut = static_cast<long>(bits) + 24;
  long quiet = 0;

  for (long n = 0;; ++n) {
    if (n + 2 > order)
      throw ConvergenceError("taylor_step: series did not converge within "
                             "the order cap (step too large)");
    std::size_t un = static_cast<std::size_t>(n);
    Real acc = w0 * e[un];
    if (n >= 1) acc.add_mul(w1, e[un - 1]);
    if (n >= 2) acc.add_mul(w2, e[un - 2]);
    if (n >= 3) acc.add_mul(w3, e[un - 3]);
    if (n >= 4) acc.add_mul(w4, e[un - 4]);
    acc /= (n + 1) * (n + 2);
    e.push_back(acc);
    psi += acc;
    dpsi.add_mul(acc, Real::from_long(n + 2, bits));
    long ae = acc.is_zero() ? -999999999 : acc.exponent2();
    if (ae > max_exp) max_exp = ae;
    if (ae < max_exp - cut) {
      if (++quiet >= 4) break;
    } else {
      quiet = 0;
    }
  }

  ShootState out;
  out.x = s.x + h;
  out.psi = psi;
  out.dpsi = dpsi / h;
  return out;
}

Real mismatch(const Real& E, int parity, const PrecisionContext& ctx) {
  return mismatch_full(E, parity, ctx, 0.0).value;
}

EigenResult solve_eigenvalue(long N, const PrecisionContext& ctx,
                             double x_pad) {
  if (N < 0) throw DomainError("solve_eigenvalue: N must be >= 0");
  const mpfr_prec_t bits = ctx.bits();
  const int parity = static_cast<int>(N % 2);

  // Weyl-type estimate with the first correction
  Real half = Real::from_rational(Rational(1, 2), bits);
  Real nph = Real::from_long(N, bits) + half;
  Real delta = pow(nph, -2L);
  Real est = leading_const(ctx) * pow(nph, Real::from_rational(Rational(4, 3), bits));
  Real pi = pi_value(ctx);
  est *= (Real::from_long(1, bits) + delta / (pi * 9L));

  long evals = 0;
  auto eval = [&](const Real& x) {
    ++evals;
    return mismatch_full(x, parity, ctx, x_pad).value;
  };

  // bracket the root
  Real width = Real::from_double(0.08, bits);
  Real lo = est * (Real::from_long(1, bits) - width);
  Real hi = est * (Real::from_long(1, bits) + width);
  Real flo = eval(lo);
  Real fhi = eval(hi);
  int grow = 0;
  while (flo.sign() == fhi.sign()) {
    if (++grow > 8)
      throw ConvergenceError("solve_eigenvalue: failed to bracket level " +
                             std::to_string(N));
    width *= 2L;
    lo = est * (Real::from_long(1, bits) - width);
    if (!(lo.sign() > 0)) lo = est / 4L;
    hi = est * (Real::from_long(1, bits) + width);
    flo = eval(lo);
    fhi = eval(hi);
  }

  // safeguarded secant within the bracket
  Real tol = pow(Real::from_long(10, bits), -(ctx.digits + ctx.guard - 10));
  Real a = lo, b = hi, fa = flo, fb = fhi;
  Real mid(bits);
  while (true) {
    Real span = abs(b - a);
    if (span < tol * abs(b)) break;
    Real denom = fb - fa;
    bool use_secant = !denom.is_zero();
    if (use_secant) {
      mid = b - fb * (b - a) / denom;
      // reject steps leaving the bracket or stalling
      if (!(mid > min(a, b) && mid < max(a, b))) use_secant = false;
    }
    if (!use_secant) mid = (a + b) / 2L;
    Real fm = eval(mid);
    if (fm.is_zero()) {
      a = mid;
      b = mid;
      break;
    }
    if (fm.sign() == fa.sign()) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }

  EigenResult res;
  res.N = N;
  res.E = (a + b) / 2L;

  // index check: interior zeros on the half line must equal floor(N/2)
  MismatchResult chk = mismatch_full(res.E, parity, ctx, x_pad);
  ++evals;
  if (chk.zeros != N / 2)
    throw ConvergenceError(
        "solve_eigenvalue: zero count " + std::to_string(chk.zeros) +
        " does not match level " + std::to_string(N) + " (expected " +
        std::to_string(N / 2) + ")");

  Real rel = abs(b - a) / res.E;
  double lg = rel.is_zero() ? -1e9 : rel.log10_abs_estimate();
  long attained = static_cast<long>(-lg);
  res.digits = std::min<long>(ctx.digits, std::max<long>(0, attained));
  res.x_max = chk.x_max;
  res.iterations = evals;
  return res;
}

// ---------------------------------------------------------------------------
// Oscillator-basis cross-check (pentadiagonal parity block, Sturm bisection)
// ---------------------------------------------------------------------------

namespace {

struct Band {
  std::vector<Real> diag, off1, off2;
};

/// Parity block of p^2 + x^4 in a harmonic-oscillator basis of frequency
/// omega (x = (a + a^dag)/sqrt(2 omega)).
Band quartic_block(long D, const Real& omega, int parity, mpfr_prec_t bits) {
  Band b;
  Real s = Real::from_long(1, bits) / (omega * 2L);
  Real s2 = s * s;
  for (long m = 0; m < D; ++m) {
    long n = 2 * m + parity;
    b.diag.push_back(omega * (2 * n + 1) / 2L +
                     s2 * Real::from_long(6 * n * n + 6 * n + 3, bits));
    if (m + 1 < D) {
      Real r = sqrt(Real::from_long((n + 1) * (n + 2), bits));
      b.off1.push_back((s2 * Real::from_long(4 * n + 6, bits) - omega / 2L) *
                       r);
    }
    if (m + 2 < D) {
      Real r = sqrt(Real::from_long(n + 1, bits) *
                    Real::from_long(n + 2, bits) *
                    Real::from_long(n + 3, bits) *
                    Real::from_long(n + 4, bits));
      b.off2.push_back(s2 * r);
    }
  }
  return b;
}

/// Eigenvalues below lam, via the inertia of the LDL^T factorization.
long inertia_below(const Band& b, const Real& lam, mpfr_prec_t bits,
                   long digits) {
  const long D = static_cast<long>(b.diag.size());
  Real tiny = pow(Real::from_long(10, bits), -(digits + 10));
  std::vector<Real> d(static_cast<std::size_t>(D), Real(bits));
  std::vector<Real> l1(static_cast<std::size_t>(D), Real(bits));
  std::vector<Real> l2(static_cast<std::size_t>(D), Real(bits));
  long count = 0;
  for (long i = 0; i < D; ++i) {
    std::size_t ui = static_cast<std::size_t>(i);
    Real di = b.diag[ui] - lam;
    if (i >= 1) di -= l1[ui - 1] * l1[ui - 1] * d[ui - 1];
    if (i >= 2) di -= l2[ui - 2] * l2[ui - 2] * d[ui - 2];
    if (di.is_zero()) di = -tiny;
    if (i + 1 < D) {
      Real e1 = b.off1[ui];
      if (i >= 1) e1 -= l2[ui - 1] * l1[ui - 1] * d[ui - 1];
      l1[ui] = e1 / di;
    }
    if (i + 2 < D) l2[ui] = b.off2[ui] / di;
    d[ui] = di;
    if (di.sign() < 0) ++count;
  }
  return count;
}

}  // namespace

Real basis_eigenvalue(long N, const PrecisionContext& ctx, long D) {
  if (N < 0) throw DomainError("basis_eigenvalue: N must be >= 0");
  const mpfr_prec_t bits = ctx.bits();
  if (D == 0) D = 260 + 8 * N + 6 * ctx.digits;
  const int parity = static_cast<int>(N % 2);
  const long k = N / 2;
  double om = std::max(2.0, 1.15 * std::cbrt(6.0 * static_cast<double>(N + 1)));
  Real omega = Real::from_double(om, bits);
  Band b = quartic_block(D, omega, parity, bits);

  // Gershgorin upper bound
  Real hi(bits);
  for (long i = 0; i < D; ++i) {
    std::size_t ui = static_cast<std::size_t>(i);
    Real row = abs(b.diag[ui]);
    if (i < static_cast<long>(b.off1.size())) row += abs(b.off1[ui]);
    if (i >= 1 && i - 1 < static_cast<long>(b.off1.size()))
      row += abs(b.off1[ui - 1]);
    if (i < static_cast<long>(b.off2.size())) row += abs(b.off2[ui]);
    if (i >= 2 && i - 2 < static_cast<long>(b.off2.size()))
      row += abs(b.off2[ui - 2]);
    hi = max(hi, row);
  }
  Real lo(bits);
  Real tol = pow(Real::from_long(10, bits), -(ctx.digits - 6));
  Real one = Real::from_long(1, bits);
  while (hi - lo > tol * max(one, abs(hi))) {
    Real mid = (lo + hi) / 2L;
    if (inertia_below(b, mid, bits, ctx.digits) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return (lo + hi) / 2L;
}

}  // namespace qwkb
