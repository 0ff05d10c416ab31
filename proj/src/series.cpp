// SPDX-License-Identifier: MIT
#include "qwkb/series.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "qwkb/cacheio.hpp"
#include "qwkb/errors.hpp"
#include "qwkb/special.hpp"

namespace qwkb {

namespace {

mpfr_prec_t vec_bits(const SeriesVec& a) {
  return a.empty() ? mpfr_prec_t(64) : a[0].prec();
}

Real pow10_real(long e, mpfr_prec_t bits) {
  return pow(Real::from_long(10, bits), e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense series helpers
// ---------------------------------------------------------------------------

SeriesVec series_zero(std::size_t n, mpfr_prec_t bits) {
  return SeriesVec(n, Real(bits));
}

SeriesVec series_mul(const SeriesVec& a, const SeriesVec& b, std::size_t n) {
  mpfr_prec_t bits = std::max(vec_bits(a), vec_bits(b));
  SeriesVec res = series_zero(n, bits);
  std::size_t alim = std::min(a.size(), n);
  for (std::size_t i = 0; i < alim; ++i) {
    if (a[i].is_zero()) continue;
    std::size_t blim = std::min(b.size(), n - i);
    for (std::size_t j = 0; j < blim; ++j) {
      if (b[j].is_zero()) continue;
      res[i + j].add_mul(a[i], b[j]);
    }
  }
  return res;
}

SeriesVec series_inverse(const SeriesVec& a, std::size_t n) {
  if (a.empty() || a[0].is_zero())
    throw DomainError("series_inverse: constant term is zero");
  mpfr_prec_t bits = vec_bits(a);
  SeriesVec inv = series_zero(n, bits);
  inv[0] = Real::from_long(1, bits) / a[0];
  for (std::size_t k = 1; k < n; ++k) {
    Real s(bits);
    std::size_t jmax = std::min(k, a.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) s.add_mul(a[j], inv[k - j]);
    inv[k] = -(s / a[0]);
  }
  return inv;
}

SeriesVec series_log(const SeriesVec& a, std::size_t n) {
  if (a.empty() || !(a[0] == Real::from_long(1, vec_bits(a))))
    throw DomainError("series_log: constant term must be 1");
  mpfr_prec_t bits = vec_bits(a);
  // log(a) = integral of a'/a
  SeriesVec ap = series_zero(n, bits);
  for (std::size_t i = 0; i + 1 < a.size() && i < n; ++i)
    ap[i] = a[i + 1] * static_cast<long>(i + 1);
  SeriesVec integrand = series_mul(ap, series_inverse(a, n), n);
  SeriesVec out = series_zero(n, bits);
  for (std::size_t i = 0; i + 1 < n; ++i)
    out[i + 1] = integrand[i] / static_cast<long>(i + 1);
  return out;
}

SeriesVec series_exp(const SeriesVec& a, std::size_t n) {
  if (!a.empty() && !a[0].is_zero())
    throw DomainError("series_exp: constant term must be 0");
  mpfr_prec_t bits = vec_bits(a);
  SeriesVec out = series_zero(n, bits);
  out[0] = Real::from_long(1, bits);
  for (std::size_t k = 1; k < n; ++k) {
    Real s(bits);
    std::size_t jmax = std::min(k, a.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) {
      if (a[j].is_zero()) continue;
      Real term = a[j] * static_cast<long>(j);
      s.add_mul(term, out[k - j]);
    }
    out[k] = s / static_cast<long>(k);
  }
  return out;
}

SeriesVec series_pow(const SeriesVec& a, const Rational& e, std::size_t n) {
  mpfr_prec_t bits = vec_bits(a);
  SeriesVec lg = series_log(a, n);
  Real er = Real::from_rational(e, bits);
  for (auto& c : lg) c *= er;
  return series_exp(lg, n);
}

SeriesVec series_compose(const SeriesVec& outer, const SeriesVec& inner,
                         std::size_t n) {
  if (!inner.empty() && !inner[0].is_zero())
    throw DomainError("series_compose: inner constant term must be 0");
  mpfr_prec_t bits = std::max(vec_bits(outer), vec_bits(inner));
  SeriesVec acc = series_zero(n, bits);
  // Only the first n outer coefficients can contribute below order n.
  std::size_t top = std::min(outer.size(), n);
  for (std::size_t idx = top; idx-- > 0;) {
    acc = series_mul(acc, inner, n);
    acc[0] += outer[idx];
  }
  return acc;
}

SeriesVec series_shift_up(const SeriesVec& a, std::size_t n) {
  SeriesVec res = series_zero(n, vec_bits(a));
  for (std::size_t i = 0; i + 1 < n && i < a.size(); ++i) res[i + 1] = a[i];
  return res;
}

SeriesVec series_revert_quadratic(const SeriesVec& G, std::size_t M) {
  mpfr_prec_t bits = vec_bits(G);
  Real one = Real::from_long(1, bits);
  if (G.empty() || !(G[0] == one))
    throw DomainError("series_revert_quadratic: G[0] must be 1");
  SeriesVec Gp = series_zero(G.size() > 1 ? G.size() - 1 : 1, bits);
  for (std::size_t i = 0; i + 1 < G.size(); ++i)
    Gp[i] = G[i + 1] * static_cast<long>(i + 1);

  SeriesVec v = series_zero(M + 1, bits);
  if (M >= 1) v[1] = one;
  std::size_t correct = 1;
  while (correct < M) {
    std::size_t K = std::min(2 * correct, M);
    std::size_t n = K + 1;
    SeriesVec Gv = series_compose(G, v, n);
    SeriesVec Gpv = series_compose(Gp, v, n);
    // F   = v - x G(v)^2, F' = 1 - 2 x G(v) G'(v)
    SeriesVec F = series_shift_up(series_mul(Gv, Gv, n), n);
    for (std::size_t i = 0; i < n; ++i) F[i] = v[i] - F[i];
    SeriesVec Fp = series_shift_up(series_mul(Gv, Gpv, n), n);
    for (auto& c : Fp) c *= -2L;
    Fp[0] += one;
    SeriesVec upd = series_mul(F, series_inverse(Fp, n), n);
    for (std::size_t i = 0; i < n; ++i) v[i] -= upd[i];
    correct = K;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Named series
// ---------------------------------------------------------------------------

std::string series_kind_name(SeriesKind k) {
  switch (k) {
    case SeriesKind::r: return "r";
    case SeriesKind::s: return "s";
    case SeriesKind::t: return "t";
    case SeriesKind::t_tilde: return "t-tilde";
    case SeriesKind::t_hat: return "t-hat";
  }
  throw DomainError("unknown series kind");
}

SeriesKind series_kind_from_name(const std::string& name) {
  if (name == "r") return SeriesKind::r;
  if (name == "s") return SeriesKind::s;
  if (name == "t") return SeriesKind::t;
  if (name == "t-tilde") return SeriesKind::t_tilde;
  if (name == "t-hat") return SeriesKind::t_hat;
  throw DomainError("unknown series kind name: " + name);
}

CoefficientSeries r_series(const QuantizationSeries& q,
                           const PrecisionContext& ctx) {
  const mpfr_prec_t bits = ctx.bits();
  const long le = q.even_count();  // q_even available for l = 1..le
  const long lo = q.odd_count();   // q_odd  available for l = 0..lo-1
  if (le < 1 || lo < 1)
    throw DomainError("r_series: need quantization data through l >= 1");
  // contiguous indices 0..Mr
  const long Mr = std::min(2 * le, 2 * lo - 1);

  Real pi = pi_value(ctx);
  Real B = beta(Rational(1, 4), Rational(1, 2), ctx);
  Real B4 = pow(B, 4);
  Real ratio = B4 / (pow(pi, 4) * 81L);  // (B^4 / 81 pi^4)
  Real odd_front = Real::from_long(4, bits) / (pi * 3L);

  CoefficientSeries cs;
  cs.kind = SeriesKind::r;
  cs.precision = ctx.digits;
  cs.meta["n_max"] = std::to_string(q.n_max);
  cs.coeffs.assign(static_cast<std::size_t>(Mr) + 1, Real(bits));
  cs.coeffs[0] = Real::from_long(-1, bits);

  Real pw = Real::from_long(1, bits);  // ratio^l
  for (long l = 0; 2 * l <= Mr; ++l) {
    if (l > 0) {
      pw *= ratio;
      cs.coeffs[static_cast<std::size_t>(2 * l)] =
          Real::from_rational(q.q_e(l), bits) * pw * 3L;
    }
    if (2 * l + 1 <= Mr)
      cs.coeffs[static_cast<std::size_t>(2 * l + 1)] =
          Real::from_rational(q.q_o(l), bits) * pw * odd_front;
  }

  // consistency anchors
  Real r1_ref = Real::from_long(1, bits) / (pi * 12L);
  if (abs(cs.coeffs[1] - r1_ref) > pow10_real(-(ctx.digits - 5), bits))
    throw PrecisionLossError("r_series: r_1 disagrees with 1/(12 pi)");
  for (std::size_t m = 1; m < cs.coeffs.size(); ++m)
    if (!(cs.coeffs[m].sign() > 0))
      throw SignViolationError("r_series: r_" + std::to_string(m) +
                               " is not positive");
  return cs;
}

CoefficientSeries s_series(const CoefficientSeries& r,
                           const PrecisionContext& ctx, long M) {
  if (r.kind != SeriesKind::r)
    throw DomainError("s_series: input must be an r-series");
  if (M < 2 || static_cast<std::size_t>(M) > r.size())
    throw DomainError("s_series: M out of range (2 <= M <= r.size())");
  const mpfr_prec_t bits = ctx.bits();

  // G_m = (-1)^{floor(m/2)+1} r_m; G_0 = 1
  SeriesVec G = series_zero(static_cast<std::size_t>(M), bits);
  for (long m = 0; m < M; ++m) {
    G[static_cast<std::size_t>(m)] =
        r.coeffs[static_cast<std::size_t>(m)].round_to(bits);
    if ((m / 2) % 2 == 0)  // (-1)^{floor(m/2)+1} = -1
      G[static_cast<std::size_t>(m)] = -G[static_cast<std::size_t>(m)];
  }

  SeriesVec v = series_revert_quadratic(G, static_cast<std::size_t>(M));

  // round trip: x G(v(x))^2 must reproduce v(x)
  std::size_t n = v.size();
  SeriesVec Gv = series_compose(G, v, n);
  SeriesVec back = series_shift_up(series_mul(Gv, Gv, n), n);
  Real one = Real::from_long(1, bits);
  Real tol = pow10_real(-ctx.digits, bits);
  for (std::size_t m = 0; m < n; ++m) {
    Real rel = abs(back[m] - v[m]) / max(one, abs(v[m]));
    if (rel > tol)
      throw PrecisionLossError(
          "s_series: round-trip residual " + rel.to_string(3) +
          " at order " + std::to_string(m) + " exhausts the guard digits");
  }

  CoefficientSeries cs;
  cs.kind = SeriesKind::s;
  cs.precision = ctx.digits;
  cs.meta = r.meta;
  cs.coeffs = std::move(v);
  return cs;
}

CoefficientSeries t_series(const CoefficientSeries& s,
                           const PrecisionContext& ctx) {
  if (s.kind != SeriesKind::s)
    throw DomainError("t_series: input must be an s-series");
  if (s.size() < 2) throw DomainError("t_series: s-series too short");
  const mpfr_prec_t bits = ctx.bits();
  const std::size_t M = s.size() - 1;  // h has orders 0..M-1

  SeriesVec h = series_zero(M, bits);
  for (std::size_t m = 0; m < M; ++m) h[m] = s.coeffs[m + 1].round_to(bits);
  SeriesVec t = series_pow(h, Rational(-2, 3), M);

  // sign pattern: sign(t_{2l}) = sign(t_{2l+1}) = (-1)^l for l >= 1
  for (std::size_t m = 2; m < t.size(); ++m) {
    int expect = ((m / 2) % 2 == 0) ? 1 : -1;
    if (t[m].sign() != expect)
      throw SignViolationError("t_series: sign pattern violated at index " +
                               std::to_string(m));
  }

  CoefficientSeries cs;
  cs.kind = SeriesKind::t;
  cs.precision = ctx.digits;
  cs.meta = s.meta;
  cs.coeffs = std::move(t);
  return cs;
}

GrowthModel fit_growth(const CoefficientSeries& series, const Rational& nu,
                       long window_lo, long window_hi, double tol) {
  if (window_hi - window_lo < 20)
    throw DomainError("fit_growth: window must span at least 20 indices");
  if (window_lo < 1 ||
      static_cast<std::size_t>(window_hi) + 2 >= series.size())
    throw DomainError("fit_growth: series does not cover the window");
  const mpfr_prec_t bits = vec_bits(series.coeffs);
  Real nuR = Real::from_rational(nu, bits);

  // a^2 estimates from two-step magnitude ratios (same index parity)
  std::vector<Real> R;
  R.reserve(static_cast<std::size_t>(window_hi - window_lo + 1));
  for (long m = window_lo; m <= window_hi; ++m) {
    const Real& num = series.coeffs[static_cast<std::size_t>(m + 2)];
    const Real& den = series.coeffs[static_cast<std::size_t>(m)];
    if (den.is_zero() || num.is_zero())
      throw ConvergenceError("fit_growth: zero coefficient at index " +
                             std::to_string(m));
    Real u = abs(num) / abs(den);
    Real fac = Real::from_long((m + 1) * (m + 2), bits);
    Real corr = pow(Real::from_long(m + 1, bits) /
                        Real::from_long(m + 3, bits),
                    nuR);
    R.push_back(sqrt(u * corr / (fac * fac)));
  }

  // Richardson extrapolation in 1/m, 3 levels.  Nodes step by 2 so the
  // even- and odd-index families — distinct prefactors on a common growth
  // constant — never mix; consecutive nodes would amplify the period-2
  // component instead of cancelling the 1/m terms.
  for (long k = 1; k <= 3; ++k) {
    for (std::size_t i = R.size(); i-- > static_cast<std::size_t>(2 * k);) {
      long m_i = window_lo + static_cast<long>(i);
      R[i] = (R[i] * m_i - R[i - 2] * (m_i - 2 * k)) / (2 * k);
    }
  }
  Real a = R.back();
  if (!(a.sign() > 0))
    throw ConvergenceError("fit_growth: non-positive growth constant");

  // Cauchy check over the extrapolated tail
  std::size_t tail = std::min<std::size_t>(10, R.size() - 3);
  Real tolr = Real::from_double(tol, bits) * abs(a);
  for (std::size_t i = R.size() - tail; i < R.size(); ++i) {
    if (abs(R[i] - a) > tolr)
      throw ConvergenceError(
          "fit_growth: extrapolated sequence not Cauchy at index " +
          std::to_string(window_lo + static_cast<long>(i)) + " (dev " +
          abs(R[i] - a).to_string(3) + ")");
  }

  // residual of the rescaled sequence |c_m| / (m!^2 a^m (m+1)^nu)
  std::vector<Real> resc;
  Real mean(bits);
  for (long m = window_lo; m <= window_hi; ++m) {
    Real f = factorial(static_cast<unsigned long>(m), bits);
    Real scale = f * f * pow(a, m) *
                 pow(Real::from_long(m + 1, bits), nuR);
    resc.push_back(abs(series.coeffs[static_cast<std::size_t>(m)]) / scale);
    mean += resc.back();
  }
  mean /= static_cast<long>(resc.size());
  Real residual(bits);
  for (const Real& x : resc) residual = max(residual, abs(x / mean - 1L));

  GrowthModel gm;
  gm.a = a;
  gm.nu = nu;
  gm.window_lo = window_lo;
  gm.window_hi = window_hi;
  gm.residual = residual;
  return gm;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save_series(const std::string& path, const CoefficientSeries& cs) {
  std::map<std::string, std::string> meta = cs.meta;
  meta["kind"] = series_kind_name(cs.kind);
  meta["count"] = std::to_string(cs.size());
  meta["digits"] = std::to_string(cs.precision);
  mpfr_prec_t bits = vec_bits(cs.coeffs);
  meta["bits"] = std::to_string(static_cast<long>(bits));
  std::vector<std::string> payload;
  payload.reserve(cs.size());
  for (std::size_t m = 0; m < cs.size(); ++m)
    payload.push_back(std::to_string(m) + " " + cs.coeffs[m].to_string());
  write_cache(path, meta, payload);
}

CoefficientSeries load_series(const std::string& path) {
  CacheFile f = read_cache(path);
  auto need = [&](const char* key) -> std::string {
    auto it = f.meta.find(key);
    if (it == f.meta.end())
      throw CacheError(path + ": missing metadata key '" + key + "'");
    return it->second;
  };
  CoefficientSeries cs;
  cs.kind = series_kind_from_name(need("kind"));
  cs.precision = std::atol(need("digits").c_str());
  std::size_t count = static_cast<std::size_t>(std::atol(need("count").c_str()));
  mpfr_prec_t bits = static_cast<mpfr_prec_t>(std::atol(need("bits").c_str()));
  if (bits < 2 || count != f.payload.size())
    throw CacheError(path + ": inconsistent coefficient count");
  cs.meta = f.meta;
  for (const char* k : {"kind", "count", "digits", "bits"}) cs.meta.erase(k);
  cs.coeffs.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    std::istringstream is(f.payload[m]);
    std::size_t idx;
    std::string val;
    if (!(is >> idx >> val) || idx != m)
      throw CacheError(path + ": malformed payload line " + std::to_string(m));
    cs.coeffs.push_back(Real::from_string(val, bits));
  }
  return cs;
}

}  // namespace qwkb
