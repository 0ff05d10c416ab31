// SPDX-License-Identifier: MIT
#include "qwkb/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qwkb/cacheio.hpp"
#include "qwkb/errors.hpp"
#include "qwkb/special.hpp"
#include "qwkb/spectral.hpp"

namespace qwkb {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Budget policy and small helpers
// ---------------------------------------------------------------------------

std::string resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("WKBBOREL_CACHE");
  if (env != nullptr && env[0] != '\0') return std::string(env);
  return "./cache";
}

long auto_digits(long N) {
  if (N < 0) throw DomainError("auto_digits: N must be >= 0");
  const long grow =
      static_cast<long>(std::ceil(M_PI * static_cast<double>(N) /
                                  std::log(10.0))) + 60;
  return std::max<long>(120, grow);
}

long quad_digits(long N) {
  if (N < 0) throw DomainError("quad_digits: N must be >= 0");
  return static_cast<long>(std::ceil(M_PI * static_cast<double>(N) /
                                     std::log(10.0))) + 30;
}

Real delta_of(long N, mpfr_prec_t bits) {
  if (N < 0) throw DomainError("delta_of: N must be >= 0");
  const long odd = 2 * N + 1;
  return Real::from_rational(Rational(4, odd * odd), bits);
}

Real energy_scale(const Real& delta, const PrecisionContext& ctx) {
  if (!(delta.sign() > 0))
    throw DomainError("energy_scale: delta must be positive");
  const mpfr_prec_t bits = ctx.bits();
  const Real e = Real::from_rational(Rational(-2, 3), bits);
  return leading_const(ctx) * pow(delta.round_to(bits), e);
}

std::vector<long> m_window(long N, const RunConfig& cfg, std::size_t t_size) {
  if (N < 0) throw DomainError("m_window: N must be >= 0");
  if (cfg.window_half_width < 0 || !(cfg.window_center_factor > 0.0))
    throw DomainError("m_window: invalid window policy");
  const long center = static_cast<long>(
      std::ceil(cfg.window_center_factor * static_cast<double>(N)));
  const long lo = std::max<long>(0, center - cfg.window_half_width);
  const long hi =
      std::min<long>(static_cast<long>(t_size), center + cfg.window_half_width);
  if (lo > hi)
    throw DomainError("m_window: window lies outside the available "
                      "coefficients (need more orders)");
  std::vector<long> Ms;
  Ms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long m = lo; m <= hi; ++m) Ms.push_back(m);
  return Ms;
}

int parse_phase_eighths(const std::string& text) {
  std::string s;
  for (char c : text)
    if (std::isspace(static_cast<unsigned char>(c)) == 0) s += c;
  if (s == "pi/8") return 1;
  if (s == "3pi/8" || s == "3*pi/8") return 3;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) {
      if (std::abs(v - M_PI / 8.0) < 1e-9) return 1;
      if (std::abs(v - 3.0 * M_PI / 8.0) < 1e-9) return 3;
    }
  } catch (const std::exception&) {
  }
  throw DomainError("alpha-phase must be pi/8 or 3pi/8 (got '" + text + "')");
}

Real wkb_truncated_energy(const CoefficientSeries& t, long N, long m_max,
                          const PrecisionContext& ctx) {
  if (t.kind != SeriesKind::t)
    throw DomainError("wkb_truncated_energy: series kind must be t");
  if (m_max < 0 || static_cast<std::size_t>(m_max) >= t.size())
    throw DomainError("wkb_truncated_energy: order exceeds available "
                      "coefficients");
  const mpfr_prec_t bits = ctx.bits();
  const Real delta = delta_of(N, bits);
  Real head(bits);
  Real dm = Real::from_long(1, bits);
  for (long m = 0; m <= m_max; ++m) {
    head.add_mul(t.coeffs[static_cast<std::size_t>(m)].round_to(bits), dm);
    dm *= delta;
  }
  return energy_scale(delta, ctx) * head;
}

// ---------------------------------------------------------------------------
// Cache pipeline
// ---------------------------------------------------------------------------

namespace {

Real phase_of(int eighths, mpfr_prec_t bits) {
  return Real::pi(bits) * static_cast<long>(eighths) / 8L;
}

std::map<std::string, std::string> base_expect(const RunConfig& cfg,
                                               SeriesKind kind) {
  return {{"kind", series_kind_name(kind)},
          {"digits", std::to_string(cfg.digits)},
          {"n_max", std::to_string(cfg.max_order)}};
}

/// Loaded series when the file exists and its metadata covers `expect`;
/// nullopt when absent or mismatched (regenerate); CacheError propagates
/// from a corrupted file (integrity is never silently repaired).
std::optional<CoefficientSeries> reuse_series(
    const std::string& path,
    const std::map<std::string, std::string>& expect) {
  if (!fs::exists(path)) return std::nullopt;
  const CacheFile f = read_cache(path);
  for (const auto& [key, value] : expect) {
    const auto it = f.meta.find(key);
    if (it == f.meta.end() || it->second != value) return std::nullopt;
  }
  return load_series(path);
}

/// Interleave the four residue classes as coefficient index 4l + p.
CoefficientSeries pack_hat(const HatSeries& hat) {
  CoefficientSeries cs;
  cs.kind = SeriesKind::t_hat;
  cs.precision = hat.precision;
  cs.meta = hat.meta;
  std::size_t total = 0;
  for (int p = 0; p < 4; ++p) total += hat.h[p].size();
  cs.coeffs.reserve(total);
  for (std::size_t m = 0; m < total; ++m) {
    const int p = static_cast<int>(m % 4);
    const std::size_t l = m / 4;
    if (l >= hat.h[p].size())
      throw DomainError("pack_hat: residue classes are not contiguous");
    cs.coeffs.push_back(hat.h[p][l]);
  }
  cs.meta["a_t"] = hat.a_t.to_string();
  return cs;
}

HatSeries unpack_hat(const CoefficientSeries& cs) {
  if (cs.kind != SeriesKind::t_hat)
    throw CacheError("unpack_hat: series kind must be t_hat");
  HatSeries hat;
  hat.precision = cs.precision;
  hat.meta = cs.meta;
  for (std::size_t m = 0; m < cs.size(); ++m)
    hat.h[m % 4].push_back(cs.coeffs[m]);
  const auto it = cs.meta.find("a_t");
  if (it == cs.meta.end())
    throw CacheError("unpack_hat: missing a_t metadata");
  hat.a_t = Real::from_string(it->second,
                              PrecisionContext(std::max<long>(cs.precision, 30))
                                  .bits());
  return hat;
}

CoefficientSeries round_series(const CoefficientSeries& src,
                               const PrecisionContext& ctx) {
  const mpfr_prec_t bits = ctx.bits();
  CoefficientSeries out;
  out.kind = src.kind;
  out.precision = std::min(src.precision, ctx.digits);
  out.meta = src.meta;
  out.coeffs.reserve(src.size());
  for (const Real& c : src.coeffs) out.coeffs.push_back(c.round_to(bits));
  return out;
}

HatSeries round_hat(const HatSeries& src, const PrecisionContext& ctx) {
  const mpfr_prec_t bits = ctx.bits();
  HatSeries out;
  out.precision = std::min(src.precision, ctx.digits);
  out.meta = src.meta;
  out.a_t = src.a_t;  // full precision: the plan must match it exactly
  for (int p = 0; p < 4; ++p) {
    out.h[p].reserve(src.h[p].size());
    for (const Real& c : src.h[p]) out.h[p].push_back(c.round_to(bits));
  }
  return out;
}

}  // namespace

CachedCoefficients cache_coefficients(const RunConfig& cfg) {
  if (cfg.max_order < 8 || cfg.max_order % 2 != 0)
    throw DomainError("cache_coefficients: max_order must be even and >= 8");
  if (cfg.digits < 30)
    throw DomainError("cache_coefficients: digits must be >= 30");
  if (cfg.alpha_eighths != 1 && cfg.alpha_eighths != 3)
    throw DomainError("cache_coefficients: alpha_eighths must be 1 or 3");

  const std::string dir = resolve_cache_dir(cfg.cache_dir);
  fs::create_directories(dir);

  CachedCoefficients cc;
  cc.n_max = cfg.max_order;
  cc.digits = cfg.digits;

  // --- exact quantization data --------------------------------------------
  const std::string qpath = dir + "/quantization.txt";
  bool have_q = false;
  if (fs::exists(qpath)) {
    QuantizationSeries qs = read_quantization(qpath);
    if (qs.n_max == cfg.max_order) {
      cc.q = std::move(qs);
      have_q = true;
    }
  }
  if (!have_q) {
    cc.q = quantization_series(cfg.max_order, cfg.progress);
    write_quantization(qpath, cc.q);
  }

  // --- real coefficient chain r -> s -> t ----------------------------------
  const PrecisionContext ctx(cfg.digits);
  const std::string rpath = dir + "/r.txt";
  if (auto got = reuse_series(rpath, base_expect(cfg, SeriesKind::r))) {
    cc.r = std::move(*got);
  } else {
    cc.r = r_series(cc.q, ctx);
    save_series(rpath, cc.r);
  }

  const std::string spath = dir + "/s.txt";
  if (auto got = reuse_series(spath, base_expect(cfg, SeriesKind::s))) {
    cc.s = std::move(*got);
  } else {
    cc.s = s_series(cc.r, ctx, static_cast<long>(cc.r.size()) - 1);
    save_series(spath, cc.s);
  }

  const std::string tpath = dir + "/t.txt";
  if (auto got = reuse_series(tpath, base_expect(cfg, SeriesKind::t))) {
    cc.t = std::move(*got);
  } else {
    cc.t = t_series(cc.s, ctx);
    save_series(tpath, cc.t);
  }

  // --- growth fit (cheap; rerun every time for the derived caches) ---------
  long fit_hi = std::min<long>(cfg.fit_hi, static_cast<long>(cc.t.size()) - 3);
  long fit_lo = std::min<long>(cfg.fit_lo, fit_hi - 20);
  if (fit_lo < 2) fit_lo = 2;
  if (fit_hi - fit_lo < 20)
    throw DomainError("cache_coefficients: too few orders for the growth fit "
                      "(max_order must be >= 52)");
  const GrowthModel gm =
      fit_growth(cc.t, Rational(-5, 2), fit_lo, fit_hi, cfg.fit_tol);
  cc.a_t = gm.a;
  cc.fit_residual = gm.residual;

  BorelPlan plan;
  plan.alpha_phase = phase_of(cfg.alpha_eighths, ctx.bits());
  plan.a_t = gm.a;
  plan.ctx = ctx;
  const std::string a_str = plan.a_t.to_string();
  const std::string phase_label = std::to_string(cfg.alpha_eighths);

  // --- Borel transform cache ----------------------------------------------
  const std::string ttpath = dir + "/ttilde.txt";
  auto exp_tt = base_expect(cfg, SeriesKind::t_tilde);
  exp_tt["phase_eighths"] = phase_label;
  exp_tt["a_t"] = a_str;
  if (auto got = reuse_series(ttpath, exp_tt)) {
    cc.tt = std::move(*got);
  } else {
    cc.tt = borel_transform(cc.t, plan);
    cc.tt.meta["phase_eighths"] = phase_label;
    cc.tt.meta["fit_window"] =
        std::to_string(fit_lo) + ".." + std::to_string(fit_hi);
    cc.tt.meta["fit_residual"] = gm.residual.to_string(8);
    save_series(ttpath, cc.tt);
  }

  // --- conformal re-expansion cache ----------------------------------------
  const std::string hatpath = dir + "/that.txt";
  auto exp_hat = base_expect(cfg, SeriesKind::t_hat);
  exp_hat["phase_eighths"] = phase_label;
  exp_hat["a_t"] = a_str;
  if (auto got = reuse_series(hatpath, exp_hat)) {
    cc.hat = unpack_hat(*got);
  } else {
    cc.hat = conformal_reexpand(cc.tt);
    cc.hat.meta["phase_eighths"] = phase_label;
    cc.hat.meta["n_max"] = std::to_string(cfg.max_order);
    CoefficientSeries packed = pack_hat(cc.hat);
    packed.meta["a_t"] = a_str;  // exact plan string, not a re-rendering
    save_series(hatpath, packed);
  }
  return cc;
}

CachedCoefficients load_coefficients(const std::string& cache_dir) {
  const std::string dir = resolve_cache_dir(cache_dir);
  CachedCoefficients cc;
  cc.q = read_quantization(dir + "/quantization.txt");
  cc.r = load_series(dir + "/r.txt");
  cc.s = load_series(dir + "/s.txt");
  cc.t = load_series(dir + "/t.txt");
  cc.tt = load_series(dir + "/ttilde.txt");
  const CoefficientSeries packed = load_series(dir + "/that.txt");
  cc.hat = unpack_hat(packed);

  auto expect_kind = [&](const CoefficientSeries& cs, SeriesKind k,
                         const char* name) {
    if (cs.kind != k)
      throw CacheError(dir + "/" + name + ": unexpected series kind");
  };
  expect_kind(cc.r, SeriesKind::r, "r.txt");
  expect_kind(cc.s, SeriesKind::s, "s.txt");
  expect_kind(cc.t, SeriesKind::t, "t.txt");
  expect_kind(cc.tt, SeriesKind::t_tilde, "ttilde.txt");

  if (cc.r.precision != cc.t.precision || cc.s.precision != cc.t.precision ||
      cc.tt.precision != cc.t.precision)
    throw CacheError(dir + ": inconsistent digits across cached series");
  // the reversion drops the top order: |r| = |s| = |t| + 1
  if (cc.s.size() != cc.r.size() || cc.t.size() + 1 != cc.r.size() ||
      cc.tt.size() != cc.t.size())
    throw CacheError(dir + ": inconsistent coefficient counts across caches");
  std::size_t hat_total = 0;
  for (int p = 0; p < 4; ++p) hat_total += cc.hat.h[p].size();
  if (hat_total != cc.tt.size())
    throw CacheError(dir + ": conformal cache does not cover the transform");

  const auto nm = cc.t.meta.find("n_max");
  if (nm == cc.t.meta.end())
    throw CacheError(dir + "/t.txt: missing n_max metadata");
  cc.n_max = std::stol(nm->second);
  if (cc.n_max != cc.q.n_max)
    throw CacheError(dir + ": quantization order differs from series order");
  cc.digits = cc.t.precision;

  const auto at = cc.tt.meta.find("a_t");
  if (at == cc.tt.meta.end())
    throw CacheError(dir + "/ttilde.txt: missing a_t metadata");
  cc.a_t = Real::from_string(at->second, PrecisionContext(cc.digits).bits());
  const auto fr = cc.tt.meta.find("fit_residual");
  cc.fit_residual = fr == cc.tt.meta.end()
                        ? Real::nan()
                        : Real::from_string(fr->second, 64);
  return cc;
}

// ---------------------------------------------------------------------------
// Comparison runs
// ---------------------------------------------------------------------------

ComparisonRecord compare_one(const RunConfig& cfg,
                             const CachedCoefficients& cc, long N) {
  if (N < 0) throw DomainError("compare_one: N must be >= 0");
  const long ed =
      cfg.eigen_digits_override > 0 ? cfg.eigen_digits_override : auto_digits(N);
  long qd = quad_digits(N);
  if (cfg.eigen_digits_override > 0) qd = std::max<long>(24, std::min(qd, ed));
  qd = std::min(qd, cc.digits);
  const PrecisionContext ectx(ed);
  const PrecisionContext qctx(qd);
  const mpfr_prec_t eb = ectx.bits();
  const mpfr_prec_t qb = qctx.bits();

  ComparisonRecord rec;
  rec.N = N;
  rec.digits = ed;
  rec.delta = delta_of(N, eb);

  // exact eigenvalue and its error estimate
  const EigenResult er = solve_eigenvalue(N, ectx);
  rec.E_exact = er.E;
  rec.eigen_err = abs(er.E) * pow(Real::from_long(10, eb), -er.digits);

  // Borel window in series units
  const Real delta_q = delta_of(N, qb);
  const CoefficientSeries tq = round_series(cc.t, qctx);
  const HatSeries hq = round_hat(cc.hat, qctx);
  BorelPlan plan;
  plan.alpha_phase = phase_of(cfg.alpha_eighths, qb);
  plan.a_t = hq.a_t;
  plan.ctx = qctx;
  std::size_t stored = hq.h[0].size();
  for (int p = 1; p < 4; ++p) stored = std::min(stored, hq.h[p].size());
  plan.hat_terms = std::min<long>(cfg.hat_terms, static_cast<long>(stored));
  const std::vector<long> Ms = m_window(N, cfg, tq.size());
  rec.M_center = static_cast<long>(
      std::ceil(cfg.window_center_factor * static_cast<double>(N)));

  const std::vector<ResummationResult> win =
      borel_window(delta_q, plan, tq, hq, Ms);

  Real mean(qb);
  for (const ResummationResult& w : win) mean += w.value;
  mean /= static_cast<long>(win.size());
  Real var(qb);
  if (win.size() >= 2) {
    for (const ResummationResult& w : win) {
      const Real d = w.value - mean;
      var.add_mul(d, d);
    }
    var /= static_cast<long>(win.size()) - 1;
  }
  Real vmin = win.front().value;
  Real vmax = win.front().value;
  Real eq(qb);
  Real et(qb);
  for (const ResummationResult& w : win) {
    vmin = min(vmin, w.value);
    vmax = max(vmax, w.value);
    eq = max(eq, w.err_quad);
    et = max(et, w.err_tail);
  }

  const Real scale = energy_scale(rec.delta, ectx);
  rec.E_borel = scale * mean;
  rec.sigma = scale * sqrt(var);
  rec.err_quad = scale * eq;
  rec.err_tail = scale * et;
  rec.window_spread = scale * (vmax - vmin);

  // optimal-truncation baseline
  const OaaResult oaa = oaa_sum(tq, delta_q);
  rec.E_oaa = scale * oaa.value;
  rec.floor = scale * oaa.floor_term;
  rec.oaa_stop = oaa.stop;

  rec.Delta = rec.E_exact - rec.E_borel;
  rec.sign = rec.Delta.sign() >= 0 ? 1 : -1;
  const Real budget = rec.sigma + rec.err_quad + rec.err_tail + rec.eigen_err;
  rec.flagged = abs(rec.Delta) < 10 * budget;
  return rec;
}

std::vector<ComparisonRecord> run_compare(const RunConfig& cfg,
                                          const CachedCoefficients& cc,
                                          const std::vector<long>& Ns,
                                          const ProgressFn& progress) {
  if (Ns.empty()) throw DomainError("run_compare: empty index list");
  std::vector<ComparisonRecord> out;
  out.reserve(Ns.size());
  for (long N : Ns) {
    out.push_back(compare_one(cfg, cc, N));
    if (progress) progress(out.back());
  }
  return out;
}

std::vector<ComparisonRecord> run_compare(const RunConfig& cfg,
                                          const CachedCoefficients& cc,
                                          const ProgressFn& progress) {
  if (cfg.n_from < 0 || cfg.n_to < cfg.n_from)
    throw DomainError("run_compare: invalid index range");
  std::vector<long> Ns;
  for (long N = cfg.n_from; N <= cfg.n_to; ++N) Ns.push_back(N);
  return run_compare(cfg, cc, Ns, progress);
}

InvariantReport check_invariants(const std::vector<ComparisonRecord>& recs) {
  InvariantReport rep;
  auto fail = [&rep](const std::string& what) {
    rep.pass = false;
    rep.notes.push_back("violation: " + what);
  };
  for (const ComparisonRecord& r : recs) {
    const std::string tag = "N=" + std::to_string(r.N);
    if (r.flagged) {
      rep.notes.push_back("flagged: " + tag +
                          " (|Delta| within 10x the error budget)");
      continue;
    }
    const long N = r.N;
    if (N <= 12) {
      const int expect = (N % 2 == 0) ? 1 : -1;
      if (r.sign != expect) fail("sign(Delta) != (-1)^N at " + tag);
    }
    if (N >= 2 && N <= 8) {
      const Real piN = Real::pi(r.Delta.prec()) * N;
      const Real ratio = abs(log(abs(r.Delta)) + piN) / piN;
      if (!(ratio < Real::from_double(0.1, 64)))
        fail("|ln|Delta| + pi N|/(pi N) >= 0.1 at " + tag);
    }
    if (N >= 1 && N <= 8) {
      if (!(abs(r.E_oaa - r.E_borel) < abs(r.Delta) / 100L))
        fail("|E_oaa - E_borel| >= 0.01 |Delta| at " + tag);
    }
    if (N >= 13 && N % 2 == 1) {
      const long K = (N - 1) / 2;
      const int expect = (K % 2 == 0) ? 1 : -1;
      if (r.sign != expect)
        fail("odd-index regime sign != (-1)^((N-1)/2) at " + tag);
    }
    if (N >= 10 && N <= 42 && N % 2 == 0 && r.sign != 1)
      fail("even-index Delta must stay positive at " + tag);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

namespace {
const char* kCsvHeader = "N,delta,E_exact,E_oaa,E_borel,sigma,Delta,sign,floor";
}

void emit_csv(const std::vector<ComparisonRecord>& recs,
              const std::string& path) {
  std::vector<const ComparisonRecord*> order;
  order.reserve(recs.size());
  for (const ComparisonRecord& r : recs) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const ComparisonRecord* a, const ComparisonRecord* b) {
              return a->N < b->N;
            });
  std::ofstream f(path);
  if (!f) throw CacheError(path + ": cannot open for writing");
  f << kCsvHeader << '\n';
  for (const ComparisonRecord* r : order) {
    f << r->N << ',' << r->delta.to_string() << ',' << r->E_exact.to_string()
      << ',' << r->E_oaa.to_string() << ',' << r->E_borel.to_string() << ','
      << r->sigma.to_string() << ',' << r->Delta.to_string() << ','
      << (r->sign >= 0 ? "+1" : "-1") << ',' << r->floor.to_string() << '\n';
  }
  f.flush();
  if (!f.good()) throw CacheError(path + ": write failed");
}

std::vector<ComparisonRecord> parse_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CacheError(path + ": cannot open");
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader)
    throw CacheError(path + ": missing or wrong CSV header");
  std::vector<ComparisonRecord> out;
  std::size_t rowno = 1;
  while (std::getline(f, line)) {
    ++rowno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    const std::string where = path + ": row " + std::to_string(rowno);
    if (fields.size() != 9)
      throw CacheError(where + ": expected 9 columns, got " +
                       std::to_string(fields.size()));
    try {
      auto real_field = [](const std::string& s) {
        const mpfr_prec_t bits = static_cast<mpfr_prec_t>(
            std::ceil(3.3219281 * static_cast<double>(s.size()))) + 32;
        return Real::from_string(s, bits);
      };
      ComparisonRecord r;
      r.N = std::stol(fields[0]);
      r.delta = real_field(fields[1]);
      r.E_exact = real_field(fields[2]);
      r.E_oaa = real_field(fields[3]);
      r.E_borel = real_field(fields[4]);
      r.sigma = real_field(fields[5]);
      r.Delta = real_field(fields[6]);
      if (fields[7] == "+1" || fields[7] == "1")
        r.sign = 1;
      else if (fields[7] == "-1")
        r.sign = -1;
      else
        throw DomainError("sign column must be +1 or -1");
      r.floor = real_field(fields[8]);
      out.push_back(std::move(r));
    } catch (const CacheError&) {
      throw;
    } catch (const std::exception& e) {
      throw CacheError(where + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG artifacts (static, no external renderer)
// ---------------------------------------------------------------------------

namespace {

std::string fmt_px(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double nice_step(double range) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double n = raw / mag;
  if (n < 1.5) return mag;
  if (n < 3.5) return 2.0 * mag;
  if (n < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

struct Canvas {
  std::ostringstream ss;
  Canvas(double w, double h) {
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
       << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  void save(const std::string& path) {
    ss << "</svg>\n";
    std::ofstream f(path);
    if (!f) throw CacheError(path + ": cannot open for writing");
    f << ss.str();
    f.flush();
    if (!f.good()) throw CacheError(path + ": write failed");
  }
};

/// One data viewport with margins, axes, and clipped data mapping.
struct Panel {
  Canvas& c;
  double ox, oy, w, h;           // viewport in canvas pixels
  double x0, x1, y0, y1;         // data ranges
  double ml = 64, mr = 16, mt = 28, mb = 44;

  Panel(Canvas& cv, double ox_, double oy_, double w_, double h_, double x0_,
        double x1_, double y0_, double y1_)
      : c(cv), ox(ox_), oy(oy_), w(w_), h(h_), x0(x0_), x1(x1_), y0(y0_),
        y1(y1_) {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 += 0.5;
    }
  }
  double px(double x) const {
    return ox + ml + (x - x0) / (x1 - x0) * (w - ml - mr);
  }
  double py(double y) const {
    double t = (y - y0) / (y1 - y0);
    t = std::min(1.06, std::max(-0.06, t));  // clip runaway values
    return oy + h - mb - t * (h - mt - mb);
  }
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const char* color, double width, const char* dash = nullptr) {
    if (pts.empty()) return;
    c.ss << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"" << width << '"';
    if (dash != nullptr) c.ss << " stroke-dasharray=\"" << dash << '"';
    c.ss << " points=\"";
    for (const auto& [x, y] : pts)
      c.ss << fmt_px(px(x)) << ',' << fmt_px(py(y)) << ' ';
    c.ss << "\"/>\n";
  }
  void hline(double y, const char* color, const char* dash = nullptr) {
    polyline({{x0, y}, {x1, y}}, color, 1.2, dash);
  }
  void marker(double x, double y, bool filled, const char* color) {
    c.ss << "<circle cx=\"" << fmt_px(px(x)) << "\" cy=\"" << fmt_px(py(y))
         << "\" r=\"3\" stroke=\"" << color << "\" fill=\""
         << (filled ? color : "white") << "\"/>\n";
  }
  void text(double xpix, double ypix, const std::string& s,
            const char* anchor = "middle", int size = 12,
            const char* extra = "") {
    c.ss << "<text x=\"" << fmt_px(xpix) << "\" y=\"" << fmt_px(ypix)
         << "\" font-size=\"" << size << "\" text-anchor=\"" << anchor
         << "\" fill=\"#222\" " << extra << '>' << s << "</text>\n";
  }
  void frame(const std::string& title, const std::string& xlabel,
             const std::string& ylabel) {
    const double bx = ox + ml, by = oy + mt;
    const double bw = w - ml - mr, bh = h - mt - mb;
    c.ss << "<rect x=\"" << fmt_px(bx) << "\" y=\"" << fmt_px(by)
         << "\" width=\"" << fmt_px(bw) << "\" height=\"" << fmt_px(bh)
         << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    const double xs = nice_step(x1 - x0);
    for (double x = std::ceil(x0 / xs) * xs; x <= x1 + 1e-9 * xs; x += xs) {
      const double X = px(x);
      c.ss << "<line x1=\"" << fmt_px(X) << "\" y1=\"" << fmt_px(by + bh)
           << "\" x2=\"" << fmt_px(X) << "\" y2=\"" << fmt_px(by + bh + 4)
           << "\" stroke=\"#444\"/>\n";
      text(X, by + bh + 16, fmt_num(x), "middle", 10);
    }
    const double ys = nice_step(y1 - y0);
    for (double y = std::ceil(y0 / ys) * ys; y <= y1 + 1e-9 * ys; y += ys) {
      const double Y = py(y);
      c.ss << "<line x1=\"" << fmt_px(bx - 4) << "\" y1=\"" << fmt_px(Y)
           << "\" x2=\"" << fmt_px(bx) << "\" y2=\"" << fmt_px(Y)
           << "\" stroke=\"#444\"/>\n";
      text(bx - 7, Y + 3, fmt_num(y), "end", 10);
    }
    text(ox + w / 2, oy + 16, title, "middle", 13);
    text(ox + ml + bw / 2, oy + h - 8, xlabel, "middle", 11);
    text(0, 0, ylabel, "middle", 11,
         ("transform=\"translate(" + fmt_px(ox + 14) + ' ' +
          fmt_px(by + bh / 2) + ") rotate(-90)\"")
             .c_str());
  }
};

}  // namespace

void emit_plot_fig1(const CoefficientSeries& t, const Real& a_t,
                    const std::string& path) {
  if (t.size() < 3) throw DomainError("emit_plot_fig1: series too short");
  const mpfr_prec_t bits = 192;
  const Real a = a_t.round_to(bits);
  const Real twofive = Real::from_rational(Rational(5, 2), bits);
  std::vector<std::pair<double, double>> even, odd;
  Real denom = Real::from_long(1, bits);  // m!^2 a^m
  double ymax = 0.0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (m > 0) {
      denom *= static_cast<long>(m) * static_cast<long>(m);
      denom *= a;
    }
    const Real resc = abs(t.coeffs[m].round_to(bits)) / denom *
                      pow(Real::from_long(static_cast<long>(m) + 1, bits),
                          twofive);
    const double y = resc.to_double();
    ymax = std::max(ymax, y);
    (m % 2 == 0 ? even : odd).emplace_back(static_cast<double>(m), y);
  }
  Canvas cv(720, 480);
  Panel p(cv, 0, 0, 720, 480, 0.0, static_cast<double>(t.size() - 1), 0.0,
          ymax * 1.1);
  p.frame("Rescaled coefficient growth", "m",
          "|t_m| / (m!^2 a^m (m+1)^{-5/2})");
  p.polyline(even, "#2b6cb0", 1.5);
  p.polyline(odd, "#c53030", 1.5);
  p.text(p.px(p.x1) - 8, p.py(p.y1) + 16, "even m", "end", 11,
         "style=\"fill:#2b6cb0\"");
  p.text(p.px(p.x1) - 8, p.py(p.y1) + 30, "odd m", "end", 11,
         "style=\"fill:#c53030\"");
  cv.save(path);
}

void emit_plot_fig2(const CoefficientSeries& t,
                    const std::vector<ComparisonRecord>& recs,
                    const std::string& path) {
  std::vector<const ComparisonRecord*> rows;
  for (const ComparisonRecord& r : recs)
    if (r.N <= 3) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const ComparisonRecord* a, const ComparisonRecord* b) {
              return a->N < b->N;
            });
  if (rows.empty())
    throw DomainError("emit_plot_fig2: no records with N <= 3");
  if (rows.size() > 4) rows.resize(4);

  const PrecisionContext ctx(34);
  const mpfr_prec_t bits = ctx.bits();
  Canvas cv(980, 720);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRecord& r = *rows[i];
    const Real delta = delta_of(r.N, bits);
    const Real scale = energy_scale(delta, ctx);

    // locate the smallest term independently of the record diagnostics
    long stop = 1;
    {
      Real best = abs(t.coeffs[1].round_to(bits)) * delta;
      Real dm = delta;
      for (std::size_t m = 2; m + 1 < t.size() && m < 60; ++m) {
        dm *= delta;
        const Real mag = abs(t.coeffs[m].round_to(bits)) * dm;
        if (mag < best) {
          best = mag;
          stop = static_cast<long>(m);
        }
      }
    }
    const long Mmax =
        std::min<long>(2 * stop + 8, static_cast<long>(t.size()));

    std::vector<std::pair<double, double>> pts;
    double ylo = r.E_exact.to_double(), yhi = ylo;
    {
      Real head(bits);
      Real dm = Real::from_long(1, bits);
      for (long M = 1; M <= Mmax; ++M) {
        head.add_mul(t.coeffs[static_cast<std::size_t>(M - 1)].round_to(bits),
                     dm);
        dm *= delta;
        const double y = (scale * head).to_double();
        pts.emplace_back(static_cast<double>(M), y);
        if (M <= stop + 2) {
          ylo = std::min(ylo, y);
          yhi = std::max(yhi, y);
        }
      }
    }
    const double eb = r.E_borel.to_double();
    ylo = std::min(ylo, eb);
    yhi = std::max(yhi, eb);
    const double pad = 0.18 * (yhi - ylo) + 1e-12;

    Panel p(cv, static_cast<double>(i % 2) * 490.0,
            static_cast<double>(i / 2) * 360.0, 490, 360, 1.0,
            static_cast<double>(Mmax), ylo - pad, yhi + pad);
    p.frame("index N = " + std::to_string(r.N) + "  (smallest term at m = " +
                std::to_string(stop) + ")",
            "retained terms M", "partial sum of E");
    p.hline(r.E_exact.to_double(), "#444");
    p.hline(eb, "#2f855a", "6,4");
    p.polyline(pts, "#2b6cb0", 1.5);
    for (const auto& [x, y] : pts) p.marker(x, y, true, "#2b6cb0");
    p.text(p.px(p.x1) - 8, p.py(p.y1) + 16, "exact", "end", 10,
           "style=\"fill:#444\"");
    p.text(p.px(p.x1) - 8, p.py(p.y1) + 29, "resummed", "end", 10,
           "style=\"fill:#2f855a\"");
  }
  cv.save(path);
}

void emit_plot_fig3(const std::vector<ComparisonRecord>& recs,
                    const std::string& path) {
  if (recs.empty()) throw DomainError("emit_plot_fig3: no records");
  std::vector<const ComparisonRecord*> rows;
  for (const ComparisonRecord& r : recs) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const ComparisonRecord* a, const ComparisonRecord* b) {
              return a->N < b->N;
            });

  const double l10 = std::log(10.0);
  std::vector<std::pair<double, double>> line, hi, lo;
  std::vector<std::pair<double, bool>> signs;
  double ymin = 0.0, ymax = -1e300;
  for (const ComparisonRecord* r : rows) {
    const double x = static_cast<double>(r->N);
    const Real ad = abs(r->Delta);
    if (ad.is_zero()) continue;
    const double y = log10(ad).to_double();
    line.emplace_back(x, y);
    signs.emplace_back(x, r->sign > 0);
    const Real up = ad + r->sigma;
    Real dn = ad - r->sigma;
    if (!(dn.sign() > 0)) dn = ad / 1000L;
    hi.emplace_back(x, log10(up).to_double());
    lo.emplace_back(x, log10(dn).to_double());
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (line.empty()) throw DomainError("emit_plot_fig3: all Delta vanish");

  const double xlo = line.front().first, xhi = line.back().first;
  const double ref_lo = -M_PI * xhi / l10;
  ymin = std::min(ymin, ref_lo) - 1.5;
  ymax = std::max(0.0, ymax) + 1.5;

  Canvas cv(760, 500);
  Panel p(cv, 0, 0, 760, 500, xlo, xhi, ymin, ymax);
  p.frame("Distance to the exact eigenvalues", "N", "log10 |Delta_N|");
  p.polyline({{xlo, -M_PI * xlo / l10}, {xhi, ref_lo}}, "#888", 1.2, "6,4");
  p.polyline(hi, "#2b6cb0", 0.8, "2,3");
  p.polyline(lo, "#2b6cb0", 0.8, "2,3");
  p.polyline(line, "#2b6cb0", 1.5);
  for (std::size_t i = 0; i < line.size(); ++i)
    p.marker(line[i].first, line[i].second, signs[i].second, "#2b6cb0");
  p.text(p.px(xlo) + 8, p.py(ymin) - 10,
         "reference slope -pi/ln 10; filled marker: Delta &gt; 0", "start",
         11);
  cv.save(path);
}

void emit_plot(const std::string& kind, const CachedCoefficients& cc,
               const std::vector<ComparisonRecord>& recs,
               const std::string& path) {
  if (kind == "fig1") {
    emit_plot_fig1(cc.t, cc.a_t, path);
  } else if (kind == "fig2") {
    emit_plot_fig2(cc.t, recs, path);
  } else if (kind == "fig3") {
    emit_plot_fig3(recs, path);
  } else {
    throw DomainError("emit_plot: kind must be fig1, fig2, or fig3");
  }
}

}  // namespace qwkb
