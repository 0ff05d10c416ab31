// SPDX-License-Identifier: MIT
/**
 * @file experiment.hpp
 * @brief End-to-end discrepancy experiments on the quartic oscillator.
 *
 * The pipeline compares, eigenvalue by eigenvalue,
 *
 *   E_exact(N)  — the Schroedinger eigenvalue from the shooting solver,
 *   E_oaa(N)    — the eigenvalue series summed to its smallest term,
 *   E_borel(N)  — the Borel-resummed series, averaged over a window of
 *                 truncation orders M centered on 2.2 N,
 *
 * where  E(N) = L * delta_N^{-2/3} * t(delta_N),  delta_N = (N+1/2)^{-2}
 * and  L = (3 pi / B(1/4,1/2))^{4/3}.  The headline observable is
 *
 *   Delta_N = E_exact - E_borel  ~  (-1)^N e^{-pi N}   (small N),
 *
 * with a sign regime change at odd indices 2K+1 >= 13 where the sign
 * becomes (-1)^K instead.  Coefficient generation is expensive, so the
 * exact quantization data and every derived series are cached as
 * checksummed text files; comparisons load the caches and budget their
 * own per-N precision.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qwkb/precision.hpp"
#include "qwkb/real.hpp"
#include "qwkb/resummation.hpp"
#include "qwkb/series.hpp"
#include "qwkb/wkb.hpp"

namespace qwkb {

// ---------------------------------------------------------------------------
// Configuration and record types
// ---------------------------------------------------------------------------

/// Orchestration parameters shared by cache generation and comparison runs.
struct RunConfig {
  long n_from = 0;  ///< first eigenvalue index of a range run
  long n_to = 8;    ///< last eigenvalue index (inclusive)

  long max_order = 432;  ///< WKB order n_max for generation (t through m = n_max/2)
  long digits = 300;     ///< decimal digits of the generated caches
  int alpha_eighths = 1; ///< rotation phase phi = alpha_eighths * pi/8 (1 or 3)
  long hat_terms = 53;   ///< conformal-series terms used per residue class

  double window_center_factor = 2.2;  ///< M-window center = ceil(factor * N)
  long window_half_width = 3;         ///< window = center +- half_width

  long fit_lo = 120;       ///< growth-fit window (clamped to available orders)
  long fit_hi = 200;
  double fit_tol = 1e-5;   ///< Cauchy tolerance of the fit extrapolation

  /// 0 = automatic per-N budget (auto_digits / quad_digits); > 0 forces the
  /// eigensolver precision (smoke tests and quick looks).
  long eigen_digits_override = 0;

  std::string cache_dir;  ///< empty: $WKBBOREL_CACHE, else "./cache"
  long progress = 0;      ///< print a status line every `progress` orders
};

/// One row of the comparison experiment.  The first nine fields are the CSV
/// schema `N,delta,E_exact,E_oaa,E_borel,sigma,Delta,sign,floor`; the rest
/// are diagnostics carried in memory only.
struct ComparisonRecord {
  long N = 0;
  Real delta;    ///< (N+1/2)^{-2}, exact at working precision
  Real E_exact;
  Real E_oaa;
  Real E_borel;  ///< window mean of the resummed values (energy units)
  Real sigma;    ///< sample standard deviation over the M-window
  Real Delta;    ///< E_exact - E_borel
  int sign = 0;  ///< sign of Delta (+1 / -1)
  Real floor;    ///< smallest retained series term, in energy units

  // diagnostics (not serialized)
  bool flagged = false;   ///< |Delta| < 10 * (sigma + err_quad + err_tail + eigen_err)
  long digits = 0;        ///< eigensolver digits used
  Real err_quad;          ///< window-max quadrature error, energy units
  Real err_tail;          ///< window-max hat-truncation error, energy units
  Real eigen_err;         ///< eigenvalue error estimate, energy units
  Real window_spread;     ///< max - min of the window values, energy units
  long M_center = 0;      ///< center of the M-window
  long oaa_stop = 0;      ///< index of the smallest term
};

/// Everything the experiments need from the coefficient caches.
struct CachedCoefficients {
  QuantizationSeries q;   ///< exact rational quantization data
  CoefficientSeries r;    ///< quantization coefficients (kind=r)
  CoefficientSeries s;    ///< reverted expansion (kind=s)
  CoefficientSeries t;    ///< eigenvalue coefficients (kind=t)
  CoefficientSeries tt;   ///< Borel-transformed tau_m (kind=t_tilde)
  HatSeries hat;          ///< conformal re-expansion, four residue classes
  Real a_t;               ///< fitted growth constant
  Real fit_residual;      ///< rescaled-sequence deviation over the fit window
  long n_max = 0;
  long digits = 0;
};

// ---------------------------------------------------------------------------
// Budget policy and small helpers
// ---------------------------------------------------------------------------

/// Cache directory resolution: explicit flag > $WKBBOREL_CACHE > "./cache".
std::string resolve_cache_dir(const std::string& flag);

/// Eigensolver digits: max(120, ceil(pi N / ln 10) + 60).  Delta_N ~ e^{-pi N}
/// must sit far above the eigenvalue roundoff.
long auto_digits(long N);

/// Quadrature digits: ceil(pi N / ln 10) + 30 (resummation error budget).
long quad_digits(long N);

/// delta_N = (N+1/2)^{-2} = 4/(2N+1)^2, exact at `bits`.
Real delta_of(long N, mpfr_prec_t bits);

/// Energy scale L * delta^{-2/3} with L = (3 pi / B(1/4,1/2))^{4/3}.
Real energy_scale(const Real& delta, const PrecisionContext& ctx);

/// Truncation-order window {center - w .. center + w}, center =
/// ceil(window_center_factor * N), clamped to [0, t_size]; strictly
/// ascending after deduplication.  Throws DomainError when the window has
/// no admissible entry.
std::vector<long> m_window(long N, const RunConfig& cfg, std::size_t t_size);

/// Parse "pi/8", "3pi/8", or a decimal in radians into the eighth count
/// (1 or 3); throws DomainError for any other phase.
int parse_phase_eighths(const std::string& text);

/// Truncated eigenvalue estimate L delta^{-2/3} sum_{m<=m_max} t_m delta^m
/// (the fixed-order WKB value; m_max = 6 is the 12th expansion order).
Real wkb_truncated_energy(const CoefficientSeries& t, long N, long m_max,
                          const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Cache pipeline
// ---------------------------------------------------------------------------

/**
 * Generate-or-reuse the coefficient caches in the configured directory:
 * quantization.txt (exact rationals), r.txt, s.txt, t.txt (real series),
 * ttilde.txt (Borel-transformed), that.txt (conformal classes,
 * interleaved 4l+p).  A file is reused only when its metadata matches the
 * configuration (kind, digits, n_max, phase, fit window); a valid file
 * with different metadata is regenerated; a corrupted file raises
 * CacheError (integrity is never silently repaired).  The fitted growth
 * constant is recorded in the ttilde/that metadata.  Returns the loaded
 * pipeline.
 */
CachedCoefficients cache_coefficients(const RunConfig& cfg);

/**
 * Strict load of an existing cache directory; raises CacheError when any
 * file is absent, corrupted, or internally inconsistent (mismatched
 * n_max/digits across files).  Never generates.
 */
CachedCoefficients load_coefficients(const std::string& cache_dir);

// ---------------------------------------------------------------------------
// Comparison runs
// ---------------------------------------------------------------------------

using ProgressFn = std::function<void(const ComparisonRecord&)>;

/// Compare one eigenvalue index; all precision budgeting is internal.
ComparisonRecord compare_one(const RunConfig& cfg,
                             const CachedCoefficients& cc, long N);

/// Compare every index in `Ns` (ascending recommended); the callback, when
/// set, fires after each record.
std::vector<ComparisonRecord> run_compare(const RunConfig& cfg,
                                          const CachedCoefficients& cc,
                                          const std::vector<long>& Ns,
                                          const ProgressFn& progress = {});

/// Range convenience: Ns = cfg.n_from .. cfg.n_to.
std::vector<ComparisonRecord> run_compare(const RunConfig& cfg,
                                          const CachedCoefficients& cc,
                                          const ProgressFn& progress = {});

/// Post-run invariants over the available, unflagged rows:
///   - sign(Delta_N) = (-1)^N for N <= 12;
///   - |ln|Delta_N| + pi N| / (pi N) < 0.1 for 2 <= N <= 8;
///   - |E_oaa - E_borel| < 0.01 |Delta_N| for 1 <= N <= 8;
///   - odd indices 2K+1 >= 13: sign(Delta) = (-1)^K;
///   - even indices 10..42: Delta > 0.
/// Flagged rows are reported but not counted as failures.
struct InvariantReport {
  bool pass = true;
  std::vector<std::string> notes;  ///< one line per violation / flag
};
InvariantReport check_invariants(const std::vector<ComparisonRecord>& recs);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

/// Write the records (sorted by N) as CSV with full-precision decimals.
/// Schema: `N,delta,E_exact,E_oaa,E_borel,sigma,Delta,sign,floor`.
/// I/O failures raise CacheError with the path in the message.
void emit_csv(const std::vector<ComparisonRecord>& recs,
              const std::string& path);

/// Read a CSV produced by emit_csv; values are parsed at enough precision
/// to reproduce the stored decimals exactly.  Raises CacheError on a
/// missing file, wrong header, or malformed row.
std::vector<ComparisonRecord> parse_csv(const std::string& path);

/// Static SVG figures (no external renderer):
///   fig1 — rescaled coefficients |t_m| / (m!^2 a^m (m+1)^{-5/2}) vs m,
///          even and odd index families separately;
///   fig2 — partial sums vs truncation order M for rows with N <= 3,
///          against the exact and resummed eigenvalue lines;
///   fig3 — log10|Delta_N| vs N with the sigma band and the e^{-pi N}
///          reference line; filled markers for Delta > 0, open otherwise.
void emit_plot_fig1(const CoefficientSeries& t, const Real& a_t,
                    const std::string& path);
void emit_plot_fig2(const CoefficientSeries& t,
                    const std::vector<ComparisonRecord>& recs,
                    const std::string& path);
void emit_plot_fig3(const std::vector<ComparisonRecord>& recs,
                    const std::string& path);

/// Dispatch on kind in {"fig1", "fig2", "fig3"}; throws DomainError
/// otherwise.  fig1 uses the cache, fig2 both, fig3 the records only.
void emit_plot(const std::string& kind, const CachedCoefficients& cc,
               const std::vector<ComparisonRecord>& recs,
               const std::string& path);

}  // namespace qwkb
