// SPDX-License-Identifier: MIT
/**
 * @file spectral.hpp
 * @brief Very-high-precision eigenvalues of  -psi'' + x^4 psi = E psi.
 *
 * Shooting method with local Taylor stepping:
 *   - outward sweep from x = 0 with parity initial data (even: psi = 1,
 *     psi' = 0; odd: psi = 0, psi' = 1) to a matching point inside the
 *     classically allowed region,
 *   - inward sweep from x_max with the decaying WKB tail condition
 *       psi'/psi = -sqrt(x^4 - E) - x^3/(x^4 - E),
 *   - mismatch = scale-normalized Wronskian of the two solutions at the
 *     matching point (equal to the logarithmic-derivative difference up to
 *     a nonzero factor); it vanishes exactly at eigenvalues.
 *
 * Matching in the oscillatory region keeps both integrations stable: the
 * inward sweep suppresses the admixture of the growing solution by
 * e^{-2 W(x_max)}, and x_max is sized so that this is below roundoff.
 * Magnitudes are renormalized in powers of two along the way, and the step
 * size resolves the local phase, so endpoint sign changes count each
 * eigenfunction zero exactly once (oscillation-theorem index check).
 *
 * An independent cross-check evaluates the same eigenvalue from a
 * pentadiagonal harmonic-oscillator-basis matrix by Sturm/LDL bisection.
 */
#pragma once

#include "qwkb/precision.hpp"
#include "qwkb/real.hpp"

namespace qwkb {

/// Local state of the shooting integration.
struct ShootState {
  Real x;
  Real psi;
  Real dpsi;
};

/// Result of an eigenvalue solve.
struct EigenResult {
  long N = 0;
  Real E;
  long digits = 0;   ///< attained-precision estimate (from the final bracket)
  Real x_max;
  long iterations = 0;  ///< mismatch evaluations consumed
};

/**
 * Advance one Taylor step of psi'' = (x^4 - E) psi from s.x to s.x + h using
 * the exact local recurrence
 *     (n+1)(n+2) c_{n+2} = sum_{k=0}^{4} C(4,k) x0^{4-k} c_{n-k} - E c_n,
 * evaluated through at most `order` terms (terms are cut early once they
 * stop contributing at working precision).  Throws DomainError for h = 0 or
 * order < 20.
 */
ShootState taylor_step(const ShootState& s, const Real& E, const Real& h,
                       long order);

/**
 * Shooting mismatch at trial energy E (> 0) for the given parity (0 = even,
 * 1 = odd).  Zero iff E is an eigenvalue of the matching parity, up to the
 * (sub-roundoff) tail truncation.
 */
Real mismatch(const Real& E, int parity, const PrecisionContext& ctx);

/**
 * Solve for eigenvalue N: bracket around the Weyl-type estimate
 * leading_const * (N+1/2)^{4/3} (first-order corrected), then safeguarded
 * secant on the mismatch to full context precision.  Verifies the index by
 * the interior-zero count (= floor(N/2) on the half line); throws
 * ConvergenceError on zero-count disagreement or bracket failure.
 * x_pad adds fractional padding to the tail point x_max (robustness knob).
 */
EigenResult solve_eigenvalue(long N, const PrecisionContext& ctx,
                             double x_pad = 0.0);

/**
 * Independent eigenvalue via the pentadiagonal harmonic-oscillator-basis
 * matrix of p^2 + x^4 (parity block of dimension D) and Sturm/LDL-inertia
 * bisection.  D = 0 picks a default adequate for ctx.digits <= 60.
 */
Real basis_eigenvalue(long N, const PrecisionContext& ctx, long D = 0);

}  // namespace qwkb
