// SPDX-License-Identifier: MIT
/**
 * @file termlist.hpp
 * @brief Symbolic term lists c * z^a * Q^b * E^e with exact coefficients,
 *        where Q = z^4 - E.
 *
 * Q-powers may be half-integers, so they are stored doubled (qpow2 = 2b).
 * The order-n correction function T_n of the quartic-potential expansion is
 * represented by such a list together with its order; the physical phase
 * factor i^{1-n} is implied by the order and never stored.
 */
#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qwkb/rational.hpp"

namespace qwkb {

struct Term {
  Rational coeff;
  long zpow = 0;   ///< power of z (>= 0)
  long qpow2 = 0;  ///< doubled power of Q = z^4 - E (2b)
  long epow = 0;   ///< power of E (>= 0)
};

struct TermList {
  long order = 0;
  std::vector<Term> terms;  ///< canonical: descending Q-power

  bool empty() const { return terms.empty(); }
  std::string to_string() const;
};

/// key for generic term algebra
using TermKey = std::tuple<long, long, long>;  // (zpow, qpow2, epow)
using TermMap = std::map<TermKey, Rational>;

TermMap to_map(const TermList& list);
TermList from_map(const TermMap& map, long order);

/// Generic product of two term lists (no z-power folding).
TermMap multiply(const TermMap& a, const TermMap& b);
/// Generic d/dz (using dQ/dz = 4 z^3; no folding).
TermMap differentiate(const TermMap& a);
/// Accumulate b into a with a rational weight.
void accumulate(TermMap& a, const TermMap& b, const Rational& w);
/// Rewrite every z-power >= 4 via z^4 = Q + E until all zpow <= 3.
TermMap fold_z4(const TermMap& a);
/// Drop exact zero coefficients.
void prune(TermMap& a);

}  // namespace qwkb
