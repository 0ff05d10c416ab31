// SPDX-License-Identifier: MIT
#include "qwkb/termlist.hpp"

#include <algorithm>
#include <sstream>

namespace qwkb {

std::string TermList::to_string() const {
  std::ostringstream os;
  os << "T[" << order << "] =";
  if (terms.empty()) {
    os << " 0";
    return os.str();
  }
  bool first = true;
  for (const auto& t : terms) {
    if (!first) os << " +";
    first = false;
    os << " (" << rational_to_string(t.coeff) << ")";
    if (t.zpow != 0) os << " z^" << t.zpow;
    if (t.qpow2 != 0) {
      os << " Q^";
      if (t.qpow2 % 2 == 0) {
        os << t.qpow2 / 2;
      } else {
        os << "(" << t.qpow2 << "/2)";
      }
    }
    if (t.epow != 0) os << " E^" << t.epow;
  }
  return os.str();
}

TermMap to_map(const TermList& list) {
  TermMap m;
  for (const auto& t : list.terms) {
    m[TermKey{t.zpow, t.qpow2, t.epow}] += t.coeff;
  }
  prune(m);
  return m;
}

TermList from_map(const TermMap& map, long order) {
  TermList out;
  out.order = order;
  // canonical order: descending Q-power, then ascending z-power / E-power
  std::vector<Term> terms;
  for (const auto& [key, coeff] : map) {
    if (coeff == 0) continue;
    terms.push_back(Term{coeff, std::get<0>(key), std::get<1>(key),
                         std::get<2>(key)});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.qpow2 != b.qpow2) return a.qpow2 > b.qpow2;
    if (a.zpow != b.zpow) return a.zpow < b.zpow;
    return a.epow < b.epow;
  });
  out.terms = std::move(terms);
  return out;
}

TermMap multiply(const TermMap& a, const TermMap& b) {
  TermMap out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      TermKey k{std::get<0>(ka) + std::get<0>(kb),
                std::get<1>(ka) + std::get<1>(kb),
                std::get<2>(ka) + std::get<2>(kb)};
      out[k] += ca * cb;
    }
  }
  prune(out);
  return out;
}

TermMap differentiate(const TermMap& a) {
  TermMap out;
  for (const auto& [k, c] : a) {
    const long z = std::get<0>(k), q2 = std::get<1>(k), e = std::get<2>(k);
    if (z != 0) {
      out[TermKey{z - 1, q2, e}] += c * z;
    }
    if (q2 != 0) {
      // d/dz Q^b = b * 4 z^3 Q^{b-1}
      out[TermKey{z + 3, q2 - 2, e}] += c * Rational(4 * q2, 2);
    }
  }
  prune(out);
  return out;
}

void accumulate(TermMap& a, const TermMap& b, const Rational& w) {
  for (const auto& [k, c] : b) a[k] += c * w;
  prune(a);
}

TermMap fold_z4(const TermMap& a) {
  TermMap cur = a;
  bool changed = true;
  while (changed) {
    changed = false;
    TermMap next;
    for (const auto& [k, c] : cur) {
      const long z = std::get<0>(k), q2 = std::get<1>(k), e = std::get<2>(k);
      if (z >= 4) {
        // z^4 = Q + E
        next[TermKey{z - 4, q2 + 2, e}] += c;
        next[TermKey{z - 4, q2, e + 1}] += c;
        changed = true;
      } else {
        next[k] += c;
      }
    }
    cur = std::move(next);
  }
  prune(cur);
  return cur;
}

void prune(TermMap& a) {
  for (auto it = a.begin(); it != a.end();) {
    if (it->second == 0) {
      it = a.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace qwkb
