// SPDX-License-Identifier: MIT
#include "qwkb/wkb.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "qwkb/cacheio.hpp"
#include "qwkb/errors.hpp"
#include "qwkb/special.hpp"

namespace qwkb {

namespace {

// ---------------------------------------------------------------------------
// Canonical frame engine.
//
// Every order is
//   T_n = z^{a_n} * sum_i (num[i]/2^scale2) Q^{(btop2 - 2i)/2} E^{i - delta_n}
// with a_n and btop2 fixed functions of n, so the whole recursion reduces to
// integer vector convolutions, shifts, and scalar multiplies.  The absolute
// E-offset delta_n never enters the recursion itself: every rule below moves
// along the ladder relatively (slot + 1 = one Q-power down, one E-power up),
// and the common scaling degree of all contributions pins the offset, which
// is resolved only when a frame is converted to a term list.
// ---------------------------------------------------------------------------

struct Frame {
  long n = 0;
  int a = 0;
  long btop2 = 0;                // doubled top Q-power
  std::vector<Integer> num;      // numerators over 2^scale2
  long scale2 = 0;
};

int frame_zpow(long n) {
  if (n == 0) return 0;
  if (n % 2 == 0) return static_cast<int>(n % 4);
  return static_cast<int>((2 + n) % 4);
}

long frame_btop2(long n) { return n == 0 ? 1 : -(n + 1); }

long frame_len(long n) { return n == 0 ? 1 : n; }

/// acc += x * 2^shift  (shift >= 0)
void add_shifted(Integer& acc, const Integer& x, long shift) {
  if (shift == 0) {
    acc += x;
  } else {
    Integer tmp;
    mpz_mul_2exp(tmp.get_mpz_t(), x.get_mpz_t(),
                 static_cast<unsigned long>(shift));
    acc += tmp;
  }
}

/// Plain convolution out[k] = sum_i a[i] b[k-i].
std::vector<Integer> convolve(const std::vector<Integer>& a,
                              const std::vector<Integer>& b) {
  std::vector<Integer> out(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

/// Strip the largest common power of two (bounded by scale2).
void normalize(Frame& f) {
  unsigned long best = static_cast<unsigned long>(f.scale2);
  bool any = false;
  for (const auto& x : f.num) {
    if (x == 0) continue;
    any = true;
    unsigned long v = mpz_scan1(x.get_mpz_t(), 0);
    if (v < best) best = v;
    if (best == 0) break;
  }
  if (!any || best == 0) return;
  for (auto& x : f.num) {
    if (x != 0) {
      mpz_tdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), best);
    }
  }
  f.scale2 -= static_cast<long>(best);
}

std::vector<Frame> compute_frames(long n_max, long progress) {
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  std::vector<Frame> frames;
  frames.reserve(static_cast<size_t>(n_max) + 1);
  frames.push_back(Frame{0, 0, 1, {Integer(1)}, 0});
  for (long n = 1; n <= n_max; ++n) {
    const long len = frame_len(n);
    // S = T'_{n-1} + sum products; T_n = -S / (2 T_0).  S lives in the frame
    // (a_n, btop2_S) with doubled top Q-power one unit above T_n's.
    const long btop2_S = frame_btop2(n) + 1;
    long s_scale = frames[n - 1].scale2;
    for (long j = 1; j <= n / 2; ++j) {
      long s = frames[j].scale2 + frames[n - j].scale2;
      if (s > s_scale) s_scale = s;
    }
    std::vector<Integer> S(len);
    auto deposit = [&S, len](long idx, const Integer& val, long shift) {
      if (idx < 0 || idx >= len) {
        throw Error("internal: frame index out of range");
      }
      add_shifted(S[idx], val, shift);
    };

    // derivative of T_{n-1}:
    //   a >= 1:  z^{a-1} [ (a + 4b) Q^b E^e + 4b Q^{b-1} E^{e+1} ]
    //   a == 0:  4 b z^3 Q^{b-1} E^e
    {
      const Frame& p = frames[n - 1];
      const long shift = s_scale - p.scale2;
      const long base_idx = (btop2_S - p.btop2) / 2;  // slot of unshifted b
      for (size_t i = 0; i < p.num.size(); ++i) {
        const long fourb = 2 * (p.btop2 - 2 * static_cast<long>(i));
        const long idx = base_idx + static_cast<long>(i);
        if (p.a != 0) {
          deposit(idx, p.num[i] * (p.a + fourb), shift);
        }
        deposit(idx + 1, p.num[i] * fourb, shift);
      }
    }

    // products sum_{j=1}^{n-1} T_j T_{n-j} (symmetric pairs doubled)
    for (long j = 1; j <= n / 2; ++j) {
      const Frame& fa = frames[j];
      const Frame& fb = frames[n - j];
      std::vector<Integer> p = convolve(fa.num, fb.num);
      if (2 * j != n) {
        for (auto& x : p) x <<= 1;
      }
      const long shift = s_scale - (fa.scale2 + fb.scale2);
      const long p_btop2 = fa.btop2 + fb.btop2;
      const int fold = (fa.a + fb.a - frame_zpow(n)) / 4;
      if (fold != 0 && fold != 1) {
        throw Error("internal: unexpected z-power fold count");
      }
      const long base_idx = (btop2_S - p_btop2) / 2;
      for (size_t k = 0; k < p.size(); ++k) {
        const long idx = base_idx + static_cast<long>(k);
        if (fold == 1) {
          // multiply by z^4 = Q + E: Q-piece one slot up, E-piece in place
          deposit(idx - 1, p[k], shift);
        }
        deposit(idx, p[k], shift);
      }
    }

    Frame f;
    f.n = n;
    f.a = frame_zpow(n);
    f.btop2 = frame_btop2(n);
    f.scale2 = s_scale + 1;  // division by 2 Q^{1/2}
    f.num.resize(len);
    for (long i = 0; i < len; ++i) f.num[i] = -S[i];
    normalize(f);
    frames.push_back(std::move(f));
    if (progress > 0 && n % progress == 0) {
      std::fprintf(stderr, "  [expansion] order %ld/%ld\n", n, n_max);
    }
  }
  return frames;
}

TermList frame_to_list(const Frame& f) {
  TermList out;
  out.order = f.n;
  // Slot i carries Q^{(btop2 - 2i)/2} E^{i - delta}: the scaling degree
  // a + 4b + 4e = 2 - 3n fixes the E-offset delta = (n + a)/4 - 1, and every
  // slot below it must have cancelled to zero during the recursion.
  const long delta = f.n == 0 ? 0 : (f.n + f.a) / 4 - 1;
  Rational den = rational_pow(Rational(2), f.scale2);
  for (size_t i = 0; i < f.num.size(); ++i) {
    if (f.num[i] == 0) continue;
    if (static_cast<long>(i) < delta) {
      throw Error("internal: nonzero coefficient below the E ladder");
    }
    Rational c(f.num[i]);
    c /= den;
    c.canonicalize();
    out.terms.push_back(Term{std::move(c), f.a,
                             f.btop2 - 2 * static_cast<long>(i),
                             static_cast<long>(i) - delta});
  }
  return out;
}

// kappa chain for the vanishing check of odd orders with unit z-power:
// around the cut, z Q^{-(j+1)} integrates to (2-4j)/(4j E) times z Q^{-j}
// (integration by parts of d/dz[z^2 Q^{-j}]), so every list of z Q^{-m}
// terms reduces to a single multiple of z Q^{-1}.
Rational kappa(long m, std::vector<Rational>& memo) {
  if (m < 1) throw DomainError("kappa: m >= 1 required");
  while (static_cast<long>(memo.size()) < m) {
    const long j = static_cast<long>(memo.size());  // have kappa_j, make j+1
    memo.push_back(memo[j - 1] * Rational(2 - 4 * j, 4 * j));
  }
  return memo[m - 1];
}

std::vector<ReducedRow> reduce_frame_rows(const TermList& list) {
  std::map<std::tuple<int, long, Rational>, Rational> acc;
  for (const auto& t : list.terms) {
    if (t.zpow < 0) throw UnsupportedTermError("negative z-power");
    if (t.zpow % 2 == 1) continue;  // odd z-powers integrate to zero
    if (t.qpow2 % 2 == 0) {
      throw UnsupportedTermError(
          "integer Q-power is not a branch-cut term (z^" +
          std::to_string(t.zpow) + " Q^" + std::to_string(t.qpow2 / 2) + ")");
    }
    const long k = -(t.qpow2 + 1) / 2;  // Q^b = Q^{-k-1/2}
    const int am4 = static_cast<int>(t.zpow % 4);
    const int family = (am4 == 0) ? 0 : 1;
    const Rational base(am4 + 1, 4);
    const long j = t.zpow / 4;
    const Rational y = Rational(1, 2) - k;
    Rational coeff = t.coeff * beta_first_shift_ratio(base, y, j);
    coeff /= 2;
    if (k % 2 != 0) coeff = -coeff;
    Rational epow = base + j + t.epow - k - Rational(1, 2);
    acc[{family, k, epow}] += coeff;
  }
  std::vector<ReducedRow> rows;
  for (auto& [key, coeff] : acc) {
    if (coeff == 0) continue;
    coeff.canonicalize();
    rows.push_back(
        ReducedRow{coeff, std::get<2>(key), std::get<1>(key), std::get<0>(key)});
  }
  return rows;
}

}  // namespace

std::vector<TermList> compute_orders(long n_max, long progress) {
  std::vector<Frame> frames = compute_frames(n_max, progress);
  std::vector<TermList> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(frame_to_list(f));
  return out;
}

TermList recursion_residual(const std::vector<TermList>& orders, long n) {
  if (n < 1 || n >= static_cast<long>(orders.size())) {
    throw DomainError("recursion_residual: order out of range");
  }
  TermMap acc = differentiate(to_map(orders[n - 1]));
  for (long j = 0; j <= n; ++j) {
    TermMap prod = multiply(to_map(orders[j]), to_map(orders[n - j]));
    accumulate(acc, prod, Rational(1));
  }
  TermMap folded = fold_z4(acc);
  return from_map(folded, n);
}

std::vector<ReducedRow> reduce_contour(const TermList& list) {
  return reduce_frame_rows(list);
}

const Rational& QuantizationSeries::q_e(long l) const {
  if (l < 1 || l > even_count()) throw DomainError("q_e: index out of range");
  return q_even[static_cast<size_t>(l - 1)];
}

const Rational& QuantizationSeries::q_o(long l) const {
  if (l < 0 || l >= odd_count()) throw DomainError("q_o: index out of range");
  return q_odd[static_cast<size_t>(l)];
}

Rational QuantizationSeries::p_e(long l) const {
  Rational rho = beta_second_shift_ratio(Rational(1, 4), Rational(1, 2),
                                         6 * l - 1);
  Rational p = 2 * q_e(l) / rho;
  p.canonicalize();
  return p;
}

Rational QuantizationSeries::p_o(long l) const {
  Rational rho = beta_second_shift_ratio(Rational(3, 4), Rational(1, 2),
                                         6 * l + 2);
  Rational p = -2 * q_o(l) / rho;
  p.canonicalize();
  return p;
}

QuantizationSeries quantization_series(long n_max, long progress) {
  if (n_max < 2) throw DomainError("quantization_series: n_max >= 2 required");
  std::vector<Frame> frames = compute_frames(n_max, progress);
  QuantizationSeries qs;
  qs.n_max = n_max;

  std::vector<Rational> kappa_memo{Rational(1)};

  for (long n = 0; n <= n_max; ++n) {
    const TermList list = frame_to_list(frames[n]);

    if (n == 1) {
      // exactly -z^3 Q^{-1}: the Maslov half-integer shift
      if (list.terms.size() != 1 || list.terms[0].coeff != -1 ||
          list.terms[0].zpow != 3 || list.terms[0].qpow2 != -2 ||
          list.terms[0].epow != 0) {
        throw Error("order 1 does not have the expected single-term form");
      }
      continue;
    }
    if (n % 2 == 1) {
      // odd orders >= 3 must integrate to zero around the cut
      const Frame& f = frames[n];
      if (f.a == 3) {
        // z^3 Q^{-m}, m >= 2 are exact derivatives of Q^{1-m}
        if (f.btop2 > -4) throw Error("unexpected Q^{-1} term at odd order");
      } else if (f.a == 1) {
        Rational sum(0);
        const TermList l = frame_to_list(frames[n]);
        for (const auto& t : l.terms) {
          const long m = -t.qpow2 / 2;
          sum += t.coeff * kappa(m, kappa_memo);
        }
        if (sum != 0) {
          throw Error("odd order " + std::to_string(n) +
                      " failed the vanishing check");
        }
      } else {
        throw Error("unexpected z-power at odd order");
      }
      continue;
    }

    // even order: reduce and fold onto the base Beta values
    std::vector<ReducedRow> rows = reduce_frame_rows(list);
    if (rows.empty()) throw Error("empty reduction at even order");
    const int family_expect = (n % 4 == 0) ? 0 : 1;
    const Rational epow_expect = Rational(3 - 3 * n, 4);
    const Rational base = family_expect == 0 ? Rational(1, 4) : Rational(3, 4);
    Rational S(0);
    for (const auto& row : rows) {
      if (row.family != family_expect) {
        throw Error("family mix at order " + std::to_string(n));
      }
      if (row.epow != epow_expect) {
        throw Error("non-uniform E-power at order " + std::to_string(n));
      }
      S += row.coeff * beta_second_shift_ratio(base, Rational(1, 2), row.k);
    }
    S.canonicalize();
    const Rational contribution = -S;  // physical orientation

    if (n == 0) {
      if (contribution != Rational(1, 3)) {
        throw Error("leading contribution is not 1/3");
      }
      continue;
    }
    const long l = (n % 4 == 0) ? n / 4 : (n - 2) / 4;
    const int sign = (l % 2 == 1) ? 1 : -1;
    Rational q = sign > 0 ? contribution : -contribution;
    q.canonicalize();
    if (q <= 0) {
      throw SignViolationError("q coefficient at order " + std::to_string(n) +
                               " is not positive");
    }
    if (n % 4 == 0) {
      if (static_cast<long>(qs.q_even.size()) != l - 1) {
        throw Error("even-family index bookkeeping error");
      }
      qs.q_even.push_back(std::move(q));
    } else {
      if (static_cast<long>(qs.q_odd.size()) != l) {
        throw Error("odd-family index bookkeeping error");
      }
      qs.q_odd.push_back(std::move(q));
    }
  }
  // n = 2 sanity: the first odd-family coefficient is exactly 1/16
  if (qs.q_odd.empty() || qs.q_odd[0] != Rational(1, 16)) {
    throw Error("first odd-family coefficient is not 1/16");
  }
  return qs;
}

void write_quantization(const std::string& path,
                        const QuantizationSeries& qs) {
  std::map<std::string, std::string> meta{
      {"kind", "quantization"},
      {"n_max", std::to_string(qs.n_max)},
  };
  std::vector<std::string> payload;
  for (long l = 0; l < qs.odd_count(); ++l) {
    payload.push_back("q_o " + std::to_string(l) + " " +
                      rational_to_string(qs.q_o(l)));
  }
  for (long l = 1; l <= qs.even_count(); ++l) {
    payload.push_back("q_e " + std::to_string(l) + " " +
                      rational_to_string(qs.q_e(l)));
  }
  write_cache(path, meta, payload);
}

QuantizationSeries read_quantization(const std::string& path) {
  CacheFile cf = read_cache(path);
  auto it = cf.meta.find("kind");
  if (it == cf.meta.end() || it->second != "quantization") {
    throw CacheError("not a quantization cache: " + path);
  }
  QuantizationSeries qs;
  auto nm = cf.meta.find("n_max");
  if (nm == cf.meta.end()) throw CacheError("missing n_max in " + path);
  qs.n_max = std::stol(nm->second);
  std::map<long, Rational> evens, odds;
  for (const auto& line : cf.payload) {
    std::istringstream ls(line);
    std::string tag, value;
    long l = 0;
    if (!(ls >> tag >> l >> value)) {
      throw CacheError("malformed coefficient line: " + line);
    }
    Rational r = rational_from_string(value);
    if (r <= 0) throw SignViolationError("non-positive cached q: " + line);
    if (tag == "q_e") {
      evens[l] = std::move(r);
    } else if (tag == "q_o") {
      odds[l] = std::move(r);
    } else {
      throw CacheError("unknown coefficient tag: " + tag);
    }
  }
  for (long l = 1; l <= static_cast<long>(evens.size()); ++l) {
    auto e = evens.find(l);
    if (e == evens.end()) throw CacheError("gap in even coefficients");
    qs.q_even.push_back(e->second);
  }
  for (long l = 0; l < static_cast<long>(odds.size()); ++l) {
    auto o = odds.find(l);
    if (o == odds.end()) throw CacheError("gap in odd coefficients");
    qs.q_odd.push_back(o->second);
  }
  return qs;
}

}  // namespace qwkb
