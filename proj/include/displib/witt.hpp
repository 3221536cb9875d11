#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "displib/error.hpp"
#include "displib/ideal.hpp"
#include "displib/ring.hpp"
#include "displib/wittpoly.hpp"

namespace displib {

// Precision-tracked truncated Witt vectors over an ArtinRing. Arithmetic
// evaluates the universal structure polynomials at the stored precision;
// results carry the minimum precision of the inputs, Frobenius drops one
// level, Verschiebung gains one. Equality always compares at shared
// precision, and operations that would need precision < 1 raise.

struct WittEl {
  ArtinRing base;
  std::vector<RingEl> c;  // size == precision >= 1

  unsigned prec() const { return static_cast<unsigned>(c.size()); }
  const RingEl& comp(unsigned i) const { return c[i]; }
  bool is_zero() const {
    for (const auto& e : c)
      if (!e.is_zero()) return false;
    return true;
  }

  std::string key() const {
    std::string s;
    std::uint64_t n = c.size();
    s.append(reinterpret_cast<const char*>(&n), sizeof(n));
    for (const auto& e : c) s += e.key();
    return s;
  }
};

inline WittEl witt_zero(const ArtinRing& R, unsigned prec) {
  require(prec >= 1, errc::insufficient_precision, "Witt precision must be at least 1");
  return WittEl{R, std::vector<RingEl>(prec, R.zero())};
}

inline WittEl teichmuller(const RingEl& r, unsigned prec) {
  WittEl w = witt_zero(r.ring(), prec);
  w.c[0] = r;
  return w;
}

inline WittEl witt_one(const ArtinRing& R, unsigned prec) { return teichmuller(R.one(), prec); }

inline WittEl witt_truncate(const WittEl& a, unsigned prec) {
  require(prec >= 1 && prec <= a.prec(), errc::insufficient_precision, "bad truncation");
  WittEl r = a;
  r.c.resize(prec);
  return r;
}

inline bool witt_eq(const WittEl& a, const WittEl& b) {
  require(a.base.same_ring(b.base), errc::base_mismatch, "Witt elements over different rings");
  unsigned m = std::min(a.prec(), b.prec());
  for (unsigned i = 0; i < m; ++i)
    if (a.c[i] != b.c[i]) return false;
  return true;
}

namespace wittdetail {

// The universal polynomials fit the monomial packing only for 2n <= 8
// variables and exponents p^(n-1) < 256. Longer vectors run through an
// exact ghost-lift: raise the coefficient exponent by n, move to ghost
// coordinates there, combine, and solve back with exact divisions.
inline bool polys_available(std::uint64_t p, unsigned n) {
  if (2 * n > 8) return false;
  std::uint64_t e = 1;
  for (unsigned k = 0; k + 1 < n; ++k) {
    e *= p;
    if (e >= 256) return false;
  }
  return true;
}

inline ArtinRing lift_ring(const ArtinRing& R, unsigned n) {
  require(R.f() == 1, errc::budget_exceeded,
          "long Witt vectors need Z/p^N coefficients");
  static std::mutex mu;
  static std::map<std::string, ArtinRing> memo;
  std::lock_guard<std::mutex> lock(mu);
  std::string key = std::to_string(R.p()) + ":" + std::to_string(R.N()) + ":" +
                    std::to_string(n) + ":";
  for (const auto& v : R.data().vars) key += v + ",";
  for (Mono t : R.data().trunc) key += std::to_string(t) + ";";
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  RingSpec spec;
  spec.p = R.p();
  spec.N = R.N() + n;
  spec.f = 1;
  spec.vars = R.data().vars;
  for (Mono t : R.data().trunc) {
    std::vector<unsigned> ev;
    for (unsigned v = 0; v < R.num_vars(); ++v) ev.push_back(mono_exp(t, v));
    spec.trunc.push_back(ev);
  }
  ArtinRing big = ArtinRing::make(spec);
  memo.emplace(key, big);
  return big;
}

inline RingEl lift_el(const ArtinRing& big, const RingEl& x) {
  RingEl out = big.zero();
  for (const auto& t : x.terms()) out = ring_add(out, big.monomial(t.first, t.second));
  return out;
}

inline RingEl reduce_el(const ArtinRing& small, const RingEl& x) {
  RingEl out = small.zero();
  for (const auto& t : x.terms()) {
    std::uint64_t c = t.second % small.data().pN;
    if (c) out = ring_add(out, small.monomial(t.first, c));
  }
  return out;
}

inline std::vector<RingEl> ghost_of(const ArtinRing& big, const std::vector<RingEl>& comps) {
  RingEl p_el = big.from_int(static_cast<long long>(big.p()));
  std::vector<RingEl> w;
  for (unsigned i = 0; i < comps.size(); ++i) {
    RingEl acc = big.zero();
    for (unsigned j = 0; j <= i; ++j) {
      unsigned e = 1;
      for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(big.p());
      acc = ring_add(acc, ring_mul(ring_pow(p_el, j), ring_pow(comps[j], e)));
    }
    w.push_back(acc);
  }
  return w;
}

inline std::vector<RingEl> unghost(const ArtinRing& big, const std::vector<RingEl>& g) {
  RingEl p_el = big.from_int(static_cast<long long>(big.p()));
  std::vector<RingEl> comps;
  for (unsigned i = 0; i < g.size(); ++i) {
    RingEl acc = g[i];
    for (unsigned j = 0; j < i; ++j) {
      unsigned e = 1;
      for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(big.p());
      acc = ring_sub(acc, ring_mul(ring_pow(p_el, j), ring_pow(comps[j], e)));
    }
    std::uint64_t pi = 1;
    for (unsigned k = 0; k < i; ++k) pi *= big.p();
    RingEl q = big.zero();
    for (const auto& t : acc.terms()) {
      require(t.second % pi == 0, errc::internal, "ghost recursion not divisible");
      if (t.second / pi) q = ring_add(q, big.monomial(t.first, t.second / pi));
    }
    comps.push_back(q);
  }
  return comps;
}

// Evaluate an integer polynomial in the packed x/y variables at ring values.
inline RingEl eval_poly(const IntPoly& poly, const ArtinRing& R,
                        const std::vector<const RingEl*>& vals) {
  // per-variable power tables, built to the maximal exponent that occurs
  std::vector<std::vector<RingEl>> pows(vals.size());
  for (const auto& term : poly.terms()) {
    for (unsigned v = 0; v < vals.size(); ++v) {
      unsigned e = mono_exp(term.first, v);
      if (e == 0) continue;
      auto& tab = pows[v];
      if (tab.empty()) tab.push_back(*vals[v]);  // tab[k] = vals[v]^(k+1)
      while (tab.size() < e) tab.push_back(ring_mul(tab.back(), tab.front()));
    }
  }
  RingEl acc = R.zero();
  for (const auto& term : poly.terms()) {
    std::uint64_t coeff = R.c_from_bigint(term.second);
    if (coeff == 0) continue;
    RingEl t = R.from_coeff(coeff);
    for (unsigned v = 0; v < vals.size(); ++v) {
      unsigned e = mono_exp(term.first, v);
      if (e) t = ring_mul(t, pows[v][e - 1]);
      if (t.is_zero()) break;
    }
    acc = ring_add(acc, t);
  }
  return acc;
}

}  // namespace wittdetail

inline WittEl witt_binop(const std::vector<IntPoly>& polys, const WittEl& a, const WittEl& b) {
  require(a.base.same_ring(b.base), errc::base_mismatch, "Witt elements over different rings");
  unsigned m = std::min(a.prec(), b.prec());
  std::vector<const RingEl*> vals;
  unsigned n = static_cast<unsigned>(polys.size());
  for (unsigned j = 0; j < n; ++j) vals.push_back(j < a.prec() ? &a.c[j] : &a.c[0]);
  for (unsigned j = 0; j < n; ++j) vals.push_back(j < b.prec() ? &b.c[j] : &b.c[0]);
  WittEl r = witt_zero(a.base, m);
  for (unsigned i = 0; i < m; ++i) r.c[i] = wittdetail::eval_poly(polys[i], a.base, vals);
  return r;
}

inline WittEl witt_ghost_binop(char op, const WittEl& a, const WittEl& b) {
  unsigned m = std::min(a.prec(), b.prec());
  ArtinRing big = wittdetail::lift_ring(a.base, m);
  std::vector<RingEl> la, lb;
  for (unsigned i = 0; i < m; ++i) {
    la.push_back(wittdetail::lift_el(big, a.c[i]));
    lb.push_back(wittdetail::lift_el(big, b.c[i]));
  }
  auto ga = wittdetail::ghost_of(big, la);
  auto gb = wittdetail::ghost_of(big, lb);
  for (unsigned i = 0; i < m; ++i)
    ga[i] = op == '+' ? ring_add(ga[i], gb[i]) : ring_mul(ga[i], gb[i]);
  auto comps = wittdetail::unghost(big, ga);
  WittEl r = witt_zero(a.base, m);
  for (unsigned i = 0; i < m; ++i) r.c[i] = wittdetail::reduce_el(a.base, comps[i]);
  return r;
}

inline WittEl witt_add(const WittEl& a, const WittEl& b) {
  unsigned m = std::min(a.prec(), b.prec());
  if (!wittdetail::polys_available(a.base.p(), m)) return witt_ghost_binop('+', a, b);
  auto polys = witt_structure_polys(a.base.p(), m);
  return witt_binop(polys->sum, a, b);
}

inline WittEl witt_mul(const WittEl& a, const WittEl& b) {
  unsigned m = std::min(a.prec(), b.prec());
  if (!wittdetail::polys_available(a.base.p(), m)) return witt_ghost_binop('*', a, b);
  auto polys = witt_structure_polys(a.base.p(), m);
  return witt_binop(polys->prod, a, b);
}

inline WittEl witt_neg(const WittEl& a) {
  if (!wittdetail::polys_available(a.base.p(), a.prec())) {
    ArtinRing big = wittdetail::lift_ring(a.base, a.prec());
    std::vector<RingEl> la;
    for (unsigned i = 0; i < a.prec(); ++i) la.push_back(wittdetail::lift_el(big, a.c[i]));
    auto g = wittdetail::ghost_of(big, la);
    for (auto& e : g) e = ring_neg(e);
    auto comps = wittdetail::unghost(big, g);
    WittEl r = witt_zero(a.base, a.prec());
    for (unsigned i = 0; i < a.prec(); ++i) r.c[i] = wittdetail::reduce_el(a.base, comps[i]);
    return r;
  }
  auto polys = witt_structure_polys(a.base.p(), a.prec());
  std::vector<const RingEl*> vals;
  for (unsigned j = 0; j < a.prec(); ++j) vals.push_back(&a.c[j]);
  WittEl r = witt_zero(a.base, a.prec());
  for (unsigned i = 0; i < a.prec(); ++i)
    r.c[i] = wittdetail::eval_poly(polys->neg[i], a.base, vals);
  return r;
}

inline WittEl witt_sub(const WittEl& a, const WittEl& b) { return witt_add(a, witt_neg(b)); }

inline std::vector<RingEl> ghost(const WittEl& a) {
  const ArtinRing& R = a.base;
  std::vector<RingEl> w(a.prec(), R.zero());
  RingEl p_el = R.from_int(static_cast<long long>(R.p()));
  for (unsigned i = 0; i < a.prec(); ++i) {
    RingEl acc = R.zero();
    for (unsigned j = 0; j <= i; ++j) {
      unsigned e = 1;
      for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(R.p());
      acc = ring_add(acc, ring_mul(ring_pow(p_el, j), ring_pow(a.c[j], e)));
    }
    w[i] = acc;
  }
  return w;
}

inline WittEl frobenius(const WittEl& a) {
  require(a.prec() >= 2, errc::insufficient_precision, "Frobenius needs precision >= 2");
  if (!wittdetail::polys_available(a.base.p(), a.prec())) {
    // ghost(F a)_i = ghost(a)_{i+1}
    ArtinRing big = wittdetail::lift_ring(a.base, a.prec());
    std::vector<RingEl> la;
    for (unsigned i = 0; i < a.prec(); ++i) la.push_back(wittdetail::lift_el(big, a.c[i]));
    auto g = wittdetail::ghost_of(big, la);
    g.erase(g.begin());
    auto comps = wittdetail::unghost(big, g);
    WittEl r = witt_zero(a.base, a.prec() - 1);
    for (unsigned i = 0; i + 1 < a.prec(); ++i) r.c[i] = wittdetail::reduce_el(a.base, comps[i]);
    return r;
  }
  auto polys = witt_structure_polys(a.base.p(), a.prec());
  std::vector<const RingEl*> vals;
  for (unsigned j = 0; j < a.prec(); ++j) vals.push_back(&a.c[j]);
  WittEl r = witt_zero(a.base, a.prec() - 1);
  for (unsigned i = 0; i + 1 < a.prec(); ++i)
    r.c[i] = wittdetail::eval_poly(polys->frob[i], a.base, vals);
  return r;
}

inline WittEl verschiebung(const WittEl& a) {
  WittEl r = witt_zero(a.base, a.prec() + 1);
  for (unsigned i = 0; i < a.prec(); ++i) r.c[i + 1] = a.c[i];
  return r;
}

inline WittEl witt_from_int(const ArtinRing& R, unsigned prec, long long v) {
  // v * 1 by binary double-and-add
  bool neg = v < 0;
  unsigned long long mag = neg ? static_cast<unsigned long long>(-(v + 1)) + 1ULL
                               : static_cast<unsigned long long>(v);
  WittEl acc = witt_zero(R, prec);
  WittEl base = witt_one(R, prec);
  while (mag) {
    if (mag & 1ULL) acc = witt_add(acc, base);
    mag >>= 1ULL;
    if (mag) base = witt_add(base, base);
  }
  return neg ? witt_neg(acc) : acc;
}

inline WittEl witt_pow(const WittEl& a, unsigned e) {
  WittEl r = witt_one(a.base, a.prec());
  WittEl b = a;
  while (e) {
    if (e & 1u) r = witt_mul(r, b);
    b = witt_mul(b, b);
    e >>= 1u;
  }
  return r;
}

inline bool witt_is_unit(const WittEl& a) { return is_unit(a.c[0]); }

// Newton iteration; converges because the non-Teichmueller part of a unit is
// topologically nilpotent at finite precision over an artinian base.
inline WittEl witt_invert(const WittEl& a) {
  require(witt_is_unit(a), errc::not_a_unit, "Witt vector is not a unit");
  WittEl x = teichmuller(invert(a.c[0]), a.prec());
  WittEl two = witt_from_int(a.base, a.prec(), 2);
  for (int guard = 0; guard < 64; ++guard) {
    WittEl e = witt_mul(a, x);
    if (witt_eq(e, witt_one(a.base, a.prec()))) return x;
    x = witt_mul(x, witt_sub(two, e));
  }
  fail(errc::internal, "Witt inversion did not converge");
}

// ---- divided powers on the Verschiebung image: gamma_m(V(xi)) ----

// The rational p^a / m! as an integer residue mod `modulus` (a power of p
// exceeding the additive exponent of the Witt group, so that integer scaling
// of Witt vectors is well-defined). Nonnegative p-valuation is asserted.
inline std::uint64_t rational_ppow_mod(std::uint64_t p, unsigned a, unsigned m,
                                       std::uint64_t modulus) {
  unsigned vfact = 0;
  std::uint64_t ufact = 1;
  for (unsigned i = 2; i <= m; ++i) {
    std::uint64_t t = i;
    while (t % p == 0) {
      t /= p;
      ++vfact;
    }
    ufact = (static_cast<unsigned __int128>(ufact) * (t % modulus)) % modulus;
  }
  require(a >= vfact, errc::internal, "negative p-valuation in divided-power constant");
  // inverse of ufact mod modulus (coprime to p)
  long long r0 = static_cast<long long>(modulus), r1 = static_cast<long long>(ufact);
  long long t0 = 0, t1 = 1;
  while (r1 != 0) {
    long long q = r0 / r1;
    long long r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  long long mm = static_cast<long long>(modulus);
  std::uint64_t inv = static_cast<std::uint64_t>(((t0 % mm) + mm) % mm);
  std::uint64_t c = inv;
  for (unsigned i = 0; i < a - vfact; ++i)
    c = (static_cast<unsigned __int128>(c) * p) % modulus;
  return c;
}

// modulus p^(N + prec) dominating the additive exponent of W_prec(R)
inline std::uint64_t witt_scalar_modulus(const ArtinRing& R, unsigned prec) {
  std::uint64_t m = 1;
  unsigned e = (R.f() == 1 ? R.N() : 1) + prec;
  for (unsigned i = 0; i < e; ++i) {
    require(m <= (std::uint64_t(1) << 40), errc::budget_exceeded, "scalar modulus too large");
    m *= R.p();
  }
  return m;
}

// gamma_m(V(xi)) = (p^{m-1} / m!) V(xi^m)
inline WittEl pd_gamma_witt(const WittEl& v_el, unsigned m) {
  require(m >= 1, errc::internal, "pd_gamma_witt needs m >= 1");
  require(v_el.prec() >= 2, errc::insufficient_precision, "need precision >= 2");
  require(v_el.c[0].is_zero(), errc::not_in_v_image, "element is not in the image of V");
  WittEl xi = witt_zero(v_el.base, v_el.prec() - 1);
  for (unsigned i = 0; i + 1 < v_el.prec(); ++i) xi.c[i] = v_el.c[i + 1];
  WittEl xim = witt_pow(xi, m);
  std::uint64_t coeff = rational_ppow_mod(v_el.base.p(), m - 1, m,
                                          witt_scalar_modulus(v_el.base, v_el.prec()));
  return witt_mul(witt_from_int(v_el.base, v_el.prec(), static_cast<long long>(coeff)),
                  verschiebung(xim));
}

// ---- W(a) for a PD ideal: log, exp, and the ideal embedding ----

// Witt vector with every component certified to lie in the ideal.
struct WittIdealEl {
  WittEl w;
  IdealPtr I;
};

inline WittIdealEl make_witt_ideal_el(const WittEl& w, const IdealPtr& I) {
  require(I->ring().same_ring(w.base), errc::parent_mismatch, "ideal over a different ring");
  for (const auto& comp : w.c) I->expect_member(comp);
  return WittIdealEl{w, I};
}

// log_i(a) = (w_i / p^i)(a) = sum_j ((p^{i-j})! / p^{i-j}) gamma_{p^{i-j}}(a_j),
// an integer constant times a divided power for each component.
inline std::uint64_t factorial_ppow_quotient(const ArtinRing& R, unsigned k) {
  // (p^k)! / p^k reduced into the coefficient ring
  std::uint64_t p = R.p();
  unsigned m = 1;
  for (unsigned i = 0; i < k; ++i) m *= static_cast<unsigned>(p);
  unsigned vfact = 0;
  std::uint64_t ufact = R.c_one();
  for (unsigned i = 2; i <= m; ++i) {
    std::uint64_t t = i;
    while (t % p == 0) {
      t /= p;
      ++vfact;
    }
    ufact = R.c_mul(ufact, R.c_from_int(static_cast<long long>(t)));
  }
  require(vfact >= k, errc::internal, "factorial valuation");
  std::uint64_t c = ufact;
  for (unsigned i = 0; i < vfact - k; ++i) c = R.c_mul(c, R.c_from_int(static_cast<long long>(p)));
  return c;
}

inline std::vector<RingEl> witt_log(const WittIdealEl& a) {
  const ArtinRing& R = a.w.base;
  require(a.I->has_pd(), errc::no_pd, "log needs divided powers on the ideal");
  std::vector<RingEl> out(a.w.prec(), R.zero());
  for (unsigned i = 0; i < a.w.prec(); ++i) {
    RingEl acc = R.zero();
    for (unsigned j = 0; j <= i; ++j) {
      unsigned k = i - j;
      unsigned pk = 1;
      for (unsigned t = 0; t < k; ++t) pk *= static_cast<unsigned>(R.p());
      RingEl g = a.I->gamma_unchecked(pk, a.w.c[j]);
      acc = ring_add(acc, ring_scale(g, factorial_ppow_quotient(R, k)));
    }
    out[i] = acc;
  }
  return out;
}

inline WittIdealEl witt_exp(const ArtinRing& R, const std::vector<RingEl>& logs,
                            const IdealPtr& I) {
  require(I->has_pd(), errc::no_pd, "exp needs divided powers on the ideal");
  for (const auto& l : logs) I->expect_member(l);
  WittEl w = witt_zero(R, static_cast<unsigned>(logs.size()));
  for (unsigned i = 0; i < logs.size(); ++i) {
    RingEl acc = logs[i];
    for (unsigned j = 0; j < i; ++j) {
      unsigned k = i - j;
      unsigned pk = 1;
      for (unsigned t = 0; t < k; ++t) pk *= static_cast<unsigned>(R.p());
      RingEl g = I->gamma_unchecked(pk, w.c[j]);
      acc = ring_sub(acc, ring_scale(g, factorial_ppow_quotient(R, k)));
    }
    w.c[i] = acc;
  }
  return WittIdealEl{w, I};
}

// The additive section a -> log^{-1}(a, 0, 0, ...) identifying the ideal with
// an ideal of W(S); for trivial divided powers this is literally (a, 0, ...).
// Frobenius kills it and it annihilates the image of V.
inline WittEl ideal_embed(const RingEl& x, const IdealPtr& I, unsigned prec) {
  I->expect_member(x);
  std::vector<RingEl> logs(prec, x.ring().zero());
  logs[0] = x;
  return witt_exp(x.ring(), logs, I).w;
}

}  // namespace displib
