#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "displib/bigint.hpp"
#include "displib/error.hpp"
#include "displib/intpoly.hpp"
#include "displib/prng.hpp"

namespace displib {

// Coefficient ring: Z/p^N, or F_{p^f} with f > 1 (then N = 1). Elements are
// packed in a single uint64: a residue for N >= 1, or f base-p digits.
//
// Ring elements are sparse sums coeff * monomial over the monomial basis of
// (Z/p^N)[vars] / (trunc), trunc a monomial ideal containing a pure power of
// every variable. Canonical form (sorted monomials, no zero coefficients, no
// monomial divisible by a truncation generator) is the equality test.

struct RingSpec {
  std::uint64_t p = 2;
  unsigned N = 1;
  unsigned f = 1;
  std::vector<std::string> vars;
  std::vector<std::vector<unsigned>> trunc;  // exponent vectors
};

namespace detail {

inline bool is_prime_u64(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline std::uint64_t pow_u64_checked(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    require(r <= (std::uint64_t(1) << 40) / (b ? b : 1), errc::budget_exceeded,
            "coefficient modulus too large");
    r *= b;
  }
  return r;
}

}  // namespace detail

struct RingData {
  std::uint64_t p = 2;
  unsigned N = 1;
  unsigned f = 1;
  std::uint64_t pN = 4;  // p^N (f = 1), the coefficient modulus
  std::vector<std::string> vars;
  std::vector<Mono> trunc;
  std::vector<unsigned> var_bound;  // least pure-power exponent in trunc
  std::vector<Mono> basis;          // sorted
  std::unordered_map<Mono, std::size_t> basis_index;
  std::vector<std::uint64_t> conway;  // monic irreducible, degree f (f > 1)
  double log2_size = 0;               // log2 |R|
};

class ArtinRing;
class RingEl;

class ArtinRing {
 public:
  ArtinRing() = default;

  const RingData& data() const { return *d_; }
  bool valid() const { return d_ != nullptr; }
  std::uint64_t p() const { return d_->p; }
  unsigned N() const { return d_->N; }
  unsigned f() const { return d_->f; }
  std::size_t basis_size() const { return d_->basis.size(); }
  double log2_size() const { return d_->log2_size; }
  std::size_t num_vars() const { return d_->vars.size(); }

  bool same_ring(const ArtinRing& o) const {
    if (d_ == o.d_) return true;
    if (!d_ || !o.d_) return false;
    return d_->p == o.d_->p && d_->N == o.d_->N && d_->f == o.d_->f && d_->vars == o.d_->vars &&
           d_->trunc == o.d_->trunc;
  }

  // ---- coefficient arithmetic (packed uint64) ----

  std::uint64_t c_zero() const { return 0; }
  std::uint64_t c_one() const { return d_->f == 1 ? 1 % d_->pN : 1; }

  std::uint64_t c_add(std::uint64_t a, std::uint64_t b) const {
    if (d_->f == 1) return (a + b) % d_->pN;
    std::uint64_t r = 0, P = d_->p;
    for (unsigned i = 0; i < d_->f; ++i) {
      std::uint64_t da = digit(a, i), db = digit(b, i);
      r |= ((da + db) % P) << (8 * i);
    }
    return r;
  }

  std::uint64_t c_neg(std::uint64_t a) const {
    if (d_->f == 1) return a == 0 ? 0 : d_->pN - a;
    std::uint64_t r = 0, P = d_->p;
    for (unsigned i = 0; i < d_->f; ++i) {
      std::uint64_t da = digit(a, i);
      r |= (da == 0 ? 0 : P - da) << (8 * i);
    }
    return r;
  }

  std::uint64_t c_mul(std::uint64_t a, std::uint64_t b) const {
    if (d_->f == 1) {
      return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % d_->pN);
    }
    // schoolbook product of digit polynomials, reduced mod conway mod p
    unsigned f = d_->f;
    std::uint64_t P = d_->p;
    std::vector<std::uint64_t> prod(2 * f - 1, 0);
    for (unsigned i = 0; i < f; ++i)
      for (unsigned j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + digit(a, i) * digit(b, j)) % P;
    for (std::size_t k = prod.size(); k-- > f;) {
      std::uint64_t c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      for (unsigned i = 0; i < f; ++i) {
        // x^f = -(conway[0] + ... + conway[f-1] x^{f-1})
        std::uint64_t sub = (c * d_->conway[i]) % P;
        prod[k - f + i] = (prod[k - f + i] + P - sub) % P;
      }
    }
    std::uint64_t r = 0;
    for (unsigned i = 0; i < f; ++i) r |= prod[i] << (8 * i);
    return r;
  }

  bool c_is_unit(std::uint64_t a) const {
    if (d_->f == 1) return a % d_->p != 0;
    return a != 0;
  }

  std::uint64_t c_inv(std::uint64_t a) const {
    require(c_is_unit(a), errc::not_a_unit, "coefficient not invertible");
    if (d_->f == 1) {
      // extended gcd against p^N
      long long r0 = static_cast<long long>(d_->pN), r1 = static_cast<long long>(a);
      long long t0 = 0, t1 = 1;
      while (r1 != 0) {
        long long q = r0 / r1;
        long long r2 = r0 - q * r1;
        long long t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
      }
      long long m = static_cast<long long>(d_->pN);
      long long t = ((t0 % m) + m) % m;
      return static_cast<std::uint64_t>(t);
    }
    // a^(p^f - 2) in the field
    std::uint64_t e = 1;
    for (unsigned i = 0; i < d_->f; ++i) e *= d_->p;
    e -= 2;
    std::uint64_t r = c_one(), b = a;
    while (e) {
      if (e & 1u) r = c_mul(r, b);
      b = c_mul(b, b);
      e >>= 1u;
    }
    return r;
  }

  std::uint64_t c_from_int(long long v) const {
    if (d_->f == 1) {
      long long m = static_cast<long long>(d_->pN);
      return static_cast<std::uint64_t>(((v % m) + m) % m);
    }
    long long m = static_cast<long long>(d_->p);
    return static_cast<std::uint64_t>(((v % m) + m) % m);
  }

  std::uint64_t c_from_bigint(const BigInt& v) const {
    std::uint64_t m = d_->f == 1 ? d_->pN : d_->p;
    return v.mod_u64(m);
  }

  // p-adic valuation of a coefficient (f = 1 only); N for zero.
  unsigned c_val(std::uint64_t a) const {
    if (a == 0) return d_->N;
    unsigned v = 0;
    while (a % d_->p == 0) {
      a /= d_->p;
      ++v;
    }
    return v;
  }

  std::uint64_t c_ring_size() const {
    if (d_->f == 1) return d_->pN;
    std::uint64_t s = 1;
    for (unsigned i = 0; i < d_->f; ++i) s *= d_->p;
    return s;
  }

  std::uint64_t c_nth(std::uint64_t idx) const {
    if (d_->f == 1) return idx % d_->pN;
    std::uint64_t r = 0;
    for (unsigned i = 0; i < d_->f; ++i) {
      r |= (idx % d_->p) << (8 * i);
      idx /= d_->p;
    }
    return r;
  }

  // ---- monomial arithmetic in the quotient ----

  // product of basis monomials; false means the product lies in trunc.
  bool mono_mul(Mono a, Mono b, Mono& out) const {
    Mono r = 0;
    for (unsigned v = 0; v < d_->vars.size(); ++v) {
      unsigned e = mono_exp(a, v) + mono_exp(b, v);
      if (e >= d_->var_bound[v]) return false;  // divisible by the pure power
      r |= Mono(e) << (8 * v);
    }
    return d_->basis_index.count(r) != 0 ? (out = r, true) : false;
  }

  bool mono_in_basis(Mono m) const { return d_->basis_index.count(m) != 0; }

  // ---- element constructors (definitions after RingEl) ----
  RingEl zero() const;
  RingEl one() const;
  RingEl from_int(long long v) const;
  RingEl from_coeff(std::uint64_t c) const;
  RingEl monomial(Mono m, std::uint64_t c) const;
  RingEl var(std::size_t i) const;
  RingEl random(Prng& rng) const;
  RingEl nth_element(std::uint64_t idx) const;  // enumeration when small
  std::uint64_t size_u64() const;               // |R|, requires log2_size <= 62

  static ArtinRing make(const RingSpec& spec);

 private:
  static std::uint64_t digit(std::uint64_t a, unsigned i) { return (a >> (8 * i)) & 0xffu; }

  std::shared_ptr<const RingData> d_;
};

class RingEl {
 public:
  using Term = std::pair<Mono, std::uint64_t>;

  RingEl() = default;
  RingEl(ArtinRing R, std::vector<Term> terms) : R_(std::move(R)), terms_(std::move(terms)) {}

  const ArtinRing& ring() const { return R_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::uint64_t constant_coeff() const {
    if (!terms_.empty() && terms_.front().first == mono_one()) return terms_.front().second;
    return 0;
  }

  friend bool operator==(const RingEl& a, const RingEl& b) {
    return a.terms_ == b.terms_ && a.R_.same_ring(b.R_);
  }
  friend bool operator!=(const RingEl& a, const RingEl& b) { return !(a == b); }

  // strict total order on canonical forms, for deterministic containers
  friend bool operator<(const RingEl& a, const RingEl& b) { return a.terms_ < b.terms_; }

  std::string key() const {
    std::string s;
    std::uint64_t n = terms_.size();
    s.append(reinterpret_cast<const char*>(&n), sizeof(n));
    for (const auto& t : terms_) {
      s.append(reinterpret_cast<const char*>(&t.first), sizeof(t.first));
      s.append(reinterpret_cast<const char*>(&t.second), sizeof(t.second));
    }
    return s;
  }

 private:
  ArtinRing R_;
  std::vector<Term> terms_;
};

inline void check_parents(const RingEl& a, const RingEl& b) {
  require(a.ring().same_ring(b.ring()), errc::parent_mismatch, "elements of different rings");
}

inline RingEl ArtinRing::zero() const { return RingEl(*this, {}); }

inline RingEl ArtinRing::from_coeff(std::uint64_t c) const {
  if (c == 0) return zero();
  return RingEl(*this, {{mono_one(), c}});
}

inline RingEl ArtinRing::one() const { return from_coeff(c_one()); }

inline RingEl ArtinRing::from_int(long long v) const { return from_coeff(c_from_int(v)); }

inline RingEl ArtinRing::monomial(Mono m, std::uint64_t c) const {
  require(mono_in_basis(m), errc::internal, "monomial outside basis");
  if (c == 0) return zero();
  return RingEl(*this, {{m, c}});
}

inline RingEl ArtinRing::var(std::size_t i) const {
  require(i < d_->vars.size(), errc::internal, "variable index");
  Mono m = mono_set_exp(0, static_cast<unsigned>(i), 1);
  require(mono_in_basis(m), errc::internal, "variable killed by truncation");
  return monomial(m, c_one());
}

inline RingEl ring_add(const RingEl& a, const RingEl& b) {
  check_parents(a, b);
  const ArtinRing& R = a.ring();
  std::vector<RingEl::Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  std::size_t i = 0, j = 0;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].first < tb[j].first)) {
      out.push_back(ta[i++]);
    } else if (i == ta.size() || tb[j].first < ta[i].first) {
      out.push_back(tb[j++]);
    } else {
      std::uint64_t c = R.c_add(ta[i].second, tb[j].second);
      if (c != 0) out.push_back({ta[i].first, c});
      ++i;
      ++j;
    }
  }
  return RingEl(R, std::move(out));
}

inline RingEl ring_neg(const RingEl& a) {
  const ArtinRing& R = a.ring();
  std::vector<RingEl::Term> out = a.terms();
  for (auto& t : out) t.second = R.c_neg(t.second);
  return RingEl(R, std::move(out));
}

inline RingEl ring_sub(const RingEl& a, const RingEl& b) { return ring_add(a, ring_neg(b)); }

inline RingEl ring_mul(const RingEl& a, const RingEl& b) {
  check_parents(a, b);
  const ArtinRing& R = a.ring();
  std::map<Mono, std::uint64_t> acc;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      Mono m;
      if (!R.mono_mul(ta.first, tb.first, m)) continue;
      std::uint64_t c = R.c_mul(ta.second, tb.second);
      if (c == 0) continue;
      auto it = acc.find(m);
      if (it == acc.end()) {
        acc.emplace(m, c);
      } else {
        it->second = R.c_add(it->second, c);
      }
    }
  }
  std::vector<RingEl::Term> out;
  out.reserve(acc.size());
  for (const auto& kv : acc)
    if (kv.second != 0) out.push_back(kv);
  return RingEl(R, std::move(out));
}

inline RingEl ring_scale(const RingEl& a, std::uint64_t c) {
  const ArtinRing& R = a.ring();
  if (c == 0) return R.zero();
  std::vector<RingEl::Term> out;
  out.reserve(a.terms().size());
  for (const auto& t : a.terms()) {
    std::uint64_t cc = R.c_mul(t.second, c);
    if (cc != 0) out.push_back({t.first, cc});
  }
  return RingEl(R, std::move(out));
}

inline RingEl ring_pow(const RingEl& a, unsigned e) {
  RingEl r = a.ring().one();
  RingEl b = a;
  while (e) {
    if (e & 1u) r = ring_mul(r, b);
    b = ring_mul(b, b);
    e >>= 1u;
  }
  return r;
}

// Unit test: the constant coefficient must be a unit of the coefficient ring;
// everything else lies in the maximal ideal (p, vars).
inline bool is_unit(const RingEl& a) { return a.ring().c_is_unit(a.constant_coeff()); }

// Inverse by geometric series on the nilpotent part: a = c(1 + y) with c the
// constant coefficient and y nilpotent, so 1/a = (1 - y + y^2 - ...) / c.
inline RingEl invert(const RingEl& a) {
  const ArtinRing& R = a.ring();
  require(is_unit(a), errc::not_a_unit, "invert: element is not a unit");
  std::uint64_t cinv = R.c_inv(a.constant_coeff());
  RingEl y = ring_sub(ring_scale(a, cinv), R.one());  // nilpotent
  RingEl acc = R.one();
  RingEl pw = R.one();
  for (int guard = 0; !y.is_zero(); ++guard) {
    require(guard < 4096, errc::internal, "invert: series did not terminate");
    pw = ring_mul(pw, ring_neg(y));
    if (pw.is_zero()) break;
    acc = ring_add(acc, pw);
  }
  return ring_scale(acc, cinv);
}

inline RingEl ArtinRing::random(Prng& rng) const {
  std::vector<RingEl::Term> out;
  std::uint64_t q = c_ring_size();
  for (Mono m : d_->basis) {
    std::uint64_t c = c_nth(rng.below(q));
    if (c != 0) out.push_back({m, c});
  }
  return RingEl(*this, std::move(out));
}

inline std::uint64_t ArtinRing::size_u64() const {
  require(d_->log2_size <= 62.0, errc::not_finite, "ring too large to enumerate");
  std::uint64_t q = c_ring_size();
  std::uint64_t s = 1;
  for (std::size_t i = 0; i < d_->basis.size(); ++i) s *= q;
  return s;
}

inline RingEl ArtinRing::nth_element(std::uint64_t idx) const {
  std::uint64_t q = c_ring_size();
  std::vector<RingEl::Term> out;
  for (Mono m : d_->basis) {
    std::uint64_t c = c_nth(idx % q);
    idx /= q;
    if (c != 0) out.push_back({m, c});
  }
  return RingEl(*this, std::move(out));
}

inline ArtinRing ArtinRing::make(const RingSpec& spec) {
  require(detail::is_prime_u64(spec.p), errc::bad_prime, "p must be prime");
  require(spec.N >= 1, errc::bad_prime, "N must be at least 1");
  require(spec.f >= 1, errc::bad_prime, "residue field degree must be positive");
  require(spec.f == 1 || spec.N == 1, errc::bad_prime, "f > 1 is supported only with N = 1");
  require(spec.f <= 7, errc::budget_exceeded, "residue field degree too large");
  require(spec.vars.size() <= 8, errc::budget_exceeded, "at most 8 variables");

  auto d = std::make_shared<RingData>();
  d->p = spec.p;
  d->N = spec.N;
  d->f = spec.f;
  d->pN = detail::pow_u64_checked(spec.p, spec.N);
  require(spec.f == 1 || spec.p < 256, errc::budget_exceeded, "p too large for extension field");
  d->vars = spec.vars;

  // Pack truncation generators and find pure-power bounds.
  d->var_bound.assign(spec.vars.size(), 0);
  for (const auto& ev : spec.trunc) {
    require(ev.size() == spec.vars.size(), errc::parse_error, "truncation exponent arity");
    Mono m = 0;
    unsigned nz = 0, nz_var = 0;
    for (unsigned v = 0; v < ev.size(); ++v) {
      require(ev[v] < 256, errc::budget_exceeded, "truncation exponent too large");
      m = mono_set_exp(m, v, ev[v]);
      if (ev[v] != 0) {
        ++nz;
        nz_var = v;
      }
    }
    require(nz > 0, errc::parse_error, "truncation generator 1 would collapse the ring");
    d->trunc.push_back(m);
    if (nz == 1) {
      unsigned e = ev[nz_var];
      if (d->var_bound[nz_var] == 0 || e < d->var_bound[nz_var]) d->var_bound[nz_var] = e;
    }
  }
  std::sort(d->trunc.begin(), d->trunc.end());
  d->trunc.erase(std::unique(d->trunc.begin(), d->trunc.end()), d->trunc.end());
  for (std::size_t v = 0; v < spec.vars.size(); ++v) {
    require(d->var_bound[v] != 0, errc::non_finite,
            "no pure power of variable '" + spec.vars[v] + "' in the truncation ideal");
  }

  // Enumerate the monomial basis: exponents below the pure-power bound and
  // not divisible by any truncation generator.
  std::vector<unsigned> exps(spec.vars.size(), 0);
  std::vector<Mono> basis;
  auto divisible = [&](Mono m) {
    for (Mono t : d->trunc) {
      bool div = true;
      for (unsigned v = 0; v < spec.vars.size(); ++v)
        if (mono_exp(m, v) < mono_exp(t, v)) {
          div = false;
          break;
        }
      if (div) return true;
    }
    return false;
  };
  for (;;) {
    Mono m = 0;
    for (unsigned v = 0; v < exps.size(); ++v) m = mono_set_exp(m, v, exps[v]);
    if (!divisible(m)) basis.push_back(m);
    require(basis.size() <= 1u << 20, errc::budget_exceeded, "monomial basis too large");
    std::size_t v = 0;
    for (; v < exps.size(); ++v) {
      if (++exps[v] < d->var_bound[v]) break;
      exps[v] = 0;
    }
    if (v == exps.size()) break;
  }
  std::sort(basis.begin(), basis.end());
  d->basis = std::move(basis);
  for (std::size_t i = 0; i < d->basis.size(); ++i) d->basis_index[d->basis[i]] = i;

  if (spec.f > 1) {
    // Deterministic irreducible: the lexicographically least monic polynomial
    // of degree f over F_p with no factor of degree <= f/2.
    unsigned f = spec.f;
    std::uint64_t P = spec.p;
    std::vector<std::uint64_t> cand(f, 0);
    auto poly_mod = [&](std::vector<std::uint64_t> a, const std::vector<std::uint64_t>& m) {
      // m monic of degree dm (coeff list size dm+1)
      std::size_t dm = m.size() - 1;
      while (a.size() > dm) {
        std::uint64_t lead = a.back();
        std::size_t sh = a.size() - 1 - dm;
        if (lead != 0)
          for (std::size_t i = 0; i <= dm; ++i) a[sh + i] = (a[sh + i] + (P - lead % P) * m[i]) % P;
        a.pop_back();
        while (a.size() > dm && a.back() == 0) a.pop_back();
      }
      return a;
    };
    auto is_irreducible = [&](const std::vector<std::uint64_t>& poly) {
      // trial division by every monic polynomial of degree 1..f/2
      for (unsigned deg = 1; deg <= f / 2; ++deg) {
        std::uint64_t count = 1;
        for (unsigned i = 0; i < deg; ++i) count *= P;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
          std::vector<std::uint64_t> div(deg + 1, 0);
          div[deg] = 1;
          std::uint64_t t = idx;
          for (unsigned i = 0; i < deg; ++i) {
            div[i] = t % P;
            t /= P;
          }
          std::vector<std::uint64_t> rem = poly_mod(poly, div);
          bool zero = true;
          for (std::uint64_t c : rem)
            if (c % P != 0) zero = false;
          if (zero) return false;
        }
      }
      return true;
    };
    bool found = false;
    for (;;) {
      std::vector<std::uint64_t> poly = cand;
      poly.push_back(1);  // monic
      if (is_irreducible(poly)) {
        d->conway = cand;
        found = true;
        break;
      }
      unsigned v = 0;
      for (; v < f; ++v) {
        if (++cand[v] < P) break;
        cand[v] = 0;
      }
      if (v == f) break;
    }
    require(found, errc::internal, "no irreducible polynomial found");
  }

  double log2_coeff = spec.f == 1 ? spec.N * std::log2(double(spec.p)) : spec.f * std::log2(double(spec.p));
  d->log2_size = log2_coeff * double(d->basis.size());

  ArtinRing R;
  R.d_ = std::move(d);
  return R;
}

// partial derivative with respect to a variable
inline RingEl ring_derivative(const RingEl& x, unsigned var) {
  const ArtinRing& R = x.ring();
  RingEl out = R.zero();
  for (const auto& t : x.terms()) {
    unsigned e = mono_exp(t.first, var);
    if (e == 0) continue;
    Mono m = mono_set_exp(t.first, var, e - 1);
    std::uint64_t c = R.c_mul(t.second, R.c_from_int(static_cast<long long>(e)));
    if (c != 0 && R.mono_in_basis(m)) out = ring_add(out, R.monomial(m, c));
  }
  return out;
}

// ---- printing ----

inline std::string coeff_to_string(const ArtinRing& R, std::uint64_t c) {
  if (R.f() == 1) return std::to_string(c);
  std::string s;
  bool first = true;
  for (unsigned i = 0; i < R.f(); ++i) {
    std::uint64_t di = (c >> (8 * i)) & 0xffu;
    if (di == 0) continue;
    if (!first) s += "+";
    if (i == 0) {
      s += std::to_string(di);
    } else {
      if (di != 1) s += std::to_string(di);
      s += "g";
      if (i > 1) s += "^" + std::to_string(i);
    }
    first = false;
  }
  if (first) return "0";
  if (s.find('+') != std::string::npos) return "(" + s + ")";
  return s;
}

inline std::string to_string(const RingEl& a) {
  if (a.is_zero()) return "0";
  const ArtinRing& R = a.ring();
  std::string s;
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) s += "+";
    first = false;
    bool printed = false;
    std::string cs = coeff_to_string(R, t.second);
    bool coeff_is_one = cs == "1";
    if (!coeff_is_one || t.first == mono_one()) {
      s += cs;
      printed = true;
    }
    for (unsigned v = 0; v < R.num_vars(); ++v) {
      unsigned e = mono_exp(t.first, v);
      if (e == 0) continue;
      if (printed) s += "*";
      s += R.data().vars[v];
      if (e > 1) s += "^" + std::to_string(e);
      printed = true;
    }
  }
  return s;
}

}  // namespace displib
