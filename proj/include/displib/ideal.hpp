#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "displib/error.hpp"
#include "displib/linalg.hpp"
#include "displib/ring.hpp"

namespace displib {

// Ideals with divided-power structure. Only the structures the theory
// instantiates are supported: the trivial one on square-zero ideals, the
// canonical one on (p), and direct products of those.

enum class PdKind { none, trivial, padic, product };

class Ideal;
using IdealPtr = std::shared_ptr<const Ideal>;

class Ideal {
 public:
  static IdealPtr make(ArtinRing R, std::vector<RingEl> gens, PdKind pd,
                       IdealPtr left = nullptr, IdealPtr right = nullptr) {
    auto I = std::make_shared<Ideal>();
    I->R_ = std::move(R);
    I->gens_ = std::move(gens);
    I->pd_ = pd;
    I->left_ = std::move(left);
    I->right_ = std::move(right);
    I->validate();
    return I;
  }

  static IdealPtr zero(ArtinRing R) { return make(std::move(R), {}, PdKind::trivial); }

  static IdealPtr padic(ArtinRing R) {
    RingEl p = R.from_int(static_cast<long long>(R.p()));
    return make(std::move(R), {p}, PdKind::padic);
  }

  static IdealPtr product_of(IdealPtr a, IdealPtr b) {
    ArtinRing R = a->ring();
    std::vector<RingEl> gens = a->gens();
    for (const auto& g : b->gens()) gens.push_back(g);
    return make(std::move(R), std::move(gens), PdKind::product, std::move(a), std::move(b));
  }

  const ArtinRing& ring() const { return R_; }
  const std::vector<RingEl>& gens() const { return gens_; }
  PdKind pd() const { return pd_; }
  bool has_pd() const { return pd_ != PdKind::none; }
  bool is_zero_ideal() const {
    for (const auto& g : gens_)
      if (!g.is_zero()) return false;
    return true;
  }

  Matrix gen_matrix() const {
    Matrix m(R_, 1, gens_.size());
    for (std::size_t j = 0; j < gens_.size(); ++j) m.at(0, j) = gens_[j];
    return m;
  }

  // membership x in (gens); coefficients returned when requested
  bool contains(const RingEl& x, std::vector<RingEl>* coeffs = nullptr) const {
    if (x.is_zero()) {
      if (coeffs) coeffs->assign(gens_.size(), R_.zero());
      return true;
    }
    if (gens_.empty()) return false;
    auto res = solve_linear(gen_matrix(), {x});
    if (!res.solvable) return false;
    if (coeffs) *coeffs = res.x;
    return true;
  }

  void expect_member(const RingEl& x) const {
    require(contains(x), errc::not_in_ideal, "element not in the ideal: " + to_string(x));
  }

  // gamma_m. p-adic case: x = p y, gamma_m(x) = (p^m / m!) y^m with the
  // rational constant reduced exactly; trivial case vanishes for m >= 2;
  // products use gamma_m(a+b) = sum gamma_i(a) gamma_{m-i}(b).
  RingEl gamma(unsigned m, const RingEl& x) const {
    require(has_pd(), errc::no_pd, "ideal carries no divided powers");
    expect_member(x);
    return gamma_unchecked(m, x);
  }

  // Generators of the n-th divided power ideal. For the supported kinds:
  // trivial: ordinary power; p-adic: products of gamma's of p; product:
  // mixed products across the two factors.
  std::vector<RingEl> divided_power_ideal_gens(unsigned n) const {
    require(has_pd(), errc::no_pd, "ideal carries no divided powers");
    if (n == 0) return {R_.one()};
    std::vector<RingEl> out;
    switch (pd_) {
      case PdKind::trivial: {
        // gamma_{>=2} = 0, so a^[n] = a^n
        out = power_gens(n);
        break;
      }
      case PdKind::padic: {
        // gamma_m(p) = p^(m - v_p(m!)) * unit and products of gammas are
        // integer multiples of a single gamma, so the n-th divided ideal is
        // principal on the least such power over m >= n. For p = 2 that
        // minimum is s_2(m) = 1 at powers of two: the filtration never dies.
        unsigned best = R_.N();
        if (R_.p() == 2) {
          best = 1;
        } else {
          std::uint64_t p = R_.p();
          unsigned limit = n + static_cast<unsigned>(p - 1) * (R_.N() + 2);
          unsigned vfact = 0;
          for (unsigned m = 1; m <= limit; ++m) {
            std::uint64_t t = m;
            while (t % p == 0) {
              t /= p;
              ++vfact;
            }
            if (m >= n) {
              unsigned val = m >= vfact ? m - vfact : 0;
              if (val < best) best = val;
            }
          }
        }
        if (best < R_.N()) {
          std::uint64_t c = R_.c_one();
          for (unsigned i = 0; i < best; ++i)
            c = R_.c_mul(c, R_.c_from_int(static_cast<long long>(R_.p())));
          if (c != 0) out.push_back(R_.from_coeff(c));
        }
        break;
      }
      case PdKind::product: {
        for (unsigned i = 0; i <= n; ++i) {
          auto lg = i == 0 ? std::vector<RingEl>{R_.one()} : left_->divided_power_ideal_gens(i);
          auto rg = (n - i) == 0 ? std::vector<RingEl>{R_.one()}
                                 : right_->divided_power_ideal_gens(n - i);
          for (const auto& a : lg)
            for (const auto& b : rg) {
              RingEl g = ring_mul(a, b);
              if (!g.is_zero()) out.push_back(g);
            }
        }
        break;
      }
      case PdKind::none:
        break;
    }
    return out;
  }

  // The divided-power filtration is nilpotent iff some a^[n] = 0.
  // Returns the least such n (within the probe bound), or nullopt.
  std::optional<unsigned> pd_nilpotence_order(unsigned bound = 16) const {
    for (unsigned n = 1; n <= bound; ++n) {
      auto g = divided_power_ideal_gens(n);
      bool all_zero = true;
      for (const auto& e : g)
        if (!e.is_zero()) all_zero = false;
      if (all_zero) return n;
    }
    return std::nullopt;
  }

  // Enumerate the ideal as a set (guarded by size).
  std::vector<RingEl> enumerate(std::uint64_t cap = 1u << 16) const {
    std::vector<RingEl> span_gens;
    for (const auto& g : gens_)
      for (Mono m : R_.data().basis) {
        RingEl e = ring_mul(g, R_.monomial(m, R_.c_one()));
        if (!e.is_zero()) span_gens.push_back(e);
      }
    // additive closure over coefficient multiples
    std::vector<RingEl> elems{R_.zero()};
    std::vector<std::string> seen{R_.zero().key()};
    for (std::size_t head = 0; head < elems.size(); ++head) {
      for (const auto& g : span_gens) {
        RingEl cand = ring_add(elems[head], g);
        std::string k = cand.key();
        if (std::find(seen.begin(), seen.end(), k) == seen.end()) {
          require(elems.size() < cap, errc::not_finite, "ideal too large to enumerate");
          seen.push_back(k);
          elems.push_back(cand);
        }
      }
    }
    std::sort(elems.begin(), elems.end());
    return elems;
  }

  // internal: gamma without the membership check (callers verified it)
  RingEl gamma_unchecked(unsigned m, const RingEl& x) const {
    if (m == 0) return R_.one();
    if (m == 1) return x;
    switch (pd_) {
      case PdKind::trivial:
        return R_.zero();
      case PdKind::padic: {
        // x = p y; divide every coefficient by p
        RingEl y = divide_by_p(x);
        return ring_scale(ring_pow(y, m), rational_p_power_coeff(m, m));
      }
      case PdKind::product: {
        // split x = a + b with a in left, b in right
        RingEl a, b;
        split_product(x, a, b);
        RingEl acc = R_.zero();
        for (unsigned i = 0; i <= m; ++i) {
          RingEl la = left_->gamma_unchecked(i, a);
          RingEl rb = right_->gamma_unchecked(m - i, b);
          acc = ring_add(acc, ring_mul(la, rb));
        }
        return acc;
      }
      case PdKind::none:
        break;
    }
    fail(errc::no_pd, "gamma on ideal without divided powers");
  }

  // (p^a / m!) reduced in the coefficient ring; the p-valuation of the
  // rational is checked to be nonnegative (hard error otherwise).
  std::uint64_t rational_p_power_coeff(unsigned a, unsigned m) const {
    std::uint64_t p = R_.p();
    unsigned vfact = 0;
    std::uint64_t ufact = R_.c_one();
    for (unsigned i = 2; i <= m; ++i) {
      std::uint64_t t = i;
      while (t % p == 0) {
        t /= p;
        ++vfact;
      }
      ufact = R_.c_mul(ufact, R_.c_from_int(static_cast<long long>(t)));
    }
    require(a >= vfact, errc::internal, "negative p-valuation in divided power constant");
    unsigned e = a - vfact;
    std::uint64_t c = R_.c_one();
    for (unsigned i = 0; i < e; ++i) {
      c = R_.c_mul(c, R_.c_from_int(static_cast<long long>(p)));
      if (c == 0) return 0;
    }
    return R_.c_mul(c, R_.c_inv(ufact));
  }

  void validate() const {
    for (const auto& g : gens_) {
      require(g.ring().same_ring(R_), errc::parent_mismatch, "ideal generator ring");
      require(!is_unit(g), errc::not_in_ideal, "ideal generator must lie in the maximal ideal");
    }
    switch (pd_) {
      case PdKind::trivial:
        for (const auto& a : gens_)
          for (const auto& b : gens_)
            require(ring_mul(a, b).is_zero(), errc::no_pd,
                    "trivial divided powers need a square-zero ideal");
        break;
      case PdKind::padic: {
        require(gens_.size() == 1 && gens_.front() == R_.from_int(static_cast<long long>(R_.p())),
                errc::no_pd, "canonical divided powers require generators {p}");
        break;
      }
      case PdKind::product:
        require(left_ && right_, errc::no_pd, "product divided powers need two factors");
        require(left_->ring().same_ring(R_) && right_->ring().same_ring(R_),
                errc::parent_mismatch, "product factors over a different ring");
        break;
      case PdKind::none:
        break;
    }
  }

 private:
  RingEl divide_by_p(const RingEl& x) const {
    // valid for f = 1 (the canonical structure lives on (p) in Z/p^N rings)
    require(R_.f() == 1, errc::no_pd, "canonical divided powers need Z/p^N coefficients");
    std::vector<RingEl::Term> out;
    for (const auto& t : x.terms()) {
      require(t.second % R_.p() == 0, errc::not_in_ideal, "element not divisible by p");
      std::uint64_t c = t.second / R_.p();
      if (c != 0) out.push_back({t.first, c});
    }
    return RingEl(R_, std::move(out));
  }

  void split_product(const RingEl& x, RingEl& a, RingEl& b) const {
    std::vector<RingEl> lg = left_->gens(), rg = right_->gens();
    Matrix m(R_, 1, lg.size() + rg.size());
    for (std::size_t j = 0; j < lg.size(); ++j) m.at(0, j) = lg[j];
    for (std::size_t j = 0; j < rg.size(); ++j) m.at(0, lg.size() + j) = rg[j];
    auto res = solve_linear(m, {x});
    require(res.solvable, errc::not_in_ideal, "element not in the product ideal");
    a = R_.zero();
    b = R_.zero();
    for (std::size_t j = 0; j < lg.size(); ++j) a = ring_add(a, ring_mul(res.x[j], lg[j]));
    for (std::size_t j = 0; j < rg.size(); ++j)
      b = ring_add(b, ring_mul(res.x[lg.size() + j], rg[j]));
  }

  std::vector<RingEl> power_gens(unsigned n) const {
    // products of n generators
    std::vector<RingEl> cur{R_.one()};
    for (unsigned k = 0; k < n; ++k) {
      std::vector<RingEl> next;
      for (const auto& c : cur)
        for (const auto& g : gens_) {
          RingEl e = ring_mul(c, g);
          if (!e.is_zero()) next.push_back(e);
        }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      cur = std::move(next);
      if (cur.empty()) break;
    }
    return cur;
  }

  ArtinRing R_;
  std::vector<RingEl> gens_;
  PdKind pd_ = PdKind::none;
  IdealPtr left_, right_;
};

inline RingEl pd_gamma(const IdealPtr& I, unsigned m, const RingEl& x) { return I->gamma(m, x); }

}  // namespace displib
