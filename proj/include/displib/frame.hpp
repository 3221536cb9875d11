#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "displib/error.hpp"
#include "displib/ideal.hpp"
#include "displib/ringhom.hpp"
#include "displib/witt.hpp"

namespace displib {

// Relative Witt frame W_{S/R} = (W(S), J, R, sigma, sigma-dot) at finite Witt
// precision, with its Verjuengung. J = ker(W(S) -> S -> R) splits as the
// embedded ideal plus the image of V, so J-elements are stored as canonical
// pairs (a, xi) meaning embed(a) + V(xi):
//   sigma-dot (a, xi) = xi          nu((a1,x1),(a2,x2)) = (a1 a2, x1 x2)
//   pi (a, xi) = (a, p xi)          w . (a, xi) = (w_0 a, F(w) xi)
// Setting a = 0 recovers the absolute frame W_S.

struct JEl {
  RingEl a;    // component in the kernel ideal of S ->> R
  WittEl xi;   // in W_{prec-1}(S)

  bool is_zero() const { return a.is_zero() && xi.is_zero(); }
  std::string key() const { return a.key() + "#" + xi.key(); }
};

struct FrameData {
  ArtinRing S, R;
  RingHom proj;   // S ->> R
  IdealPtr aI;    // kernel ideal, with divided powers
  unsigned prec = 2;
  bool relative = false;  // false: a = 0 (absolute Witt frame)
};

class Frame {
 public:
  Frame() = default;

  static Frame witt(const ArtinRing& S, unsigned prec) {
    require(prec >= 2, errc::insufficient_precision, "frame precision must be at least 2");
    auto d = std::make_shared<FrameData>();
    d->S = S;
    d->R = S;
    d->proj = RingHom::identity(S);
    d->aI = Ideal::zero(S);
    d->prec = prec;
    d->relative = false;
    Frame f;
    f.d_ = std::move(d);
    return f;
  }

  static Frame relative(const RingHom& alpha, const IdealPtr& aI, unsigned prec) {
    require(prec >= 2, errc::insufficient_precision, "frame precision must be at least 2");
    require(aI->ring().same_ring(alpha.src()), errc::parent_mismatch,
            "ideal must live in the source of the surjection");
    require(aI->has_pd(), errc::no_pd, "relative frame needs divided powers on the kernel");
    require(alpha.is_surjective(), errc::kernel_mismatch, "alpha must be surjective");
    require(alpha.kernel_equals(aI), errc::kernel_mismatch,
            "the ideal does not equal ker(alpha)");
    // a nilpotent mod pS holds for artinian local sources: every generator is
    // in the maximal ideal and the ring is finite; validated structurally.
    auto d = std::make_shared<FrameData>();
    d->S = alpha.src();
    d->R = alpha.dst();
    d->proj = alpha;
    d->aI = aI;
    d->prec = prec;
    d->relative = true;
    Frame f;
    f.d_ = std::move(d);
    return f;
  }

  const FrameData& data() const { return *d_; }
  const ArtinRing& S() const { return d_->S; }
  const ArtinRing& R() const { return d_->R; }
  const RingHom& proj() const { return d_->proj; }
  const IdealPtr& ideal() const { return d_->aI; }
  unsigned prec() const { return d_->prec; }
  unsigned xi_prec() const { return d_->prec - 1; }
  std::uint64_t p() const { return d_->S.p(); }
  bool valid() const { return d_ != nullptr; }

  bool same_frame(const Frame& o) const {
    if (d_ == o.d_) return true;
    if (!d_ || !o.d_) return false;
    if (!d_->S.same_ring(o.d_->S) || !d_->R.same_ring(o.d_->R) || d_->prec != o.d_->prec)
      return false;
    return d_->aI->gens() == o.d_->aI->gens();
  }

  // ---- W-level helpers ----
  WittEl w_zero() const { return witt_zero(d_->S, d_->prec); }
  WittEl w_one() const { return witt_one(d_->S, d_->prec); }
  WittEl w_from_int(long long v) const { return witt_from_int(d_->S, d_->prec, v); }
  WittEl w_random(Prng& rng) const {
    WittEl w = w_zero();
    for (unsigned i = 0; i < d_->prec; ++i) w.c[i] = d_->S.random(rng);
    return w;
  }
  WittEl sigma(const WittEl& w) const { return frobenius(w); }
  RingEl to_R(const WittEl& w) const { return d_->proj.apply(w.c[0]); }

  // ---- J-level structure ----
  JEl j_zero() const { return JEl{d_->S.zero(), witt_zero(d_->S, xi_prec())}; }

  JEl j_make(const RingEl& a, const WittEl& xi) const {
    d_->aI->expect_member(a);
    require(xi.prec() == xi_prec(), errc::insufficient_precision, "xi precision mismatch");
    return JEl{a, xi};
  }

  JEl j_v(const WittEl& xi) const { return JEl{d_->S.zero(), witt_truncate(xi, xi_prec())}; }

  WittEl j_to_witt(const JEl& j) const {
    WittEl em = ideal_embed(j.a, d_->aI, d_->prec);
    return witt_add(em, verschiebung(j.xi));
  }

  // decompose a Witt vector lying in J into its canonical pair
  JEl j_from_witt(const WittEl& w) const {
    require(w.prec() >= d_->prec, errc::insufficient_precision, "element precision too low");
    WittEl ww = witt_truncate(w, d_->prec);
    RingEl a = ww.c[0];
    d_->aI->expect_member(a);
    WittEl rest = witt_sub(ww, ideal_embed(a, d_->aI, d_->prec));
    require(rest.c[0].is_zero(), errc::internal, "J-decomposition failed");
    WittEl xi = witt_zero(d_->S, xi_prec());
    for (unsigned i = 0; i + 1 < d_->prec; ++i) xi.c[i] = rest.c[i + 1];
    return JEl{a, xi};
  }

  JEl j_add(const JEl& x, const JEl& y) const {
    return JEl{ring_add(x.a, y.a), witt_add(x.xi, y.xi)};
  }
  JEl j_neg(const JEl& x) const { return JEl{ring_neg(x.a), witt_neg(x.xi)}; }

  // module action of W(S): w . (a, xi) = (w_0 a, F(w) xi)
  JEl j_smul(const WittEl& w, const JEl& x) const {
    return JEl{ring_mul(w.c[0], x.a), witt_mul(sigma(w), x.xi)};
  }

  // ideal product inside W(S): (a1 + V x1)(a2 + V x2) = a1 a2 + V(p x1 x2)
  JEl j_mul(const JEl& x, const JEl& y) const {
    WittEl p_xi = witt_mul(witt_from_int(d_->S, xi_prec(), static_cast<long long>(p())),
                           witt_mul(x.xi, y.xi));
    return JEl{ring_mul(x.a, y.a), p_xi};
  }

  WittEl sigma_dot(const JEl& x) const { return x.xi; }

  JEl nu(const JEl& x, const JEl& y) const {
    return JEl{ring_mul(x.a, y.a), witt_mul(x.xi, y.xi)};
  }

  JEl pi(const JEl& x) const {
    return JEl{x.a, witt_mul(witt_from_int(d_->S, xi_prec(), static_cast<long long>(p())), x.xi)};
  }

  bool j_eq(const JEl& x, const JEl& y) const { return x.a == y.a && witt_eq(x.xi, y.xi); }

  // W-module generators of J: the ideal generators and V^k of Teichmueller
  // monomials (the graded pieces of the V-filtration).
  std::vector<JEl> j_gens() const {
    std::vector<JEl> gens;
    for (const auto& g : d_->aI->gens())
      if (!g.is_zero()) gens.push_back(JEl{g, witt_zero(d_->S, xi_prec())});
    for (unsigned k = 0; k < xi_prec(); ++k) {
      for (Mono m : d_->S.data().basis) {
        WittEl t = teichmuller(d_->S.monomial(m, d_->S.c_one()), xi_prec() - k);
        for (unsigned i = 0; i < k; ++i) t = verschiebung(t);
        gens.push_back(JEl{d_->S.zero(), t});
      }
    }
    return gens;
  }

  JEl j_random(Prng& rng) const {
    JEl j = j_zero();
    for (unsigned i = 0; i < xi_prec(); ++i) j.xi.c[i] = d_->S.random(rng);
    if (!d_->aI->gens().empty()) {
      RingEl a = d_->S.zero();
      for (const auto& g : d_->aI->gens()) a = ring_add(a, ring_mul(d_->S.random(rng), g));
      j.a = a;
    }
    return j;
  }

  // p-th root in the residue field F_{p^f}: x -> x^(p^(f-1))
  std::uint64_t c_pow_pf1(std::uint64_t c) const {
    std::uint64_t e = 1;
    for (unsigned s = 0; s + 1 < d_->S.f(); ++s) e *= d_->S.p();
    std::uint64_t out = d_->S.c_one(), b = c;
    while (e) {
      if (e & 1u) out = d_->S.c_mul(out, b);
      b = d_->S.c_mul(b, b);
      e >>= 1u;
    }
    return out;
  }

  // V-graded successive approximation: write xi as a sum of F(w) * V^l([m]).
  // Integer coefficients are Frobenius-fixed, so emitting the level-l digits
  // strips that level exactly and the residual descends strictly in V-depth.
  struct XiTerm {
    unsigned level;
    std::size_t mono_index;
    WittEl w;  // coefficient, acting through sigma
  };
  std::vector<XiTerm> xi_express(const WittEl& xi_in) const {
    std::vector<XiTerm> combo;
    const auto& basis = d_->S.data().basis;
    WittEl rest = xi_in;
    for (int guard = 0; !rest.is_zero(); ++guard) {
      require(guard <= static_cast<int>(xi_prec()), errc::internal,
              "V-graded expression did not terminate");
      unsigned lvl = 0;
      while (rest.c[lvl].is_zero()) ++lvl;
      std::size_t first_new = combo.size();
      for (const auto& t : rest.c[lvl].terms()) {
        std::size_t mi = d_->S.data().basis_index.at(t.first);
        WittEl w = w_zero();
        if (d_->S.f() == 1) {
          w = w_from_int(static_cast<long long>(t.second));
        } else {
          // extension field: (l+1)-fold p-th root, so one Frobenius plus the
          // l-fold twist under V lands back on the coefficient itself
          std::uint64_t root = t.second;
          for (unsigned r = 0; r <= lvl; ++r) root = c_pow_pf1(root);
          w = teichmuller(d_->S.from_coeff(root), d_->prec);
        }
        combo.push_back({lvl, mi, w});
      }
      WittEl acc = witt_zero(d_->S, xi_prec());
      for (std::size_t c = first_new; c < combo.size(); ++c) {
        WittEl gen = teichmuller(d_->S.monomial(basis[combo[c].mono_index], d_->S.c_one()),
                                 xi_prec() - combo[c].level);
        for (unsigned i = 0; i < combo[c].level; ++i) gen = verschiebung(gen);
        acc = witt_add(acc, witt_mul(sigma(combo[c].w), gen));
      }
      rest = witt_sub(rest, acc);
      bool lower_ok = true;
      for (unsigned i = 0; i <= lvl && i < xi_prec(); ++i)
        if (!rest.c[i].is_zero()) lower_ok = false;
      require(lower_ok, errc::internal, "V-graded approximation did not descend");
    }
    return combo;
  }

  // express a J-element over j_gens(): ideal-membership certificate for the
  // a-part plus the V-graded expression of the xi-part
  std::vector<std::pair<std::size_t, WittEl>> j_express(const JEl& x) const {
    std::vector<std::pair<std::size_t, WittEl>> combo;
    const auto& agens = d_->aI->gens();
    std::size_t n_agens = 0;
    for (const auto& g : agens)
      if (!g.is_zero()) ++n_agens;
    if (!x.a.is_zero()) {
      std::vector<RingEl> coeffs;
      require(d_->aI->contains(x.a, &coeffs), errc::not_in_ideal, "a-part not in the ideal");
      std::size_t idx = 0;
      for (std::size_t g = 0; g < agens.size(); ++g) {
        if (agens[g].is_zero()) continue;
        if (!coeffs[g].is_zero()) combo.push_back({idx, teichmuller(coeffs[g], d_->prec)});
        ++idx;
      }
    }
    const auto& basis = d_->S.data().basis;
    for (const auto& t : xi_express(x.xi))
      combo.push_back({n_agens + t.level * basis.size() + t.mono_index, t.w});
    return combo;
  }

  // theta derived per the frame axioms: pick b with sigma-dot(b) = 1 (b =
  // V(1)) and return sigma(b); the standing assumption theta = p is asserted
  // by the checker, not here.
  WittEl theta() const { return sigma(verschiebung(witt_one(d_->S, xi_prec()))); }

 private:
  std::shared_ptr<const FrameData> d_;
};

// ---- iterated Verjuengung: generators of J_k with their nu-factorizations ----

struct JPowerGen {
  JEl value;
  std::vector<JEl> factors;  // value = nu(factors[0], nu(factors[1], ...))
};

inline std::vector<JPowerGen> j_power_gens(const Frame& F, unsigned k) {
  require(k >= 1, errc::internal, "J_k needs k >= 1");
  std::vector<JPowerGen> cur;
  for (const auto& g : F.j_gens()) cur.push_back({g, {g}});
  for (unsigned step = 1; step < k; ++step) {
    std::vector<JPowerGen> next;
    std::vector<std::string> seen;
    for (const auto& g : F.j_gens()) {
      for (const auto& h : cur) {
        JEl v = F.nu(g, h.value);
        if (v.is_zero()) continue;
        std::string key = v.key();
        bool dup = false;
        for (const auto& s : seen)
          if (s == key) dup = true;
        if (dup) continue;
        seen.push_back(key);
        JPowerGen ng;
        ng.value = v;
        ng.factors.push_back(g);
        for (const auto& f : h.factors) ng.factors.push_back(f);
        next.push_back(std::move(ng));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// membership of a J-element in the span of J_k (a-part in the k-th ideal
// power, xi-part unconstrained: the V-side of J_k is all of I_S)
inline bool j_power_contains(const Frame& F, unsigned k, const JEl& x) {
  if (k <= 1) return true;
  // a in (ideal gens)^k
  std::vector<RingEl> pk{F.S().one()};
  for (unsigned i = 0; i < k; ++i) {
    std::vector<RingEl> next;
    for (const auto& c : pk)
      for (const auto& g : F.ideal()->gens()) {
        RingEl e = ring_mul(c, g);
        if (!e.is_zero()) next.push_back(e);
      }
    pk = std::move(next);
    if (pk.empty()) break;
  }
  if (x.a.is_zero()) return true;
  if (pk.empty()) return false;
  Matrix m(F.S(), 1, pk.size());
  for (std::size_t j = 0; j < pk.size(); ++j) m.at(0, j) = pk[j];
  return solve_linear(m, {x.a}).solvable;
}

}  // namespace displib
