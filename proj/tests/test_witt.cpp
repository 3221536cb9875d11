#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "displib/ideal.hpp"
#include "displib/prng.hpp"
#include "displib/witt.hpp"
#include "displib/wittpoly.hpp"

using namespace displib;

namespace {

ArtinRing z_mod(std::uint64_t p, unsigned N) { return ArtinRing::make({p, N, 1, {}, {}}); }

ArtinRing fp_t(std::uint64_t p, unsigned N, unsigned m) {
  return ArtinRing::make({p, N, 1, {"t"}, {{m}}});
}

WittEl mk(const ArtinRing& R, std::vector<long long> comps) {
  WittEl w = witt_zero(R, static_cast<unsigned>(comps.size()));
  for (std::size_t i = 0; i < comps.size(); ++i) w.c[i] = R.from_int(comps[i]);
  return w;
}

WittEl random_witt(const ArtinRing& R, unsigned prec, Prng& rng) {
  WittEl w = witt_zero(R, prec);
  for (unsigned i = 0; i < prec; ++i) w.c[i] = R.random(rng);
  return w;
}

// Independent oracle: lift componentwise to Z/p^(N+n) coefficients, add or
// multiply ghost vectors there, then recover Witt coordinates by the inverse
// ghost recursion with exact integer division and reduce back mod p^N.
struct GhostLift {
  ArtinRing small, big;
  unsigned extra;

  static GhostLift make(const ArtinRing& R, unsigned n) {
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
    return GhostLift{R, ArtinRing::make(spec), n};
  }

  RingEl lift(const RingEl& x) const {
    RingEl out = big.zero();
    for (const auto& t : x.terms())
      out = ring_add(out, big.monomial(t.first, t.second));  // same residue value
    return out;
  }
  RingEl reduce(const RingEl& x) const {
    RingEl out = small.zero();
    for (const auto& t : x.terms()) {
      std::uint64_t c = t.second % small.data().pN;
      if (c) out = ring_add(out, small.monomial(t.first, c));
    }
    return out;
  }
  RingEl divide_exact(const RingEl& x, std::uint64_t d) const {
    RingEl out = big.zero();
    for (const auto& t : x.terms()) {
      REQUIRE(t.second % d == 0);
      if (t.second / d) out = ring_add(out, big.monomial(t.first, t.second / d));
    }
    return out;
  }

  std::vector<RingEl> ghost_of_lift(const WittEl& a) const {
    WittEl la = witt_zero(big, a.prec());
    for (unsigned i = 0; i < a.prec(); ++i) la.c[i] = lift(a.c[i]);
    return ghost(la);
  }

  WittEl from_ghost(std::vector<RingEl> g) const {
    // S_i = (g_i - sum_{j<i} p^j S_j^{p^{i-j}}) / p^i over the lift ring
    std::vector<RingEl> comps;
    RingEl p_el = big.from_int(static_cast<long long>(big.p()));
    for (unsigned i = 0; i < g.size(); ++i) {
      RingEl acc = g[i];
      for (unsigned j = 0; j < i; ++j) {
        unsigned e = 1;
        for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(big.p());
        acc = ring_sub(acc, ring_mul(ring_pow(p_el, j), ring_pow(comps[j], e)));
      }
      std::uint64_t pi = 1;
      for (unsigned k = 0; k < i; ++k) pi *= big.p();
      comps.push_back(divide_exact(acc, pi));
    }
    WittEl out = witt_zero(small, static_cast<unsigned>(g.size()));
    for (unsigned i = 0; i < g.size(); ++i) out.c[i] = reduce(comps[i]);
    return out;
  }

  WittEl oracle_add(const WittEl& a, const WittEl& b) const {
    auto ga = ghost_of_lift(a), gb = ghost_of_lift(b);
    std::vector<RingEl> g;
    for (std::size_t i = 0; i < ga.size(); ++i) g.push_back(ring_add(ga[i], gb[i]));
    return from_ghost(g);
  }
  WittEl oracle_mul(const WittEl& a, const WittEl& b) const {
    auto ga = ghost_of_lift(a), gb = ghost_of_lift(b);
    std::vector<RingEl> g;
    for (std::size_t i = 0; i < ga.size(); ++i) g.push_back(ring_mul(ga[i], gb[i]));
    return from_ghost(g);
  }
};

// symbolic ghost of the structure polynomials: check w_i(G) == target_i
void check_ghost_identity(std::uint64_t p, unsigned n) {
  auto polys = witt_structure_polys(p, n);
  const std::size_t budget = 4u << 20;
  for (unsigned i = 0; i < n; ++i) {
    // w_i applied to the S-polynomials (variables substituted)
    std::vector<IntPoly> svals, pvals, nvals;
    for (unsigned j = 0; j < n; ++j) {
      svals.push_back(polys->sum[j]);
      pvals.push_back(polys->prod[j]);
      nvals.push_back(polys->neg[j]);
    }
    IntPoly wx = wittdetail::ghost_poly(p, i, 0);
    IntPoly wy = wittdetail::ghost_poly(p, i, n);
    CHECK(wx.substitute(svals, budget) == wx + wy);
    CHECK(wx.substitute(pvals, budget) == wx * wy);
    CHECK(wx.substitute(nvals, budget) == wx.negated());
    if (i + 1 < n) {
      std::vector<IntPoly> fvals;
      for (unsigned j = 0; j + 1 < n; ++j) fvals.push_back(polys->frob[j]);
      IntPoly wi = wittdetail::ghost_poly(p, i, 0);
      CHECK(wi.substitute(fvals, budget) == wittdetail::ghost_poly(p, i + 1, 0));
    }
  }
}

}  // namespace

TEST_CASE("structure polynomial examples") {
  auto w22 = witt_structure_polys(2, 2);
  IntPoly x0 = IntPoly::variable(0), x1 = IntPoly::variable(1);
  IntPoly y0 = IntPoly::variable(2), y1 = IntPoly::variable(3);
  CHECK(w22->sum[0] == x0 + y0);
  CHECK(w22->sum[1] == x1 + y1 - x0 * y0);
  auto w31 = witt_structure_polys(3, 1);
  CHECK(w31->sum[0] == IntPoly::variable(0) + IntPoly::variable(1));
  CHECK(w31->prod[0] == IntPoly::variable(0) * IntPoly::variable(1));
  auto w32 = witt_structure_polys(3, 2);
  IntPoly yy0 = IntPoly::variable(2), yy1 = IntPoly::variable(3);
  CHECK(w32->sum[1] == x1 + yy1 - (x0.pow(2, 1000) * yy0 + x0 * yy0.pow(2, 1000)));
  // Frobenius universal polynomial: F_0 = x_0^p + p x_1
  auto f2 = witt_structure_polys(2, 2);
  CHECK(f2->frob[0] == x0 * x0 + x1.scaled(BigInt(2)));
}

TEST_CASE("ghost identities hold symbolically") {
  check_ghost_identity(2, 3);
  check_ghost_identity(3, 3);
  check_ghost_identity(5, 2);
}

TEST_CASE("ghost shift identity for V, symbolically") {
  // ghost(V(x))_i = p * w_{i-1}(x) and ghost(V(x))_0 = 0
  for (std::uint64_t p : {2ull, 3ull}) {
    unsigned n = 3;
    for (unsigned i = 0; i < n; ++i) {
      // substitute (0, x_0, .., x_{n-2}) into w_i
      std::vector<IntPoly> shifted;
      shifted.push_back(IntPoly());
      for (unsigned j = 0; j + 1 < n; ++j) shifted.push_back(IntPoly::variable(j));
      IntPoly wi = wittdetail::ghost_poly(p, i, 0);
      IntPoly got = wi.substitute(shifted, 1u << 20);
      if (i == 0) {
        CHECK(got.is_zero());
      } else {
        CHECK(got == wittdetail::ghost_poly(p, i - 1, 0).scaled(BigInt((long long)p)));
      }
    }
  }
}

TEST_CASE("Teichmuller ghost components") {
  // ghost([a]) = (a, a^p, a^(p^2), ...)
  for (auto R : {z_mod(2, 2), fp_t(3, 1, 2)}) {
    Prng rng(19);
    for (int i = 0; i < 20; ++i) {
      RingEl a = R.random(rng);
      auto g = ghost(teichmuller(a, 3));
      unsigned e = 1;
      for (unsigned k = 0; k < 3; ++k) {
        CHECK(g[k] == ring_pow(a, e));
        e *= static_cast<unsigned>(R.p());
      }
    }
  }
}

TEST_CASE("Witt arithmetic examples over Z/4") {
  ArtinRing z4 = z_mod(2, 2);
  WittEl one = mk(z4, {1, 0});
  WittEl two = witt_add(one, one);
  CHECK(two.c[0] == z4.from_int(2));
  CHECK(two.c[1] == z4.from_int(3));  // S_1 = -1 = 3 mod 4
  // ghost((1,1)) = (1, 3)
  WittEl e = mk(z4, {1, 1});
  auto g = ghost(e);
  CHECK(g[0] == z4.one());
  CHECK(g[1] == z4.from_int(3));
  // F((0,1)) = 2 in W_1
  WittEl v1 = mk(z4, {0, 1});
  WittEl f = frobenius(v1);
  CHECK(f.prec() == 1);
  CHECK(f.c[0] == z4.from_int(2));
}

TEST_CASE("additive identity, Teichmuller multiplicativity") {
  for (auto R : {z_mod(2, 2), fp_t(3, 1, 2)}) {
    Prng rng(23);
    for (int i = 0; i < 30; ++i) {
      WittEl x = random_witt(R, 3, rng);
      CHECK(witt_eq(witt_add(x, witt_zero(R, 3)), x));
      RingEl a = R.random(rng), b = R.random(rng);
      CHECK(witt_eq(witt_mul(teichmuller(a, 3), teichmuller(b, 3)),
                    teichmuller(ring_mul(a, b), 3)));
    }
  }
}

TEST_CASE("arithmetic matches the ghost-lift oracle") {
  for (auto R : {z_mod(2, 2), z_mod(2, 3), z_mod(3, 2), fp_t(2, 1, 2), fp_t(3, 1, 2)}) {
    for (unsigned n : {2u, 3u}) {
      GhostLift lift = GhostLift::make(R, n);
      Prng rng(101 + n);
      std::uint64_t sz = R.size_u64();
      bool exhaustive = sz <= 4 && n == 2;
      if (exhaustive) {
        for (std::uint64_t a0 = 0; a0 < sz; ++a0)
          for (std::uint64_t a1 = 0; a1 < sz; ++a1)
            for (std::uint64_t b0 = 0; b0 < sz; ++b0)
              for (std::uint64_t b1 = 0; b1 < sz; ++b1) {
                WittEl a{R, {R.nth_element(a0), R.nth_element(a1)}};
                WittEl b{R, {R.nth_element(b0), R.nth_element(b1)}};
                CHECK(witt_eq(witt_add(a, b), lift.oracle_add(a, b)));
                CHECK(witt_eq(witt_mul(a, b), lift.oracle_mul(a, b)));
              }
      } else {
        for (int rep = 0; rep < 60; ++rep) {
          WittEl a = random_witt(R, n, rng), b = random_witt(R, n, rng);
          CHECK(witt_eq(witt_add(a, b), lift.oracle_add(a, b)));
          CHECK(witt_eq(witt_mul(a, b), lift.oracle_mul(a, b)));
          CHECK(witt_eq(witt_neg(a), lift.from_ghost([&] {
            auto ga = lift.ghost_of_lift(a);
            for (auto& x : ga) x = ring_neg(x);
            return ga;
          }())));
        }
      }
    }
  }
}

TEST_CASE("Frobenius, Verschiebung and their relations") {
  for (auto R : {z_mod(2, 2), fp_t(2, 1, 2), fp_t(3, 1, 2)}) {
    Prng rng(31);
    unsigned n = 3;
    WittEl p_w = witt_from_int(R, n, static_cast<long long>(R.p()));
    for (int i = 0; i < 40; ++i) {
      WittEl x = random_witt(R, n, rng), y = random_witt(R, n, rng);
      // F(V(x)) = p x
      CHECK(witt_eq(frobenius(verschiebung(x)), witt_mul(p_w, x)));
      // F is a ring homomorphism
      CHECK(witt_eq(frobenius(witt_add(x, y)), witt_add(frobenius(x), frobenius(y))));
      CHECK(witt_eq(frobenius(witt_mul(x, y)), witt_mul(frobenius(x), frobenius(y))));
      // V is additive
      CHECK(witt_eq(verschiebung(witt_add(x, y)), witt_add(verschiebung(x), verschiebung(y))));
      // x V(y) = V(F(x) y)
      CHECK(witt_eq(witt_mul(x, verschiebung(witt_truncate(y, n - 1))),
                    verschiebung(witt_mul(frobenius(x), witt_truncate(y, n - 1)))));
    }
    CHECK(verschiebung(teichmuller(R.zero(), 2)).is_zero());
  }
}

TEST_CASE("sigma(a) = a^p mod pW on small rings") {
  // membership in pW tested against the enumerated image of multiplication by p
  for (auto R : {z_mod(2, 2), fp_t(2, 1, 2)}) {
    unsigned n = 2;
    std::uint64_t sz = R.size_u64();
    std::vector<std::string> pW;
    WittEl p_w = witt_from_int(R, n, static_cast<long long>(R.p()));
    for (std::uint64_t a0 = 0; a0 < sz; ++a0)
      for (std::uint64_t a1 = 0; a1 < sz; ++a1) {
        WittEl w{R, {R.nth_element(a0), R.nth_element(a1)}};
        pW.push_back(witt_mul(p_w, w).key());
      }
    std::sort(pW.begin(), pW.end());
    pW.erase(std::unique(pW.begin(), pW.end()), pW.end());
    for (std::uint64_t a0 = 0; a0 < sz; ++a0)
      for (std::uint64_t a1 = 0; a1 < sz; ++a1) {
        WittEl w{R, {R.nth_element(a0), R.nth_element(a1), R.zero()}};
        WittEl d = witt_sub(frobenius(w), witt_pow(witt_truncate(w, 2), (unsigned)R.p()));
        CHECK(std::binary_search(pW.begin(), pW.end(), d.key()));
      }
  }
}

TEST_CASE("witt unit inversion") {
  ArtinRing R = fp_t(2, 1, 2);
  Prng rng(47);
  for (int i = 0; i < 25; ++i) {
    WittEl x = random_witt(R, 3, rng);
    if (!witt_is_unit(x)) x.c[0] = ring_add(x.c[0], R.one());
    if (!witt_is_unit(x)) continue;
    CHECK(witt_eq(witt_mul(x, witt_invert(x)), witt_one(R, 3)));
  }
}

TEST_CASE("log and exp on W(a)") {
  // square-zero ideal with trivial divided powers
  ArtinRing f2e = ArtinRing::make({2, 1, 1, {"e"}, {{2}}});
  auto I = Ideal::make(f2e, {f2e.var(0)}, PdKind::trivial);
  RingEl e = f2e.var(0);
  WittEl w = witt_zero(f2e, 3);
  w.c[0] = e;
  auto logs = witt_log(make_witt_ideal_el(w, I));
  CHECK(logs[0] == e);
  CHECK(logs[1].is_zero());
  CHECK(logs[2].is_zero());
  CHECK(witt_log(make_witt_ideal_el(witt_zero(f2e, 3), I))[0].is_zero());

  // additivity and round trips, also over the canonical structure on (2) in Z/8
  ArtinRing z8 = z_mod(2, 3);
  auto I8 = Ideal::padic(z8);
  Prng rng(53);
  auto random_ideal_witt = [&](const ArtinRing& R, const IdealPtr& II, unsigned prec) {
    WittEl x = witt_zero(R, prec);
    for (unsigned i = 0; i < prec; ++i) {
      RingEl r = R.random(rng);
      // force into the ideal: multiply by a generator
      x.c[i] = ring_mul(r, II->gens().empty() ? R.zero() : II->gens().front());
    }
    return x;
  };
  for (int rep = 0; rep < 20; ++rep) {
    for (auto setup : {std::make_pair(f2e, I), std::make_pair(z8, I8)}) {
      const ArtinRing& R = setup.first;
      const IdealPtr& II = setup.second;
      WittEl x = random_ideal_witt(R, II, 3);
      WittEl y = random_ideal_witt(R, II, 3);
      auto lx = witt_log(make_witt_ideal_el(x, II));
      auto ly = witt_log(make_witt_ideal_el(y, II));
      auto lsum = witt_log(make_witt_ideal_el(witt_add(x, y), II));
      for (unsigned i = 0; i < 3; ++i) CHECK(lsum[i] == ring_add(lx[i], ly[i]));
      // exp(log) = id and log(exp) = id
      CHECK(witt_eq(witt_exp(R, lx, II).w, x));
      auto back = witt_log(witt_exp(R, lx, II));
      for (unsigned i = 0; i < 3; ++i) CHECK(back[i] == lx[i]);
    }
  }
}

TEST_CASE("ideal embedding kills Frobenius and V-multiples") {
  struct Case {
    ArtinRing R;
    IdealPtr I;
  };
  std::vector<Case> cases;
  {
    ArtinRing f2e = ArtinRing::make({2, 1, 1, {"e"}, {{2}}});
    cases.push_back({f2e, Ideal::make(f2e, {f2e.var(0)}, PdKind::trivial)});
    ArtinRing z4 = z_mod(2, 2);
    cases.push_back({z4, Ideal::padic(z4)});
    ArtinRing z8 = z_mod(2, 3);
    cases.push_back({z8, Ideal::padic(z8)});
    ArtinRing z9 = z_mod(3, 2);
    cases.push_back({z9, Ideal::padic(z9)});
  }
  for (auto& cse : cases) {
    Prng rng(61);
    CHECK(ideal_embed(cse.R.zero(), cse.I, 3).is_zero());
    for (int rep = 0; rep < 12; ++rep) {
      RingEl a = ring_mul(cse.R.random(rng), cse.I->gens().front());
      WittEl em = ideal_embed(a, cse.I, 3);
      CHECK(em.c[0] == a);
      // sigma kills the embedded ideal
      CHECK(frobenius(em).is_zero());
      // and it annihilates I_S
      WittEl vxi = verschiebung(random_witt(cse.R, 2, rng));
      CHECK(witt_mul(em, vxi).is_zero());
      // for trivial divided powers the embedding is literally (a, 0, ...)
      if (cse.I->pd() == PdKind::trivial) {
        CHECK(em.c[1].is_zero());
        CHECK(em.c[2].is_zero());
      }
    }
  }
}

TEST_CASE("divided powers of V-elements") {
  ArtinRing z4 = z_mod(2, 2);
  Prng rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    WittEl xi = random_witt(z4, 2, rng);
    WittEl v = verschiebung(xi);
    CHECK(witt_eq(pd_gamma_witt(v, 1), v));
    // 2! gamma_2(V xi) = (V xi)^2
    WittEl lhs = witt_mul(witt_from_int(z4, 3, 2), pd_gamma_witt(v, 2));
    CHECK(witt_eq(lhs, witt_mul(v, v)));
  }
  // m = p: coefficient p^{p-1}/p! is a unit for p = 2 (equals 1)
  WittEl xi = mk(z_mod(2, 2), {1, 0});
  WittEl v = verschiebung(xi);
  CHECK(witt_eq(pd_gamma_witt(v, 2), verschiebung(witt_mul(xi, xi))));
  CHECK_THROWS_AS(pd_gamma_witt(mk(z_mod(2, 2), {1, 0, 0}), 2), calc_error);
}
