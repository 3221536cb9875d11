#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "displib/ideal.hpp"
#include "displib/linalg.hpp"
#include "displib/prng.hpp"
#include "displib/ring.hpp"
#include "displib/ringhom.hpp"

using namespace displib;

namespace {

ArtinRing z_mod(std::uint64_t p, unsigned N) { return ArtinRing::make({p, N, 1, {}, {}}); }

ArtinRing trunc_poly(std::uint64_t p, unsigned N, unsigned m) {
  // F_p[t]/(t^m) when N = 1
  return ArtinRing::make({p, N, 1, {"t"}, {{m}}});
}

}  // namespace

TEST_CASE("ring construction and basis sizes") {
  ArtinRing z4 = z_mod(2, 2);
  CHECK(z4.basis_size() == 1);
  ArtinRing f3t = trunc_poly(3, 1, 2);
  CHECK(f3t.basis_size() == 2);
  CHECK(f3t.size_u64() == 9);
  CHECK_THROWS_AS(ArtinRing::make({2, 1, 1, {"t"}, {}}), calc_error);  // NonFinite
  CHECK_THROWS_AS(ArtinRing::make({4, 1, 1, {}, {}}), calc_error);     // BadPrime
  // mixed truncation monomials shrink the basis
  ArtinRing mixed = ArtinRing::make({2, 1, 1, {"t", "u"}, {{2, 0}, {0, 2}, {1, 1}}});
  CHECK(mixed.basis_size() == 3);  // 1, t, u
}

TEST_CASE("element arithmetic") {
  ArtinRing f3t = trunc_poly(3, 1, 2);
  RingEl t = f3t.var(0);
  CHECK(ring_mul(t, t).is_zero());
  ArtinRing z4 = z_mod(2, 2);
  CHECK(ring_add(z4.from_int(3), z4.from_int(3)) == z4.from_int(2));
  CHECK(ring_mul(z4.from_int(2), z4.from_int(2)).is_zero());
  // elements of different rings never mix
  CHECK_THROWS_AS(ring_add(z4.from_int(1), f3t.one()), calc_error);
}

TEST_CASE("ring axioms on random triples") {
  for (auto R : {z_mod(2, 3), trunc_poly(3, 1, 3), ArtinRing::make({2, 2, 1, {"t"}, {{2}}})}) {
    Prng rng(7);
    for (int i = 0; i < 50; ++i) {
      RingEl a = R.random(rng), b = R.random(rng), c = R.random(rng);
      CHECK(ring_add(a, b) == ring_add(b, a));
      CHECK(ring_mul(a, b) == ring_mul(b, a));
      CHECK(ring_mul(ring_mul(a, b), c) == ring_mul(a, ring_mul(b, c)));
      CHECK(ring_mul(a, ring_add(b, c)) == ring_add(ring_mul(a, b), ring_mul(a, c)));
      CHECK(ring_add(a, ring_neg(a)).is_zero());
    }
  }
}

TEST_CASE("units and inversion") {
  ArtinRing z4 = z_mod(2, 2);
  CHECK(is_unit(z4.from_int(3)));
  CHECK(invert(z4.from_int(3)) == z4.from_int(3));
  CHECK(!is_unit(z4.from_int(2)));
  CHECK_THROWS_AS(invert(z4.from_int(2)), calc_error);

  ArtinRing f3t = trunc_poly(3, 1, 2);
  RingEl one_plus_t = ring_add(f3t.one(), f3t.var(0));
  RingEl inv = invert(one_plus_t);
  CHECK(inv == ring_sub(f3t.one(), f3t.var(0)));

  // invert(a) * a = 1 on 200 random units per test ring
  for (auto R : {z_mod(2, 3), z_mod(3, 2), trunc_poly(2, 2, 3)}) {
    Prng rng(11);
    int found = 0;
    while (found < 200) {
      RingEl a = R.random(rng);
      if (!is_unit(a)) continue;
      ++found;
      CHECK(ring_mul(a, invert(a)) == R.one());
    }
  }
}

TEST_CASE("extension fields F_{p^f}") {
  ArtinRing f4 = ArtinRing::make({2, 1, 2, {}, {}});
  // g satisfies the fixed irreducible of degree 2 over F_2 (g^2 + g + 1)
  RingEl g = f4.from_coeff(f4.c_nth(2));  // the generator digit
  RingEl g2 = ring_mul(g, g);
  CHECK(ring_add(g2, ring_add(g, f4.one())).is_zero());
  // every nonzero element invertible
  for (std::uint64_t i = 1; i < 4; ++i) {
    RingEl a = f4.from_coeff(f4.c_nth(i));
    CHECK(is_unit(a));
    CHECK(ring_mul(a, invert(a)) == f4.one());
  }
  ArtinRing f9t = ArtinRing::make({3, 1, 2, {"t"}, {{2}}});
  Prng rng(3);
  for (int i = 0; i < 40; ++i) {
    RingEl a = f9t.random(rng), b = f9t.random(rng);
    CHECK(ring_mul(a, b) == ring_mul(b, a));
    if (is_unit(a)) CHECK(ring_mul(a, invert(a)) == f9t.one());
  }
}

TEST_CASE("pd_gamma on canonical, trivial and product structures") {
  ArtinRing z8 = z_mod(2, 3);
  auto I8 = Ideal::padic(z8);
  // rational oracle: p^2/2! * 1 = 2; p^3/3! = 8/6 = 4 * 3^{-1}, 3^{-1} = 3 mod 8
  CHECK(I8->gamma(2, z8.from_int(2)) == z8.from_int(2));
  CHECK(I8->gamma(3, z8.from_int(2)) == z8.from_int(4));
  CHECK(I8->gamma(0, z8.from_int(2)) == z8.one());
  CHECK_THROWS_AS(I8->gamma(1, z8.from_int(3)), calc_error);  // NotInIdeal

  ArtinRing f3t = trunc_poly(3, 1, 2);
  auto It = Ideal::make(f3t, {f3t.var(0)}, PdKind::trivial);
  CHECK(It->gamma(2, f3t.var(0)).is_zero());
  CHECK(It->gamma(1, f3t.var(0)) == f3t.var(0));

  // m! * gamma_m(x) = x^m for all x in the ideal, m <= 2N
  for (auto pr : {std::pair<std::uint64_t, unsigned>{2, 3}, {3, 2}, {5, 2}}) {
    ArtinRing R = z_mod(pr.first, pr.second);
    auto I = Ideal::padic(R);
    for (std::uint64_t k = 0; k < pr.first; ++k) {
      RingEl x = ring_scale(R.from_int(static_cast<long long>(pr.first)),
                            R.c_from_int(static_cast<long long>(k)));
      for (unsigned m = 0; m <= 2 * pr.second; ++m) {
        RingEl lhs = I->gamma(m, x);
        for (unsigned i = 2; i <= m; ++i) lhs = ring_scale(lhs, R.c_from_int(i));
        CHECK(lhs == ring_pow(x, m));
      }
    }
  }

  // gamma_m(lambda x) = lambda^m gamma_m(x)
  ArtinRing z16 = z_mod(2, 4);
  auto I16 = Ideal::padic(z16);
  Prng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    RingEl lam = z16.random(rng);
    RingEl x = ring_scale(z16.from_int(2), z16.c_from_int(static_cast<long long>(rng.below(8))));
    for (unsigned m = 1; m <= 4; ++m)
      CHECK(I16->gamma(m, ring_mul(lam, x)) == ring_mul(ring_pow(lam, m), I16->gamma(m, x)));
  }

  // product structure on (2) + (eps) inside (Z/4)[eps]
  ArtinRing z4e = ArtinRing::make({2, 2, 1, {"e"}, {{2}}});
  auto Ip = Ideal::padic(z4e);
  auto Ie = Ideal::make(z4e, {z4e.var(0)}, PdKind::trivial);
  auto Iprod = Ideal::product_of(Ip, Ie);
  RingEl x = ring_add(z4e.from_int(2), z4e.var(0));
  // gamma_2(2 + e) = gamma_2(2) + gamma_1(2) gamma_1(e) + gamma_2(e) = 2 + 2e
  CHECK(Iprod->gamma(2, x) == ring_add(z4e.from_int(2), ring_scale(z4e.var(0), 2)));
  CHECK(Iprod->contains(x));
  CHECK(!Iprod->contains(z4e.one()));
}

TEST_CASE("divided power ideal filtration") {
  ArtinRing z4 = z_mod(2, 2);
  auto Ipadic = Ideal::padic(z4);
  // canonical structure on (2) in Z/4 never dies: a^[n] = (2) for all n
  CHECK(!Ipadic->pd_nilpotence_order().has_value());
  auto In = Ipadic->divided_power_ideal_gens(5);
  REQUIRE(In.size() == 1);
  CHECK(In.front() == z4.from_int(2));

  auto Itriv = Ideal::make(z4, {z4.from_int(2)}, PdKind::trivial);
  CHECK(Itriv->pd_nilpotence_order() == 2);

  ArtinRing z9 = z_mod(3, 2);
  auto I9 = Ideal::padic(z9);
  CHECK(I9->pd_nilpotence_order() == 2);
}

TEST_CASE("solve_linear examples and exhaustive agreement") {
  ArtinRing z4 = z_mod(2, 2);
  Matrix m1(z4, 1, 1);
  m1.at(0, 0) = z4.one();
  auto r1 = solve_linear(m1, {z4.from_int(3)});
  REQUIRE(r1.solvable);
  CHECK(r1.x[0] == z4.from_int(3));

  Matrix m2(z4, 1, 1);
  m2.at(0, 0) = z4.from_int(2);
  auto r2 = solve_linear(m2, {z4.one()});
  CHECK(!r2.solvable);
  CHECK(verify_infeasibility(m2, {z4.one()}, r2.cert));

  auto r3 = solve_linear(m2, {z4.from_int(2)});
  REQUIRE(r3.solvable);
  CHECK(ring_mul(z4.from_int(2), r3.x[0]) == z4.from_int(2));

  // exhaustive agreement on small rings
  for (auto R : {z_mod(2, 2), trunc_poly(2, 1, 2), z_mod(3, 1)}) {
    Prng rng(13);
    std::uint64_t n = R.size_u64();
    for (int rep = 0; rep < 40; ++rep) {
      Matrix M(R, 2, 2);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) M.at(i, j) = R.random(rng);
      std::vector<RingEl> b{R.random(rng), R.random(rng)};
      bool exhaustive = false;
      for (std::uint64_t x0 = 0; x0 < n && !exhaustive; ++x0)
        for (std::uint64_t x1 = 0; x1 < n && !exhaustive; ++x1) {
          std::vector<RingEl> x{R.nth_element(x0), R.nth_element(x1)};
          if (mat_apply(M, x) == b) exhaustive = true;
        }
      auto res = solve_linear(M, b);
      CHECK(res.solvable == exhaustive);
      if (!res.solvable) CHECK(verify_infeasibility(M, b, res.cert));
    }
  }
}

TEST_CASE("kernel generators span the kernel on small rings") {
  ArtinRing z4 = z_mod(2, 2);
  Prng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix M(z4, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) M.at(i, j) = z4.random(rng);
    auto ker = kernel_gens(M);
    Matrix K = Matrix::from_cols(z4, ker);
    for (const auto& g : ker) {
      auto img = mat_apply(M, g);
      CHECK(img[0].is_zero());
      CHECK(img[1].is_zero());
    }
    // every kernel element is in the span of the generators
    for (std::uint64_t x0 = 0; x0 < 4; ++x0)
      for (std::uint64_t x1 = 0; x1 < 4; ++x1) {
        std::vector<RingEl> x{z4.nth_element(x0), z4.nth_element(x1)};
        auto img = mat_apply(M, x);
        if (img[0].is_zero() && img[1].is_zero()) {
          if (ker.empty())
            CHECK((x[0].is_zero() && x[1].is_zero()));
          else
            CHECK(in_column_span(K, x));
        }
      }
  }
}

TEST_CASE("image_summand certifies direct summands") {
  ArtinRing z4 = z_mod(2, 2);
  Matrix m(z4, 2, 2);
  m.at(0, 0) = z4.one();
  m.at(1, 1) = z4.from_int(2);
  auto r = image_summand(m);
  CHECK(r.unit_rank == 1);
  CHECK(!r.is_direct_summand);

  Matrix id = Matrix::identity(z4, 3);
  auto rid = image_summand(id);
  CHECK(rid.unit_rank == 3);
  CHECK(rid.is_direct_summand);

  ArtinRing f3t = trunc_poly(3, 1, 2);
  Matrix c(f3t, 2, 1);
  c.at(0, 0) = ring_add(f3t.one(), f3t.var(0));
  c.at(1, 0) = f3t.var(0);
  auto rc = image_summand(c);
  CHECK(rc.unit_rank == 1);
  CHECK(rc.is_direct_summand);
  CHECK(rc.summand_basis.at(0, 0) == c.at(0, 0));
  CHECK(rc.summand_basis.at(1, 0) == c.at(1, 0));

  // idempotence: re-application on the summand basis returns the same span
  auto rc2 = image_summand(rc.summand_basis);
  CHECK(rc2.unit_rank == rc.unit_rank);
  CHECK(rc2.is_direct_summand);
  CHECK(span_eq(rc2.summand_basis, rc.summand_basis));

  // completion yields an invertible square matrix
  Matrix full = complete_basis(rc.summand_basis);
  CHECK(image_summand(full).unit_rank == 2);
}

TEST_CASE("ring homomorphisms") {
  ArtinRing f3t = trunc_poly(3, 1, 2);
  ArtinRing f3 = z_mod(3, 1);
  RingHom red = RingHom::make(f3t, f3, {f3.zero()});
  CHECK(red.apply(ring_add(f3t.one(), f3t.var(0))) == f3.one());
  CHECK(red.is_surjective());

  ArtinRing z4 = z_mod(2, 2);
  ArtinRing f2 = z_mod(2, 1);
  RingHom canon = RingHom::make(z4, f2, {});
  auto ker = canon.kernel_ideal_gens();
  REQUIRE(!ker.empty());
  auto I2 = Ideal::make(z4, {z4.from_int(2)}, PdKind::padic);
  for (const auto& g : ker) CHECK(I2->contains(g));
  CHECK(canon.kernel_equals(I2));

  ArtinRing f2t4 = ArtinRing::make({2, 1, 1, {"t"}, {{4}}});
  ArtinRing f2t2 = ArtinRing::make({2, 1, 1, {"t"}, {{2}}});
  RingHom tr = RingHom::make(f2t4, f2t2, {f2t2.var(0)});
  auto kt = tr.kernel_ideal_gens();
  auto It2 = Ideal::make(f2t4, {ring_pow(f2t4.var(0), 2)}, PdKind::none);
  for (const auto& g : kt) CHECK(It2->contains(g));
  CHECK(tr.kernel_equals(It2));
  // t |-> t^3 does not respect t^4 = 0? it does (t^12 = 0); t |-> 1 must fail
  CHECK_THROWS_AS(RingHom::make(f2t4, f2t2, {f2t2.one()}), calc_error);

  // composition
  RingHom red2 = RingHom::make(f2t2, f2, {f2.zero()});
  RingHom comp = compose(red2, tr);
  CHECK(comp.apply(f2t4.var(0)).is_zero());
}

TEST_CASE("module span sizes") {
  ArtinRing z4 = z_mod(2, 2);
  CHECK(ring_log_digits(z4) == 2);
  CHECK(module_span_log_digits(z4, {z4.from_int(2)}) == 1);
  CHECK(module_span_log_digits(z4, {z4.one()}) == 2);
  ArtinRing f2t2 = ArtinRing::make({2, 1, 1, {"t"}, {{2}}});
  CHECK(module_span_log_digits(f2t2, {f2t2.var(0)}) == 1);
}
