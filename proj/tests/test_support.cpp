#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "displib/bigint.hpp"
#include "displib/intpoly.hpp"
#include "displib/prng.hpp"

using namespace displib;

TEST_CASE("bigint basic arithmetic") {
  BigInt a(123456789), b(-987654321);
  CHECK((a + b).to_string() == "-864197532");
  CHECK((a * b).to_string() == "-121932631112635269");
  CHECK((a - a).is_zero());
  CHECK(BigInt::from_string("-121932631112635269") == a * b);
  CHECK((a * b).mod_u64(1000) == (1000 - 269) % 1000);
}

TEST_CASE("bigint big products and exact division") {
  // 125! / 5^31 is an integer; check exact division chains
  BigInt f(1);
  for (int i = 2; i <= 125; ++i) f *= BigInt(i);
  BigInt g = f;
  for (int i = 0; i < 31; ++i) g = g.div_exact(5);
  CHECK(!g.divisible_by(5));
  BigInt h = g;
  for (int i = 0; i < 31; ++i) h = h.mul_u64(5);
  CHECK(h == f);
  CHECK(BigInt::pow_u64(2, 200).to_string() ==
        "1606938044258990275541962092341162602522202993782792835301376");
}

TEST_CASE("intpoly ring identities") {
  IntPoly x = IntPoly::variable(0);
  IntPoly y = IntPoly::variable(1);
  IntPoly s = x + y;
  IntPoly p = s.pow(5, 1u << 20);
  // (x+y)^5 - x^5 - y^5 is divisible by 5
  IntPoly d = p - x.pow(5, 1u << 20) - y.pow(5, 1u << 20);
  CHECK(d.divisible_by(5));
  IntPoly q = d.div_exact(5);
  CHECK(q.size() == 4);
  // substitution: (x+y) at x = y = 1 is 2
  IntPoly two = s.substitute({IntPoly::constant(BigInt(1)), IntPoly::constant(BigInt(1))}, 1u << 20);
  CHECK(two == IntPoly::constant(BigInt(2)));
  // serialize round trip
  CHECK(IntPoly::deserialize(p.serialize()) == p);
}

TEST_CASE("prng determinism") {
  Prng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
