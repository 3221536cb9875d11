#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "displib/io.hpp"
#include "displib/report.hpp"

using namespace displib;

namespace {

io::Cursor cursor_of(const std::vector<std::string>& lines) { return io::Cursor{&lines, 0}; }

}  // namespace

TEST_CASE("polynomial parsing and printing") {
  ArtinRing R = ArtinRing::make({3, 2, 1, {"t", "u"}, {{3, 0}, {0, 2}}});
  RingEl x = io::parse_poly(R, "2*t^2*u + 3t + 1");
  RingEl manual = ring_add(
      ring_add(ring_scale(ring_mul(ring_pow(R.var(0), 2), R.var(1)), R.c_from_int(2)),
               ring_scale(R.var(0), R.c_from_int(3))),
      R.one());
  CHECK(x == manual);
  // negative coefficients and implicit products
  CHECK(io::parse_poly(R, "-t") == ring_neg(R.var(0)));
  CHECK(io::parse_poly(R, "0").is_zero());
  CHECK(io::parse_poly(R, "t - t").is_zero());
  // round trip through the printer
  Prng rng(5);
  for (int i = 0; i < 40; ++i) {
    RingEl a = R.random(rng);
    CHECK(io::parse_poly(R, to_string(a)) == a);
  }
  CHECK_THROWS_AS(io::parse_poly(R, "q + 1"), calc_error);
  CHECK_THROWS_AS(io::parse_poly(R, "t +"), calc_error);
}

TEST_CASE("witt element parsing") {
  ArtinRing R = ArtinRing::make({2, 2, 1, {}, {}});
  WittEl w = io::parse_witt(R, "[1, 2, 3]@3");
  CHECK(w.prec() == 3);
  CHECK(w.c[0] == R.one());
  CHECK(w.c[2] == R.from_int(3));
  WittEl v = io::parse_witt(R, "[3,1]");
  CHECK(v.prec() == 2);
  // padded to requested precision
  WittEl u = io::parse_witt(R, "[1]", 3);
  CHECK(u.prec() == 3);
  CHECK(u.c[1].is_zero());
  CHECK(io::parse_witt(R, io::witt_to_string(w)).c[1] == w.c[1]);
  CHECK_THROWS_AS(io::parse_witt(R, "1,2"), calc_error);
}

TEST_CASE("ring and frame files") {
  std::vector<std::string> lines{"ring p=2 N=1 vars=t,u trunc=t^2,u^3,t*u"};
  auto cur = cursor_of(lines);
  ArtinRing R = io::expect_ring(cur);
  CHECK(R.basis_size() == 4);  // 1, t, u, u^2

  std::vector<std::string> flines{"frame kind=relative prec=3 ideal=e pd=trivial",
                                  "ring p=2 N=1 vars=e trunc=e^2"};
  auto fcur = cursor_of(flines);
  auto pf = io::parse_frame(fcur);
  CHECK(pf.frame.data().relative);
  CHECK(pf.frame.prec() == 3);
  CHECK(pf.frame.R().basis_size() == 1);
  CHECK(pf.frame.ideal()->pd() == PdKind::trivial);

  std::vector<std::string> zlines{"frame kind=relative prec=2 ideal=2 pd=padic",
                                  "ring p=2 N=2"};
  auto zcur = cursor_of(zlines);
  auto zf = io::parse_frame(zcur);
  CHECK(zf.frame.R().N() == 1);
  CHECK(zf.frame.ideal()->pd() == PdKind::padic);
}

TEST_CASE("datum files") {
  std::vector<std::string> lines{
      "datum d=1 ranks=1,1",
      "frame kind=witt prec=3",
      "ring p=2 N=1 vars=t trunc=t^2",
      "phi",
      "[1,0,0], [0,0,0]",
      "[0,0,0], [1,t,0]",
  };
  auto cur = cursor_of(lines);
  auto pd = io::parse_datum(cur);
  CHECK(pd.datum.d == 1);
  CHECK(pd.datum.total_rank() == 2);
  CHECK(pd.datum.phi.rows[1][1].c[1] == pd.frame.S.var(0));
}

TEST_CASE("crystal files with a thickening block") {
  std::vector<std::string> lines{
      "cy h=1",
      "ring p=2 N=1 vars=t trunc=t^3",
      "nabla",
      "0,0,0,0",
      "1,0,0,0",
      "0,1,0,0",
      "0,0,1,0",
      "pairing",
      "0,0,0,1",
      "0,0,-1,0",
      "0,1,0,0",
      "-1,0,0,0",
      "thickening",
      "ring p=2 N=1 vars=e trunc=e^2",
      "ideal gens=e pd=trivial",
      "fref 0",
  };
  auto cur = cursor_of(lines);
  auto pc = io::parse_crystal(cur);
  CHECK(pc.crystal.h == 1);
  CHECK(pc.has_thickening);
  CHECK(pc.aI->pd() == PdKind::trivial);
  CHECK(pc.fref_images.size() == 1);
  CHECK(cy_validate(pc.crystal).all_pass());
}

TEST_CASE("reports render canonically") {
  Report rep;
  rep.add("b.second", true, "exact");
  rep.add("a.first", false, "sampled(3)", "witness text");
  std::string r = rep.render();
  CHECK(r == "FAIL a.first [sampled(3)] witness text\nPASS b.second [exact]\n");
  CHECK(rep.failures() == 1);
}
