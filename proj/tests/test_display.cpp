#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "displib/corpus.hpp"
#include "displib/display.hpp"
#include "displib/display_ops.hpp"
#include "displib/filtration.hpp"

using namespace displib;

namespace {

ArtinRing z_mod(std::uint64_t p, unsigned N) { return ArtinRing::make({p, N, 1, {}, {}}); }

Frame f2_frame(unsigned prec = 3) { return Frame::witt(z_mod(2, 1), prec); }

Frame relative_frame(unsigned prec = 3) {
  ArtinRing S = ArtinRing::make({2, 1, 1, {"e"}, {{2}}});
  ArtinRing R = z_mod(2, 1);
  RingHom alpha = RingHom::make(S, R, {R.zero()});
  return Frame::relative(alpha, Ideal::make(S, {S.var(0)}, PdKind::trivial), prec);
}

StandardDatum identity_datum(const Frame& F, unsigned d, std::vector<unsigned> ranks) {
  StandardDatum D;
  D.frame = F;
  D.d = d;
  D.ranks = std::move(ranks);
  unsigned n = D.total_rank();
  D.phi.rows.assign(n, std::vector<WittEl>(n, F.w_zero()));
  for (unsigned i = 0; i < n; ++i) D.phi.rows[i][i] = F.w_one();
  D.validate();
  return D;
}

}  // namespace

TEST_CASE("tilde extension of a sigma-linear map") {
  Frame F = f2_frame();
  WMatrix M;
  M.rows = {{F.w_one()}};
  // f = 0 gives tilde f = 0
  WMatrix Z;
  Z.rows = {{F.w_zero()}};
  JEl eta = F.j_v(witt_one(F.S(), 2));
  CHECK(tilde_extend(F, Z, eta, 0)[0].is_zero());
  // eta = V(1): sigma-dot is 1, so tilde f(eta (x) m) = f(m)
  auto img = tilde_extend(F, M, eta, 0);
  CHECK(witt_eq(img[0], F.w_one()));
  // sigma-linearity in the J-argument
  Prng rng(5);
  for (int i = 0; i < 30; ++i) {
    WittEl w = F.w_random(rng);
    JEl j = F.j_random(rng);
    auto lhs = tilde_extend(F, M, F.j_smul(w, j), 0);
    auto rhs = witt_mul(F.sigma(w), tilde_extend(F, M, j, 0)[0]);
    CHECK(witt_eq(lhs[0], rhs));
  }
}

TEST_CASE("d = 0 display satisfies every axiom") {
  for (Frame F : {f2_frame(), relative_frame()}) {
    Prng rng(7);
    StandardDatum D = random_standard_datum(F, 0, {1}, rng);
    Display disp = display_build(D, 2);
    Report rep = predisplay_check(disp, 24, Prng(11));
    INFO(rep.render());
    CHECK(rep.all_pass());
  }
}

TEST_CASE("d = 1 identity datum: F_0 acts as (Phi_0, p Phi_1)") {
  Frame F = f2_frame(3);
  StandardDatum D = identity_datum(F, 1, {1, 1});
  Display disp = display_build(D, 1);
  // level 0 basis vector of the L_1 block maps to p * (Phi column 1)
  PEl e1 = disp.zero(0);
  e1.blocks[1].wv[0] = F.w_one();
  PEl img = disp.fdiv(0, e1);
  WittEl p_w = witt_from_int(F.S(), F.prec() - 1, 2);
  CHECK(witt_eq(img.blocks[0].wv[0], witt_zero(F.S(), 2)));
  CHECK(witt_eq(img.blocks[1].wv[0], p_w));
  // the L_0 block maps by Phi_0 itself
  PEl e0 = disp.zero(0);
  e0.blocks[0].wv[0] = F.w_one();
  PEl img0 = disp.fdiv(0, e0);
  CHECK(witt_eq(img0.blocks[0].wv[0], witt_one(F.S(), 2)));
  Report rep = predisplay_check(disp, 24, Prng(13));
  INFO(rep.render());
  CHECK(rep.all_pass());
}

TEST_CASE("truncation at i_max = 0 leaves only P_0 and F_0") {
  Frame F = f2_frame();
  Prng rng(17);
  StandardDatum D = random_standard_datum(F, 1, {1, 1}, rng);
  Display disp = display_build(D, 0);
  CHECK(disp.i_max() == 0);
  CHECK(disp.level_spec(0).size() == 2);
  for (const auto& b : disp.level_spec(0)) CHECK(b.twist == 0);
  Report rep = predisplay_check(disp, 8, Prng(19));
  CHECK(rep.all_pass());
}

TEST_CASE("randomized corpus passes the axioms on both frame kinds") {
  Prng seed(23);
  int count = 0;
  for (Frame F : {f2_frame(4), relative_frame(4)}) {
    for (unsigned d = 0; d <= 2; ++d) {
      for (int rep = 0; rep < 3; ++rep) {
        Prng rng = seed.fork();
        StandardDatum D = random_standard_datum(F, d, random_ranks(d, 2, rng), rng);
        Display disp = display_build(D, static_cast<int>(d));
        Report r = predisplay_check(disp, 6, seed.fork());
        INFO("d = ", d, " instance ", rep, "\n", r.render());
        CHECK(r.all_pass());
        ++count;
      }
    }
  }
  CHECK(count == 18);
}

TEST_CASE("the three proof cases of P3 are exercised blockwise") {
  Frame F = relative_frame(4);
  Prng rng(29);
  StandardDatum D = random_standard_datum(F, 2, {1, 1, 1}, rng);
  Display disp = display_build(D, 2);
  auto jgens = F.j_gens();
  unsigned i = 1;  // alpha_1 : J x P_1 -> P_2 sees j < i, j = i, j > i
  auto infos = disp.gen_infos(i);
  auto gens = disp.gens(i);
  bool saw_below = false, saw_at = false, saw_above = false;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (infos[g].degree < i) saw_below = true;
    if (infos[g].degree == i) saw_at = true;
    if (infos[g].degree > i) saw_above = true;
    for (const auto& eta : jgens) {
      PEl lhs = disp.fdiv(i + 1, disp.alpha(i, eta, gens[g]));
      PEl rhs = disp.mult_w(0, F.sigma_dot(eta), disp.fdiv(i, gens[g]));
      CHECK(disp.eq(0, lhs, rhs));
    }
  }
  CHECK(saw_below);
  CHECK(saw_at);
  CHECK(saw_above);
}

TEST_CASE("fault injection produces failing axioms with witnesses") {
  Frame F = relative_frame();
  Prng rng(31);
  StandardDatum D = random_standard_datum(F, 1, {1, 1}, rng);
  int failures_seen = 0;
  // corrupt F_1 on block 0 (twisted): P3 must fail
  {
    DisplayFault fault;
    fault.enabled = true;
    fault.map = DisplayFault::Map::fdiv;
    fault.level = 1;
    fault.block = 0;
    Display bad(D, 1, fault);
    Report rep = predisplay_check(bad, 12, Prng(37));
    bool p3_failed = false;
    for (const auto& l : rep.lines)
      if (l.id == "disp.P3" && !l.pass && !l.witness.empty()) p3_failed = true;
    CHECK(p3_failed);
    if (p3_failed) ++failures_seen;
  }
  // corrupt iota_0 at the boundary block: P2 must fail
  {
    DisplayFault fault;
    fault.enabled = true;
    fault.map = DisplayFault::Map::iota;
    fault.level = 0;
    fault.block = 0;
    Display bad(D, 1, fault);
    Report rep = predisplay_check(bad, 12, Prng(41));
    bool p2_failed = false;
    for (const auto& l : rep.lines)
      if (l.id == "disp.P2" && !l.pass) p2_failed = true;
    CHECK(p2_failed);
    if (p2_failed) ++failures_seen;
  }
  // corrupt alpha_0: P2 or P3 must fail
  {
    DisplayFault fault;
    fault.enabled = true;
    fault.map = DisplayFault::Map::alpha;
    fault.level = 0;
    fault.block = 1;
    Display bad(D, 1, fault);
    Report rep = predisplay_check(bad, 12, Prng(43));
    CHECK(!rep.all_pass());
    if (!rep.all_pass()) ++failures_seen;
  }
  CHECK(failures_seen == 3);
}

TEST_CASE("direct sums of passing displays pass") {
  Frame F = relative_frame(4);
  Prng rng(47);
  StandardDatum A = random_standard_datum(F, 1, {1, 1}, rng);
  StandardDatum B = random_standard_datum(F, 2, {1, 1, 1}, rng);
  StandardDatum S = datum_dsum(A, B);
  CHECK(S.d == 2);
  CHECK(S.ranks == std::vector<unsigned>{2, 2, 1});
  Display disp = display_build(S, 2);
  Report rep = predisplay_check(disp, 6, Prng(53));
  INFO(rep.render());
  CHECK(rep.all_pass());
}

TEST_CASE("morphisms: identity, composition, multiplication by p") {
  Frame F = f2_frame();
  Prng rng(59);
  StandardDatum D = random_standard_datum(F, 1, {1, 1}, rng);
  Display disp = display_build(D, 1);
  Morphism id = identity_morphism(disp);
  Report rep = morphism_check(id, 16, Prng(61));
  INFO(rep.render());
  CHECK(rep.all_pass());

  // multiplication by p is a morphism: scale every generator image
  Morphism mp = id;
  WittEl p_w = F.w_from_int(2);
  for (unsigned i = 0; i <= disp.i_max(); ++i)
    for (auto& im : mp.img[i]) im = disp.mult_w(i, p_w, im);
  Report rep2 = morphism_check(mp, 16, Prng(67));
  INFO(rep2.render());
  CHECK(rep2.all_pass());

  Morphism comp = compose(mp, id);
  Report rep3 = morphism_check(comp, 8, Prng(71));
  CHECK(rep3.all_pass());
}

TEST_CASE("kernel and cokernel of multiplication by p over W_2(F_2)") {
  Frame F = f2_frame(2);
  StandardDatum D = identity_datum(F, 0, {1});
  Display disp = display_build(D, 1);
  Morphism id = identity_morphism(disp);

  // kernel of the identity is zero at every level
  KernelPredisplay ker_id(id);
  for (unsigned i = 0; i <= disp.i_max(); ++i) CHECK(ker_id.elements()[i].size() == 1);

  // kernel of zero is everything
  Morphism zero = id;
  for (unsigned i = 0; i <= disp.i_max(); ++i)
    for (auto& im : zero.img[i]) im = disp.zero(i);
  KernelPredisplay ker_zero(zero);
  CHECK(ker_zero.elements()[0].size() == enumerate_level(disp, 0).size());

  // multiplication by p on a d = 0 display over W_2(F_2)
  Morphism mp = id;
  WittEl p_w = F.w_from_int(2);
  for (unsigned i = 0; i <= disp.i_max(); ++i)
    for (auto& im : mp.img[i]) im = disp.mult_w(i, p_w, im);
  KernelPredisplay ker(mp);
  // p W_2(F_2) has two elements, so the kernel of p on W has index 2
  CHECK(ker.elements()[0].size() == 2);
  Report rep = predisplay_check(ker, 6, Prng(73));
  INFO(rep.render());
  CHECK(rep.all_pass());

  CokernelPredisplay coker(mp);
  CHECK(coker.elements()[0].size() == 2);
  Report rep2 = predisplay_check(coker, 6, Prng(79));
  INFO(rep2.render());
  CHECK(rep2.all_pass());
}

TEST_CASE("pullback along sub_relative restricts alpha and keeps the axioms") {
  Frame Frel = relative_frame();
  Frame Fabs = Frame::witt(Frel.S(), Frel.prec());
  FrameHom u = FrameHom::sub_relative(Fabs, Frel);
  Prng rng(83);
  StandardDatum D = random_standard_datum(Frel, 1, {1, 1}, rng);
  Display disp = display_build(D, 1);
  PullbackView pb(u, disp);
  CHECK(pb.frame().same_frame(Fabs));
  // alpha on the pullback equals alpha restricted to the V-part
  for (int t = 0; t < 20; ++t) {
    JEl j = Fabs.j_random(rng);
    PEl x = disp.random(0, rng);
    PEl via_pb = pb.alpha(0, j, x);
    PEl direct = disp.alpha(0, Frel.j_v(j.xi), x);
    CHECK(disp.eq(1, via_pb, direct));
  }
  Report rep = predisplay_check(pb, 12, Prng(89));
  INFO(rep.render());
  CHECK(rep.all_pass());

  // pullback along the identity (a = 0 relative frame) changes nothing
  ArtinRing S = Fabs.S();
  Frame Frel0 = Frame::relative(RingHom::identity(S), Ideal::zero(S), Frel.prec());
  FrameHom u0 = FrameHom::sub_relative(Fabs, Frel0);
  StandardDatum D0 = random_standard_datum(Frel0, 1, {1, 1}, rng);
  Display disp0 = display_build(D0, 1);
  PullbackView pb0(u0, disp0);
  for (int t = 0; t < 10; ++t) {
    JEl j = Fabs.j_random(rng);
    PEl x = disp0.random(0, rng);
    CHECK(disp0.eq(1, pb0.alpha(0, j, x), disp0.alpha(0, Frel0.j_v(j.xi), x)));
  }
}

TEST_CASE("base change of standard data") {
  // identity: unchanged
  Frame Fabs = Frame::witt(relative_frame().S(), 3);
  Frame Frel = relative_frame();
  FrameHom u = FrameHom::sub_relative(Fabs, Frel);
  Prng rng(97);
  StandardDatum D = random_standard_datum(Fabs, 1, {1, 1}, rng);
  StandardDatum BD = base_change(u, D);
  CHECK(BD.d == D.d);
  CHECK(BD.ranks == D.ranks);
  for (std::size_t r = 0; r < D.phi.nrows(); ++r)
    for (std::size_t c = 0; c < D.phi.ncols(); ++c)
      CHECK(witt_eq(BD.phi.rows[r][c], D.phi.rows[r][c]));
  Display bdisp = display_build(BD, 1);
  Report rep = predisplay_check(bdisp, 10, Prng(101));
  CHECK(rep.all_pass());

  // truncation F_2[t]/(t^4) -> F_2[t]/(t^2): entrywise reduction
  ArtinRing T4 = ArtinRing::make({2, 1, 1, {"t"}, {{4}}});
  ArtinRing T2 = ArtinRing::make({2, 1, 1, {"t"}, {{2}}});
  RingHom tr = RingHom::make(T4, T2, {T2.var(0)});
  Frame F4 = Frame::witt(T4, 3);
  Frame F2 = Frame::witt(T2, 3);
  FrameHom uf = FrameHom::witt_functorial(F4, F2, tr);
  StandardDatum D4 = random_standard_datum(F4, 1, {1, 1}, rng);
  StandardDatum D2 = base_change(uf, D4);
  for (std::size_t r = 0; r < D4.phi.nrows(); ++r)
    for (std::size_t c = 0; c < D4.phi.ncols(); ++c)
      for (unsigned t = 0; t < 3; ++t)
        CHECK(D2.phi.rows[r][c].c[t] == tr.apply(D4.phi.rows[r][c].c[t]));
  Display d2 = display_build(D2, 1);
  CHECK(predisplay_check(d2, 8, Prng(103)).all_pass());
}

TEST_CASE("displays over an extension residue field") {
  ArtinRing S = ArtinRing::make({2, 1, 2, {"e"}, {{2}}});
  ArtinRing R = ArtinRing::make({2, 1, 2, {}, {}});
  RingHom alpha = RingHom::make(S, R, {R.zero()});
  Frame F = Frame::relative(alpha, Ideal::make(S, {S.var(0)}, PdKind::trivial), 3);
  Prng rng(331);
  StandardDatum D = random_standard_datum(F, 1, {1, 1}, rng);
  Display disp = display_build(D, 1);
  Report rep = predisplay_check(disp, 8, Prng(333));
  INFO(rep.render());
  CHECK(rep.all_pass());
  HodgeFiltration fil = hodge_fil(disp);
  CHECK(fil.rank(0) == 2);
  CHECK(fil.rank(1) == 1);
}

TEST_CASE("adjunction hom-set counts agree on a small instance") {
  // u : W_S -> W_{S/R} over S = F_2[e], with d = 0 rank 1 data at prec 2
  Frame Fabs = Frame::witt(relative_frame(2).S(), 2);
  Frame Frel = relative_frame(2);
  FrameHom u = FrameHom::sub_relative(Fabs, Frel);
  Prng rng(107);
  StandardDatum Dp = random_standard_datum(Fabs, 0, {1}, rng);  // over W_S
  StandardDatum E = random_standard_datum(Frel, 0, {1}, rng);   // over W_{S/R}

  // base-change recipe validates
  StandardDatum uDp = base_change(u, Dp);
  Display u_dp = display_build(uDp, 1);
  Display e_disp = display_build(E, 1);
  Display dp = display_build(Dp, 1);
  PullbackView uE(u, e_disp);

  // Hom_{W_{S/R}}(u_. D', E) vs Hom_{W_S}(D', u* E)
  std::vector<std::vector<PEl>> lvls_e, lvls_ue;
  for (unsigned i = 0; i <= 1; ++i) lvls_e.push_back(enumerate_level(e_disp, i));
  for (unsigned i = 0; i <= 1; ++i) lvls_ue.push_back(enumerate_level(e_disp, i));
  auto homs_down = enumerate_morphisms(u_dp, e_disp, lvls_e);
  auto homs_up = enumerate_morphisms(dp, uE, lvls_ue);
  INFO("counts: ", homs_down.size(), " vs ", homs_up.size());
  CHECK(homs_down.size() == homs_up.size());
  CHECK(homs_down.size() >= 1);  // at least the zero morphism
}
