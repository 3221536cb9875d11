// displib: exact Witt-vector, frame, display and deformation calculator.
//
// Exit codes: 0 all checks passed, 1 a mathematical check failed (witness in
// the report), 2 input or usage error.

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "displib/cy_classify.hpp"
#include "displib/cy_models.hpp"
#include "displib/filtration.hpp"
#include "displib/io.hpp"
#include "displib/selftest.hpp"

using namespace displib;

namespace {

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "IOError: cannot write " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  return 0;
}

std::string seed_header(std::uint64_t seed) { return "seed=" + std::to_string(seed) + "\n"; }

int report_exit(const Report& rep) { return rep.all_pass() ? 0 : 1; }

io::Cursor file_cursor(const std::string& path, std::vector<std::string>& storage) {
  storage = io::read_lines(path);
  return io::Cursor{&storage, 0};
}

io::ParsedFrame load_frame(const std::string& path, std::vector<std::string>& storage) {
  auto cur = file_cursor(path, storage);
  return io::parse_frame(cur);
}

io::ParsedDatum load_datum(const std::string& path, std::vector<std::string>& storage) {
  auto cur = file_cursor(path, storage);
  return io::parse_datum(cur);
}

std::vector<RingEl> parse_images(const ArtinRing& S, unsigned h, const std::string& csv) {
  std::vector<RingEl> imgs;
  if (!io::trim(csv).empty())
    for (const auto& part : io::split_top(csv, ',')) imgs.push_back(io::parse_poly(S, part));
  require(imgs.size() == h, errc::parse_error, "need one image per direction");
  return imgs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact arithmetic for truncated Witt vectors, frames, higher displays and "
               "deformation correspondences"};
  app.require_subcommand(1);

  std::function<int()> job;

  // ---- ring ----
  auto* ring_cmd = app.add_subcommand("ring", "construct and inspect coefficient rings");
  ring_cmd->require_subcommand(1);
  {
    static std::string path;
    auto* mk = ring_cmd->add_subcommand("make", "parse a ring file and report the basis");
    mk->add_option("file", path)->required();
    mk->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        ArtinRing R = io::expect_ring(cur);
        std::cout << "ring ok: basis size " << R.basis_size() << ", log2 size "
                  << R.log2_size() << "\n";
        return 0;
      };
    });
  }

  // ---- witt ----
  auto* witt_cmd = app.add_subcommand("witt", "structure polynomials and Witt arithmetic");
  witt_cmd->require_subcommand(1);
  {
    static std::uint64_t p = 2;
    static unsigned n = 2;
    auto* polys = witt_cmd->add_subcommand("polys", "compute or load structure polynomials");
    polys->add_option("--p", p)->required();
    polys->add_option("--n", n)->required();
    polys->callback([&]() {
      job = []() {
        auto w = witt_structure_polys(p, n);
        std::cout << "witt polynomials p=" << p << " n=" << n << ": sum terms";
        for (const auto& s : w->sum) std::cout << " " << s.size();
        std::cout << "\n";
        return 0;
      };
    });
  }
  {
    static std::string ring_path, op, a_str, b_str;
    auto* ev = witt_cmd->add_subcommand("eval", "evaluate add/mul/neg/frobenius on elements");
    ev->add_option("ring", ring_path)->required();
    ev->add_option("op", op)->required()->check(CLI::IsMember({"add", "mul", "neg", "frob"}));
    ev->add_option("a", a_str)->required();
    ev->add_option("b", b_str);
    ev->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(ring_path, st);
        ArtinRing R = io::expect_ring(cur);
        WittEl a = io::parse_witt(R, a_str);
        WittEl r = a;
        if (op == "neg") {
          r = witt_neg(a);
        } else if (op == "frob") {
          r = frobenius(a);
        } else {
          require(!b_str.empty(), errc::parse_error, "binary operation needs two elements");
          WittEl b = io::parse_witt(R, b_str);
          r = op == "add" ? witt_add(a, b) : witt_mul(a, b);
        }
        std::cout << io::witt_to_string(r) << "\n";
        return 0;
      };
    });
  }

  // ---- frame ----
  auto* frame_cmd = app.add_subcommand("frame", "frame and Verjuengung axioms");
  frame_cmd->require_subcommand(1);
  {
    static std::string path, out;
    static unsigned samples = 64;
    static std::uint64_t seed = 1;
    auto* ck = frame_cmd->add_subcommand("check", "verify the frame axioms with witnesses");
    ck->add_option("file", path)->required();
    ck->add_option("--samples", samples);
    ck->add_option("--seed", seed);
    ck->add_option("--out", out);
    ck->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        io::ParsedFrame pf = load_frame(path, st);
        Report rep = frame_check(pf.frame, samples, Prng(seed));
        rep.merge(verj_check(pf.frame, samples * 4, Prng(seed ^ 1)));
        int rc = emit(seed_header(seed) + rep.render(), out);
        return rc ? rc : report_exit(rep);
      };
    });
  }

  // ---- display ----
  auto* disp_cmd = app.add_subcommand("display", "standard data and their displays");
  disp_cmd->require_subcommand(1);
  {
    static std::string path;
    auto* bd = disp_cmd->add_subcommand("build", "validate a datum and report level shapes");
    bd->add_option("file", path)->required();
    bd->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto pd = load_datum(path, st);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        std::cout << "datum ok: d=" << pd.datum.d << " total rank "
                  << pd.datum.total_rank() << "\n";
        for (unsigned i = 0; i <= disp.i_max(); ++i) {
          std::cout << "P_" << i << ":";
          for (const auto& b : disp.level_spec(i))
            std::cout << " [deg " << b.degree << " twist " << b.twist << " rank " << b.rank
                      << "]";
          std::cout << "\n";
        }
        return 0;
      };
    });
  }
  {
    static std::string path, out;
    static unsigned samples = 8;
    static std::uint64_t seed = 1;
    auto* ck = disp_cmd->add_subcommand("check", "verify the predisplay axioms");
    ck->add_option("file", path)->required();
    ck->add_option("--samples", samples);
    ck->add_option("--seed", seed);
    ck->add_option("--out", out);
    ck->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto pd = load_datum(path, st);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        Report rep = predisplay_check(disp, samples, Prng(seed));
        int rc = emit(seed_header(seed) + rep.render(), out);
        return rc ? rc : report_exit(rep);
      };
    });
  }
  {
    static std::string path_a, path_b;
    static unsigned samples = 6;
    static std::uint64_t seed = 1;
    auto* ds = disp_cmd->add_subcommand("dsum", "direct sum of two data over one frame");
    ds->add_option("a", path_a)->required();
    ds->add_option("b", path_b)->required();
    ds->add_option("--samples", samples);
    ds->add_option("--seed", seed);
    ds->callback([&]() {
      job = []() {
        std::vector<std::string> st1, st2;
        auto A = load_datum(path_a, st1);
        auto B = load_datum(path_b, st2);
        StandardDatum S = datum_dsum(A.datum, B.datum);
        Display disp = display_build(S, static_cast<int>(S.d));
        Report rep = predisplay_check(disp, samples, Prng(seed));
        std::cout << seed_header(seed) << "dsum d=" << S.d << " ranks";
        for (unsigned r : S.ranks) std::cout << " " << r;
        std::cout << "\n" << rep.render();
        return report_exit(rep);
      };
    });
  }
  {
    static std::string path;
    static unsigned samples = 8;
    static std::uint64_t seed = 1;
    auto* pb = disp_cmd->add_subcommand(
        "pullback", "pull a relative display back to the absolute frame and re-check");
    pb->add_option("file", path)->required();
    pb->add_option("--samples", samples);
    pb->add_option("--seed", seed);
    pb->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto pd = load_datum(path, st);
        require(pd.datum.frame.data().relative, errc::parse_error,
                "pullback expects a datum over a relative frame");
        Frame abs = Frame::witt(pd.datum.frame.S(), pd.datum.frame.prec());
        FrameHom u = FrameHom::sub_relative(abs, pd.datum.frame);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        PullbackView pv(u, disp);
        Report rep = predisplay_check(pv, samples, Prng(seed));
        std::cout << seed_header(seed) << rep.render();
        return report_exit(rep);
      };
    });
  }
  {
    static std::string path;
    static unsigned samples = 8;
    static std::uint64_t seed = 1;
    auto* bc = disp_cmd->add_subcommand(
        "basechange", "base-change an absolute datum to the declared relative frame");
    bc->add_option("file", path)->required();
    bc->add_option("--samples", samples);
    bc->add_option("--seed", seed);
    bc->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto pd = load_datum(path, st);
        require(pd.datum.frame.data().relative, errc::parse_error,
                "basechange expects the file to declare a relative frame");
        Frame abs = Frame::witt(pd.datum.frame.S(), pd.datum.frame.prec());
        StandardDatum over_abs = pd.datum;
        over_abs.frame = abs;
        over_abs.validate();
        FrameHom u = FrameHom::sub_relative(abs, pd.datum.frame);
        StandardDatum changed = base_change(u, over_abs);
        Display disp = display_build(changed, static_cast<int>(changed.d));
        Report rep = predisplay_check(disp, samples, Prng(seed));
        std::cout << seed_header(seed) << "base change ok\n" << rep.render();
        return report_exit(rep);
      };
    });
  }

  // ---- fil ----
  auto* fil_cmd = app.add_subcommand("fil", "Hodge filtrations and admissible liftings");
  fil_cmd->require_subcommand(1);
  {
    static std::string path;
    auto* fc = fil_cmd->add_subcommand("compute", "the Hodge filtration of a display");
    fc->add_option("file", path)->required();
    fc->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto pd = load_datum(path, st);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        HodgeFiltration fil = hodge_fil(disp);
        std::cout << "hodge filtration over the quotient:";
        for (unsigned i = 0; i < fil.steps.size(); ++i)
          std::cout << " rank(Fil^" << i << ")=" << fil.rank(i);
        std::cout << "\n";
        return 0;
      };
    });
  }
  {
    static std::string path, lpath;
    auto* ad = fil_cmd->add_subcommand("admissible", "test a lifting for admissibility");
    ad->add_option("datum", path)->required();
    ad->add_option("lifting", lpath)->required();
    ad->callback([&]() {
      job = []() {
        std::vector<std::string> st, lt;
        auto pd = load_datum(path, st);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        auto cur = file_cursor(lpath, lt);
        Lifting E = io::parse_lifting(pd.datum.frame.S(), pd.datum.total_rank(),
                                      disp.i_max(), cur);
        lifting_validate(disp, E);
        auto adm = admissible_check(disp, E);
        std::cout << (adm.admissible ? "admissible\n"
                                     : "not admissible: " + adm.witness + "\n");
        return adm.admissible ? 0 : 1;
      };
    });
  }
  {
    static std::string path, lpath;
    static std::uint64_t seed = 1;
    auto* lf = fil_cmd->add_subcommand("lift",
                                       "run the lifting equivalence and verify both round trips");
    lf->add_option("datum", path)->required();
    lf->add_option("lifting", lpath)->required();
    lf->add_option("--seed", seed);
    lf->callback([&]() {
      job = []() {
        std::vector<std::string> st, lt;
        auto pd = load_datum(path, st);
        Display disp = display_build(pd.datum, static_cast<int>(pd.datum.d));
        auto cur = file_cursor(lpath, lt);
        Lifting E = io::parse_lifting(pd.datum.frame.S(), pd.datum.total_rank(),
                                      disp.i_max(), cur);
        auto L = display_lift(disp, E);
        Report rep;
        rep.add("lift.datum_valid", true, "exact", "");
        rep.add("lift.round_b", display_lift_round_b(disp, E, L), "exact", "");
        const Frame& F = pd.datum.frame;
        Frame rel_small = F.data().relative
                              ? Frame::relative(F.proj(), F.ideal(), F.prec() - 1)
                              : Frame::relative(RingHom::identity(F.S()),
                                                Ideal::zero(F.S()), F.prec() - 1);
        FrameHom u = FrameHom::sub_relative(L.abs_frame, rel_small);
        StandardDatum lifted_rel = base_change(u, L.datum);
        Display lifted_disp = display_build(lifted_rel, static_cast<int>(pd.datum.d));
        StandardDatum D_small = pd.datum;
        D_small.frame = rel_small;
        for (auto& row : D_small.phi.rows)
          for (auto& e : row) e = witt_truncate(e, rel_small.prec());
        Display target = display_build(D_small, static_cast<int>(pd.datum.d));
        Morphism psi = display_lift_round_a_morphism(disp, L, lifted_disp, target);
        Report mrep = morphism_check(psi, 6, Prng(seed));
        rep.add("lift.round_a", mrep.all_pass(), "morphism squares", "");
        std::cout << seed_header(seed) << rep.render();
        return report_exit(rep);
      };
    });
  }

  // ---- cy ----
  auto* cy_cmd = app.add_subcommand("cy", "deformation correspondences");
  cy_cmd->require_subcommand(1);
  {
    static std::string path, out;
    auto* cv = cy_cmd->add_subcommand("validate", "validate a crystal file");
    cv->add_option("file", path)->required();
    cv->add_option("--out", out);
    cv->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        // parse without the constructor's throw to render the full report
        io::ParsedCrystal pc = io::parse_crystal(cur);
        Report rep = cy_validate(pc.crystal);
        int rc = emit(rep.render(), out);
        return rc ? rc : report_exit(rep);
      };
    });
  }
  {
    static std::string path, f_csv, g_csv, x_csv;
    auto* tr = cy_cmd->add_subcommand("transport", "parallel transport between two fibers");
    tr->add_option("file", path)->required();
    tr->add_option("--f", f_csv)->required();
    tr->add_option("--g", g_csv)->required();
    tr->add_option("--x", x_csv);
    tr->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        auto pc = io::parse_crystal(cur);
        require(pc.has_thickening, errc::parse_error, "crystal file needs a thickening block");
        DeformationPoint f = DeformationPoint::make(
            pc.crystal.A, pc.S, parse_images(pc.S, pc.crystal.h, f_csv));
        DeformationPoint g = DeformationPoint::make(
            pc.crystal.A, pc.S, parse_images(pc.S, pc.crystal.h, g_csv));
        Transport T = transport_matrix(pc.crystal, f, g, pc.aI);
        std::cout << "finiteness: " << T.finiteness << ", top degree " << T.degree_used
                  << "\n";
        for (std::size_t r = 0; r < T.psi.rows; ++r) {
          for (std::size_t c = 0; c < T.psi.cols; ++c)
            std::cout << (c ? "," : "") << to_string(T.psi.at(r, c));
          std::cout << "\n";
        }
        if (!x_csv.empty()) {
          std::vector<RingEl> x;
          for (const auto& part : io::split_top(x_csv, ','))
            x.push_back(io::parse_poly(pc.S, part));
          auto y = transport_apply(T, x);
          std::cout << "image:";
          for (const auto& e : y) std::cout << " " << to_string(e);
          std::cout << "\n";
        }
        return 0;
      };
    });
  }
  {
    static std::string path, f_csv, g_csv;
    auto* ka = cy_cmd->add_subcommand("kappa", "classifying vector of an induced lifting");
    ka->add_option("file", path)->required();
    ka->add_option("--f", f_csv)->required();
    ka->add_option("--g", g_csv)->required();
    ka->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        auto pc = io::parse_crystal(cur);
        require(pc.has_thickening, errc::parse_error, "crystal file needs a thickening block");
        DeformationPoint f = DeformationPoint::make(
            pc.crystal.A, pc.S, parse_images(pc.S, pc.crystal.h, f_csv));
        DeformationPoint g = DeformationPoint::make(
            pc.crystal.A, pc.S, parse_images(pc.S, pc.crystal.h, g_csv));
        Fiber fib = specialize(pc.crystal, f);
        LineLift L = def_to_line(pc.crystal, f, g, pc.aI);
        auto kap = kappa(fib, pc.aI, L);
        std::cout << "kappa:";
        for (const auto& e : kap) std::cout << " " << to_string(e);
        std::cout << "\nlands in gr^2: " << (kappa_lands_in_gr2(fib, kap) ? "yes" : "no")
                  << "\n";
        return 0;
      };
    });
  }
  {
    static std::string path, f_csv, line_csv;
    auto* ck = cy_cmd->add_subcommand("check", "test a line for the CY-type conditions");
    ck->add_option("file", path)->required();
    ck->add_option("--f", f_csv)->required();
    ck->add_option("--line", line_csv)->required();
    ck->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        auto pc = io::parse_crystal(cur);
        require(pc.has_thickening, errc::parse_error, "crystal file needs a thickening block");
        DeformationPoint f = DeformationPoint::make(
            pc.crystal.A, pc.S, parse_images(pc.S, pc.crystal.h, f_csv));
        std::vector<RingEl> gen;
        for (const auto& part : io::split_top(line_csv, ','))
          gen.push_back(io::parse_poly(pc.S, part));
        Fiber fib = specialize(pc.crystal, f);
        LineLift L = normalize_line(fib, gen);
        auto ty = cy_type_check(pc.crystal, f, L, pc.aI, pc.alpha);
        if (ty.is_cy_type) {
          std::cout << "CY-type: ranks (1," << ty.e2.cols << "," << image_summand(ty.e1).unit_rank
                    << ")\n";
          return 0;
        }
        std::cout << "not CY-type: " << ty.failing << "\n";
        return 1;
      };
    });
  }
  {
    static std::string path, out;
    static bool exhaustive = true;
    static unsigned samples = 0;
    static std::uint64_t seed = 1;
    auto* cl = cy_cmd->add_subcommand("classify",
                                      "match deformations against CY-type lines");
    cl->add_option("file", path)->required();
    cl->add_flag("--exhaustive", exhaustive);
    cl->add_option("--samples", samples, "sampled round trips instead of full enumeration");
    cl->add_option("--seed", seed);
    cl->add_option("--out", out);
    cl->callback([&]() {
      job = []() {
        std::vector<std::string> st;
        auto cur = file_cursor(path, st);
        auto pc = io::parse_crystal(cur);
        require(pc.has_thickening, errc::parse_error, "crystal file needs a thickening block");
        DeformationPoint f_ref;
        f_ref.f = RingHom::make(pc.crystal.A, pc.S, pc.fref_images);
        ClassifyCertificate cert =
            samples > 0 ? classify_sampled(pc.crystal, pc.alpha, pc.aI, f_ref, samples,
                                           Prng(seed))
                        : classify(pc.crystal, pc.alpha, pc.aI, f_ref);
        int rc = emit(seed_header(seed) + cert.render(), out);
        return rc ? rc : (cert.verified ? 0 : 1);
      };
    });
  }

  // ---- selftest ----
  {
    static std::uint64_t seed = 1;
    static std::string out;
    auto* stc = app.add_subcommand("selftest", "run the full acceptance suites");
    stc->add_option("--seed", seed);
    stc->add_option("--out", out);
    stc->callback([&]() {
      job = []() {
        auto res = selftest::run_selftest(seed);
        int rc = emit(res.text, out);
        return rc ? rc : (res.pass ? 0 : 1);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return job ? job() : 2;
  } catch (const calc_error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == errc::parse_error || e.code() == errc::io_error ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
