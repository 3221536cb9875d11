#pragma once

#include <string>
#include <vector>

#include "displib/frame.hpp"
#include "displib/prng.hpp"
#include "displib/report.hpp"

namespace displib {

// Axiom checkers for frames and their Verjuengung. Failures are report
// entries with witnesses, never exceptions. An optional fault hook lets the
// tests corrupt single maps and watch the right axiom fail.

struct FrameFault {
  bool scale_sigma_dot = false;  // multiply sigma-dot by p
};

inline std::string j_str(const Frame&, const JEl& j) {
  std::string s = "(" + to_string(j.a) + "; ";
  for (unsigned i = 0; i < j.xi.prec(); ++i) {
    if (i) s += ",";
    s += to_string(j.xi.c[i]);
  }
  return s + ")";
}

inline WittEl checked_sigma_dot(const Frame& F, const JEl& j, const FrameFault* fault) {
  WittEl x = F.sigma_dot(j);
  if (fault && fault->scale_sigma_dot)
    x = witt_mul(witt_from_int(F.S(), x.prec(), static_cast<long long>(F.p())), x);
  return x;
}

inline Report frame_check(const Frame& F, unsigned samples, Prng rng,
                          const FrameFault* fault = nullptr) {
  Report rep;
  const ArtinRing& S = F.S();

  // quotient: W/J = R, checked on generators and by a size count
  {
    bool ok = true;
    std::string wit;
    for (const auto& g : F.j_gens()) {
      RingEl r = F.to_R(F.j_to_witt(g));
      if (!r.is_zero()) {
        ok = false;
        wit = "generator " + j_str(F, g) + " maps to " + to_string(r);
      }
    }
    // |J| = |a| * |W_{n-1}(S)| must equal |W_n(S)| / |R|
    unsigned digits_a = module_span_log_digits(S, F.ideal()->gens());
    unsigned digits_S = ring_log_digits(S);
    unsigned digits_R = ring_log_digits(F.R());
    bool size_ok = (digits_a + (F.prec() - 1) * digits_S) == (F.prec() * digits_S - digits_R);
    if (!size_ok) {
      ok = false;
      wit = "kernel size mismatch";
    }
    rep.add("frame.quotient", ok, "exhaustive", wit);
  }

  // (i) J + pW inside the radical: 1 + j + p w must be a unit
  {
    bool ok = true;
    std::string wit;
    WittEl p_w = F.w_from_int(static_cast<long long>(F.p()));
    for (unsigned s = 0; s < samples && ok; ++s) {
      JEl j = F.j_random(rng);
      WittEl w = F.w_random(rng);
      WittEl cand = witt_add(F.w_one(), witt_add(F.j_to_witt(j), witt_mul(p_w, w)));
      if (!witt_is_unit(cand)) {
        ok = false;
        wit = "non-unit 1 + j + p w at j = " + j_str(F, j);
      } else {
        WittEl inv = witt_invert(cand);
        if (!witt_eq(witt_mul(cand, inv), F.w_one())) {
          ok = false;
          wit = "inversion failed";
        }
      }
    }
    rep.add("frame.radical", ok, "sampled(" + std::to_string(samples) + ")", wit);
  }

  // (ii) sigma(a) = a^p mod pW; membership via the enumerated image of
  // multiplication by p when W is small, first-ghost necessary check else
  {
    bool ok = true;
    std::string wit, mode;
    double log2W = F.prec() * S.log2_size();
    if (log2W <= 16.0) {
      // sigma drops one level, so membership is in p W_{prec-1}(S)
      unsigned m = F.prec() - 1;
      std::vector<std::string> pW;
      std::uint64_t sz = S.size_u64();
      std::uint64_t total = 1;
      for (unsigned i = 0; i < m; ++i) total *= sz;
      WittEl p_w = witt_from_int(S, m, static_cast<long long>(F.p()));
      for (std::uint64_t idx = 0; idx < total; ++idx) {
        WittEl w = witt_zero(S, m);
        std::uint64_t t = idx;
        for (unsigned i = 0; i < m; ++i) {
          w.c[i] = S.nth_element(t % sz);
          t /= sz;
        }
        pW.push_back(witt_mul(p_w, w).key());
      }
      std::sort(pW.begin(), pW.end());
      pW.erase(std::unique(pW.begin(), pW.end()), pW.end());
      for (unsigned s = 0; s < samples && ok; ++s) {
        WittEl a = F.w_random(rng);
        WittEl d = witt_sub(F.sigma(a), witt_pow(witt_truncate(a, F.prec() - 1),
                                                 static_cast<unsigned>(F.p())));
        if (!std::binary_search(pW.begin(), pW.end(), d.key())) {
          ok = false;
          wit = "sigma(a) - a^p escaped pW";
        }
      }
      mode = "sampled(" + std::to_string(samples) + ") over enumerated pW";
    } else {
      for (unsigned s = 0; s < samples && ok; ++s) {
        WittEl a = F.w_random(rng);
        WittEl d = witt_sub(F.sigma(a), witt_pow(witt_truncate(a, F.prec() - 1),
                                                 static_cast<unsigned>(F.p())));
        RingEl d0 = d.c[0];
        // necessary condition: first component divisible by p
        bool div = true;
        for (const auto& t : d0.terms())
          if (S.f() == 1 && t.second % S.p() != 0) div = false;
        if (!div) {
          ok = false;
          wit = "first component of sigma(a) - a^p not divisible by p";
        }
      }
      mode = "sampled(" + std::to_string(samples) + ") first-component";
    }
    rep.add("frame.sigma_mod_p", ok, mode, wit);
  }

  // (iii) sigma-dot(J) generates W: sigma-dot(V(1)) = 1 is the witness
  {
    JEl b = F.j_v(witt_one(S, F.prec() - 1));
    WittEl sd = checked_sigma_dot(F, b, fault);
    bool ok = witt_eq(sd, witt_one(S, F.prec() - 1));
    rep.add("frame.sigma_dot_generates", ok, "structural",
            ok ? "witness sigma_dot(V(1)) = 1" : "sigma_dot(V(1)) != 1");
  }

  // sigma = theta sigma-dot on J with theta = p (standing assumption)
  {
    bool ok = true;
    std::string wit;
    WittEl theta = F.theta();
    WittEl p_small = witt_from_int(S, F.prec() - 1, static_cast<long long>(F.p()));
    if (!witt_eq(theta, p_small)) {
      ok = false;
      wit = "derived theta differs from p";
    }
    for (unsigned s = 0; s < samples && ok; ++s) {
      JEl j = F.j_random(rng);
      WittEl lhs = F.sigma(F.j_to_witt(j));
      WittEl rhs = witt_mul(p_small, checked_sigma_dot(F, j, fault));
      if (!witt_eq(lhs, rhs)) {
        ok = false;
        wit = "sigma != p sigma_dot at j = " + j_str(F, j);
      }
    }
    rep.add("frame.theta_p", ok, "sampled(" + std::to_string(samples) + ")", wit);
  }

  // sigma-dot is sigma-linear
  {
    bool ok = true;
    std::string wit;
    for (unsigned s = 0; s < samples && ok; ++s) {
      WittEl w = F.w_random(rng);
      JEl j = F.j_random(rng);
      WittEl lhs = checked_sigma_dot(F, F.j_smul(w, j), fault);
      WittEl rhs = witt_mul(F.sigma(w), checked_sigma_dot(F, j, fault));
      if (!witt_eq(lhs, rhs)) {
        ok = false;
        wit = "sigma_dot not sigma-linear at j = " + j_str(F, j);
      }
    }
    rep.add("frame.sigma_dot_linear", ok, "sampled(" + std::to_string(samples) + ")", wit);
  }

  return rep;
}

inline Report verj_check(const Frame& F, unsigned samples, Prng rng,
                         const FrameFault* fault = nullptr) {
  Report rep;
  auto gens = F.j_gens();

  auto pair_check = [&](const std::string& id, auto&& prop) {
    bool ok = true;
    std::string wit;
    for (std::size_t i = 0; i < gens.size() && ok; ++i)
      for (std::size_t j = 0; j < gens.size() && ok; ++j)
        if (!prop(gens[i], gens[j])) {
          ok = false;
          wit = "generator pair " + j_str(F, gens[i]) + ", " + j_str(F, gens[j]);
        }
    for (unsigned s = 0; s < samples && ok; ++s) {
      JEl x = F.j_random(rng), y = F.j_random(rng);
      if (!prop(x, y)) {
        ok = false;
        wit = "random pair " + j_str(F, x) + ", " + j_str(F, y);
      }
    }
    rep.add(id, ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  };

  // (i) pi(nu(x, y)) = x y
  pair_check("verj.pi_nu_mult",
             [&](const JEl& x, const JEl& y) { return F.j_eq(F.pi(F.nu(x, y)), F.j_mul(x, y)); });
  // (ii) sigma-dot(nu(x, y)) = sigma-dot(x) sigma-dot(y)
  pair_check("verj.sigma_dot_nu", [&](const JEl& x, const JEl& y) {
    return witt_eq(checked_sigma_dot(F, F.nu(x, y), fault),
                   witt_mul(checked_sigma_dot(F, x, fault), checked_sigma_dot(F, y, fault)));
  });
  // (iii) sigma-dot(pi(x)) = sigma(x)
  {
    bool ok = true;
    std::string wit;
    for (const auto& g : gens)
      if (!witt_eq(checked_sigma_dot(F, F.pi(g), fault), F.sigma(F.j_to_witt(g)))) {
        ok = false;
        wit = "generator " + j_str(F, g);
      }
    for (unsigned s = 0; s < samples && ok; ++s) {
      JEl x = F.j_random(rng);
      if (!witt_eq(checked_sigma_dot(F, F.pi(x), fault), F.sigma(F.j_to_witt(x)))) {
        ok = false;
        wit = "random " + j_str(F, x);
      }
    }
    rep.add("verj.sigma_dot_pi", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }
  // (iv) ker sigma-dot meets ker pi trivially
  {
    bool ok = true;
    std::string wit, mode;
    double log2J = F.S().log2_size() * (F.prec() - 1);
    // |J| = |a| * |W_{prec-1}|; enumerate when small
    if (log2J <= 16.0) {
      auto ideal_set = F.ideal()->enumerate();
      std::uint64_t sz = F.S().size_u64();
      std::uint64_t total = 1;
      for (unsigned i = 0; i + 1 < F.prec(); ++i) total *= sz;
      for (const auto& a : ideal_set) {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
          WittEl xi = witt_zero(F.S(), F.prec() - 1);
          std::uint64_t t = idx;
          for (unsigned i = 0; i + 1 < F.prec(); ++i) {
            xi.c[i] = F.S().nth_element(t % sz);
            t /= sz;
          }
          JEl j{a, xi};
          if (j.is_zero()) continue;
          if (checked_sigma_dot(F, j, fault).is_zero() && F.pi(j).is_zero()) {
            ok = false;
            wit = "common kernel element " + j_str(F, j);
          }
        }
      }
      mode = "exhaustive";
    } else {
      for (unsigned s = 0; s < samples && ok; ++s) {
        JEl j = F.j_random(rng);
        if (j.is_zero()) continue;
        if (checked_sigma_dot(F, j, fault).is_zero() && F.pi(j).is_zero()) {
          ok = false;
          wit = "common kernel element " + j_str(F, j);
        }
      }
      mode = "sampled(" + std::to_string(samples) + ")";
    }
    rep.add("verj.kernel_intersection", ok, mode, wit);
  }
  return rep;
}

// ---- frame homomorphisms ----

enum class FrameHomKind { sub_relative, witt_functorial };

class FrameHom {
 public:
  // u : W_S -> W_{S/R}, the identity on W(S) carrying I_S into J
  static FrameHom sub_relative(const Frame& src, const Frame& dst) {
    require(!src.data().relative, errc::not_a_frame_hom, "source must be the absolute frame");
    require(src.S().same_ring(dst.S()), errc::not_a_frame_hom,
            "frames must share the Witt ring");
    require(src.prec() == dst.prec(), errc::not_a_frame_hom, "precision mismatch");
    FrameHom u;
    u.kind_ = FrameHomKind::sub_relative;
    u.src_ = src;
    u.dst_ = dst;
    u.validate();
    return u;
  }

  // W(S') -> W(S) induced componentwise by a ring homomorphism S' -> S
  static FrameHom witt_functorial(const Frame& src, const Frame& dst, const RingHom& h) {
    require(!src.data().relative && !dst.data().relative, errc::not_a_frame_hom,
            "functorial maps connect absolute frames");
    require(h.src().same_ring(src.S()) && h.dst().same_ring(dst.S()), errc::not_a_frame_hom,
            "ring map endpoints do not match the frames");
    require(src.prec() == dst.prec(), errc::not_a_frame_hom, "precision mismatch");
    FrameHom u;
    u.kind_ = FrameHomKind::witt_functorial;
    u.src_ = src;
    u.dst_ = dst;
    u.hom_ = h;
    u.validate();
    return u;
  }

  FrameHomKind kind() const { return kind_; }
  const Frame& src() const { return src_; }
  const Frame& dst() const { return dst_; }
  const RingHom& ring_map() const { return hom_; }

  WittEl map_w(const WittEl& w) const {
    if (kind_ == FrameHomKind::sub_relative) return w;
    WittEl out = witt_zero(dst_.S(), w.prec());
    for (unsigned i = 0; i < w.prec(); ++i) out.c[i] = hom_.apply(w.c[i]);
    return out;
  }

  JEl map_j(const JEl& j) const {
    if (kind_ == FrameHomKind::sub_relative) return dst_.j_v(j.xi);
    return dst_.j_v(map_w(j.xi));
  }

  void validate() const {
    Prng rng(2024);
    // carries J' into J and commutes with sigma and sigma-dot
    for (int s = 0; s < 32; ++s) {
      JEl j = src_.j_random(rng);
      WittEl w = src_.w_random(rng);
      JEl mj = map_j(j);
      require(witt_eq(map_w(src_.j_to_witt(j)), dst_.j_to_witt(mj)), errc::not_a_frame_hom,
              "u does not carry J' into J compatibly");
      require(witt_eq(map_w(src_.sigma(w)), dst_.sigma(map_w(w))), errc::not_a_frame_hom,
              "u does not commute with sigma");
      require(witt_eq(map_w(src_.sigma_dot(j)), dst_.sigma_dot(mj)), errc::not_a_frame_hom,
              "u does not commute with sigma-dot");
      // Verjuengung compatibility
      JEl j2 = src_.j_random(rng);
      require(dst_.j_eq(map_j(src_.nu(j, j2)), dst_.nu(map_j(j), map_j(j2))),
              errc::not_a_frame_hom, "u does not commute with nu");
      require(dst_.j_eq(map_j(src_.pi(j)), dst_.pi(map_j(j))), errc::not_a_frame_hom,
              "u does not commute with pi");
    }
  }

 private:
  FrameHomKind kind_ = FrameHomKind::sub_relative;
  Frame src_, dst_;
  RingHom hom_;
};

}  // namespace displib
