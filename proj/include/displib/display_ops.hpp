#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "displib/display.hpp"

namespace displib {

// Pullback along a frame homomorphism, morphisms with their commuting
// squares, finite predisplays for kernels and cokernels, and exhaustive
// morphism enumeration for the base-change adjunction counts.

// u*D: the same levels viewed over the source frame; alpha and the module
// action factor through u.
class PullbackView : public PredisplayBase {
 public:
  PullbackView(const FrameHom& u, const PredisplayBase& base) : u_(u), base_(base) {
    require(u.dst().same_frame(base.frame()), errc::not_a_frame_hom,
            "pullback target frame mismatch");
  }

  const Frame& frame() const override { return u_.src(); }
  unsigned i_max() const override { return base_.i_max(); }
  PEl zero(unsigned i) const override { return base_.zero(i); }
  bool eq(unsigned i, const PEl& x, const PEl& y) const override { return base_.eq(i, x, y); }
  PEl add(unsigned i, const PEl& x, const PEl& y) const override { return base_.add(i, x, y); }
  PEl neg(unsigned i, const PEl& x) const override { return base_.neg(i, x); }
  PEl mult_w(unsigned i, const WittEl& w, const PEl& x) const override {
    return base_.mult_w(i, u_.map_w(w), x);
  }
  PEl mult_j(unsigned i, const JEl& eta, const PEl& x) const override {
    return base_.mult_j(i, u_.map_j(eta), x);
  }
  PEl iota(unsigned i, const PEl& x) const override { return base_.iota(i, x); }
  PEl alpha(unsigned i, const JEl& eta, const PEl& x) const override {
    return base_.alpha(i, u_.map_j(eta), x);
  }
  PEl fdiv(unsigned i, const PEl& x) const override { return base_.fdiv(i, x); }
  std::vector<PEl> gens(unsigned i) const override { return base_.gens(i); }
  PEl random(unsigned i, Prng& rng) const override { return base_.random(i, rng); }
  std::string str(unsigned i, const PEl& x) const override { return base_.str(i, x); }
  std::vector<std::pair<std::size_t, WittEl>> express(unsigned i, const PEl& x) const override {
    require(u_.kind() == FrameHomKind::sub_relative, errc::internal,
            "express on a pullback is only supported along sub_relative maps");
    return base_.express(i, x);  // same Witt ring, same coefficients
  }

  const FrameHom& hom() const { return u_; }
  const PredisplayBase& base() const { return base_; }

 private:
  FrameHom u_;
  const PredisplayBase& base_;
};

// base-change of a standard datum: same ranks, entries through the ring map
inline StandardDatum base_change(const FrameHom& u, const StandardDatum& D) {
  require(D.frame.same_frame(u.src()), errc::parent_mismatch,
          "datum must live over the source frame");
  StandardDatum out;
  out.frame = u.dst();
  out.d = D.d;
  out.ranks = D.ranks;
  out.phi.rows.assign(D.phi.nrows(), {});
  for (std::size_t r = 0; r < D.phi.nrows(); ++r)
    for (std::size_t c = 0; c < D.phi.ncols(); ++c) out.phi.rows[r].push_back(u.map_w(D.phi.rows[r][c]));
  out.validate();  // a non-unit image determinant would be a DatumInvalid here
  return out;
}

// ---- morphisms ----

struct Morphism {
  const PredisplayBase* src = nullptr;
  const PredisplayBase* dst = nullptr;
  std::vector<std::vector<PEl>> img;  // img[i][g]: image of src->gens(i)[g]

  PEl apply(unsigned i, const PEl& x) const {
    PEl acc = dst->zero(i);
    for (const auto& term : src->express(i, x))
      acc = dst->add(i, acc, dst->mult_w(i, term.second, img[i][term.first]));
    return acc;
  }
};

inline Morphism identity_morphism(const PredisplayBase& P) {
  Morphism m;
  m.src = &P;
  m.dst = &P;
  for (unsigned i = 0; i <= P.i_max(); ++i) m.img.push_back(P.gens(i));
  return m;
}

inline Morphism compose(const Morphism& g, const Morphism& f) {
  require(f.dst == g.src, errc::parent_mismatch, "morphisms do not chain");
  Morphism out;
  out.src = f.src;
  out.dst = g.dst;
  for (unsigned i = 0; i <= f.src->i_max(); ++i) {
    std::vector<PEl> level;
    for (const auto& im : f.img[i]) level.push_back(g.apply(i, im));
    out.img.push_back(std::move(level));
  }
  return out;
}

// the three commuting-square families, on generators and random samples
inline Report morphism_check(const Morphism& psi, unsigned samples, Prng rng) {
  Report rep;
  const PredisplayBase& S = *psi.src;
  const PredisplayBase& D = *psi.dst;
  const Frame& F = S.frame();
  require(F.same_frame(D.frame()), errc::parent_mismatch, "morphism across frames");
  auto jgens = F.j_gens();

  // linearity of the table (apply respects addition and the module action)
  {
    bool ok = true;
    std::string wit;
    Prng local = rng.fork();
    for (unsigned i = 0; i <= S.i_max() && ok; ++i) {
      for (unsigned s = 0; s < samples && ok; ++s) {
        PEl x = S.random(i, local), y = S.random(i, local);
        WittEl w = F.w_random(local);
        if (!D.eq(i, psi.apply(i, S.add(i, x, y)),
                  D.add(i, psi.apply(i, x), psi.apply(i, y)))) {
          ok = false;
          wit = "additivity at level " + std::to_string(i);
        } else if (!D.eq(i, psi.apply(i, S.mult_w(i, w, x)), D.mult_w(i, w, psi.apply(i, x)))) {
          ok = false;
          wit = "W-linearity at level " + std::to_string(i);
        }
      }
    }
    rep.add("mor.linear", ok, "sampled(" + std::to_string(samples) + ")", wit);
  }

  // iota square
  {
    bool ok = true;
    std::string wit;
    Prng local = rng.fork();
    for (unsigned i = 0; i + 1 <= S.i_max() && ok; ++i) {
      for (const auto& x : S.gens(i + 1)) {
        if (!D.eq(i, psi.apply(i, S.iota(i, x)), D.iota(i, psi.apply(i + 1, x)))) {
          ok = false;
          wit = "level " + std::to_string(i) + " at generator";
          break;
        }
      }
      for (unsigned s = 0; s < samples && ok; ++s) {
        PEl x = S.random(i + 1, local);
        if (!D.eq(i, psi.apply(i, S.iota(i, x)), D.iota(i, psi.apply(i + 1, x)))) {
          ok = false;
          wit = "level " + std::to_string(i) + " at x = " + S.str(i + 1, x);
        }
      }
    }
    rep.add("mor.iota_square", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  // alpha square
  {
    bool ok = true;
    std::string wit;
    Prng local = rng.fork();
    for (unsigned i = 0; i + 1 <= S.i_max() && ok; ++i) {
      for (const auto& eta : jgens) {
        for (const auto& x : S.gens(i)) {
          if (!D.eq(i + 1, psi.apply(i + 1, S.alpha(i, eta, x)),
                    D.alpha(i, eta, psi.apply(i, x)))) {
            ok = false;
            wit = "level " + std::to_string(i) + " at generator";
            break;
          }
        }
        if (!ok) break;
      }
      for (unsigned s = 0; s < samples && ok; ++s) {
        JEl eta = F.j_random(local);
        PEl x = S.random(i, local);
        if (!D.eq(i + 1, psi.apply(i + 1, S.alpha(i, eta, x)),
                  D.alpha(i, eta, psi.apply(i, x)))) {
          ok = false;
          wit = "level " + std::to_string(i) + " at x = " + S.str(i, x);
        }
      }
    }
    rep.add("mor.alpha_square", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  // F square
  {
    bool ok = true;
    std::string wit;
    Prng local = rng.fork();
    for (unsigned i = 0; i <= S.i_max() && ok; ++i) {
      for (const auto& x : S.gens(i)) {
        if (!D.eq(0, psi.apply(0, S.fdiv(i, x)), D.fdiv(i, psi.apply(i, x)))) {
          ok = false;
          wit = "level " + std::to_string(i) + " at generator";
          break;
        }
      }
      for (unsigned s = 0; s < samples && ok; ++s) {
        PEl x = S.random(i, local);
        if (!D.eq(0, psi.apply(0, S.fdiv(i, x)), D.fdiv(i, psi.apply(i, x)))) {
          ok = false;
          wit = "level " + std::to_string(i) + " at x = " + S.str(i, x);
        }
      }
    }
    rep.add("mor.F_square", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  return rep;
}

// ---- finite predisplays (explicit element sets) ----

// Enumerate a display level as a finite set; requires a small base.
inline std::vector<PEl> enumerate_level(const Display& D, unsigned i, std::uint64_t cap = 1u << 18) {
  const Frame& F = D.frame();
  const ArtinRing& S = F.S();
  std::uint64_t sz = S.size_u64();
  auto spec = D.level_spec(i);

  // coordinate spaces per block
  std::vector<std::vector<JEl>> jspace;   // per twisted block: all of J_k
  std::vector<std::vector<WittEl>> wspace;  // all of W
  std::vector<WittEl> wall;
  {
    std::uint64_t total = 1;
    for (unsigned t = 0; t < F.prec(); ++t) total *= sz;
    require(total <= cap, errc::not_finite, "Witt ring too large to enumerate");
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      WittEl w = F.w_zero();
      std::uint64_t t = idx;
      for (unsigned c = 0; c < F.prec(); ++c) {
        w.c[c] = S.nth_element(t % sz);
        t /= sz;
      }
      wall.push_back(w);
    }
  }
  std::map<unsigned, std::vector<JEl>> jk_sets;
  auto jk_set = [&](unsigned k) -> const std::vector<JEl>& {
    auto it = jk_sets.find(k);
    if (it != jk_sets.end()) return it->second;
    // ideal-power set
    std::vector<RingEl> prods{S.one()};
    for (unsigned t = 0; t < k; ++t) {
      std::vector<RingEl> next;
      for (const auto& c : prods)
        for (const auto& g : F.ideal()->gens()) {
          RingEl e = ring_mul(c, g);
          if (!e.is_zero()) next.push_back(e);
        }
      prods = std::move(next);
      if (prods.empty()) break;
    }
    std::vector<RingEl> apart;
    if (prods.empty()) {
      apart.push_back(S.zero());
    } else {
      auto tmp = Ideal::make(S, prods, PdKind::none);
      apart = tmp->enumerate(cap);
    }
    std::vector<JEl> out;
    std::uint64_t xi_total = 1;
    for (unsigned t = 0; t + 1 < F.prec(); ++t) xi_total *= sz;
    require(apart.size() * xi_total <= cap, errc::not_finite, "J_k too large to enumerate");
    for (const auto& a : apart) {
      for (std::uint64_t idx = 0; idx < xi_total; ++idx) {
        WittEl xi = witt_zero(S, F.xi_prec());
        std::uint64_t t = idx;
        for (unsigned c = 0; c + 1 < F.prec(); ++c) {
          xi.c[c] = S.nth_element(t % sz);
          t /= sz;
        }
        out.push_back(JEl{a, xi});
      }
    }
    return jk_sets.emplace(k, std::move(out)).first->second;
  };

  std::vector<PEl> elems{D.zero(i)};
  for (std::size_t b = 0; b < spec.size(); ++b) {
    for (unsigned s = 0; s < spec[b].rank; ++s) {
      std::vector<PEl> next;
      if (spec[b].twist > 0) {
        const auto& js = jk_set(spec[b].twist);
        require(elems.size() * js.size() <= cap, errc::not_finite, "level too large");
        for (const auto& e : elems)
          for (const auto& j : js) {
            PEl x = e;
            x.blocks[b].jv[s] = j;
            next.push_back(std::move(x));
          }
      } else {
        require(elems.size() * wall.size() <= cap, errc::not_finite, "level too large");
        for (const auto& e : elems)
          for (const auto& w : wall) {
            PEl x = e;
            x.blocks[b].wv[s] = w;
            next.push_back(std::move(x));
          }
      }
      elems = std::move(next);
    }
  }
  return elems;
}

// kernel of a morphism: levels are the filtered subsets, maps restrict
class KernelPredisplay : public PredisplayBase {
 public:
  KernelPredisplay(const Morphism& psi, std::uint64_t cap = 1u << 18)
      : src_(psi.src), disp_(dynamic_cast<const Display*>(psi.src)) {
    require(disp_ != nullptr, errc::not_finite, "kernel needs a block display source");
    for (unsigned i = 0; i <= src_->i_max(); ++i) {
      std::vector<PEl> lvl;
      for (const auto& x : enumerate_level(*disp_, i, cap)) {
        PEl y = psi.apply(i, x);
        if (psi.dst->eq(i, y, psi.dst->zero(i))) lvl.push_back(x);
      }
      elems_.push_back(std::move(lvl));
    }
  }

  const std::vector<std::vector<PEl>>& elements() const { return elems_; }

  const Frame& frame() const override { return src_->frame(); }
  unsigned i_max() const override { return src_->i_max(); }
  PEl zero(unsigned i) const override { return src_->zero(i); }
  bool eq(unsigned i, const PEl& x, const PEl& y) const override { return src_->eq(i, x, y); }
  PEl add(unsigned i, const PEl& x, const PEl& y) const override { return src_->add(i, x, y); }
  PEl neg(unsigned i, const PEl& x) const override { return src_->neg(i, x); }
  PEl mult_w(unsigned i, const WittEl& w, const PEl& x) const override {
    return src_->mult_w(i, w, x);
  }
  PEl mult_j(unsigned i, const JEl& eta, const PEl& x) const override {
    return src_->mult_j(i, eta, x);
  }
  PEl iota(unsigned i, const PEl& x) const override { return src_->iota(i, x); }
  PEl alpha(unsigned i, const JEl& eta, const PEl& x) const override {
    return src_->alpha(i, eta, x);
  }
  PEl fdiv(unsigned i, const PEl& x) const override { return src_->fdiv(i, x); }
  std::vector<PEl> gens(unsigned i) const override { return elems_[i]; }  // all elements
  PEl random(unsigned i, Prng& rng) const override {
    return elems_[i][rng.below(elems_[i].size())];
  }
  std::string str(unsigned i, const PEl& x) const override { return src_->str(i, x); }
  std::vector<std::pair<std::size_t, WittEl>> express(unsigned, const PEl&) const override {
    fail(errc::internal, "express unsupported on finite predisplays");
  }

 private:
  const PredisplayBase* src_;
  const Display* disp_;
  std::vector<std::vector<PEl>> elems_;
};

// cokernel: canonical representatives modulo the enumerated image submodule
class CokernelPredisplay : public PredisplayBase {
 public:
  CokernelPredisplay(const Morphism& psi, std::uint64_t cap = 1u << 18)
      : dst_(psi.dst), disp_src_(dynamic_cast<const Display*>(psi.src)),
        disp_dst_(dynamic_cast<const Display*>(psi.dst)) {
    require(disp_src_ && disp_dst_, errc::not_finite, "cokernel needs block displays");
    // image submodules per level: close the psi-images of the source level
    // sets under addition (they are already submodules as full images)
    for (unsigned i = 0; i <= dst_->i_max(); ++i) {
      std::map<std::string, PEl> img;
      for (const auto& x : enumerate_level(*disp_src_, i, cap)) {
        PEl y = psi.apply(i, x);
        img.emplace(y.key(), y);
      }
      image_.push_back(std::move(img));
      std::vector<PEl> reps;
      std::map<std::string, std::string> seen;  // element key -> rep key
      for (const auto& x : enumerate_level(*disp_dst_, i, cap)) {
        std::string rk = rep_key(i, x);
        if (!seen.count(rk)) {
          seen.emplace(rk, rk);
          reps.push_back(canonical(i, x));
        }
      }
      reps_.push_back(std::move(reps));
    }
  }

  // canonical representative: the least element key in the coset
  PEl canonical(unsigned i, const PEl& x) const {
    PEl best = x;
    std::string bk = x.key();
    for (const auto& kv : image_[i]) {
      PEl cand = dst_->add(i, x, kv.second);
      std::string ck = cand.key();
      if (ck < bk) {
        bk = ck;
        best = cand;
      }
    }
    return best;
  }
  std::string rep_key(unsigned i, const PEl& x) const { return canonical(i, x).key(); }

  const std::vector<std::vector<PEl>>& elements() const { return reps_; }

  const Frame& frame() const override { return dst_->frame(); }
  unsigned i_max() const override { return dst_->i_max(); }
  PEl zero(unsigned i) const override { return canonical(i, dst_->zero(i)); }
  bool eq(unsigned i, const PEl& x, const PEl& y) const override {
    return rep_key(i, x) == rep_key(i, y);
  }
  PEl add(unsigned i, const PEl& x, const PEl& y) const override {
    return canonical(i, dst_->add(i, x, y));
  }
  PEl neg(unsigned i, const PEl& x) const override { return canonical(i, dst_->neg(i, x)); }
  PEl mult_w(unsigned i, const WittEl& w, const PEl& x) const override {
    return canonical(i, dst_->mult_w(i, w, x));
  }
  PEl mult_j(unsigned i, const JEl& eta, const PEl& x) const override {
    return canonical(i, dst_->mult_j(i, eta, x));
  }
  PEl iota(unsigned i, const PEl& x) const override { return canonical(i, dst_->iota(i, x)); }
  PEl alpha(unsigned i, const JEl& eta, const PEl& x) const override {
    return canonical(i + 1, dst_->alpha(i, eta, x));
  }
  PEl fdiv(unsigned i, const PEl& x) const override {
    // quotient of P_0 at reduced precision: reduce modulo the truncated image
    PEl y = dst_->fdiv(i, x);
    PEl best = y;
    std::string bk = y.key();
    for (const auto& kv : image_[0]) {
      PEl cand = dst_->add(0, y, truncate0(kv.second));
      std::string ck = cand.key();
      if (ck < bk) {
        bk = ck;
        best = cand;
      }
    }
    return best;
  }
  std::vector<PEl> gens(unsigned i) const override { return reps_[i]; }
  PEl random(unsigned i, Prng& rng) const override { return reps_[i][rng.below(reps_[i].size())]; }
  std::string str(unsigned i, const PEl& x) const override { return dst_->str(i, x); }
  std::vector<std::pair<std::size_t, WittEl>> express(unsigned, const PEl&) const override {
    fail(errc::internal, "express unsupported on finite predisplays");
  }

 private:
  PEl truncate0(const PEl& x) const {
    PEl y = x;
    for (auto& b : y.blocks)
      for (auto& w : b.wv) w = witt_truncate(w, frame().prec() - 1);
    return y;
  }

  const PredisplayBase* dst_;
  const Display* disp_src_;
  const Display* disp_dst_;
  std::vector<std::map<std::string, PEl>> image_;
  std::vector<std::vector<PEl>> reps_;
};

// ---- exhaustive morphism enumeration (small instances) ----

// All predisplay morphisms src -> dst, found by enumerating images of the
// level generators over the finite level sets and filtering by exhaustive
// linearity and the three squares. Only for genuinely small data.
inline std::vector<Morphism> enumerate_morphisms(const Display& src, const PredisplayBase& dst,
                                                 const std::vector<std::vector<PEl>>& dst_levels,
                                                 std::uint64_t cap = 200000) {
  std::vector<Morphism> found;
  std::vector<std::vector<PEl>> src_levels;
  for (unsigned i = 0; i <= src.i_max(); ++i) src_levels.push_back(enumerate_level(src, i));

  std::vector<std::size_t> gen_counts;
  std::size_t total_slots = 0;
  for (unsigned i = 0; i <= src.i_max(); ++i) {
    gen_counts.push_back(src.gens(i).size());
    total_slots += gen_counts.back();
  }
  // candidate tuples: product over slots of |dst level|
  double log_total = 0;
  for (unsigned i = 0; i <= src.i_max(); ++i)
    log_total += gen_counts[i] * std::log2(double(dst_levels[i].size()));
  require(log_total <= 24.0, errc::not_finite, "morphism search space too large");

  std::vector<std::size_t> counter(total_slots, 0);
  std::vector<std::pair<unsigned, std::size_t>> slot_of;
  for (unsigned i = 0; i <= src.i_max(); ++i)
    for (std::size_t g = 0; g < gen_counts[i]; ++g) slot_of.push_back({i, g});

  std::uint64_t tried = 0;
  for (;;) {
    ++tried;
    require(tried <= cap * 16, errc::not_finite, "morphism search exceeded budget");
    Morphism psi;
    psi.src = &src;
    psi.dst = &dst;
    psi.img.assign(src.i_max() + 1, {});
    for (unsigned i = 0; i <= src.i_max(); ++i) psi.img[i].resize(gen_counts[i], dst.zero(i));
    for (std::size_t s = 0; s < total_slots; ++s)
      psi.img[slot_of[s].first][slot_of[s].second] = dst_levels[slot_of[s].first][counter[s]];

    // staged checks: cheap generator squares first, then exhaustive
    // linearity and squares over the finite level sets
    bool ok = true;
    const Frame& F = src.frame();
    auto jgens = F.j_gens();
    for (unsigned i = 0; i <= src.i_max() && ok; ++i)
      for (const auto& x : src.gens(i))
        if (!dst.eq(0, psi.apply(0, src.fdiv(i, x)), dst.fdiv(i, psi.apply(i, x)))) {
          ok = false;
          break;
        }
    for (unsigned i = 0; i + 1 <= src.i_max() && ok; ++i)
      for (const auto& x : src.gens(i + 1))
        if (!dst.eq(i, psi.apply(i, src.iota(i, x)), dst.iota(i, psi.apply(i + 1, x)))) {
          ok = false;
          break;
        }
    // exhaustive pairwise additivity and module action
    for (unsigned i = 0; i <= src.i_max() && ok; ++i) {
      std::vector<PEl> images;
      images.reserve(src_levels[i].size());
      for (const auto& x : src_levels[i]) images.push_back(psi.apply(i, x));
      for (std::size_t xa = 0; xa < src_levels[i].size() && ok; ++xa)
        for (std::size_t xb = xa; xb < src_levels[i].size(); ++xb) {
          PEl sum = src.add(i, src_levels[i][xa], src_levels[i][xb]);
          if (!dst.eq(i, psi.apply(i, sum), dst.add(i, images[xa], images[xb]))) {
            ok = false;
            break;
          }
        }
      Prng wrng(99);
      for (int t = 0; t < 8 && ok; ++t) {
        WittEl w = F.w_random(wrng);
        for (std::size_t xa = 0; xa < src_levels[i].size(); ++xa)
          if (!dst.eq(i, psi.apply(i, src.mult_w(i, w, src_levels[i][xa])),
                      dst.mult_w(i, w, images[xa]))) {
            ok = false;
            break;
          }
      }
    }
    for (unsigned i = 0; i + 1 <= src.i_max() && ok; ++i) {
      for (const auto& x : src_levels[i + 1])
        if (!dst.eq(i, psi.apply(i, src.iota(i, x)), dst.iota(i, psi.apply(i + 1, x)))) {
          ok = false;
          break;
        }
      if (!ok) break;
      for (const auto& eta : jgens) {
        for (const auto& x : src_levels[i])
          if (!dst.eq(i + 1, psi.apply(i + 1, src.alpha(i, eta, x)),
                      dst.alpha(i, eta, psi.apply(i, x)))) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
    }
    for (unsigned i = 0; i <= src.i_max() && ok; ++i) {
      for (const auto& x : src_levels[i])
        if (!dst.eq(0, psi.apply(0, src.fdiv(i, x)), dst.fdiv(i, psi.apply(i, x)))) {
          ok = false;
          break;
        }
    }
    if (ok) found.push_back(psi);

    // increment the counter
    std::size_t s = 0;
    for (; s < total_slots; ++s) {
      if (++counter[s] < dst_levels[slot_of[s].first].size()) break;
      counter[s] = 0;
    }
    if (s == total_slots) break;
  }
  return found;
}

}  // namespace displib
