#pragma once

#include <string>
#include <vector>

#include "displib/error.hpp"
#include "displib/ideal.hpp"
#include "displib/linalg.hpp"
#include "displib/ring.hpp"

namespace displib {

// Evaluation homomorphism between coefficient-compatible rings: same p, the
// target exponent at most the source exponent, same residue degree. Variables
// map to chosen elements; relations are checked at construction.
class RingHom {
 public:
  RingHom() = default;

  static RingHom make(ArtinRing src, ArtinRing dst, std::vector<RingEl> var_images) {
    require(src.p() == dst.p(), errc::relation_violated, "homomorphism must preserve p");
    require(dst.N() <= src.N(), errc::relation_violated,
            "p-exponent may only drop along the map");
    require(src.f() == dst.f(), errc::relation_violated, "residue degree must match");
    require(var_images.size() == src.num_vars(), errc::relation_violated,
            "one image per source variable");
    RingHom h;
    h.src_ = std::move(src);
    h.dst_ = std::move(dst);
    h.images_ = std::move(var_images);
    for (const auto& im : h.images_) {
      require(im.ring().same_ring(h.dst_), errc::parent_mismatch, "image in wrong ring");
    }
    // truncation relations must map to zero
    for (Mono t : h.src_.data().trunc) {
      RingEl img = h.dst_.one();
      for (unsigned v = 0; v < h.src_.num_vars(); ++v) {
        unsigned e = mono_exp(t, v);
        if (e) img = ring_mul(img, ring_pow(h.images_[v], e));
      }
      require(img.is_zero(), errc::relation_violated,
              "truncation relation not preserved by the images");
    }
    return h;
  }

  static RingHom identity(const ArtinRing& R) {
    std::vector<RingEl> imgs;
    for (std::size_t v = 0; v < R.num_vars(); ++v) imgs.push_back(R.var(v));
    return make(R, R, std::move(imgs));
  }

  const ArtinRing& src() const { return src_; }
  const ArtinRing& dst() const { return dst_; }
  const std::vector<RingEl>& var_images() const { return images_; }

  RingEl apply(const RingEl& x) const {
    require(x.ring().same_ring(src_), errc::parent_mismatch, "apply: wrong source ring");
    RingEl out = dst_.zero();
    for (const auto& t : x.terms()) {
      RingEl term = dst_.from_coeff(map_coeff(t.second));
      for (unsigned v = 0; v < src_.num_vars(); ++v) {
        unsigned e = mono_exp(t.first, v);
        if (e) term = ring_mul(term, ring_pow(images_[v], e));
      }
      out = ring_add(out, term);
    }
    return out;
  }

  Matrix apply(const Matrix& m) const {
    Matrix r(dst_, m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.cols; ++j) r.at(i, j) = apply(m.at(i, j));
    return r;
  }

  std::vector<RingEl> apply(const std::vector<RingEl>& v) const {
    std::vector<RingEl> r;
    r.reserve(v.size());
    for (const auto& x : v) r.push_back(apply(x));
    return r;
  }

  friend RingHom compose(const RingHom& g, const RingHom& f) {
    require(f.dst().same_ring(g.src()), errc::parent_mismatch, "compose: rings do not chain");
    std::vector<RingEl> imgs;
    for (const auto& im : f.images_) imgs.push_back(g.apply(im));
    return make(f.src_, g.dst_, std::move(imgs));
  }

  bool is_surjective() const {
    // the coefficient-span of the multiplicative closure of the images must
    // be all of the target
    std::vector<RingEl> monoms{dst_.one()};
    std::vector<std::string> seen{dst_.one().key()};
    for (std::size_t head = 0; head < monoms.size(); ++head) {
      for (const auto& im : images_) {
        RingEl cand = ring_mul(monoms[head], im);
        if (cand.is_zero()) continue;
        std::string k = cand.key();
        bool found = false;
        for (const auto& s : seen)
          if (s == k) found = true;
        if (!found && monoms.size() < 4096) {
          seen.push_back(k);
          monoms.push_back(cand);
        }
      }
    }
    return module_span_log_digits(dst_, monoms) == ring_log_digits(dst_);
  }

  // Ideal generators of the kernel: p^(N_dst) when the exponent drops, plus
  // lifts of the coefficient-level kernel of the map on basis monomials.
  std::vector<RingEl> kernel_ideal_gens() const {
    std::vector<RingEl> gens;
    if (dst_.N() < src_.N()) {
      std::uint64_t c = src_.c_one();
      for (unsigned i = 0; i < dst_.N(); ++i)
        c = src_.c_mul(c, src_.c_from_int(static_cast<long long>(src_.p())));
      gens.push_back(src_.from_coeff(c));
    }
    const auto& sbasis = src_.data().basis;
    detail::CoeffSystem sys;
    sys.R = dst_;
    sys.rows = dst_.basis_size();
    sys.cols = sbasis.size();
    sys.a.assign(sys.rows * sys.cols, 0);
    sys.b.assign(sys.rows, 0);
    for (std::size_t j = 0; j < sbasis.size(); ++j) {
      RingEl img = apply(src_.monomial(sbasis[j], src_.c_one()));
      for (const auto& t : img.terms())
        sys.at(dst_.data().basis_index.at(t.first), j) = t.second;
    }
    auto cres = detail::coeff_solve(std::move(sys), true);
    for (const auto& kv : cres.kernel) {
      RingEl g = src_.zero();
      for (std::size_t beta = 0; beta < sbasis.size(); ++beta) {
        if (kv[beta] == 0) continue;
        std::uint64_t digits = kv[beta];
        std::uint64_t lifted = src_.f() == 1 ? digits % src_.data().pN : digits;
        g = ring_add(g, src_.monomial(sbasis[beta], lifted));
      }
      if (!g.is_zero() && apply(g).is_zero()) gens.push_back(g);
    }
    return gens;
  }

  // does the kernel of this (surjective) map equal the given ideal?
  bool kernel_equals(const IdealPtr& I) const {
    for (const auto& g : I->gens())
      if (!apply(g).is_zero()) return false;
    unsigned ker_digits = ring_log_digits(src_) - ring_log_digits(dst_);
    return module_span_log_digits(src_, I->gens()) == ker_digits;
  }

 private:
  std::uint64_t map_coeff(std::uint64_t c) const {
    if (src_.f() == 1) {
      return c % dst_.data().pN;
    }
    return c;  // same residue field, digit-for-digit
  }

  ArtinRing src_, dst_;
  std::vector<RingEl> images_;
};

}  // namespace displib
