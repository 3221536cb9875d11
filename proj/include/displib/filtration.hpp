#pragma once

#include <optional>
#include <string>
#include <vector>

#include "displib/display.hpp"
#include "displib/display_ops.hpp"

namespace displib {

// Hodge filtrations of relative displays, admissible liftings, and the
// inverse of (base-change, Hodge filtration): a standard datum over the
// absolute frame assembled on a basis adapted to the lifting. The
// construction is accepted only when both round-trip contracts verify.

inline PEl iota_iter(const PredisplayBase& P, unsigned i, const PEl& x) {
  PEl cur = x;
  for (unsigned t = i; t-- > 0;) cur = P.iota(t, cur);
  return cur;
}

// reduction P_0 -> P_0 / J P_0 = R^n
inline std::vector<RingEl> reduce_mod_j(const Frame& F, unsigned n, const PEl& x) {
  std::vector<RingEl> out;
  out.reserve(n);
  for (const auto& b : x.blocks)
    for (const auto& w : b.wv) out.push_back(F.to_R(w));
  require(out.size() == n, errc::internal, "level-0 coordinate count");
  return out;
}

// reduction P_0 -> P_0 / I_S P_0 = S^n
inline std::vector<RingEl> reduce_mod_is(const Frame&, unsigned n, const PEl& x) {
  std::vector<RingEl> out;
  out.reserve(n);
  for (const auto& b : x.blocks)
    for (const auto& w : b.wv) out.push_back(w.c[0]);
  require(out.size() == n, errc::internal, "level-0 coordinate count");
  return out;
}

struct HodgeFiltration {
  ArtinRing R;
  unsigned total_rank = 0;
  std::vector<Matrix> steps;  // steps[i] = summand basis of Fil^i, i = 0..i_max

  unsigned rank(unsigned i) const {
    if (i >= steps.size()) return 0;
    return static_cast<unsigned>(steps[i].cols);
  }
};

// Fil^i = im(P_i -> P_0 -> P_0 / J P_0), computed honestly from the iterated
// iota on level generators and certified as a direct summand.
inline HodgeFiltration hodge_fil(const Display& D) {
  const Frame& F = D.frame();
  unsigned n = D.datum().total_rank();
  HodgeFiltration out;
  out.R = F.R();
  out.total_rank = n;
  for (unsigned i = 0; i <= D.i_max(); ++i) {
    std::vector<std::vector<RingEl>> cols;
    for (const auto& g : D.gens(i)) {
      auto v = reduce_mod_j(F, n, iota_iter(D, i, g));
      bool nz = false;
      for (const auto& e : v) nz = nz || !e.is_zero();
      if (nz) cols.push_back(v);
    }
    Matrix m = cols.empty() ? Matrix(out.R, n, 0) : Matrix::from_cols(out.R, cols);
    auto sr = image_summand(m);
    require(sr.is_direct_summand, errc::internal, "Hodge step is not a direct summand");
    out.steps.push_back(sr.summand_basis);
  }
  // descending chain
  for (unsigned i = 0; i + 1 < out.steps.size(); ++i)
    require(span_leq(out.steps[i + 1], out.steps[i]), errc::internal,
            "Hodge filtration is not descending");
  return out;
}

// A lifting of the Hodge filtration: direct summands E^i of P_0 / I_S P_0
// reducing to Fil^i mod the kernel ideal.
struct Lifting {
  ArtinRing S;
  unsigned total_rank = 0;
  std::vector<Matrix> steps;  // over S, i = 0..i_max

  unsigned rank(unsigned i) const {
    if (i >= steps.size()) return 0;
    return static_cast<unsigned>(steps[i].cols);
  }
};

inline void lifting_validate(const Display& D, const Lifting& E) {
  const Frame& F = D.frame();
  unsigned n = D.datum().total_rank();
  require(E.total_rank == n, errc::shape_mismatch, "lifting rank mismatch");
  require(E.steps.size() == D.i_max() + 1, errc::shape_mismatch, "lifting step count");
  HodgeFiltration fil = hodge_fil(D);
  for (unsigned i = 0; i <= D.i_max(); ++i) {
    auto sr = image_summand(E.steps[i]);
    require(sr.is_direct_summand && sr.unit_rank == E.steps[i].cols, errc::not_a_lift,
            "lifting step is not a free direct summand");
    if (i + 1 <= D.i_max())
      require(span_leq(E.steps[i + 1], E.steps[i]), errc::not_a_lift,
              "lifting steps are not descending");
    // reduction mod the kernel ideal must equal the Hodge step
    Matrix red(F.R(), n, E.steps[i].cols);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < E.steps[i].cols; ++c)
        red.at(r, c) = F.proj().apply(E.steps[i].at(r, c));
    require(span_eq(red, fil.steps[i]), errc::not_a_lift,
            "lifting does not reduce to the Hodge filtration");
  }
}

struct AdmissibleResult {
  bool admissible = false;
  std::string witness;
  // preimage certificates: for step i, column c, a level-i element whose
  // iterated iota reduces to the column mod I_S
  std::vector<std::vector<PEl>> preimages;
};

// E^i must land in im(P_i -> P_0 -> P_0 / I_S P_0); the certificate records
// level-i preimages assembled from the generator images.
inline AdmissibleResult admissible_check(const Display& D, const Lifting& E) {
  const Frame& F = D.frame();
  const ArtinRing& S = F.S();
  unsigned n = D.datum().total_rank();
  AdmissibleResult out;
  out.preimages.resize(E.steps.size());
  for (unsigned i = 0; i < E.steps.size(); ++i) {
    auto gens = D.gens(i);
    std::vector<std::vector<RingEl>> cols;
    for (const auto& g : gens) cols.push_back(reduce_mod_is(F, n, iota_iter(D, i, g)));
    Matrix img = Matrix::from_cols(S, cols);
    for (std::size_t c = 0; c < E.steps[i].cols; ++c) {
      auto res = solve_linear(img, E.steps[i].col(c));
      if (!res.solvable) {
        out.admissible = false;
        out.witness = "step " + std::to_string(i) + " column " + std::to_string(c) +
                      " escapes the image of P_" + std::to_string(i);
        return out;
      }
      // assemble the preimage with Teichmueller lifts of the coefficients
      PEl y = D.zero(i);
      for (std::size_t g = 0; g < gens.size(); ++g) {
        if (res.x[g].is_zero()) continue;
        y = D.add(i, y, D.mult_w(i, teichmuller(res.x[g], F.prec()), gens[g]));
      }
      out.preimages[i].push_back(std::move(y));
    }
  }
  out.admissible = true;
  return out;
}

// solve B z = rhs over W(S) by unit-pivot elimination (B invertible)
inline std::vector<WittEl> wmatrix_solve(const Frame& F, const WMatrix& B,
                                         std::vector<WittEl> rhs) {
  std::size_t n = B.nrows();
  WMatrix W = B;
  // forward elimination with full pivoting on unit entries
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::vector<char> row_used(n, 0);
  std::vector<std::size_t> pivot_row(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t pr = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!row_used[i] && witt_is_unit(W.rows[i][j])) {
        pr = i;
        break;
      }
    require(pr != n, errc::internal, "matrix not invertible over W(S)");
    row_used[pr] = 1;
    pivot_row[j] = pr;
    WittEl inv = witt_invert(W.rows[pr][j]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == pr) continue;
      WittEl f = witt_mul(W.rows[i][j], inv);
      if (f.is_zero()) continue;
      for (std::size_t c = 0; c < n; ++c)
        W.rows[i][c] = witt_sub(W.rows[i][c], witt_mul(f, W.rows[pr][c]));
      rhs[i] = witt_sub(rhs[i], witt_mul(f, rhs[pr]));
    }
  }
  std::vector<WittEl> z(n, witt_zero(F.S(), rhs.front().prec()));
  for (std::size_t j = 0; j < n; ++j)
    z[j] = witt_mul(witt_invert(W.rows[pivot_row[j]][j]), rhs[pivot_row[j]]);
  return z;
}

struct DisplayLiftResult {
  StandardDatum datum;       // over the absolute frame W_S at one lower precision
  Frame abs_frame;           // that frame
  Matrix adapted;            // adapted S-basis of P_0 / I_S P_0 (columns by degree)
  WMatrix basis_w;           // its W(S)-lift: columns iota-iter of the preimages
  std::vector<std::vector<PEl>> preimages;  // per degree, per slot: level-j preimages
  std::vector<unsigned> new_ranks;
};

// Build the W_S-standard datum attached to an admissible lifting: choose an
// adapted basis through the preimage certificates, rewrite the divided
// Frobenii in that basis, and return the datum. Callers verify the two
// round-trip contracts; the construction itself only promises a valid datum.
inline DisplayLiftResult display_lift(const Display& D, const Lifting& E) {
  const Frame& F = D.frame();
  const ArtinRing& S = F.S();
  unsigned n = D.datum().total_rank();
  require(F.prec() >= D.i_max() + 2, errc::precision_exhausted,
          "display_lift consumes one Witt level; raise the frame precision");
  lifting_validate(D, E);
  AdmissibleResult adm = admissible_check(D, E);
  require(adm.admissible, errc::not_admissible, adm.witness);

  unsigned d = D.i_max();
  // choose adapted columns degree by degree from the top
  std::vector<std::vector<std::size_t>> chosen(d + 1);
  Matrix picked(S, n, 0);
  auto try_add = [&](const Matrix& step, std::size_t col) {
    Matrix cand(S, n, picked.cols + 1);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < picked.cols; ++c) cand.at(r, c) = picked.at(r, c);
      cand.at(r, picked.cols) = step.at(r, col);
    }
    auto sr = image_summand(cand);
    if (sr.is_direct_summand && sr.unit_rank == cand.cols) {
      picked = std::move(cand);
      return true;
    }
    return false;
  };
  std::vector<std::pair<unsigned, std::size_t>> picked_src;  // (degree, column in E-step)
  for (int j = static_cast<int>(d); j >= 0; --j) {
    unsigned want = E.rank(j) ;
    for (std::size_t c = 0; c < E.steps[j].cols && picked.cols < want; ++c) {
      if (try_add(E.steps[j], c)) {
        chosen[j].push_back(c);
        picked_src.push_back({static_cast<unsigned>(j), c});
      }
    }
    require(picked.cols == want, errc::not_a_lift,
            "could not complete an adapted basis at degree " + std::to_string(j));
  }
  // new ranks: r_j = rank E^j - rank E^{j+1}
  std::vector<unsigned> new_ranks(d + 1, 0);
  for (unsigned j = 0; j <= d; ++j) new_ranks[j] = E.rank(j) - (j + 1 <= d ? E.rank(j + 1) : 0);

  // order the picked columns by increasing degree and keep their preimages
  std::vector<std::vector<PEl>> pre_by_degree(d + 1);
  Matrix adapted(S, n, n);
  WMatrix basis_w;
  basis_w.rows.assign(n, std::vector<WittEl>(n, F.w_zero()));
  {
    std::size_t flat = 0;
    for (unsigned j = 0; j <= d; ++j) {
      for (std::size_t t = 0; t < picked_src.size(); ++t) {
        if (picked_src[t].first != j) continue;
        std::size_t col = picked_src[t].second;
        PEl y = adm.preimages[j][col];
        PEl hat = iota_iter(D, j, y);
        auto sv = reduce_mod_is(F, n, hat);
        // column of the adapted basis and its exact W-lift
        std::size_t rrow = 0;
        for (const auto& b : hat.blocks)
          for (const auto& w : b.wv) basis_w.rows[rrow++][flat] = w;
        for (std::size_t r = 0; r < n; ++r) adapted.at(r, flat) = sv[r];
        pre_by_degree[j].push_back(y);
        ++flat;
      }
    }
    require(flat == n, errc::internal, "adapted basis column count");
  }
  require(wmatrix_invertible(F, basis_w), errc::not_a_lift,
          "adapted basis does not lift to a W(S)-basis");

  // assemble the new datum over the absolute frame at one lower precision
  Frame abs = Frame::witt(S, F.prec() - 1);
  StandardDatum out;
  out.frame = abs;
  out.d = d;
  out.ranks = new_ranks;
  out.phi.rows.assign(n, std::vector<WittEl>(n, witt_zero(S, F.prec() - 1)));
  WMatrix basis_small;
  basis_small.rows.assign(n, std::vector<WittEl>(n, witt_zero(S, F.prec() - 1)));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      basis_small.rows[r][c] = witt_truncate(basis_w.rows[r][c], F.prec() - 1);
  {
    std::size_t flat = 0;
    for (unsigned j = 0; j <= d; ++j) {
      for (const auto& y : pre_by_degree[j]) {
        PEl fy = D.fdiv(j, y);  // level-0 coordinates at prec - 1
        std::vector<WittEl> rhs;
        for (const auto& b : fy.blocks)
          for (const auto& w : b.wv) rhs.push_back(w);
        auto z = wmatrix_solve(F, basis_small, rhs);
        for (std::size_t r = 0; r < n; ++r) out.phi.rows[r][flat] = z[r];
        ++flat;
      }
    }
  }
  out.validate();

  DisplayLiftResult res;
  res.datum = std::move(out);
  res.abs_frame = abs;
  res.adapted = std::move(adapted);
  res.basis_w = std::move(basis_w);
  res.preimages = std::move(pre_by_degree);
  res.new_ranks = std::move(new_ranks);
  return res;
}

// round trip (b): the Hodge filtration of the lifted display, transported
// back through the adapted basis, equals the lifting
inline bool display_lift_round_b(const Display& D, const Lifting& E,
                                 const DisplayLiftResult& L) {
  Display lifted = display_build(L.datum, static_cast<int>(D.i_max()));
  HodgeFiltration fil = hodge_fil(lifted);  // over S (absolute frame: R = S)
  const ArtinRing& S = D.frame().S();
  unsigned n = L.datum.total_rank();
  for (unsigned i = 0; i <= D.i_max(); ++i) {
    // transport: columns adapted * (fil step in new coordinates)
    Matrix img(S, n, fil.steps[i].cols);
    for (std::size_t c = 0; c < fil.steps[i].cols; ++c) {
      std::vector<RingEl> v(n, S.zero());
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k)
          v[r] = ring_add(v[r], ring_mul(L.adapted.at(r, k), fil.steps[i].at(k, c)));
      for (std::size_t r = 0; r < n; ++r) img.at(r, c) = v[r];
    }
    if (!span_eq(img, E.steps[i])) return false;
  }
  return true;
}

// round trip (a): an explicit morphism from the base-change of the lifted
// datum back to the original display, built from the preimage certificates
inline Morphism display_lift_round_a_morphism(const Display&, const DisplayLiftResult& L,
                                              const Display& lifted_over_rel,
                                              const Display& target_small) {
  // lifted_over_rel: the lifted datum base-changed to the relative frame
  // target_small: the original datum truncated to the lower precision
  Morphism psi;
  psi.src = &lifted_over_rel;
  psi.dst = &target_small;
  const Frame& F = target_small.frame();
  unsigned d = lifted_over_rel.i_max();
  psi.img.assign(d + 1, {});
  for (unsigned i = 0; i <= d; ++i) {
    auto infos = lifted_over_rel.gen_infos(i);
    for (const auto& gi : infos) {
      // locate the (degree, slot) source data
      unsigned j = gi.degree;
      // preimage of that basis vector, truncated into the smaller display
      PEl y = L.preimages[j][gi.basis_index];
      PEl y_small = target_small.zero(j);
      {
        auto spec = target_small.level_spec(j);
        for (std::size_t b = 0; b < spec.size(); ++b) {
          if (spec[b].twist > 0) {
            for (unsigned s = 0; s < spec[b].rank; ++s) {
              const JEl& q = y.blocks[b].jv[s];
              y_small.blocks[b].jv[s] =
                  F.j_make(q.a, witt_truncate(q.xi, F.prec() - 1));
            }
          } else {
            for (unsigned s = 0; s < spec[b].rank; ++s)
              y_small.blocks[b].wv[s] = witt_truncate(y.blocks[b].wv[s], F.prec());
          }
        }
      }
      PEl img;
      if (gi.jgen_index < 0) {
        // untwisted generator at level i <= j: iterate iota down from j
        PEl cur = y_small;
        for (unsigned t = j; t > i; --t) cur = target_small.iota(t - 1, cur);
        img = cur;
      } else {
        // twisted generator: alpha-raise the nu-factorization against y
        const auto& jg = lifted_over_rel.jpow_cache(gi.twist)[gi.jgen_index];
        PEl cur = y_small;
        unsigned lvl = j;
        for (std::size_t t = jg.factors.size(); t-- > 0;) {
          JEl eta = jg.factors[t];
          JEl eta_t = F.j_make(eta.a, witt_truncate(eta.xi, F.prec() - 1));
          cur = target_small.alpha(lvl, eta_t, cur);
          ++lvl;
        }
        require(lvl == i, errc::internal, "alpha-raise level mismatch");
        img = cur;
      }
      psi.img[i].push_back(std::move(img));
    }
  }
  return psi;
}

}  // namespace displib
