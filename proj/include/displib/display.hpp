#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "displib/frame.hpp"
#include "displib/frame_check.hpp"
#include "displib/prng.hpp"
#include "displib/report.hpp"

namespace displib {

// Higher displays from standard data. A standard datum is free modules
// L_0..L_d with a sigma-linear map Phi_i : L_i -> L_0 + ... + L_d for each i
// whose sum is a sigma-linear isomorphism; the display has levels
//   P_i = J_i L_0 + J_{i-1} L_1 + ... + J L_{i-1} + L_i + ... + L_d
// with iota given by pi / inclusion / id on the summands, alpha by nu /
// scalar placement / multiplication, and the divided Frobenius F_i acting as
// sigma-dot-twisted Phi on twisted summands and p^{j-i} Phi_j on untwisted
// ones. Elements are stored per summand: twisted coordinates are J-pairs.

struct WMatrix {
  std::vector<std::vector<WittEl>> rows;  // rows x cols

  std::size_t nrows() const { return rows.size(); }
  std::size_t ncols() const { return rows.empty() ? 0 : rows.front().size(); }
};

inline bool wmatrix_invertible(const Frame&, const WMatrix& m) {
  // unit-pivot elimination over the local ring W(S)
  if (m.nrows() != m.ncols()) return false;
  WMatrix w = m;
  std::size_t n = w.nrows();
  std::vector<char> row_used(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t pr = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!row_used[i] && witt_is_unit(w.rows[i][j])) {
        pr = i;
        break;
      }
    if (pr == n) return false;
    row_used[pr] = 1;
    WittEl inv = witt_invert(w.rows[pr][j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      WittEl f = witt_mul(w.rows[pr][k], inv);
      if (f.is_zero()) continue;
      for (std::size_t i = 0; i < n; ++i)
        w.rows[i][k] = witt_sub(w.rows[i][k], witt_mul(f, w.rows[i][j]));
    }
  }
  return true;
}

struct StandardDatum {
  Frame frame;
  unsigned d = 0;
  std::vector<unsigned> ranks;  // r_0..r_d
  WMatrix phi;                  // n x n, columns grouped by degree

  unsigned total_rank() const {
    unsigned n = 0;
    for (unsigned r : ranks) n += r;
    return n;
  }
  unsigned col_offset(unsigned j) const {
    unsigned off = 0;
    for (unsigned t = 0; t < j; ++t) off += ranks[t];
    return off;
  }

  void validate() const {
    require(ranks.size() == d + 1, errc::datum_invalid, "need d+1 ranks");
    unsigned n = total_rank();
    require(n >= 1, errc::datum_invalid, "empty datum");
    require(phi.nrows() == n && phi.ncols() == n, errc::datum_invalid, "Phi must be n x n");
    for (const auto& row : phi.rows)
      for (const auto& e : row)
        require(e.base.same_ring(frame.S()) && e.prec() >= frame.prec(),
                errc::datum_invalid, "Phi entries must live in W(S) at frame precision");
    require(wmatrix_invertible(frame, phi), errc::datum_invalid,
            "Phi_0 + ... + Phi_d is not a sigma-linear isomorphism");
  }
};

// direct sum of data: ranks add degreewise, Phi blocks assemble diagonally
inline StandardDatum datum_dsum(const StandardDatum& A, const StandardDatum& B) {
  require(A.frame.same_frame(B.frame), errc::parent_mismatch, "direct sum over one frame");
  StandardDatum out;
  out.frame = A.frame;
  out.d = std::max(A.d, B.d);
  out.ranks.assign(out.d + 1, 0);
  for (unsigned j = 0; j <= out.d; ++j)
    out.ranks[j] = (j <= A.d ? A.ranks[j] : 0) + (j <= B.d ? B.ranks[j] : 0);
  unsigned n = out.total_rank();
  out.phi.rows.assign(n, std::vector<WittEl>(n, A.frame.w_zero()));
  // index maps: (source, degree, index within degree) -> new flat index
  auto new_index = [&](bool from_b, unsigned j, unsigned s) {
    unsigned off = out.col_offset(j);
    unsigned a_rank = j <= A.d ? A.ranks[j] : 0;
    return off + (from_b ? a_rank + s : s);
  };
  for (int which = 0; which < 2; ++which) {
    const StandardDatum& D = which ? B : A;
    for (unsigned j = 0; j <= D.d; ++j)
      for (unsigned s = 0; s < D.ranks[j]; ++s) {
        unsigned col_old = D.col_offset(j) + s;
        unsigned col_new = new_index(which, j, s);
        for (unsigned j2 = 0; j2 <= D.d; ++j2)
          for (unsigned s2 = 0; s2 < D.ranks[j2]; ++s2) {
            unsigned row_old = D.col_offset(j2) + s2;
            unsigned row_new = new_index(which, j2, s2);
            out.phi.rows[row_new][col_new] = D.phi.rows[row_old][col_old];
          }
      }
  }
  out.validate();
  return out;
}

// ---- level elements ----

struct BlockSpec {
  unsigned degree = 0;  // j
  unsigned twist = 0;   // k; 0 means untwisted
  unsigned rank = 0;
};

struct BlockVals {
  std::vector<JEl> jv;     // used when twisted
  std::vector<WittEl> wv;  // used when untwisted
};

struct PEl {
  std::vector<BlockVals> blocks;

  std::string key() const {
    std::string s;
    for (const auto& b : blocks) {
      s += "B";
      for (const auto& j : b.jv) s += j.key();
      s += "/";
      for (const auto& w : b.wv) s += w.key();
    }
    return s;
  }
};

// generator bookkeeping: which summand and which J_k-generator produced it
struct GenInfo {
  unsigned block = 0;
  unsigned degree = 0;
  unsigned twist = 0;
  unsigned basis_index = 0;
  int jgen_index = -1;  // index into j_power_gens(frame, twist); -1 untwisted
};

// Abstract predisplay interface: block displays, pullbacks and the finite
// kernel/cokernel objects all implement it, so one checker serves all.
class PredisplayBase {
 public:
  virtual ~PredisplayBase() = default;
  virtual const Frame& frame() const = 0;
  virtual unsigned i_max() const = 0;
  virtual PEl zero(unsigned i) const = 0;
  virtual bool eq(unsigned i, const PEl& x, const PEl& y) const = 0;
  virtual PEl add(unsigned i, const PEl& x, const PEl& y) const = 0;
  virtual PEl neg(unsigned i, const PEl& x) const = 0;
  virtual PEl mult_w(unsigned i, const WittEl& w, const PEl& x) const = 0;
  virtual PEl mult_j(unsigned i, const JEl& eta, const PEl& x) const = 0;
  virtual PEl iota(unsigned i, const PEl& x) const = 0;                  // P_{i+1} -> P_i
  virtual PEl alpha(unsigned i, const JEl& eta, const PEl& x) const = 0; // J x P_i -> P_{i+1}
  virtual PEl fdiv(unsigned i, const PEl& x) const = 0;                  // P_i -> P_0
  virtual std::vector<PEl> gens(unsigned i) const = 0;
  virtual PEl random(unsigned i, Prng& rng) const = 0;
  virtual std::string str(unsigned i, const PEl& x) const = 0;
  // express x over gens(i); optional (throws when unsupported)
  virtual std::vector<std::pair<std::size_t, WittEl>> express(unsigned i, const PEl& x) const = 0;
};

// fault injection for the axiom tests: corrupt one constructed map
struct DisplayFault {
  enum class Map { fdiv, iota, alpha } map = Map::fdiv;
  unsigned level = 0;   // which F_i / iota_i / alpha_i
  unsigned block = 0;   // which summand
  bool enabled = false;
};

class Display : public PredisplayBase {
 public:
  Display(StandardDatum datum, unsigned imax, DisplayFault fault = {})
      : datum_(std::move(datum)), imax_(imax), fault_(fault) {
    datum_.validate();
    F_ = datum_.frame;
    require(imax_ + 1 <= F_.prec(), errc::insufficient_precision,
            "need Witt precision above the truncation level");
  }

  static Display build(const StandardDatum& datum, int imax = -1) {
    unsigned lv = imax < 0 ? datum.d : static_cast<unsigned>(imax);
    return Display(datum, lv);
  }

  const StandardDatum& datum() const { return datum_; }
  const Frame& frame() const override { return F_; }
  unsigned i_max() const override { return imax_; }

  std::vector<BlockSpec> level_spec(unsigned i) const {
    std::vector<BlockSpec> out;
    for (unsigned j = 0; j <= datum_.d; ++j) {
      BlockSpec b;
      b.degree = j;
      b.twist = j < i ? i - j : 0;
      b.rank = datum_.ranks[j];
      out.push_back(b);
    }
    return out;
  }

  PEl zero(unsigned i) const override {
    PEl x;
    for (const auto& b : level_spec(i)) {
      BlockVals v;
      if (b.twist > 0)
        v.jv.assign(b.rank, F_.j_zero());
      else
        v.wv.assign(b.rank, F_.w_zero());
      x.blocks.push_back(std::move(v));
    }
    return x;
  }

  bool eq(unsigned i, const PEl& x, const PEl& y) const override {
    auto spec = level_spec(i);
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          if (!F_.j_eq(x.blocks[b].jv[s], y.blocks[b].jv[s])) return false;
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          if (!witt_eq(x.blocks[b].wv[s], y.blocks[b].wv[s])) return false;
      }
    }
    return true;
  }

  PEl add(unsigned i, const PEl& x, const PEl& y) const override {
    auto spec = level_spec(i);
    PEl r = x;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].jv[s] = F_.j_add(x.blocks[b].jv[s], y.blocks[b].jv[s]);
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].wv[s] = witt_add(x.blocks[b].wv[s], y.blocks[b].wv[s]);
      }
    }
    return r;
  }

  PEl neg(unsigned i, const PEl& x) const override {
    auto spec = level_spec(i);
    PEl r = x;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s) r.blocks[b].jv[s] = F_.j_neg(x.blocks[b].jv[s]);
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s) r.blocks[b].wv[s] = witt_neg(x.blocks[b].wv[s]);
      }
    }
    return r;
  }

  PEl mult_w(unsigned i, const WittEl& w, const PEl& x) const override {
    auto spec = level_spec(i);
    PEl r = x;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].jv[s] = F_.j_smul(w, x.blocks[b].jv[s]);
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].wv[s] = witt_mul(w, x.blocks[b].wv[s]);
      }
    }
    return r;
  }

  // multiplication map J x P_i -> P_i (the target of P2)
  PEl mult_j(unsigned i, const JEl& eta, const PEl& x) const override {
    auto spec = level_spec(i);
    PEl r = zero(i);
    WittEl eta_w = F_.j_to_witt(eta);
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].jv[s] = F_.j_mul(eta, x.blocks[b].jv[s]);
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          r.blocks[b].wv[s] = witt_mul(eta_w, x.blocks[b].wv[s]);
      }
    }
    return r;
  }

  // iota_i : P_{i+1} -> P_i. pi on deeper twists, inclusion at the boundary.
  PEl iota(unsigned i, const PEl& x) const override {
    require(i + 1 <= imax_, errc::internal, "iota level out of range");
    PEl r = zero(i);
    auto spec_hi = level_spec(i + 1);
    for (std::size_t b = 0; b < spec_hi.size(); ++b) {
      unsigned j = spec_hi[b].degree;
      bool faulted = fault_.enabled && fault_.map == DisplayFault::Map::iota &&
                     fault_.level == i && fault_.block == b;
      if (j < i) {  // twist k+1 -> k via pi
        for (unsigned s = 0; s < spec_hi[b].rank; ++s) {
          JEl v = F_.pi(x.blocks[b].jv[s]);
          if (faulted) v = F_.pi(v);
          r.blocks[b].jv[s] = v;
        }
      } else if (j == i) {  // J L_i -> L_i inclusion
        for (unsigned s = 0; s < spec_hi[b].rank; ++s) {
          WittEl v = F_.j_to_witt(x.blocks[b].jv[s]);
          if (faulted) v = witt_mul(v, F_.w_from_int(static_cast<long long>(F_.p())));
          r.blocks[b].wv[s] = v;
        }
      } else {  // identity
        for (unsigned s = 0; s < spec_hi[b].rank; ++s) r.blocks[b].wv[s] = x.blocks[b].wv[s];
      }
    }
    return r;
  }

  // alpha_i : J x P_i -> P_{i+1}. nu on twisted summands, placement at
  // degree i, multiplication above.
  PEl alpha(unsigned i, const JEl& eta, const PEl& x) const override {
    require(i + 1 <= imax_, errc::internal, "alpha level out of range");
    PEl r = zero(i + 1);
    auto spec_lo = level_spec(i);
    WittEl eta_w = F_.j_to_witt(eta);
    for (std::size_t b = 0; b < spec_lo.size(); ++b) {
      unsigned j = spec_lo[b].degree;
      bool faulted = fault_.enabled && fault_.map == DisplayFault::Map::alpha &&
                     fault_.level == i && fault_.block == b;
      if (j < i) {  // nu against the existing twist
        for (unsigned s = 0; s < spec_lo[b].rank; ++s) {
          JEl v = F_.nu(eta, x.blocks[b].jv[s]);
          if (faulted) v = F_.pi(v);
          r.blocks[b].jv[s] = v;
        }
      } else if (j == i) {  // eta placed against the W-coordinate
        for (unsigned s = 0; s < spec_lo[b].rank; ++s) {
          JEl v = F_.j_smul(x.blocks[b].wv[s], eta);
          if (faulted) v = F_.pi(v);
          r.blocks[b].jv[s] = v;
        }
      } else {  // plain multiplication
        for (unsigned s = 0; s < spec_lo[b].rank; ++s) {
          WittEl v = witt_mul(eta_w, x.blocks[b].wv[s]);
          if (faulted) v = witt_mul(v, F_.w_from_int(static_cast<long long>(F_.p())));
          r.blocks[b].wv[s] = v;
        }
      }
    }
    return r;
  }

  // F_i : P_i -> P_0, with one Frobenius worth of precision loss.
  PEl fdiv(unsigned i, const PEl& x) const override {
    unsigned n = datum_.total_rank();
    unsigned out_prec = F_.prec() - 1;
    std::vector<WittEl> acc(n, witt_zero(F_.S(), out_prec));
    auto spec = level_spec(i);
    WittEl p_w = witt_from_int(F_.S(), out_prec, static_cast<long long>(F_.p()));
    for (std::size_t b = 0; b < spec.size(); ++b) {
      unsigned j = spec[b].degree;
      unsigned off = datum_.col_offset(j);
      bool faulted = fault_.enabled && fault_.map == DisplayFault::Map::fdiv &&
                     fault_.level == i && fault_.block == b;
      if (spec[b].twist > 0) {
        // iterated-tilde Phi_j: sigma-dot of the twist times the Phi column
        for (unsigned s = 0; s < spec[b].rank; ++s) {
          WittEl sd = F_.sigma_dot(x.blocks[b].jv[s]);
          if (faulted) sd = witt_mul(sd, witt_from_int(F_.S(), sd.prec(),
                                                       static_cast<long long>(F_.p())));
          if (sd.is_zero()) continue;
          for (unsigned rrow = 0; rrow < n; ++rrow)
            acc[rrow] = witt_add(acc[rrow], witt_mul(sd, datum_.phi.rows[rrow][off + s]));
        }
      } else {
        // p^{j-i} Phi_j
        WittEl scale = witt_one(F_.S(), out_prec);
        for (unsigned t = i; t < j; ++t) scale = witt_mul(scale, p_w);
        for (unsigned s = 0; s < spec[b].rank; ++s) {
          WittEl sw = F_.sigma(x.blocks[b].wv[s]);
          if (faulted) sw = witt_add(sw, witt_one(F_.S(), sw.prec()));
          if (sw.is_zero()) continue;
          WittEl c = witt_mul(scale, sw);
          for (unsigned rrow = 0; rrow < n; ++rrow)
            acc[rrow] = witt_add(acc[rrow], witt_mul(c, datum_.phi.rows[rrow][off + s]));
        }
      }
    }
    PEl r = zero(0);
    auto spec0 = level_spec(0);
    unsigned flat = 0;
    for (std::size_t b = 0; b < spec0.size(); ++b)
      for (unsigned s = 0; s < spec0[b].rank; ++s) r.blocks[b].wv[s] = acc[flat++];
    return r;
  }

  // flat generator list: per block, J_twist-generators against each basis
  // vector for twisted summands, the basis itself for untwisted ones
  std::vector<PEl> gens(unsigned i) const override {
    std::vector<PEl> out;
    for (const auto& gi : gen_infos(i)) {
      PEl x = zero(i);
      if (gi.jgen_index >= 0) {
        x.blocks[gi.block].jv[gi.basis_index] =
            jpow_cache(gi.twist)[static_cast<std::size_t>(gi.jgen_index)].value;
      } else {
        x.blocks[gi.block].wv[gi.basis_index] = F_.w_one();
      }
      out.push_back(std::move(x));
    }
    return out;
  }

  std::vector<GenInfo> gen_infos(unsigned i) const {
    std::vector<GenInfo> out;
    auto spec = level_spec(i);
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        const auto& jg = jpow_cache(spec[b].twist);
        for (std::size_t g = 0; g < jg.size(); ++g)
          for (unsigned s = 0; s < spec[b].rank; ++s)
            out.push_back({static_cast<unsigned>(b), spec[b].degree, spec[b].twist, s,
                           static_cast<int>(g)});
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          out.push_back({static_cast<unsigned>(b), spec[b].degree, 0, s, -1});
      }
    }
    return out;
  }

  const std::vector<JPowerGen>& jpow_cache(unsigned k) const {
    auto it = jpow_.find(k);
    if (it == jpow_.end()) it = jpow_.emplace(k, j_power_gens(F_, k)).first;
    return it->second;
  }

  // random element of J_k = (ideal power) + I_S: any xi plus a random
  // combination of k-fold products of ideal generators
  JEl random_jk(unsigned k, Prng& rng) const {
    JEl j = F_.j_v(F_.j_random(rng).xi);
    std::vector<RingEl> prods{F_.S().one()};
    for (unsigned t = 0; t < k; ++t) {
      std::vector<RingEl> next;
      for (const auto& c : prods)
        for (const auto& g : F_.ideal()->gens()) {
          RingEl e = ring_mul(c, g);
          if (!e.is_zero()) next.push_back(e);
        }
      prods = std::move(next);
      if (prods.empty()) break;
    }
    for (const auto& g : prods) j.a = ring_add(j.a, ring_mul(F_.S().random(rng), g));
    return j;
  }

  PEl random(unsigned i, Prng& rng) const override {
    PEl x = zero(i);
    auto spec = level_spec(i);
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist > 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s)
          x.blocks[b].jv[s] = random_jk(spec[b].twist, rng);
      } else {
        for (unsigned s = 0; s < spec[b].rank; ++s) x.blocks[b].wv[s] = F_.w_random(rng);
      }
    }
    return x;
  }

  std::string str(unsigned i, const PEl& x) const override {
    auto spec = level_spec(i);
    std::string s;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      s += "[";
      if (spec[b].twist > 0) {
        for (unsigned t = 0; t < spec[b].rank; ++t) {
          if (t) s += ",";
          s += j_str(F_, x.blocks[b].jv[t]);
        }
      } else {
        for (unsigned t = 0; t < spec[b].rank; ++t) {
          if (t) s += ",";
          s += "(";
          for (unsigned c = 0; c < x.blocks[b].wv[t].prec(); ++c) {
            if (c) s += ",";
            s += to_string(x.blocks[b].wv[t].c[c]);
          }
          s += ")";
        }
      }
      s += "]";
    }
    return s;
  }

  // express over gens(i): untwisted coordinates read off directly; twisted
  // coordinates split into their pure ideal and V parts and are matched
  // against the pure J_k-generators.
  std::vector<std::pair<std::size_t, WittEl>> express(unsigned i, const PEl& x) const override {
    std::vector<std::pair<std::size_t, WittEl>> combo;
    auto infos = gen_infos(i);
    auto spec = level_spec(i);
    // flat index of the first generator of each block and basis slot
    for (std::size_t b = 0; b < spec.size(); ++b) {
      if (spec[b].twist == 0) {
        for (unsigned s = 0; s < spec[b].rank; ++s) {
          const WittEl& w = x.blocks[b].wv[s];
          if (w.is_zero()) continue;
          std::size_t gi = find_gen(infos, b, s, -1);
          combo.push_back({gi, w});
        }
        continue;
      }
      unsigned k = spec[b].twist;
      const auto& jg = jpow_cache(k);
      // lookups for the pure generators
      for (unsigned s = 0; s < spec[b].rank; ++s) {
        const JEl& q = x.blocks[b].jv[s];
        if (q.is_zero()) continue;
        // ideal part over the a-type generators
        if (!q.a.is_zero()) {
          std::vector<RingEl> apars;
          std::vector<std::size_t> apos;
          for (std::size_t g = 0; g < jg.size(); ++g)
            if (!jg[g].value.a.is_zero() && jg[g].value.xi.is_zero()) {
              apars.push_back(jg[g].value.a);
              apos.push_back(g);
            }
          require(!apars.empty(), errc::internal, "no ideal-type generators at this twist");
          Matrix m(F_.S(), 1, apars.size());
          for (std::size_t c = 0; c < apars.size(); ++c) m.at(0, c) = apars[c];
          auto res = solve_linear(m, {q.a});
          require(res.solvable, errc::internal, "ideal part escaped the twist generators");
          for (std::size_t c = 0; c < apars.size(); ++c)
            if (!res.x[c].is_zero())
              combo.push_back({find_gen(infos, b, s, static_cast<int>(apos[c])),
                               teichmuller(res.x[c], F_.prec())});
        }
        // V part over the pure-V generators via the graded descent
        if (!q.xi.is_zero()) {
          for (const auto& term : F_.xi_express(q.xi)) {
            WittEl genxi =
                teichmuller(F_.S().monomial(F_.S().data().basis[term.mono_index], F_.S().c_one()),
                            F_.xi_prec() - term.level);
            for (unsigned t = 0; t < term.level; ++t) genxi = verschiebung(genxi);
            std::size_t g = find_vgen(jg, genxi);
            combo.push_back({find_gen(infos, b, s, static_cast<int>(g)), term.w});
          }
        }
      }
    }
    return combo;
  }

 private:
  std::size_t find_gen(const std::vector<GenInfo>& infos, std::size_t block, unsigned s,
                       int jgen) const {
    for (std::size_t t = 0; t < infos.size(); ++t)
      if (infos[t].block == block && infos[t].basis_index == s && infos[t].jgen_index == jgen)
        return t;
    fail(errc::internal, "generator lookup failed");
  }
  std::size_t find_vgen(const std::vector<JPowerGen>& jg, const WittEl& xi) const {
    for (std::size_t g = 0; g < jg.size(); ++g)
      if (jg[g].value.a.is_zero() && jg[g].value.xi.key() == xi.key()) return g;
    fail(errc::internal, "pure V generator not found at this twist");
  }

  StandardDatum datum_;
  unsigned imax_;
  Frame F_;
  DisplayFault fault_;
  mutable std::map<unsigned, std::vector<JPowerGen>> jpow_;
};

inline Display display_build(const StandardDatum& datum, int imax = -1) {
  return Display::build(datum, imax);
}

// sigma-linear maps as matrices: f(x) = M sigma(x); the tilde construction
// sends eta (x) m to sigma-dot(eta) f(m).
inline std::vector<WittEl> tilde_extend(const Frame& F, const WMatrix& M, const JEl& eta,
                                        std::size_t basis_index) {
  std::vector<WittEl> out;
  WittEl sd = F.sigma_dot(eta);
  for (std::size_t r = 0; r < M.nrows(); ++r) out.push_back(witt_mul(sd, M.rows[r][basis_index]));
  return out;
}

// ---- the axiom checker ----

inline Report predisplay_check(const PredisplayBase& P, unsigned samples, Prng rng) {
  Report rep;
  const Frame& F = P.frame();
  require(P.i_max() + 1 <= F.prec(), errc::insufficient_precision,
          "predisplay_check needs one Frobenius worth of headroom");
  auto jgens = F.j_gens();

  auto with_pairs = [&](unsigned i, auto&& fn) {
    for (const auto& eta : jgens)
      for (const auto& x : P.gens(i))
        if (!fn(eta, x)) return false;
    Prng local = rng.fork();
    for (unsigned s = 0; s < samples; ++s) {
      JEl eta = F.j_random(local);
      PEl x = P.random(i, local);
      if (!fn(eta, x)) return false;
    }
    return true;
  };

  // (P1) iota_i . alpha_i = alpha_{i-1} . (id (x) iota_{i-1}) for 1 <= i < i_max
  {
    bool ok = true;
    std::string wit;
    for (unsigned i = 1; i < P.i_max() && ok; ++i) {
      ok = with_pairs(i, [&](const JEl& eta, const PEl& x) {
        PEl lhs = P.iota(i, P.alpha(i, eta, x));
        PEl rhs = P.alpha(i - 1, eta, P.iota(i - 1, x));
        bool good = P.eq(i, lhs, rhs);
        if (!good) wit = "level " + std::to_string(i) + " at x = " + P.str(i, x);
        return good;
      });
    }
    rep.add("disp.P1", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  // (P2) iota_i . alpha_i is multiplication, 0 <= i < i_max
  {
    bool ok = true;
    std::string wit;
    for (unsigned i = 0; i < P.i_max() && ok; ++i) {
      ok = with_pairs(i, [&](const JEl& eta, const PEl& x) {
        PEl lhs = P.iota(i, P.alpha(i, eta, x));
        PEl rhs = P.mult_j(i, eta, x);
        bool good = P.eq(i, lhs, rhs);
        if (!good) wit = "level " + std::to_string(i) + " at x = " + P.str(i, x);
        return good;
      });
    }
    rep.add("disp.P2", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  // (P3) F_{i+1} . alpha_i = tilde F_i, 0 <= i < i_max
  {
    bool ok = true;
    std::string wit;
    for (unsigned i = 0; i < P.i_max() && ok; ++i) {
      ok = with_pairs(i, [&](const JEl& eta, const PEl& x) {
        PEl lhs = P.fdiv(i + 1, P.alpha(i, eta, x));
        PEl rhs = P.mult_w(0, F.sigma_dot(eta), P.fdiv(i, x));
        bool good = P.eq(0, lhs, rhs);
        if (!good) wit = "level " + std::to_string(i) + " at x = " + P.str(i, x);
        return good;
      });
    }
    rep.add("disp.P3", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  // consequence: F_i . iota_i = p F_{i+1}
  {
    bool ok = true;
    std::string wit;
    WittEl p_w = witt_from_int(F.S(), F.prec() - 1, static_cast<long long>(F.p()));
    for (unsigned i = 0; i < P.i_max() && ok; ++i) {
      for (const auto& x : P.gens(i + 1)) {
        PEl lhs = P.fdiv(i, P.iota(i, x));
        PEl rhs = P.mult_w(0, p_w, P.fdiv(i + 1, x));
        if (!P.eq(0, lhs, rhs)) {
          ok = false;
          wit = "level " + std::to_string(i) + " at x = " + P.str(i + 1, x);
          break;
        }
      }
      Prng local = rng.fork();
      for (unsigned s = 0; s < samples && ok; ++s) {
        PEl x = P.random(i + 1, local);
        PEl lhs = P.fdiv(i, P.iota(i, x));
        PEl rhs = P.mult_w(0, p_w, P.fdiv(i + 1, x));
        if (!P.eq(0, lhs, rhs)) {
          ok = false;
          wit = "level " + std::to_string(i) + " at x = " + P.str(i + 1, x);
        }
      }
    }
    rep.add("disp.F_iota_pF", ok, "generators+sampled(" + std::to_string(samples) + ")", wit);
  }

  return rep;
}

}  // namespace displib
