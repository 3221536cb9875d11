#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "displib/error.hpp"
#include "displib/ring.hpp"

namespace displib {

// Linear algebra over an artinian local ring R. Systems are solved exactly by
// expanding R^k over the coefficient ring C (= Z/p^N or F_{p^f}) on the
// monomial basis and eliminating with pivots of minimal p-valuation. Direct
// summands use unit-pivot column reduction over R itself; unit-pivot rank is
// the rank notion the Hodge-filtration certificates need.

struct Matrix {
  ArtinRing R;
  std::size_t rows = 0, cols = 0;
  std::vector<RingEl> a;  // row-major

  Matrix() = default;
  Matrix(ArtinRing ring, std::size_t r, std::size_t c)
      : R(std::move(ring)), rows(r), cols(c), a(r * c, R.zero()) {}

  RingEl& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const RingEl& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  std::vector<RingEl> col(std::size_t j) const {
    std::vector<RingEl> v;
    v.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) v.push_back(at(i, j));
    return v;
  }

  static Matrix identity(const ArtinRing& R, std::size_t n) {
    Matrix m(R, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = R.one();
    return m;
  }

  static Matrix from_cols(const ArtinRing& R, const std::vector<std::vector<RingEl>>& cols_) {
    std::size_t rows = cols_.empty() ? 0 : cols_.front().size();
    Matrix m(R, rows, cols_.size());
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      require(cols_[j].size() == rows, errc::shape_mismatch, "ragged columns");
      for (std::size_t i = 0; i < rows; ++i) m.at(i, j) = cols_[j][i];
    }
    return m;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

inline Matrix mat_mul(const Matrix& x, const Matrix& y) {
  require(x.cols == y.rows, errc::shape_mismatch, "matrix product shapes");
  Matrix r(x.R, x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (x.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < y.cols; ++j)
        r.at(i, j) = ring_add(r.at(i, j), ring_mul(x.at(i, k), y.at(k, j)));
    }
  return r;
}

inline std::vector<RingEl> mat_apply(const Matrix& m, const std::vector<RingEl>& v) {
  require(v.size() == m.cols, errc::shape_mismatch, "matrix-vector shapes");
  std::vector<RingEl> r(m.rows, m.R.zero());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (!m.at(i, j).is_zero() && !v[j].is_zero())
        r[i] = ring_add(r[i], ring_mul(m.at(i, j), v[j]));
  return r;
}

inline Matrix mat_transpose(const Matrix& m) {
  Matrix r(m.R, m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
  return r;
}

namespace detail {

// Coefficient-level dense system over C. For f = 1 entries are residues mod
// p^N with valuation pivoting; for f > 1 the field case degenerates (val 0).
struct CoeffSystem {
  ArtinRing R;
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint64_t> a;  // row-major
  std::vector<std::uint64_t> b;
  std::uint64_t& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline unsigned cval(const ArtinRing& R, std::uint64_t c) {
  if (R.f() > 1) return c == 0 ? 1 : 0;
  return R.c_val(c);
}

inline unsigned cval_max(const ArtinRing& R) { return R.f() > 1 ? 1 : R.N(); }

// exact division of the packed coefficient by p^v (f = 1 path)
inline std::uint64_t cdiv_pv(const ArtinRing& R, std::uint64_t c, unsigned v) {
  if (R.f() > 1 || v == 0) return c;
  std::uint64_t pv = 1;
  for (unsigned i = 0; i < v; ++i) pv *= R.p();
  require(c % pv == 0, errc::internal, "inexact p-power division");
  return c / pv;
}

inline std::uint64_t cpow_p(const ArtinRing& R, unsigned v) {
  std::uint64_t r = R.c_one();
  for (unsigned i = 0; i < v; ++i) r = R.c_mul(r, R.c_from_int(static_cast<long long>(R.p())));
  return r;
}

struct CoeffSolveResult {
  bool solvable = false;
  std::vector<std::uint64_t> x;     // a solution when solvable
  std::vector<std::uint64_t> cert;  // row functional: cert*A = 0, cert*b != 0
  std::vector<std::vector<std::uint64_t>> kernel;  // generators of ker(A)
};

// Forward elimination touching only rows below the pivot (their entries have
// valuation at least the pivot's, keeping every division exact), then exact
// back-substitution through the triangular pivot system.
inline CoeffSolveResult coeff_solve(CoeffSystem sys, bool want_kernel) {
  const ArtinRing& R = sys.R;
  std::size_t n = sys.rows, K = sys.cols;
  // row transform L with current = L * original
  std::vector<std::uint64_t> L(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) L[i * n + i] = R.c_one();

  std::vector<std::size_t> pivcol;
  std::vector<unsigned> pivval;
  std::vector<char> col_used(K, 0);
  std::size_t r = 0;
  unsigned NN = cval_max(R);

  while (r < n) {
    unsigned best_v = NN;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = r; i < n; ++i)
      for (std::size_t j = 0; j < K; ++j) {
        if (col_used[j]) continue;
        unsigned v = cval(R, sys.at(i, j));
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
          if (v == 0) goto found;
        }
      }
  found:
    if (best_v == NN) break;  // everything left is zero
    if (bi != r) {
      for (std::size_t j = 0; j < K; ++j) std::swap(sys.at(r, j), sys.at(bi, j));
      std::swap(sys.b[r], sys.b[bi]);
      for (std::size_t j = 0; j < n; ++j) std::swap(L[r * n + j], L[bi * n + j]);
    }
    std::uint64_t piv = sys.at(r, bj);
    std::uint64_t unit = cdiv_pv(R, piv, best_v);
    std::uint64_t unit_inv = R.c_inv(unit);
    for (std::size_t i = r + 1; i < n; ++i) {
      std::uint64_t e = sys.at(i, bj);
      if (e == 0) continue;
      // factor = (e / p^v) * unit^{-1}; exact because v is minimal here
      std::uint64_t fac = R.c_mul(cdiv_pv(R, e, best_v), unit_inv);
      std::uint64_t nfac = R.c_neg(fac);
      for (std::size_t j = 0; j < K; ++j)
        sys.at(i, j) = R.c_add(sys.at(i, j), R.c_mul(nfac, sys.at(r, j)));
      sys.b[i] = R.c_add(sys.b[i], R.c_mul(nfac, sys.b[r]));
      for (std::size_t j = 0; j < n; ++j)
        L[i * n + j] = R.c_add(L[i * n + j], R.c_mul(nfac, L[r * n + j]));
    }
    col_used[bj] = 1;
    pivcol.push_back(bj);
    pivval.push_back(best_v);
    ++r;
  }

  CoeffSolveResult res;
  // Rows beyond r are zero; they must have zero rhs.
  for (std::size_t i = r; i < n; ++i) {
    if (sys.b[i] != 0) {
      res.solvable = false;
      res.cert.assign(L.begin() + i * n, L.begin() + (i + 1) * n);
      return res;
    }
  }

  // Bottom-up solve through the pivot rows; every entry of pivot row t at a
  // column unused at stage t has valuation >= pivval[t], so the residual is
  // p^v-divisible exactly when the system is consistent.
  auto back_solve = [&](std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>* rhs,
                        std::size_t* bad_row) -> bool {
    for (std::size_t t = pivcol.size(); t-- > 0;) {
      unsigned v = pivval[t];
      std::uint64_t acc = rhs ? (*rhs)[t] : 0;
      for (std::size_t j = 0; j < K; ++j) {
        if (j == pivcol[t]) continue;
        if (sys.at(t, j) == 0 || x[j] == 0) continue;
        acc = R.c_add(acc, R.c_neg(R.c_mul(sys.at(t, j), x[j])));
      }
      if (cval(R, acc) < v) {
        if (bad_row) *bad_row = t;
        return false;
      }
      std::uint64_t unit = cdiv_pv(R, sys.at(t, pivcol[t]), v);
      x[pivcol[t]] = R.c_mul(cdiv_pv(R, acc, v), R.c_inv(unit));
    }
    return true;
  };

  std::vector<std::uint64_t> x(K, 0);
  std::vector<std::uint64_t> brhs(pivcol.size());
  for (std::size_t t = 0; t < pivcol.size(); ++t) brhs[t] = sys.b[t];
  std::size_t bad = 0;
  if (!back_solve(x, &brhs, &bad)) {
    res.solvable = false;
    std::uint64_t scale = cpow_p(R, NN - pivval[bad]);
    res.cert.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) res.cert[j] = R.c_mul(scale, L[bad * n + j]);
    return res;
  }
  res.solvable = true;
  res.x = std::move(x);

  if (want_kernel) {
    // free columns: fix the free coordinate to 1 and back-solve homogeneously
    for (std::size_t j = 0; j < K; ++j) {
      if (col_used[j]) continue;
      std::vector<std::uint64_t> g(K, 0);
      g[j] = R.c_one();
      std::size_t dummy;
      bool ok = back_solve(g, nullptr, &dummy);
      require(ok, errc::internal, "homogeneous back-substitution failed");
      res.kernel.push_back(std::move(g));
    }
    // torsion directions on pivots of positive valuation
    for (std::size_t s = 0; s < pivcol.size(); ++s) {
      if (pivval[s] == 0) continue;
      std::vector<std::uint64_t> g(K, 0);
      g[pivcol[s]] = cpow_p(R, NN - pivval[s]);
      // compensate through the pivot rows above s
      for (std::size_t t = s; t-- > 0;) {
        unsigned v = pivval[t];
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < K; ++j) {
          if (j == pivcol[t]) continue;
          if (sys.at(t, j) == 0 || g[j] == 0) continue;
          acc = R.c_add(acc, R.c_neg(R.c_mul(sys.at(t, j), g[j])));
        }
        require(cval(R, acc) >= v, errc::internal, "torsion compensation failed");
        std::uint64_t unit = cdiv_pv(R, sys.at(t, pivcol[t]), v);
        g[pivcol[t]] = R.c_mul(cdiv_pv(R, acc, v), R.c_inv(unit));
      }
      res.kernel.push_back(std::move(g));
    }
  }
  return res;
}

}  // namespace detail

struct SolveResult {
  bool solvable = false;
  std::vector<RingEl> x;
  // infeasibility certificate: a coefficient-level functional on the rows
  std::vector<std::uint64_t> cert;
  std::size_t cert_dim = 0;  // rows * basis_size
};

// Expand M x = b over the coefficient ring and solve exactly.
inline SolveResult solve_linear(const Matrix& M, const std::vector<RingEl>& b,
                                std::vector<std::vector<RingEl>>* kernel_out = nullptr) {
  require(b.size() == M.rows, errc::shape_mismatch, "solve_linear shapes");
  const ArtinRing& R = M.R;
  const auto& basis = R.data().basis;
  std::size_t B = basis.size();
  detail::CoeffSystem sys;
  sys.R = R;
  sys.rows = M.rows * B;
  sys.cols = M.cols * B;
  sys.a.assign(sys.rows * sys.cols, 0);
  sys.b.assign(sys.rows, 0);

  auto put_col = [&](std::size_t col, std::size_t row_block, const RingEl& val) {
    for (const auto& t : val.terms()) {
      std::size_t beta = R.data().basis_index.at(t.first);
      sys.at(row_block * B + beta, col) = t.second;
    }
  };
  for (std::size_t j = 0; j < M.cols; ++j) {
    for (std::size_t beta = 0; beta < B; ++beta) {
      RingEl mb = R.monomial(basis[beta], R.c_one());
      std::size_t col = j * B + beta;
      for (std::size_t i = 0; i < M.rows; ++i) {
        RingEl prod = ring_mul(M.at(i, j), mb);
        put_col(col, i, prod);
      }
    }
  }
  for (std::size_t i = 0; i < M.rows; ++i)
    for (const auto& t : b[i].terms())
      sys.b[i * B + R.data().basis_index.at(t.first)] = t.second;

  auto cres = detail::coeff_solve(std::move(sys), kernel_out != nullptr);
  SolveResult out;
  out.cert_dim = M.rows * B;
  if (!cres.solvable) {
    out.solvable = false;
    out.cert = std::move(cres.cert);
    return out;
  }
  out.solvable = true;
  out.x.reserve(M.cols);
  auto assemble = [&](const std::vector<std::uint64_t>& c) {
    std::vector<RingEl> xs;
    xs.reserve(M.cols);
    for (std::size_t j = 0; j < M.cols; ++j) {
      RingEl v = R.zero();
      for (std::size_t beta = 0; beta < B; ++beta) {
        std::uint64_t cc = c[j * B + beta];
        if (cc != 0) v = ring_add(v, R.monomial(basis[beta], cc));
      }
      xs.push_back(v);
    }
    return xs;
  };
  out.x = assemble(cres.x);
  // safety net: recompose and verify
  std::vector<RingEl> check = mat_apply(M, out.x);
  for (std::size_t i = 0; i < b.size(); ++i)
    require(check[i] == b[i], errc::internal, "solver verification failed");
  if (kernel_out) {
    kernel_out->clear();
    for (const auto& g : cres.kernel) {
      auto xs = assemble(g);
      bool nz = false;
      for (const auto& e : xs) nz = nz || !e.is_zero();
      if (nz) kernel_out->push_back(std::move(xs));
    }
  }
  return out;
}

// Check an infeasibility certificate against the original system.
inline bool verify_infeasibility(const Matrix& M, const std::vector<RingEl>& b,
                                 const std::vector<std::uint64_t>& cert) {
  const ArtinRing& R = M.R;
  const auto& basis = R.data().basis;
  std::size_t B = basis.size();
  if (cert.size() != M.rows * B) return false;
  // cert * A = 0 on every expanded column, cert * b != 0
  auto pair_with = [&](const RingEl& val, std::size_t row_block) {
    std::uint64_t s = 0;
    for (const auto& t : val.terms()) {
      std::size_t beta = R.data().basis_index.at(t.first);
      s = R.c_add(s, R.c_mul(cert[row_block * B + beta], t.second));
    }
    return s;
  };
  for (std::size_t j = 0; j < M.cols; ++j)
    for (std::size_t beta = 0; beta < B; ++beta) {
      RingEl mb = R.monomial(basis[beta], R.c_one());
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < M.rows; ++i)
        s = R.c_add(s, pair_with(ring_mul(M.at(i, j), mb), i));
      if (s != 0) return false;
    }
  std::uint64_t sb = 0;
  for (std::size_t i = 0; i < M.rows; ++i) sb = R.c_add(sb, pair_with(b[i], i));
  return sb != 0;
}

inline bool in_column_span(const Matrix& M, const std::vector<RingEl>& v) {
  return solve_linear(M, v).solvable;
}

// every column of A lies in the span of B's columns
inline bool span_leq(const Matrix& A, const Matrix& B) {
  for (std::size_t j = 0; j < A.cols; ++j)
    if (!in_column_span(B, A.col(j))) return false;
  return true;
}

inline bool span_eq(const Matrix& A, const Matrix& B) { return span_leq(A, B) && span_leq(B, A); }

struct SummandResult {
  std::size_t unit_rank = 0;
  bool is_direct_summand = false;
  Matrix summand_basis;           // original pivot columns
  std::vector<std::size_t> pivot_rows;
  std::vector<std::size_t> pivot_cols;
};

// Column reduction over R using unit pivots only (lowest column index first).
// The image is a direct summand iff the residual columns vanish; the pivot
// columns then form a basis of a free direct summand equal to the image.
inline SummandResult image_summand(const Matrix& M) {
  SummandResult res;
  Matrix W = M;
  std::vector<char> row_used(M.rows, 0);
  std::vector<std::size_t> piv_cols;
  for (std::size_t j = 0; j < W.cols; ++j) {
    std::size_t pr = W.rows;
    for (std::size_t i = 0; i < W.rows; ++i) {
      if (!row_used[i] && is_unit(W.at(i, j))) {
        pr = i;
        break;
      }
    }
    if (pr == W.rows) continue;
    row_used[pr] = 1;
    piv_cols.push_back(j);
    RingEl inv = invert(W.at(pr, j));
    for (std::size_t k = 0; k < W.cols; ++k) {
      if (k == j) continue;
      RingEl f = ring_mul(W.at(pr, k), inv);
      if (f.is_zero()) continue;
      for (std::size_t i = 0; i < W.rows; ++i)
        W.at(i, k) = ring_sub(W.at(i, k), ring_mul(f, W.at(i, j)));
    }
    res.pivot_rows.push_back(pr);
    ++res.unit_rank;
  }
  res.pivot_cols = piv_cols;
  bool clean = true;
  for (std::size_t j = 0; j < W.cols; ++j) {
    if (std::find(piv_cols.begin(), piv_cols.end(), j) != piv_cols.end()) continue;
    for (std::size_t i = 0; i < W.rows; ++i)
      if (!W.at(i, j).is_zero()) clean = false;
  }
  res.is_direct_summand = clean;
  Matrix basis(M.R, M.rows, piv_cols.size());
  for (std::size_t t = 0; t < piv_cols.size(); ++t)
    for (std::size_t i = 0; i < M.rows; ++i) basis.at(i, t) = M.at(i, piv_cols[t]);
  res.summand_basis = std::move(basis);
  return res;
}

// Complete the columns of a summand basis to a free basis of R^n by adding
// standard basis vectors on the unused pivot rows.
inline Matrix complete_basis(const Matrix& summand) {
  SummandResult sr = image_summand(summand);
  require(sr.is_direct_summand && sr.unit_rank == summand.cols, errc::not_a_lift,
          "columns do not form a free direct summand");
  Matrix full(summand.R, summand.rows, summand.rows);
  for (std::size_t j = 0; j < summand.cols; ++j)
    for (std::size_t i = 0; i < summand.rows; ++i) full.at(i, j) = summand.at(i, j);
  std::vector<char> used(summand.rows, 0);
  for (std::size_t r : sr.pivot_rows) used[r] = 1;
  std::size_t j = summand.cols;
  for (std::size_t i = 0; i < summand.rows; ++i) {
    if (used[i]) continue;
    full.at(i, j) = summand.R.one();
    ++j;
  }
  require(j == summand.rows, errc::internal, "basis completion miscount");
  SummandResult check = image_summand(full);
  require(check.unit_rank == summand.rows, errc::internal, "completed basis not invertible");
  return full;
}

// Kernel generators of M over R (possibly redundant).
inline std::vector<std::vector<RingEl>> kernel_gens(const Matrix& M) {
  std::vector<std::vector<RingEl>> ker;
  std::vector<RingEl> zero(M.rows, M.R.zero());
  solve_linear(M, zero, &ker);
  return ker;
}

// log-cardinality (in p-digits for f = 1, field-dimension for f > 1) of the
// coefficient-module spanned by the given vectors, by valuation-pivot row
// echelon. Over Z/p^N a pivot of valuation v contributes N - v digits.
inline unsigned coeff_span_log_digits(const ArtinRing& R,
                                      std::vector<std::vector<std::uint64_t>> rows) {
  if (rows.empty()) return 0;
  std::size_t K = rows.front().size();
  unsigned NN = detail::cval_max(R);
  unsigned digits = 0;
  std::vector<char> col_used(K, 0);
  std::size_t r = 0;
  while (r < rows.size()) {
    unsigned best_v = NN;
    std::size_t bi = r, bj = 0;
    for (std::size_t i = r; i < rows.size(); ++i)
      for (std::size_t j = 0; j < K; ++j) {
        if (col_used[j]) continue;
        unsigned v = detail::cval(R, rows[i][j]);
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
        }
      }
    if (best_v == NN) break;
    std::swap(rows[r], rows[bi]);
    std::uint64_t unit = detail::cdiv_pv(R, rows[r][bj], best_v);
    std::uint64_t unit_inv = R.c_inv(unit);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      std::uint64_t e = rows[i][bj];
      if (e == 0) continue;
      unsigned ve = detail::cval(R, e);
      if (ve < best_v) continue;  // cannot happen: pivot was minimal
      std::uint64_t fac = R.c_mul(detail::cdiv_pv(R, e, best_v), unit_inv);
      std::uint64_t nfac = R.c_neg(fac);
      for (std::size_t j = 0; j < K; ++j)
        rows[i][j] = R.c_add(rows[i][j], R.c_mul(nfac, rows[r][j]));
    }
    col_used[bj] = 1;
    digits += NN - best_v;
    ++r;
  }
  return digits;
}

inline std::vector<std::uint64_t> coeff_expand(const ArtinRing& R, const RingEl& x) {
  std::vector<std::uint64_t> v(R.basis_size(), 0);
  for (const auto& t : x.terms()) v[R.data().basis_index.at(t.first)] = t.second;
  return v;
}

// log-cardinality of the R-module generated inside R by the given elements
inline unsigned module_span_log_digits(const ArtinRing& R, const std::vector<RingEl>& gens) {
  std::vector<std::vector<std::uint64_t>> rows;
  for (const auto& g : gens)
    for (Mono m : R.data().basis) {
      RingEl e = ring_mul(g, R.monomial(m, R.c_one()));
      if (!e.is_zero()) rows.push_back(coeff_expand(R, e));
    }
  return coeff_span_log_digits(R, std::move(rows));
}

inline unsigned ring_log_digits(const ArtinRing& R) {
  unsigned per = R.f() == 1 ? R.N() : 1;
  return per * static_cast<unsigned>(R.basis_size());
}

}  // namespace displib
