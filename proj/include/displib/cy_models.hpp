#pragma once

#include "displib/cy.hpp"

namespace displib {

// Small concrete crystals used by the suites and the CLI samples. The Gram
// matrix pairs the top generator with gr^0 and v_i with w_i; the signs are
// forced by horizontality against the chosen connection.

// h = 1, basis [e3, v, w, u]:
//   full chain: e3 -> v -> w -> u (maximal unipotent shape), or
//   split chain: e3 -> v, w -> u (the square of the reduced connection is 0)
inline CYCrystal cy_model_h1(std::uint64_t p, unsigned N, unsigned tpow, bool full_chain) {
  CYCrystal C;
  C.h = 1;
  C.A = ArtinRing::make({p, N, 1, {"t"}, {{tpow}}});
  const ArtinRing& A = C.A;
  unsigned n = 4;
  Matrix M(A, n, n);
  M.at(1, 0) = A.one();  // e3 -> v
  if (full_chain) M.at(2, 1) = A.one();  // v -> w
  M.at(3, 2) = A.one();  // w -> u
  C.nabla = {M};
  Matrix Q(A, n, n);
  Q.at(0, 3) = A.one();
  Q.at(3, 0) = A.from_int(-1);
  Q.at(1, 2) = A.from_int(-1);
  Q.at(2, 1) = A.one();
  C.pairing = Q;
  auto col = [&](std::vector<int> idx) {
    std::vector<std::vector<RingEl>> cols;
    for (int i : idx) {
      std::vector<RingEl> v(n, A.zero());
      v[static_cast<unsigned>(i)] = A.one();
      cols.push_back(v);
    }
    return Matrix::from_cols(A, cols);
  };
  C.fil = {col({0, 1, 2, 3}), col({0, 1, 2}), col({0, 1}), col({0})};
  return cy_make(C);
}

// h = 1 with a t-dependent connection: nabla = d/dt + (1+t) P where P is the
// split chain. The operator square picks up the derivative of the matrix
// part, so reduced second powers are nonzero even though P^2 = 0.
inline CYCrystal cy_model_h1_var(std::uint64_t p, unsigned N, unsigned tpow) {
  CYCrystal C;
  C.h = 1;
  C.A = ArtinRing::make({p, N, 1, {"t"}, {{tpow}}});
  const ArtinRing& A = C.A;
  unsigned n = 4;
  RingEl s = ring_add(A.one(), A.var(0));
  Matrix M(A, n, n);
  M.at(1, 0) = s;  // e3 -> (1+t) v
  M.at(3, 2) = s;  // w  -> (1+t) u
  C.nabla = {M};
  Matrix Q(A, n, n);
  Q.at(0, 3) = A.one();
  Q.at(3, 0) = A.from_int(-1);
  Q.at(1, 2) = A.from_int(-1);
  Q.at(2, 1) = A.one();
  C.pairing = Q;
  auto col = [&](std::vector<int> idx) {
    std::vector<std::vector<RingEl>> cols;
    for (int i : idx) {
      std::vector<RingEl> v(n, A.zero());
      v[static_cast<unsigned>(i)] = A.one();
      cols.push_back(v);
    }
    return Matrix::from_cols(A, cols);
  };
  C.fil = {col({0, 1, 2, 3}), col({0, 1, 2}), col({0, 1}), col({0})};
  return cy_make(C);
}

// h = 2, basis [e3, v1, v2, w1, w2, u]: nabla_i sends e3 to v_i and w_i to u
inline CYCrystal cy_model_h2(std::uint64_t p, unsigned N, unsigned tpow) {
  CYCrystal C;
  C.h = 2;
  C.A = ArtinRing::make({p, N, 1, {"t", "u"}, {{tpow, 0}, {0, tpow}}});
  const ArtinRing& A = C.A;
  unsigned n = 6;
  for (unsigned i = 0; i < 2; ++i) {
    Matrix M(A, n, n);
    M.at(1 + i, 0) = A.one();  // e3 -> v_i
    M.at(5, 3 + i) = A.one();  // w_i -> u
    C.nabla.push_back(M);
  }
  Matrix Q(A, n, n);
  Q.at(0, 5) = A.one();
  Q.at(5, 0) = A.from_int(-1);
  for (unsigned i = 0; i < 2; ++i) {
    Q.at(1 + i, 3 + i) = A.from_int(-1);
    Q.at(3 + i, 1 + i) = A.one();
  }
  C.pairing = Q;
  auto col = [&](std::vector<int> idx) {
    std::vector<std::vector<RingEl>> cols;
    for (int i : idx) {
      std::vector<RingEl> v(n, A.zero());
      v[static_cast<unsigned>(i)] = A.one();
      cols.push_back(v);
    }
    return Matrix::from_cols(A, cols);
  };
  C.fil = {col({0, 1, 2, 3, 4, 5}), col({0, 1, 2, 3, 4}), col({0, 1, 2}), col({0})};
  return cy_make(C);
}

}  // namespace displib
