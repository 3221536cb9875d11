#pragma once

#include <vector>

#include "displib/display.hpp"
#include "displib/display_ops.hpp"

namespace displib {

// Randomized instances shared by the test suites and the self-test driver.

inline WittEl random_witt_unit(const Frame& F, Prng& rng) {
  const ArtinRing& S = F.S();
  RingEl u = S.random(rng);
  if (!is_unit(u)) u = ring_add(u, S.one());
  if (!is_unit(u)) u = S.one();
  WittEl w = teichmuller(u, F.prec());
  for (unsigned i = 1; i < F.prec(); ++i) w.c[i] = S.random(rng);
  return w;
}

// random standard datum: an invertible Phi built from the identity by random
// unit scalings and elementary row operations
inline StandardDatum random_standard_datum(const Frame& F, unsigned d,
                                           const std::vector<unsigned>& ranks, Prng& rng,
                                           unsigned ops = 12) {
  StandardDatum D;
  D.frame = F;
  D.d = d;
  D.ranks = ranks;
  unsigned n = D.total_rank();
  D.phi.rows.assign(n, std::vector<WittEl>(n, F.w_zero()));
  for (unsigned i = 0; i < n; ++i) D.phi.rows[i][i] = random_witt_unit(F, rng);
  for (unsigned t = 0; t < ops; ++t) {
    unsigned i = static_cast<unsigned>(rng.below(n));
    unsigned j = static_cast<unsigned>(rng.below(n));
    if (i == j) continue;
    WittEl w = F.w_random(rng);
    for (unsigned c = 0; c < n; ++c)
      D.phi.rows[i][c] = witt_add(D.phi.rows[i][c], witt_mul(w, D.phi.rows[j][c]));
  }
  D.validate();
  return D;
}

inline std::vector<unsigned> random_ranks(unsigned d, unsigned max_rank, Prng& rng) {
  std::vector<unsigned> ranks;
  for (unsigned j = 0; j <= d; ++j) ranks.push_back(1 + static_cast<unsigned>(rng.below(max_rank)));
  return ranks;
}

}  // namespace displib
