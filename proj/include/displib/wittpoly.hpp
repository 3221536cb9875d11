#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <unistd.h>
#endif

#include "displib/error.hpp"
#include "displib/intpoly.hpp"

namespace displib {

// Universal Witt structure polynomials over Z, solved from the ghost
// recursion with exact integer division. Variables are packed x_j -> j,
// y_j -> n + j. Frobenius gets its own universal polynomials: the ghost map
// is not injective over the target rings, so dividing there is not an option.
struct WittPolys {
  std::uint64_t p = 2;
  unsigned n = 1;
  std::vector<IntPoly> sum;   // S_0..S_{n-1} in x, y
  std::vector<IntPoly> prod;  // P_0..P_{n-1} in x, y
  std::vector<IntPoly> neg;   // N_0..N_{n-1} in x
  std::vector<IntPoly> frob;  // F_0..F_{n-2} in x
};

using WittPolysPtr = std::shared_ptr<const WittPolys>;

namespace wittdetail {

constexpr std::size_t kTermBudget = 2u << 20;

inline IntPoly ghost_poly(std::uint64_t p, unsigned i, unsigned var_offset) {
  // w_i = sum_{j<=i} p^j X_j^{p^{i-j}}
  IntPoly w;
  for (unsigned j = 0; j <= i; ++j) {
    unsigned e = 1;
    for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(p);
    IntPoly t = IntPoly::variable(var_offset + j, e).scaled(BigInt::pow_u64(p, j));
    w = w + t;
  }
  return w;
}

// Solve G_i = (target_i - sum_{j<i} p^j G_j^{p^{i-j}}) / p^i.
inline std::vector<IntPoly> ghost_solve(std::uint64_t p, unsigned n,
                                        const std::vector<IntPoly>& targets) {
  std::vector<IntPoly> out;
  for (unsigned i = 0; i < n; ++i) {
    IntPoly acc = targets[i];
    for (unsigned j = 0; j < i; ++j) {
      unsigned e = 1;
      for (unsigned k = 0; k < i - j; ++k) e *= static_cast<unsigned>(p);
      acc = acc - out[j].pow(e, kTermBudget).scaled(BigInt::pow_u64(p, j));
    }
    std::uint64_t pi = 1;
    for (unsigned k = 0; k < i; ++k) pi *= p;
    require(acc.divisible_by(pi), errc::internal, "ghost recursion not divisible by p^i");
    out.push_back(acc.div_exact(pi));
    require(out.back().size() <= kTermBudget, errc::budget_exceeded, "structure polynomial size");
  }
  return out;
}

inline std::string cache_dir() {
  if (const char* env = std::getenv("DISPLIB_CACHE_DIR")) return env;
  return ".displib-cache";
}

inline std::string cache_path(std::uint64_t p, unsigned n) {
  return cache_dir() + "/witt-v1-p" + std::to_string(p) + "-n" + std::to_string(n) + ".txt";
}

inline bool load_cache(std::uint64_t p, unsigned n, WittPolys& out) {
  std::ifstream in(cache_path(p, n));
  if (!in) return false;
  std::string header;
  std::getline(in, header);
  std::string expect = "displib-witt v1 p=" + std::to_string(p) + " n=" + std::to_string(n);
  if (header != expect) return false;
  std::vector<IntPoly>* lists[4] = {&out.sum, &out.prod, &out.neg, &out.frob};
  std::string line, body;
  int which = -1;
  auto flush = [&]() {
    if (which >= 0 && !body.empty()) lists[which]->push_back(IntPoly::deserialize(body));
    body.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("%poly ", 0) == 0) {
      flush();
      which = std::stoi(line.substr(6));
    } else {
      body += line;
      body += '\n';
    }
  }
  flush();
  out.p = p;
  out.n = n;
  return out.sum.size() == n && out.prod.size() == n && out.neg.size() == n &&
         out.frob.size() == (n >= 1 ? n - 1 : 0);
}

inline void store_cache(const WittPolys& w) {
#ifdef _WIN32
  return;
#else
  std::string dir = cache_dir();
  std::string mk = "mkdir -p '" + dir + "' 2>/dev/null";
  if (std::system(mk.c_str()) != 0) return;
  std::string path = cache_path(w.p, w.n);
  std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << "displib-witt v1 p=" << w.p << " n=" << w.n << "\n";
    const std::vector<IntPoly>* lists[4] = {&w.sum, &w.prod, &w.neg, &w.frob};
    for (int k = 0; k < 4; ++k)
      for (const auto& poly : *lists[k]) {
        out << "%poly " << k << "\n";
        out << poly.serialize();
      }
  }
  std::rename(tmp.c_str(), path.c_str());
#endif
}

}  // namespace wittdetail

// Compute (or load) the structure polynomials for (p, n); process-wide cache
// with one-time initialization per key, concurrent reads afterwards.
inline WittPolysPtr witt_structure_polys(std::uint64_t p, unsigned n) {
  require(n >= 1, errc::insufficient_precision, "Witt length must be at least 1");
  {
    // exponent p^(n-1) must stay below the monomial packing bound
    std::uint64_t e = 1;
    for (unsigned k = 0; k + 1 < n; ++k) {
      e *= p;
      require(e < 256, errc::budget_exceeded, "p^(n-1) exceeds the monomial budget");
    }
    require(2 * n <= 8, errc::budget_exceeded, "Witt length exceeds the variable budget");
  }
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, unsigned>, WittPolysPtr> memo;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, n);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  auto w = std::make_shared<WittPolys>();
  if (!wittdetail::load_cache(p, n, *w)) {
    w->p = p;
    w->n = n;
    using wittdetail::ghost_poly;
    std::vector<IntPoly> t_sum, t_prod, t_neg, t_frob;
    for (unsigned i = 0; i < n; ++i) {
      t_sum.push_back(ghost_poly(p, i, 0) + ghost_poly(p, i, n));
      t_prod.push_back(ghost_poly(p, i, 0) * ghost_poly(p, i, n));
      t_neg.push_back(ghost_poly(p, i, 0).negated());
      if (i + 1 < n) t_frob.push_back(ghost_poly(p, i + 1, 0));
    }
    w->sum = wittdetail::ghost_solve(p, n, t_sum);
    w->prod = wittdetail::ghost_solve(p, n, t_prod);
    w->neg = wittdetail::ghost_solve(p, n, t_neg);
    w->frob = wittdetail::ghost_solve(p, n - 1 >= 1 ? n - 1 : 0, t_frob);
    wittdetail::store_cache(*w);
  }
  WittPolysPtr ptr = w;
  memo.emplace(key, ptr);
  return ptr;
}

}  // namespace displib
