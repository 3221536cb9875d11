#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "displib/bigint.hpp"
#include "displib/error.hpp"

namespace displib {

// Monomials are exponent vectors packed 8 bits per variable, at most 8
// variables. Exponents stay below 256 in every use (max p^(n-1) = 125).
using Mono = std::uint64_t;

inline Mono mono_one() { return 0; }

inline unsigned mono_exp(Mono m, unsigned var) { return (m >> (8 * var)) & 0xffu; }

inline Mono mono_set_exp(Mono m, unsigned var, unsigned e) {
  require(var < 8 && e < 256, errc::budget_exceeded, "monomial exponent out of range");
  m &= ~(Mono(0xff) << (8 * var));
  m |= Mono(e) << (8 * var);
  return m;
}

inline bool mono_mul_checked(Mono a, Mono b, Mono& out) {
  Mono r = 0;
  for (unsigned v = 0; v < 8; ++v) {
    unsigned e = mono_exp(a, v) + mono_exp(b, v);
    if (e >= 256) return false;
    r |= Mono(e) << (8 * v);
  }
  out = r;
  return true;
}

// Sparse integer polynomial in up to 8 variables, terms sorted by monomial.
class IntPoly {
 public:
  using Term = std::pair<Mono, BigInt>;

  IntPoly() = default;
  static IntPoly constant(const BigInt& c) {
    IntPoly p;
    if (!c.is_zero()) p.terms_.push_back({mono_one(), c});
    return p;
  }
  static IntPoly variable(unsigned var, unsigned exp = 1) {
    IntPoly p;
    p.terms_.push_back({mono_set_exp(0, var, exp), BigInt(1)});
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.terms_ == b.terms_; }

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    IntPoly r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
        r.terms_.push_back(b.terms_[j++]);
      } else {
        BigInt c = a.terms_[i].second + b.terms_[j].second;
        if (!c.is_zero()) r.terms_.push_back({a.terms_[i].first, c});
        ++i;
        ++j;
      }
    }
    return r;
  }

  friend IntPoly operator-(const IntPoly& a, const IntPoly& b) { return a + b.negated(); }

  IntPoly negated() const {
    IntPoly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::map<Mono, BigInt> acc;
    for (const auto& ta : a.terms_) {
      for (const auto& tb : b.terms_) {
        Mono m;
        require(mono_mul_checked(ta.first, tb.first, m), errc::budget_exceeded,
                "monomial exponent overflow in product");
        auto it = acc.find(m);
        if (it == acc.end()) {
          acc.emplace(m, ta.second * tb.second);
        } else {
          it->second += ta.second * tb.second;
        }
      }
    }
    IntPoly r;
    r.terms_.reserve(acc.size());
    for (auto& kv : acc)
      if (!kv.second.is_zero()) r.terms_.push_back({kv.first, std::move(kv.second)});
    return r;
  }

  IntPoly pow(unsigned e, std::size_t term_budget) const {
    IntPoly r = constant(BigInt(1));
    IntPoly b = *this;
    while (e) {
      if (e & 1u) {
        r = r * b;
        require(r.size() <= term_budget, errc::budget_exceeded, "polynomial term budget");
      }
      e >>= 1u;
      if (e) {
        b = b * b;
        require(b.size() <= term_budget, errc::budget_exceeded, "polynomial term budget");
      }
    }
    return r;
  }

  IntPoly div_exact(std::uint64_t d) const {
    IntPoly r = *this;
    for (auto& t : r.terms_) t.second = t.second.div_exact(d);
    return r;
  }

  bool divisible_by(std::uint64_t d) const {
    for (const auto& t : terms_)
      if (!t.second.divisible_by(d)) return false;
    return true;
  }

  IntPoly scaled(const BigInt& c) const {
    if (c.is_zero()) return {};
    IntPoly r = *this;
    for (auto& t : r.terms_) t.second = t.second * c;
    return r;
  }

  // Substitute each variable by the polynomial vals[v]; vals must cover every
  // variable that occurs. Used for the symbolic ghost-identity checks.
  IntPoly substitute(const std::vector<IntPoly>& vals, std::size_t term_budget) const {
    IntPoly out;
    for (const auto& t : terms_) {
      IntPoly term = constant(t.second);
      for (unsigned v = 0; v < 8; ++v) {
        unsigned e = mono_exp(t.first, v);
        if (e == 0) continue;
        require(v < vals.size(), errc::internal, "substitute: missing variable value");
        term = term * vals[v].pow(e, term_budget);
        require(term.size() <= term_budget, errc::budget_exceeded, "polynomial term budget");
      }
      out = out + term;
      require(out.size() <= term_budget, errc::budget_exceeded, "polynomial term budget");
    }
    return out;
  }

  std::string serialize() const {
    std::string s;
    for (const auto& t : terms_) {
      s += std::to_string(t.first);
      s += ' ';
      s += t.second.to_string();
      s += '\n';
    }
    return s;
  }

  static IntPoly deserialize(const std::string& body) {
    IntPoly p;
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t eol = body.find('\n', pos);
      if (eol == std::string::npos) eol = body.size();
      std::string line = body.substr(pos, eol - pos);
      pos = eol + 1;
      if (line.empty()) continue;
      std::size_t sp = line.find(' ');
      require(sp != std::string::npos, errc::parse_error, "bad polynomial line");
      Mono m = std::stoull(line.substr(0, sp));
      p.terms_.push_back({m, BigInt::from_string(line.substr(sp + 1))});
    }
    std::sort(p.terms_.begin(), p.terms_.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    return p;
  }

 private:
  std::vector<Term> terms_;
};

}  // namespace displib
