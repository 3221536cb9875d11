#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "displib/error.hpp"

namespace displib {

// Sign-magnitude big integer, just enough for structure-polynomial work:
// coefficients like binom(125, 62) overflow __int128, so vectors of limbs.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v) {
    if (v < 0) {
      neg_ = true;
      // careful with LLONG_MIN
      unsigned long long m = static_cast<unsigned long long>(-(v + 1)) + 1ULL;
      limbs_.push_back(m);
    } else if (v > 0) {
      limbs_.push_back(static_cast<std::uint64_t>(v));
    }
  }

  bool is_zero() const { return limbs_.empty(); }
  bool negative() const { return neg_; }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }

  friend BigInt operator-(const BigInt& a) {
    BigInt r = a;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.neg_ == b.neg_) {
      BigInt r;
      r.limbs_ = add_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
      r.trim();
      return r;
    }
    int c = cmp_mag(a.limbs_, b.limbs_);
    BigInt r;
    if (c == 0) return r;
    if (c > 0) {
      r.limbs_ = sub_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      r.limbs_ = sub_mag(b.limbs_, a.limbs_);
      r.neg_ = b.neg_;
    }
    r.trim();
    return r;
  }

  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.is_zero() || b.is_zero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        unsigned __int128 cur = carry + r.limbs_[i + j] +
                                static_cast<unsigned __int128>(a.limbs_[i]) * b.limbs_[j];
        r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry) {
        unsigned __int128 cur = carry + r.limbs_[k];
        r.limbs_[k] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
        ++k;
      }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
  }

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  // Exact division by a small positive divisor; errors if not exact.
  BigInt div_exact(std::uint64_t d) const {
    require(d != 0, errc::internal, "division by zero");
    BigInt r;
    if (is_zero()) return r;
    r.limbs_.assign(limbs_.size(), 0);
    unsigned __int128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      unsigned __int128 cur = (rem << 64) | limbs_[i];
      r.limbs_[i] = static_cast<std::uint64_t>(cur / d);
      rem = cur % d;
    }
    require(rem == 0, errc::internal, "inexact division in ghost recursion");
    r.neg_ = neg_;
    r.trim();
    return r;
  }

  bool divisible_by(std::uint64_t d) const {
    if (is_zero()) return true;
    unsigned __int128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
      rem = ((rem << 64) | limbs_[i]) % d;
    return rem == 0;
  }

  // Nonnegative residue mod m (m >= 2).
  std::uint64_t mod_u64(std::uint64_t m) const {
    unsigned __int128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
      rem = ((rem << 64) | limbs_[i]) % m;
    std::uint64_t r = static_cast<std::uint64_t>(rem);
    if (neg_ && r != 0) r = m - r;
    return r;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::vector<std::uint64_t> tmp = limbs_;
    std::string digits;
    while (!tmp.empty()) {
      unsigned __int128 rem = 0;
      for (std::size_t i = tmp.size(); i-- > 0;) {
        unsigned __int128 cur = (rem << 64) | tmp[i];
        tmp[i] = static_cast<std::uint64_t>(cur / 10);
        rem = cur % 10;
      }
      digits.push_back(static_cast<char>('0' + static_cast<int>(rem)));
      while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
    }
    if (neg_) digits.push_back('-');
    return std::string(digits.rbegin(), digits.rend());
  }

  static BigInt from_string(const std::string& s) {
    BigInt r;
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    require(i < s.size(), errc::parse_error, "empty integer literal");
    for (; i < s.size(); ++i) {
      require(s[i] >= '0' && s[i] <= '9', errc::parse_error, "bad integer literal: " + s);
      r = r.mul_u64(10);
      r = r + BigInt(s[i] - '0');
    }
    if (neg && !r.is_zero()) r.neg_ = true;
    return r;
  }

  BigInt mul_u64(std::uint64_t v) const {
    BigInt b;
    if (v == 0 || is_zero()) return b;
    b.limbs_.push_back(v);
    b.neg_ = false;
    return *this * b;
  }

  static BigInt pow_u64(std::uint64_t base, unsigned exp) {
    BigInt r(1);
    BigInt b(static_cast<long long>(base));
    while (exp) {
      if (exp & 1u) r *= b;
      b *= b;
      exp >>= 1u;
    }
    return r;
  }

 private:
  static int cmp_mag(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }
  static std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> r(std::max(a.size(), b.size()) + 1, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      unsigned __int128 cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r[i] = static_cast<std::uint64_t>(cur);
      carry = cur >> 64;
    }
    return r;
  }
  // requires |a| >= |b|
  static std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> r = a;
    unsigned __int128 borrow = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      unsigned __int128 sub = borrow + (i < b.size() ? b[i] : 0);
      if (r[i] >= sub) {
        r[i] = static_cast<std::uint64_t>(r[i] - sub);
        borrow = 0;
      } else {
        r[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) + r[i] - sub);
        borrow = 1;
      }
    }
    return r;
  }
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }

  std::vector<std::uint64_t> limbs_;  // little-endian magnitude
  bool neg_ = false;
};

}  // namespace displib
