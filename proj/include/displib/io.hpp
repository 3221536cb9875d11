#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "displib/cy.hpp"
#include "displib/display.hpp"
#include "displib/frame.hpp"
#include "displib/ringhom.hpp"

namespace displib {

// Line-oriented text formats. '#' starts a comment; blank lines separate
// nothing. Polynomials are sums of integer-coefficient monomials in the ring
// variables ('g' is the residue-field generator when f > 1), for example
//   2*t^2*u + 3t + 1
// Witt vectors are bracketed component lists with an optional precision tag:
//   [1+t, 0, 2]@3

namespace io {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), errc::io_error, "cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// split on a separator at bracket depth zero
inline std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

inline std::map<std::string, std::string> keyvals(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos) continue;
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

// ---- polynomial parser ----

struct PolyLexer {
  std::string s;
  std::size_t pos = 0;
  void skip() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eof() {
    skip();
    return pos >= s.size();
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
};

inline long long lex_int(PolyLexer& lx) {
  lx.skip();
  std::size_t start = lx.pos;
  while (lx.pos < lx.s.size() && isdigit(static_cast<unsigned char>(lx.s[lx.pos]))) ++lx.pos;
  require(lx.pos > start, errc::parse_error, "expected integer in '" + lx.s + "'");
  return std::stoll(lx.s.substr(start, lx.pos - start));
}

inline std::string lex_ident(PolyLexer& lx) {
  lx.skip();
  std::size_t start = lx.pos;
  while (lx.pos < lx.s.size() &&
         (isalnum(static_cast<unsigned char>(lx.s[lx.pos])) || lx.s[lx.pos] == '_')) {
    if (isdigit(static_cast<unsigned char>(lx.s[lx.pos])) && lx.pos == start) break;
    ++lx.pos;
  }
  require(lx.pos > start, errc::parse_error, "expected identifier in '" + lx.s + "'");
  return lx.s.substr(start, lx.pos - start);
}

inline RingEl parse_poly_impl(const ArtinRing& R, PolyLexer& lx);

inline RingEl parse_factor(const ArtinRing& R, PolyLexer& lx) {
  char c = lx.peek();
  if (c == '(') {
    ++lx.pos;
    // parenthesised coefficient polynomial (used for extension fields)
    int depth = 1;
    std::size_t start = lx.pos;
    while (lx.pos < lx.s.size() && depth) {
      if (lx.s[lx.pos] == '(') ++depth;
      if (lx.s[lx.pos] == ')') --depth;
      ++lx.pos;
    }
    require(depth == 0, errc::parse_error, "unbalanced parentheses");
    std::string inner = lx.s.substr(start, lx.pos - 1 - start);
    PolyLexer sub{inner, 0};
    return parse_poly_impl(R, sub);
  }
  if (isdigit(static_cast<unsigned char>(c))) {
    long long v = lex_int(lx);
    unsigned exp = 1;
    if (lx.peek() == '^') {
      ++lx.pos;
      exp = static_cast<unsigned>(lex_int(lx));
    }
    RingEl base = R.from_int(v);
    return exp == 1 ? base : ring_pow(base, exp);
  }
  std::string name = lex_ident(lx);
  unsigned exp = 1;
  if (lx.peek() == '^') {
    ++lx.pos;
    exp = static_cast<unsigned>(lex_int(lx));
  }
  if (R.f() > 1 && name == "g") {
    RingEl g = R.from_coeff(R.c_nth(static_cast<std::uint64_t>(R.p())));  // the generator digit
    return ring_pow(g, exp);
  }
  for (unsigned v = 0; v < R.num_vars(); ++v)
    if (R.data().vars[v] == name) {
      Mono m = mono_set_exp(0, v, exp);
      if (!R.mono_in_basis(m)) return R.zero();
      return R.monomial(m, R.c_one());
    }
  fail(errc::parse_error, "unknown variable '" + name + "'");
}

inline RingEl parse_poly_impl(const ArtinRing& R, PolyLexer& lx) {
  RingEl acc = R.zero();
  bool neg = false;
  if (lx.peek() == '-') {
    neg = true;
    ++lx.pos;
  } else if (lx.peek() == '+') {
    ++lx.pos;
  }
  for (;;) {
    RingEl term = parse_factor(R, lx);
    for (;;) {
      char c = lx.peek();
      if (c == '*') {
        ++lx.pos;
        term = ring_mul(term, parse_factor(R, lx));
      } else if (isalpha(static_cast<unsigned char>(c))) {
        term = ring_mul(term, parse_factor(R, lx));  // implicit product: 2t
      } else {
        break;
      }
    }
    acc = ring_add(acc, neg ? ring_neg(term) : term);
    char c = lx.peek();
    if (c == '+') {
      neg = false;
      ++lx.pos;
    } else if (c == '-') {
      neg = true;
      ++lx.pos;
    } else {
      break;
    }
  }
  return acc;
}

inline RingEl parse_poly(const ArtinRing& R, const std::string& s) {
  std::string t = trim(s);
  if (t.empty() || t == "0") return R.zero();
  PolyLexer lx{t, 0};
  RingEl r = parse_poly_impl(R, lx);
  require(lx.eof(), errc::parse_error, "trailing input in polynomial '" + s + "'");
  return r;
}

inline WittEl parse_witt(const ArtinRing& R, const std::string& s, unsigned prec = 0) {
  std::string t = trim(s);
  unsigned want = prec;
  std::size_t at = t.rfind('@');
  if (at != std::string::npos && t.find(']') != std::string::npos && at > t.find(']')) {
    want = static_cast<unsigned>(std::stoul(t.substr(at + 1)));
    t = trim(t.substr(0, at));
  }
  require(!t.empty() && t.front() == '[' && t.back() == ']', errc::parse_error,
          "Witt vector must be bracketed: " + s);
  auto comps = split_top(t.substr(1, t.size() - 2), ',');
  if (comps.size() == 1 && comps[0].empty()) comps.clear();
  WittEl w = witt_zero(R, want ? want : static_cast<unsigned>(comps.size()));
  require(!w.c.empty(), errc::parse_error, "empty Witt vector");
  for (std::size_t i = 0; i < comps.size() && i < w.c.size(); ++i)
    w.c[i] = parse_poly(R, comps[i]);
  return w;
}

// ---- structured sections ----

struct Cursor {
  const std::vector<std::string>* lines;
  std::size_t pos = 0;
  bool eof() const { return pos >= lines->size(); }
  const std::string& peek() const { return (*lines)[pos]; }
  const std::string& next() { return (*lines)[pos++]; }
};

inline ArtinRing parse_ring_line(const std::string& line) {
  auto kv = keyvals(line);
  require(kv.count("p"), errc::parse_error, "ring line needs p=");
  RingSpec spec;
  spec.p = std::stoull(kv["p"]);
  spec.N = kv.count("N") ? static_cast<unsigned>(std::stoul(kv["N"])) : 1;
  spec.f = kv.count("f") ? static_cast<unsigned>(std::stoul(kv["f"])) : 1;
  if (kv.count("vars") && !kv["vars"].empty())
    for (const auto& v : split_top(kv["vars"], ',')) spec.vars.push_back(v);
  if (kv.count("trunc") && !kv["trunc"].empty()) {
    for (const auto& t : split_top(kv["trunc"], ',')) {
      // monomial like t^2*u
      std::vector<unsigned> ev(spec.vars.size(), 0);
      for (const auto& f : split_top(t, '*')) {
        std::size_t caret = f.find('^');
        std::string name = caret == std::string::npos ? f : f.substr(0, caret);
        unsigned e = caret == std::string::npos
                         ? 1
                         : static_cast<unsigned>(std::stoul(f.substr(caret + 1)));
        bool found = false;
        for (std::size_t v = 0; v < spec.vars.size(); ++v)
          if (spec.vars[v] == trim(name)) {
            ev[v] += e;
            found = true;
          }
        require(found, errc::parse_error, "unknown variable in truncation: " + f);
      }
      spec.trunc.push_back(ev);
    }
  }
  return ArtinRing::make(spec);
}

inline ArtinRing expect_ring(Cursor& cur) {
  require(!cur.eof() && cur.peek().rfind("ring", 0) == 0, errc::parse_error,
          "expected a ring line");
  return parse_ring_line(cur.next());
}

inline Matrix parse_matrix_rows(const ArtinRing& R, Cursor& cur, std::size_t rows,
                                std::size_t cols) {
  Matrix m(R, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    require(!cur.eof(), errc::parse_error, "matrix rows missing");
    auto cells = split_top(cur.next(), ',');
    require(cells.size() == cols, errc::parse_error, "matrix row arity");
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = parse_poly(R, cells[c]);
  }
  return m;
}

// frame files: a "frame" line followed by the ring of S
//   frame kind=witt prec=3
//   frame kind=relative prec=3 ideal=e pd=trivial
// relative kernels are generated by variables, monomials, or p^k; the target
// ring is the in-class quotient by those generators.
struct ParsedFrame {
  Frame frame;
  ArtinRing S;
};

inline ParsedFrame parse_frame(Cursor& cur) {
  require(!cur.eof() && cur.peek().rfind("frame", 0) == 0, errc::parse_error,
          "expected a frame line");
  auto kv = keyvals(cur.next());
  unsigned prec = kv.count("prec") ? static_cast<unsigned>(std::stoul(kv["prec"])) : 3;
  ArtinRing S = expect_ring(cur);
  std::string kind = kv.count("kind") ? kv["kind"] : "witt";
  if (kind == "witt") return {Frame::witt(S, prec), S};
  require(kind == "relative", errc::parse_error, "frame kind must be witt or relative");

  // build the quotient ring: drop p-powers and kill monomials
  RingSpec rs;
  rs.p = S.p();
  rs.N = S.N();
  rs.f = S.f();
  rs.vars = S.data().vars;
  for (Mono t : S.data().trunc) {
    std::vector<unsigned> ev(rs.vars.size(), 0);
    for (unsigned v = 0; v < rs.vars.size(); ++v) ev[v] = mono_exp(t, v);
    rs.trunc.push_back(ev);
  }
  std::vector<RingEl> gens;
  std::string pdk = kv.count("pd") ? kv["pd"] : "trivial";
  require(kv.count("ideal"), errc::parse_error, "relative frame needs ideal=");
  for (const auto& gs : split_top(kv["ideal"], ',')) {
    if (gs == "p" || (!gs.empty() && isdigit(static_cast<unsigned char>(gs[0])))) {
      // p or p^k: lower the coefficient exponent
      unsigned k = 1;
      std::size_t caret = gs.find('^');
      if (caret != std::string::npos) k = static_cast<unsigned>(std::stoul(gs.substr(caret + 1)));
      if (!gs.empty() && isdigit(static_cast<unsigned char>(gs[0]))) {
        std::uint64_t val = std::stoull(gs.substr(0, caret));
        std::uint64_t pw = S.p();
        k = 1;
        while (pw < val) {
          pw *= S.p();
          ++k;
        }
        require(pw == val, errc::parse_error, "numeric kernel generators must be powers of p");
      }
      rs.N = std::min(rs.N, k);
      RingEl g = S.one();
      for (unsigned i = 0; i < k; ++i) g = ring_scale(g, S.c_from_int((long long)S.p()));
      gens.push_back(g);
    } else {
      // monomial generator
      RingEl g = parse_poly(S, gs);
      require(g.terms().size() == 1, errc::parse_error,
              "kernel generators must be monomials or powers of p");
      gens.push_back(g);
      std::vector<unsigned> ev(rs.vars.size(), 0);
      for (unsigned v = 0; v < rs.vars.size(); ++v) ev[v] = mono_exp(g.terms()[0].first, v);
      rs.trunc.push_back(ev);
    }
  }
  ArtinRing R = ArtinRing::make(rs);
  std::vector<RingEl> images;
  for (std::size_t v = 0; v < S.num_vars(); ++v) {
    Mono m = mono_set_exp(0, static_cast<unsigned>(v), 1);
    images.push_back(R.mono_in_basis(m) ? R.monomial(m, R.c_one()) : R.zero());
  }
  RingHom alpha = RingHom::make(S, R, images);
  IdealPtr I;
  if (pdk == "trivial") {
    I = Ideal::make(S, gens, PdKind::trivial);
  } else if (pdk == "padic") {
    I = Ideal::padic(S);
  } else if (pdk == "product") {
    // split generators: p-powers to the canonical factor, monomials trivial
    std::vector<RingEl> mono_gens;
    bool has_p = false;
    for (const auto& g : gens) {
      if (g.terms().size() == 1 && g.terms()[0].first == mono_one())
        has_p = true;
      else
        mono_gens.push_back(g);
    }
    require(has_p && !mono_gens.empty(), errc::parse_error,
            "product divided powers need p and monomial generators");
    I = Ideal::product_of(Ideal::padic(S), Ideal::make(S, mono_gens, PdKind::trivial));
  } else {
    fail(errc::parse_error, "unknown pd kind: " + pdk);
  }
  return {Frame::relative(alpha, I, prec), S};
}

// datum files: "datum d=1 ranks=1,1", a frame block, then "phi" and n rows
// of comma-separated Witt vectors
struct ParsedDatum {
  StandardDatum datum;
  ParsedFrame frame;
};

inline ParsedDatum parse_datum(Cursor& cur) {
  require(!cur.eof() && cur.peek().rfind("datum", 0) == 0, errc::parse_error,
          "expected a datum line");
  auto kv = keyvals(cur.next());
  require(kv.count("d") && kv.count("ranks"), errc::parse_error, "datum needs d= and ranks=");
  ParsedFrame pf = parse_frame(cur);
  StandardDatum D;
  D.frame = pf.frame;
  D.d = static_cast<unsigned>(std::stoul(kv["d"]));
  for (const auto& r : split_top(kv["ranks"], ','))
    D.ranks.push_back(static_cast<unsigned>(std::stoul(r)));
  unsigned n = D.total_rank();
  require(!cur.eof() && cur.peek() == "phi", errc::parse_error, "expected phi section");
  cur.next();
  D.phi.rows.assign(n, {});
  for (unsigned r = 0; r < n; ++r) {
    require(!cur.eof(), errc::parse_error, "phi rows missing");
    auto cells = split_top(cur.next(), ',');
    // cells are bracketed Witt vectors; rejoin pieces split inside brackets
    std::vector<std::string> witts;
    std::string acc;
    int depth = 0;
    for (const auto& c : cells) {
      if (!acc.empty()) acc += ",";
      acc += c;
      for (char ch : c) {
        if (ch == '[') ++depth;
        if (ch == ']') --depth;
      }
      if (depth == 0) {
        witts.push_back(acc);
        acc.clear();
      }
    }
    require(witts.size() == n, errc::parse_error, "phi row arity");
    for (unsigned c = 0; c < n; ++c)
      D.phi.rows[r].push_back(parse_witt(pf.S, witts[c], pf.frame.prec()));
  }
  D.validate();
  return {std::move(D), std::move(pf)};
}

// crystal files: "cy h=1", the base ring, h "nabla" blocks, a "pairing"
// block, optional "fil3/fil2/fil1" blocks (standard layout otherwise), and
// an optional thickening: "thickening", ring of S, "ideal e pd=trivial",
// "fref <images>"
struct ParsedCrystal {
  CYCrystal crystal;
  bool has_thickening = false;
  ArtinRing S;
  RingHom alpha;
  IdealPtr aI;
  std::vector<RingEl> fref_images;
};

inline ParsedCrystal parse_crystal(Cursor& cur) {
  require(!cur.eof() && cur.peek().rfind("cy", 0) == 0, errc::parse_error,
          "expected a cy line");
  auto kv = keyvals(cur.next());
  require(kv.count("h"), errc::parse_error, "cy line needs h=");
  ParsedCrystal out;
  CYCrystal C;
  C.h = static_cast<unsigned>(std::stoul(kv["h"]));
  C.A = expect_ring(cur);
  unsigned n = C.rank();
  for (unsigned i = 0; i < C.h; ++i) {
    require(!cur.eof() && cur.peek() == "nabla", errc::parse_error, "expected nabla block");
    cur.next();
    C.nabla.push_back(parse_matrix_rows(C.A, cur, n, n));
  }
  require(!cur.eof() && cur.peek() == "pairing", errc::parse_error, "expected pairing block");
  cur.next();
  C.pairing = parse_matrix_rows(C.A, cur, n, n);
  // filtration: default standard layout
  auto std_col = [&](std::vector<unsigned> idx) {
    std::vector<std::vector<RingEl>> cols;
    for (unsigned i : idx) {
      std::vector<RingEl> v(n, C.A.zero());
      v[i] = C.A.one();
      cols.push_back(v);
    }
    return Matrix::from_cols(C.A, cols);
  };
  std::vector<unsigned> all(n);
  for (unsigned i = 0; i < n; ++i) all[i] = i;
  std::vector<unsigned> f1(all.begin(), all.begin() + 2 * C.h + 1);
  std::vector<unsigned> f2(all.begin(), all.begin() + C.h + 1);
  C.fil = {std_col(all), std_col(f1), std_col(f2), std_col({0})};
  for (unsigned j = 3; j >= 1; --j) {
    std::string tag = "fil" + std::to_string(j);
    if (!cur.eof() && cur.peek() == tag) {
      cur.next();
      unsigned cols = j == 3 ? 1 : (j == 2 ? C.h + 1 : 2 * C.h + 1);
      Matrix m(C.A, n, cols);
      for (unsigned c = 0; c < cols; ++c) {
        require(!cur.eof(), errc::parse_error, "filtration columns missing");
        auto cells = split_top(cur.next(), ',');
        require(cells.size() == n, errc::parse_error, "filtration column arity");
        for (unsigned r = 0; r < n; ++r) m.at(r, c) = parse_poly(C.A, cells[r]);
      }
      C.fil[j] = std::move(m);
    }
  }
  out.crystal = cy_make(C);
  if (!cur.eof() && cur.peek() == "thickening") {
    cur.next();
    out.has_thickening = true;
    out.S = expect_ring(cur);
    require(!cur.eof() && cur.peek().rfind("ideal", 0) == 0, errc::parse_error,
            "expected ideal line");
    // reuse the frame parser's kernel conventions via a synthetic frame line
    std::vector<std::string> synth;
    // "ideal gens=e pd=trivial" rewritten as a relative frame line
    auto ikv = keyvals(cur.next());
    require(ikv.count("gens"), errc::parse_error, "ideal line needs gens=");
    {
      std::string spec = "frame kind=relative prec=2 ideal=" + ikv["gens"];
      spec += " pd=" + (ikv.count("pd") ? ikv["pd"] : std::string("trivial"));
      synth.push_back(spec);
    }
    // serialize the ring line back
    {
      std::string rl = "ring p=" + std::to_string(out.S.p()) + " N=" + std::to_string(out.S.N());
      if (out.S.num_vars()) {
        rl += " vars=";
        for (std::size_t v = 0; v < out.S.num_vars(); ++v) {
          if (v) rl += ",";
          rl += out.S.data().vars[v];
        }
        rl += " trunc=";
        bool first = true;
        for (Mono t : out.S.data().trunc) {
          if (!first) rl += ",";
          first = false;
          bool inner_first = true;
          for (unsigned v = 0; v < out.S.num_vars(); ++v) {
            unsigned e = mono_exp(t, v);
            if (!e) continue;
            if (!inner_first) rl += "*";
            inner_first = false;
            rl += out.S.data().vars[v];
            if (e > 1) rl += "^" + std::to_string(e);
          }
        }
      }
      synth.push_back(rl);
    }
    Cursor scur{&synth, 0};
    ParsedFrame pf = parse_frame(scur);
    out.alpha = pf.frame.proj();
    out.aI = pf.frame.ideal();
    require(!cur.eof() && cur.peek().rfind("fref", 0) == 0, errc::parse_error,
            "expected fref line");
    std::string fline = trim(cur.next().substr(4));
    if (!fline.empty())
      for (const auto& im : split_top(fline, ',')) out.fref_images.push_back(parse_poly(out.S, im));
    require(out.fref_images.size() == out.crystal.h, errc::parse_error,
            "fref needs one image per direction");
  }
  return out;
}

// lifting files: "lifting", then for each step i = i_max..0 a "step i=K
// cols=C" line followed by C column lines of n comma-separated entries
inline Lifting parse_lifting(const ArtinRing& S, unsigned n, unsigned i_max, Cursor& cur) {
  require(!cur.eof() && cur.peek() == "lifting", errc::parse_error, "expected lifting block");
  cur.next();
  Lifting E;
  E.S = S;
  E.total_rank = n;
  E.steps.assign(i_max + 1, Matrix(S, n, 0));
  while (!cur.eof() && cur.peek().rfind("step", 0) == 0) {
    auto kv = keyvals(cur.next());
    unsigned i = static_cast<unsigned>(std::stoul(kv.at("i")));
    unsigned cols = static_cast<unsigned>(std::stoul(kv.at("cols")));
    require(i <= i_max, errc::parse_error, "step index out of range");
    Matrix m(S, n, cols);
    for (unsigned c = 0; c < cols; ++c) {
      require(!cur.eof(), errc::parse_error, "lifting columns missing");
      auto cells = split_top(cur.next(), ',');
      require(cells.size() == n, errc::parse_error, "lifting column arity");
      for (unsigned r = 0; r < n; ++r) m.at(r, c) = parse_poly(S, cells[r]);
    }
    E.steps[i] = std::move(m);
  }
  return E;
}

inline std::string witt_to_string(const WittEl& w) {
  std::string s = "[";
  for (unsigned i = 0; i < w.prec(); ++i) {
    if (i) s += ",";
    s += to_string(w.c[i]);
  }
  s += "]@" + std::to_string(w.prec());
  return s;
}

}  // namespace io
}  // namespace displib
