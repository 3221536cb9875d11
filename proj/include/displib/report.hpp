#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace displib {

// One line per check; canonical emission is sorted by id so reports are
// byte-identical for a fixed seed regardless of execution order.
struct CheckLine {
  std::string id;
  bool pass = false;
  std::string mode;     // "exhaustive", "sampled(N)", "structural", "exact"
  std::string witness;  // failure witness or short note
};

struct Report {
  std::vector<CheckLine> lines;

  void add(std::string id, bool pass, std::string mode, std::string witness = "") {
    lines.push_back({std::move(id), pass, std::move(mode), std::move(witness)});
  }
  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& l : lines)
      if (!l.pass) ++n;
    return n;
  }
  void merge(const Report& o) {
    lines.insert(lines.end(), o.lines.begin(), o.lines.end());
  }

  std::string render() const {
    std::vector<CheckLine> sorted = lines;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CheckLine& a, const CheckLine& b) { return a.id < b.id; });
    std::string out;
    for (const auto& l : sorted) {
      out += l.pass ? "PASS " : "FAIL ";
      out += l.id;
      out += " [";
      out += l.mode;
      out += "]";
      if (!l.witness.empty()) {
        out += " ";
        out += l.witness;
      }
      out += "\n";
    }
    return out;
  }
};

}  // namespace displib
