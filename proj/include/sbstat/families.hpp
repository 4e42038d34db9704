#pragma once
// Acceptable model families: indexed families of same-length sets with an
// at-most-exponential index count and membership testable in small space.
// Built-ins: FullSpace, Cylinders (all prefix sets), HammingBalls.
//
// Indexing is canonical and densely ordered so "index bit-length" is a
// meaningful declared upper bound on description length:
//   declared_complexity(i) = floor(log2(i + 1)),
// i.e. index i corresponds to the i-th binary string in the length-then-lex
// enumeration ("", 0, 1, 00, ...). Slices can be built in two modes:
//   measured  — members with exact cd_set <= i (exhaustive search),
//   declared  — members with declared_complexity <= i.
// Every downstream certificate records the mode it was built under.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "complexity.hpp"
#include "machine.hpp"

namespace sbstat {

enum class FamilyKind { FullSpace, Cylinders, HammingBalls };

enum class CdMode { Measured, Declared };

inline const char* family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::FullSpace: return "full";
    case FamilyKind::Cylinders: return "cylinders";
    case FamilyKind::HammingBalls: return "hamming";
  }
  return "?";
}

inline const char* mode_name(CdMode m) { return m == CdMode::Measured ? "measured" : "declared"; }

struct Family {
  FamilyKind kind = FamilyKind::FullSpace;
  int n = 0;

  Family() = default;
  Family(FamilyKind k, int length) : kind(k), n(length) {
    if (length < 1 || length > 20) throw std::invalid_argument("Family: need 1 <= n <= 20");
  }

  // Number of indices. Hamming: (center, radius) pairs, radius in [0, n];
  // cylinders: all prefixes of length 0..n via the heap-order bijection
  // index+1 <-> 1<prefix>; full space: the single index 0.
  uint64_t size() const {
    switch (kind) {
      case FamilyKind::FullSpace: return 1;
      case FamilyKind::Cylinders: return (uint64_t{2} << n) - 1;
      case FamilyKind::HammingBalls: return (uint64_t{1} << n) * static_cast<uint64_t>(n + 1);
    }
    return 0;
  }

  // Size bound exponent p(n): index count <= 2^p(n).
  int index_bits() const { return ceil_log2(size()); }

  Bitstring cylinder_prefix(uint64_t index) const {
    uint64_t h = index + 1;
    int len = floor_log2(h);
    return Bitstring(h ^ (uint64_t{1} << len), len);
  }

  uint64_t cylinder_index(const Bitstring& prefix) const {
    return ((uint64_t{1} << prefix.len) | prefix.bits) - 1;
  }

  Bitstring ball_center(uint64_t index) const {
    return Bitstring(index / static_cast<uint64_t>(n + 1), n);
  }
  int ball_radius(uint64_t index) const { return static_cast<int>(index % (n + 1)); }
  uint64_t ball_index(const Bitstring& center, int radius) const {
    return center.bits * static_cast<uint64_t>(n + 1) + static_cast<uint64_t>(radius);
  }

  bool member(uint64_t index, const Bitstring& x) const {
    if (x.len != n) return false;
    switch (kind) {
      case FamilyKind::FullSpace:
        return true;
      case FamilyKind::Cylinders: {
        Bitstring u = cylinder_prefix(index);
        for (int i = 0; i < u.len; ++i)
          if (x.bit(i) != u.bit(i)) return false;
        return true;
      }
      case FamilyKind::HammingBalls:
        return __builtin_popcountll(x.bits ^ ball_center(index).bits) <= ball_radius(index);
    }
    return false;
  }

  uint64_t set_size(uint64_t index) const {
    switch (kind) {
      case FamilyKind::FullSpace:
        return uint64_t{1} << n;
      case FamilyKind::Cylinders:
        return uint64_t{1} << (n - cylinder_prefix(index).len);
      case FamilyKind::HammingBalls: {
        uint64_t total = 0, choose = 1;
        int r = ball_radius(index);
        for (int d = 0; d <= r; ++d) {
          total += choose;
          choose = choose * static_cast<uint64_t>(n - d) / static_cast<uint64_t>(d + 1);
        }
        return total;
      }
    }
    return 0;
  }

  // Membership mask over {0,1}^n; needs n <= 6.
  uint64_t set_mask(uint64_t index) const {
    if (n > 6) throw std::invalid_argument("set_mask: need n <= 6");
    uint64_t mask = 0;
    for (uint64_t y = 0; y < (uint64_t{1} << n); ++y)
      if (member(index, Bitstring(y, n))) mask |= uint64_t{1} << y;
    return mask;
  }

  // Declared description length of an index: its position in the
  // length-then-lex enumeration of binary strings.
  int declared_complexity(uint64_t index) const { return floor_log2(index + 1); }

  std::string index_name(uint64_t index) const {
    switch (kind) {
      case FamilyKind::FullSpace:
        return "full";
      case FamilyKind::Cylinders:
        return "cyl(" + cylinder_prefix(index).str() + ")";
      case FamilyKind::HammingBalls:
        return "ball(" + ball_center(index).str() + "," + std::to_string(ball_radius(index)) + ")";
    }
    return "?";
  }
};

// --- compilation to machine programs -----------------------------------

struct CompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compiles the membership test of family set `index` to a machine program.
// Full space: accept-always. Cylinder(u): match u, then accept-always.
// Ball(c, r): a (position, mismatches) state grid, mismatch count tracked
// in the control state, so all compiled testers run in one work cell.
inline Program compile_membership(const Family& fam, uint64_t index) {
  switch (fam.kind) {
    case FamilyKind::FullSpace: {
      TransitionTable t(1);
      for (auto& tr : t.rows[0]) tr = make_accept();
      return *Program::from_table(t);
    }
    case FamilyKind::Cylinders: {
      Bitstring u = fam.cylinder_prefix(index);
      int q = u.len + 1;
      if (q > kMaxStates) throw CompileError("cylinder prefix too long for state cap");
      TransitionTable t(q);
      for (int s = 0; s < u.len; ++s) {
        int b = u.bit(s);
        t.at(s, b, 0) = Transition{Act::Continue, 0, +1, 0, static_cast<uint16_t>(s + 1)};
        t.at(s, b, 1) = Transition{Act::Continue, 1, +1, 0, static_cast<uint16_t>(s + 1)};
      }
      for (auto& tr : t.rows[u.len]) tr = make_accept();
      return *Program::from_table(t);
    }
    case FamilyKind::HammingBalls: {
      Bitstring c = fam.ball_center(index);
      int r = fam.ball_radius(index);
      int n = fam.n;
      int q = (r + 1) * (n + 1);
      if (q > kMaxStates)
        throw CompileError("ball(" + c.str() + "," + std::to_string(r) +
                           ") needs " + std::to_string(q) + " states, cap is " +
                           std::to_string(kMaxStates));
      TransitionTable t(q);
      auto id = [n](int pos, int mis) { return mis * (n + 1) + pos; };
      for (int mis = 0; mis <= r; ++mis) {
        for (int pos = 0; pos < n; ++pos) {
          int s = id(pos, mis);
          int match = c.bit(pos);
          for (int w = 0; w <= 1; ++w) {
            t.at(s, match, w) =
                Transition{Act::Continue, static_cast<uint8_t>(w), +1, 0,
                           static_cast<uint16_t>(id(pos + 1, mis))};
            if (mis < r)
              t.at(s, 1 - match, w) =
                  Transition{Act::Continue, static_cast<uint8_t>(w), +1, 0,
                             static_cast<uint16_t>(id(pos + 1, mis + 1))};
          }
        }
        t.at(id(n, mis), 2, 0) = make_accept();
        t.at(id(n, mis), 2, 1) = make_accept();
      }
      return *Program::from_table(t);
    }
  }
  throw CompileError("unknown family");
}

// --- slices ------------------------------------------------------------

struct FamilySlice {
  Family family;
  int m = 0;    // space bound (measured mode)
  int i = 0;    // complexity threshold
  int j = 0;    // log-size threshold: floor(log2 |A'|) <= j
  CdMode mode = CdMode::Declared;
  int cd_cap = 0;  // search cap used in measured mode
  std::vector<uint64_t> members;  // sorted, duplicate-free indices

  int n() const { return family.n; }
};

inline FamilySlice build_slice(const Family& fam, int m, int i, int j, CdMode mode,
                               int cap = kDefaultProgramCap) {
  FamilySlice s;
  s.family = fam;
  s.m = m;
  s.i = i;
  s.j = j;
  s.mode = mode;
  s.cd_cap = mode == CdMode::Measured ? cap : 0;
  if (mode == CdMode::Measured && fam.n > 6)
    throw CapExceeded("measured slice needs n <= 6 (exhaustive cd_set)");
  for (uint64_t idx = 0; idx < fam.size(); ++idx) {
    if (floor_log2(fam.set_size(idx)) > j) continue;
    if (mode == CdMode::Declared) {
      if (fam.declared_complexity(idx) > i) continue;
    } else {
      ComplexityValue v = cd_set(fam.set_mask(idx), fam.n, m, cap);
      if (!v.finite || v.value > i) continue;
    }
    s.members.push_back(idx);
  }
  return s;
}

// --- family DSL --------------------------------------------------------

// Textual set declarations used by the CLI and reports:
//   "full" | "cylinder prefix=01" | "cylinder prefix=" | "ball center=0000 radius=1"
struct DslResult {
  bool ok = false;
  FamilyKind kind = FamilyKind::FullSpace;
  uint64_t index = 0;
  std::string error;
};

inline DslResult parse_set_dsl(const std::string& text, int n) {
  DslResult r;
  std::istringstream in(text);
  std::string head;
  in >> head;
  auto get_kv = [&](const std::string& key, std::string* out) {
    std::string tok;
    while (in >> tok) {
      auto eq = tok.find('=');
      if (eq != std::string::npos && tok.substr(0, eq) == key) {
        *out = tok.substr(eq + 1);
        return true;
      }
    }
    return false;
  };
  try {
    if (head == "full") {
      r.kind = FamilyKind::FullSpace;
      r.index = 0;
      r.ok = true;
    } else if (head == "cylinder" || head == "cyl") {
      std::string prefix;
      if (!get_kv("prefix", &prefix)) {
        r.error = "cylinder needs prefix=<bits>";
        return r;
      }
      Bitstring u = Bitstring::from_string(prefix);
      if (u.len > n) {
        r.error = "prefix longer than n";
        return r;
      }
      r.kind = FamilyKind::Cylinders;
      r.index = Family(FamilyKind::Cylinders, n).cylinder_index(u);
      r.ok = true;
    } else if (head == "ball") {
      std::string center, radius;
      if (!get_kv("center", &center) || !get_kv("radius", &radius)) {
        r.error = "ball needs center=<bits> radius=<int>";
        return r;
      }
      Bitstring c = Bitstring::from_string(center);
      int rad = std::stoi(radius);
      if (c.len != n || rad < 0 || rad > n) {
        r.error = "bad center length or radius";
        return r;
      }
      r.kind = FamilyKind::HammingBalls;
      r.index = Family(FamilyKind::HammingBalls, n).ball_index(c, rad);
      r.ok = true;
    } else {
      r.error = "unknown set kind: " + head;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace sbstat
