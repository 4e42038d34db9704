#pragma once
// Random subfamilies of a slice: Bernoulli sampling at the inclusion
// probability 2^-k (n+2) ln 2, the three properties checked over them, the
// Monte Carlo success-frequency estimator, and the depth-2 circuit version
// of the covering property.
//
// Slot layout: slice members occupy slots 0..|slice|-1 of a 2^islots table
// padded with empty slots, islots the smallest exponent covering the
// slice. The partition for property (1*) is into 2^(islots-k) contiguous
// parts of 2^k slots.

#include <cmath>

#include "exactmath.hpp"
#include "families.hpp"
#include "rng.hpp"

namespace sbstat {

// Per-slice occupancy data: which members contain each length-n string.
struct SliceContext {
  FamilySlice slice;
  std::vector<uint32_t> occupancy;                // per string value
  std::vector<std::vector<uint32_t>> containing;  // member positions per string

  explicit SliceContext(FamilySlice s) : slice(std::move(s)) {
    int n = slice.n();
    if (n > 14) throw CapExceeded("slice context needs n <= 14");
    uint64_t total = uint64_t{1} << n;
    occupancy.assign(total, 0);
    containing.assign(total, {});
    for (uint32_t pos = 0; pos < slice.members.size(); ++pos) {
      uint64_t idx = slice.members[pos];
      for (uint64_t y = 0; y < total; ++y)
        if (slice.family.member(idx, Bitstring(y, n))) {
          ++occupancy[y];
          containing[y].push_back(pos);
        }
    }
  }

  int n() const { return slice.n(); }
  size_t size() const { return slice.members.size(); }

  // Smallest e with 2^e >= |slice| (the slot-table exponent).
  int islots() const { return ceil_log2(std::max<uint64_t>(slice.members.size(), 1)); }

  std::vector<uint64_t> heavy_strings(int k) const {
    std::vector<uint64_t> heavy;
    uint64_t threshold = uint64_t{1} << k;
    for (uint64_t y = 0; y < occupancy.size(); ++y)
      if (occupancy[y] >= threshold) heavy.push_back(y);
    return heavy;
  }
};

// Inclusion probability q = min(1, 2^-k (n+2) ln 2).
inline double inclusion_probability(int k, int n) {
  return std::min(1.0, std::ldexp((n + 2) * M_LN2, -k));
}

struct Subfamily {
  int k = 0;
  double q = 0;
  uint64_t seed = 0;
  std::vector<uint8_t> mask;  // one flag per slice member

  uint64_t count() const {
    uint64_t c = 0;
    for (uint8_t b : mask) c += b;
    return c;
  }
};

// Independent Bernoulli(q) per member, fully determined by (seed, position).
inline Subfamily sample_subfamily(const FamilySlice& slice, int k, uint64_t seed) {
  if (slice.members.empty()) throw std::invalid_argument("sample_subfamily: empty slice");
  Subfamily b;
  b.k = k;
  b.q = inclusion_probability(k, slice.n());
  b.seed = seed;
  b.mask.resize(slice.members.size());
  for (size_t pos = 0; pos < slice.members.size(); ++pos) {
    Rng g(derive_seed(seed, pos));
    b.mask[pos] = g.next_unit() < b.q ? 1 : 0;
  }
  return b;
}

struct PropertyVerdict {
  bool prop1 = false;
  bool prop1_star = false;
  bool prop2 = false;
  uint64_t b_size = 0;
  int islots = 0;
  int parts = 0;
  uint64_t part_capacity = 0;       // 2^k slots per part
  uint64_t part_limit = 0;          // (n+k)^2, the (1*) cap
  double prop1_bound = 0;           // 2^(i-k+2) (n+k)^2 ln 2, as printed
  int bad_part = -1;                // (1*) witness
  uint64_t worst_part_count = 0;
  bool has_uncovered = false;       // (2) witness
  uint64_t uncovered_heavy = 0;
  uint64_t heavy_count = 0;
};

inline PropertyVerdict check_properties(const SliceContext& ctx, const std::vector<uint8_t>& mask,
                                        int k) {
  if (mask.size() != ctx.size()) throw std::invalid_argument("check_properties: mask size");
  const int n = ctx.n();
  PropertyVerdict v;
  v.islots = std::max(ctx.islots(), k);
  v.parts = 1 << (v.islots - k);
  v.part_capacity = uint64_t{1} << k;
  v.part_limit = static_cast<uint64_t>(n + k) * static_cast<uint64_t>(n + k);
  for (uint8_t b : mask) v.b_size += b;

  // (1): |B| <= 2^(i-k+2) (n+k)^2 ln 2 with the slice's complexity
  // threshold i, checked as printed via the certified ln 2 interval.
  {
    QInterval bound = QInterval(mpq_class(v.part_limit) * pow2q(ctx.slice.i - k + 2)) *
                      ln2_interval();
    mpq_class size_q(static_cast<unsigned long>(v.b_size));
    if (bound.certainly_ge(size_q)) v.prop1 = true;
    else if (bound.certainly_lt(size_q)) v.prop1 = false;
    else throw std::logic_error("ln2 interval too wide for property (1)");
    v.prop1_bound = bound.mid_double();
  }

  // (1*): at most (n+k)^2 members selected in each part of 2^k slots.
  v.prop1_star = true;
  for (int p = 0; p < v.parts; ++p) {
    uint64_t lo = static_cast<uint64_t>(p) << k;
    uint64_t hi = std::min<uint64_t>(lo + v.part_capacity, mask.size());
    uint64_t cnt = 0;
    for (uint64_t t = lo; t < hi; ++t) cnt += mask[t];
    if (cnt > v.worst_part_count) v.worst_part_count = cnt;
    if (cnt > v.part_limit && v.prop1_star) {
      v.prop1_star = false;
      v.bad_part = p;
    }
  }

  // (2): every string in >= 2^k slice sets has a selected set containing it.
  v.prop2 = true;
  uint64_t threshold = uint64_t{1} << k;
  for (uint64_t y = 0; y < ctx.occupancy.size(); ++y) {
    if (ctx.occupancy[y] < threshold) continue;
    ++v.heavy_count;
    bool covered = false;
    for (uint32_t pos : ctx.containing[y])
      if (mask[pos]) {
        covered = true;
        break;
      }
    if (!covered && v.prop2) {
      v.prop2 = false;
      v.has_uncovered = true;
      v.uncovered_heavy = y;
    }
  }
  return v;
}

// Monte Carlo estimate of Pr[(1) and (2)] and Pr[(1*) and (2)] over fresh
// subfamilies. sigma_* are binomial deviations at the target bounds 1/2
// and 1/3 (what the acceptance thresholds subtract three of).
struct SuccessEstimate {
  int trials = 0;
  uint64_t ok_1_and_2 = 0;
  uint64_t ok_1star_and_2 = 0;
  double freq_1_and_2 = 0;
  double freq_1star_and_2 = 0;
  double sigma_half = 0;
  double sigma_third = 0;
};

inline SuccessEstimate estimate_success(const SliceContext& ctx, int k, int trials,
                                        uint64_t seed) {
  if (trials < 100)
    throw std::invalid_argument("estimate_success: fewer than 100 trials is meaningless");
  SuccessEstimate e;
  e.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Subfamily b = sample_subfamily(ctx.slice, k, derive_seed(seed, t));
    PropertyVerdict v = check_properties(ctx, b.mask, k);
    if (v.prop1 && v.prop2) ++e.ok_1_and_2;
    if (v.prop1_star && v.prop2) ++e.ok_1star_and_2;
  }
  e.freq_1_and_2 = static_cast<double>(e.ok_1_and_2) / trials;
  e.freq_1star_and_2 = static_cast<double>(e.ok_1star_and_2) / trials;
  e.sigma_half = std::sqrt(0.5 * 0.5 / trials);
  e.sigma_third = std::sqrt((1.0 / 3) * (2.0 / 3) / trials);
  return e;
}

// --- depth-2 circuit for property (2) -----------------------------------
// One disjunct per heavy string over the members containing it, all feeding
// a single conjunction gate. Evaluating the circuit on a subfamily bitmask
// equals the direct check.

struct Prop2Circuit {
  int k = 0;
  size_t inputs = 0;                         // |slice|
  std::vector<uint64_t> heavy;               // heavy string per clause
  std::vector<std::vector<uint32_t>> clauses;  // member positions per clause
};

inline Prop2Circuit build_prop2_circuit(const SliceContext& ctx, int k) {
  Prop2Circuit c;
  c.k = k;
  c.inputs = ctx.size();
  for (uint64_t y : ctx.heavy_strings(k)) {
    c.heavy.push_back(y);
    c.clauses.push_back(ctx.containing[y]);
  }
  return c;
}

inline bool eval_circuit(const Prop2Circuit& c, const std::vector<uint8_t>& mask) {
  for (const auto& clause : c.clauses) {
    bool any = false;
    for (uint32_t pos : clause)
      if (mask[pos]) {
        any = true;
        break;
      }
    if (!any) return false;
  }
  return true;  // empty conjunction is constant 1
}

// Two-level textual export: one line per clause.
inline std::string circuit_to_text(const Prop2Circuit& c) {
  std::ostringstream out;
  out << "and-of-ors inputs=" << c.inputs << " clauses=" << c.clauses.size() << "\n";
  for (size_t i = 0; i < c.clauses.size(); ++i) {
    out << "or heavy=" << c.heavy[i] << " :";
    for (uint32_t pos : c.clauses[i]) out << " " << pos;
    out << "\n";
  }
  return out.str();
}

}  // namespace sbstat
