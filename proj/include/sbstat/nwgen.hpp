#pragma once
// A desk-scale Nisan-Wigderson generator: a combinatorial design of
// near-disjoint seed windows plus a configurable hard predicate, and the
// derandomized first-good-seed search that replaces the random subfamily
// draw of the probabilistic construction.
//
// Design construction: for window size ell = q a prime power and seed
// length f = q^2, window t is the graph of the degree-<=bound polynomial
// with base-q digit vector t over GF(q); two distinct polynomials agree on
// at most `bound` points, so windows intersect in at most `bound` seed
// positions. A lexicographic greedy fallback covers other parameter
// combinations.
//
// Subfamily from a seed: the generator output is cut into `block_bits`-bit
// blocks, one per slice member, and a member is selected when its block
// value is below ceil(q * 2^block_bits) — the dyadic rounding of the
// Bernoulli inclusion probability. Block size and threshold are recorded
// in every certificate.

#include <variant>

#include "certificate.hpp"
#include "subfamily.hpp"

namespace sbstat {

// --- small finite fields -------------------------------------------------

struct GField {
  int q = 0;
  std::vector<uint8_t> add_table, mul_table;

  int add(int a, int b) const { return add_table[a * q + b]; }
  int mul(int a, int b) const { return mul_table[a * q + b]; }

  // Fields of size up to 16: primes directly, prime powers via a fixed
  // irreducible polynomial with coefficients packed base p.
  static std::optional<GField> make(int q) {
    int p = 0, e = 0, irreducible = 0;
    switch (q) {
      case 2: case 3: case 5: case 7: case 11: case 13: p = q; e = 1; break;
      case 4: p = 2; e = 2; irreducible = 0b111; break;     // x^2+x+1
      case 8: p = 2; e = 3; irreducible = 0b1011; break;    // x^3+x+1
      case 16: p = 2; e = 4; irreducible = 0b10011; break;  // x^4+x+1
      case 9: p = 3; e = 2; irreducible = 10; break;        // x^2+1, digits 101 base 3
      default: return std::nullopt;
    }
    GField f;
    f.q = q;
    f.add_table.resize(q * q);
    f.mul_table.resize(q * q);
    auto digits = [p, e](int v) {
      std::array<int, 5> d{};
      for (int i = 0; i < e; ++i) {
        d[i] = v % p;
        v /= p;
      }
      return d;
    };
    auto pack = [p, e](const std::array<int, 5>& d) {
      int v = 0;
      for (int i = e - 1; i >= 0; --i) v = v * p + d[i];
      return v;
    };
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        auto da = digits(a), db = digits(b);
        std::array<int, 5> sum{};
        for (int i = 0; i < e; ++i) sum[i] = (da[i] + db[i]) % p;
        f.add_table[a * q + b] = static_cast<uint8_t>(pack(sum));
        // polynomial product reduced by the irreducible
        std::array<int, 9> prod{};
        for (int i = 0; i < e; ++i)
          for (int j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        auto dirr = [&] {
          std::array<int, 6> d{};
          int v = irreducible;
          for (int i = 0; i <= e; ++i) {
            d[i] = v % p;
            v /= p;
          }
          return d;
        }();
        for (int deg = 2 * e - 2; deg >= e; --deg) {
          int c = prod[deg];
          if (c == 0) continue;
          prod[deg] = 0;
          // x^deg = x^(deg-e) * (- lower part of irreducible) (monic)
          for (int i = 0; i < e; ++i)
            prod[deg - e + i] = ((prod[deg - e + i] - c * dirr[i]) % p + p * p) % p;
        }
        std::array<int, 5> red{};
        for (int i = 0; i < e; ++i) red[i] = prod[i];
        f.mul_table[a * q + b] = static_cast<uint8_t>(pack(red));
      }
    return f;
  }
};

// --- designs -------------------------------------------------------------

struct NWDesign {
  int f = 0;      // seed length
  int M = 0;      // number of output positions
  int ell = 0;    // window size
  int bound = 0;  // pairwise intersection bound
  std::vector<std::vector<uint16_t>> windows;
};

struct DesignError {
  std::string reason;
};

inline bool validate_design(const NWDesign& d) {
  if (static_cast<int>(d.windows.size()) != d.M) return false;
  for (const auto& s : d.windows) {
    if (static_cast<int>(s.size()) != d.ell) return false;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= d.f) return false;
      if (i > 0 && s[i] <= s[i - 1]) return false;  // sorted, distinct
    }
  }
  for (size_t a = 0; a < d.windows.size(); ++a)
    for (size_t b = a + 1; b < d.windows.size(); ++b) {
      int common = 0;
      size_t i = 0, j = 0;
      while (i < d.windows[a].size() && j < d.windows[b].size()) {
        if (d.windows[a][i] == d.windows[b][j]) ++common, ++i, ++j;
        else if (d.windows[a][i] < d.windows[b][j]) ++i;
        else ++j;
      }
      if (common > d.bound) return false;
    }
  return true;
}

inline std::variant<NWDesign, DesignError> make_design(int f, int M, int ell, int bound) {
  if (f < 1 || f > 30 || M < 1 || ell < 1 || ell > f || bound < 0)
    return DesignError{"parameters out of range"};
  NWDesign d;
  d.f = f;
  d.M = M;
  d.ell = ell;
  d.bound = bound;

  auto field = GField::make(ell);
  if (field && f == ell * ell && bound < ell) {
    // M <= q^(bound+1) polynomials available.
    uint64_t avail = 1;
    bool enough = false;
    for (int i = 0; i <= bound && !enough; ++i) {
      avail *= static_cast<uint64_t>(ell);
      if (avail >= static_cast<uint64_t>(M)) enough = true;
    }
    if (!enough && avail < static_cast<uint64_t>(M))
      return DesignError{"q^(bound+1) polynomials < M"};
    const GField& gf = *field;
    int q = ell;
    for (int t = 0; t < M; ++t) {
      // coefficients: base-q digits of t, c0 the constant term
      std::vector<int> coef(bound + 1);
      int v = t;
      for (int i = 0; i <= bound; ++i) {
        coef[i] = v % q;
        v /= q;
      }
      std::vector<uint16_t> window(q);
      for (int a = 0; a < q; ++a) {
        int val = 0;
        for (int i = bound; i >= 0; --i) val = gf.add(gf.mul(val, a), coef[i]);
        window[a] = static_cast<uint16_t>(a * q + val);
      }
      d.windows.push_back(std::move(window));
    }
    return d;
  }

  // Greedy: scan ell-subsets of [f] in lexicographic order, keep those
  // meeting the intersection bound against everything kept so far.
  std::vector<uint16_t> cur(ell);
  for (int i = 0; i < ell; ++i) cur[i] = static_cast<uint16_t>(i);
  auto advance = [&]() {
    int i = ell - 1;
    while (i >= 0 && cur[i] == f - ell + i) --i;
    if (i < 0) return false;
    ++cur[i];
    for (int j = i + 1; j < ell; ++j) cur[j] = static_cast<uint16_t>(cur[j - 1] + 1);
    return true;
  };
  do {
    bool ok = true;
    for (const auto& w : d.windows) {
      int common = 0;
      size_t i = 0, j = 0;
      while (i < w.size() && j < cur.size()) {
        if (w[i] == cur[j]) ++common, ++i, ++j;
        else if (w[i] < cur[j]) ++i;
        else ++j;
      }
      if (common > bound) {
        ok = false;
        break;
      }
    }
    if (ok) {
      d.windows.push_back(cur);
      if (static_cast<int>(d.windows.size()) == M) return d;
    }
  } while (advance());
  return DesignError{"greedy scan exhausted " + std::to_string(f) + " choose " +
                     std::to_string(ell) + " before reaching M=" + std::to_string(M)};
}

// --- hard predicate ------------------------------------------------------

struct HardPredicate {
  int ell = 0;
  std::vector<uint8_t> table;  // 2^ell entries
  std::string name;

  int eval(uint32_t z) const { return table[z]; }
};

// Default: parity twisted by one AND term — nonlinear, density exactly 1/2.
inline HardPredicate canonical_predicate(int ell) {
  if (ell < 1 || ell > 20) throw std::invalid_argument("canonical_predicate: ell out of range");
  HardPredicate p;
  p.ell = ell;
  p.name = "parity-and";
  p.table.resize(size_t{1} << ell);
  for (uint32_t z = 0; z < p.table.size(); ++z) {
    int v = __builtin_popcount(z) & 1;
    if (ell >= 2) v ^= static_cast<int>((z & 1u) & ((z >> 1) & 1u));
    p.table[z] = static_cast<uint8_t>(v);
  }
  return p;
}

// Textual serialization: "predicate <name> ell=<ell>" then the truth table
// as a 0/1 line, index ascending.
inline std::string predicate_to_text(const HardPredicate& p) {
  std::string s = "predicate " + p.name + " ell=" + std::to_string(p.ell) + "\n";
  for (uint8_t b : p.table) s.push_back(static_cast<char>('0' + b));
  s.push_back('\n');
  return s;
}

inline std::optional<HardPredicate> predicate_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string word, name, ellkv;
  if (!(in >> word >> name >> ellkv) || word != "predicate") return std::nullopt;
  if (ellkv.rfind("ell=", 0) != 0) return std::nullopt;
  HardPredicate p;
  p.ell = std::stoi(ellkv.substr(4));
  p.name = name;
  std::string bits;
  if (!(in >> bits) || bits.size() != (size_t{1} << p.ell)) return std::nullopt;
  for (char c : bits) {
    if (c != '0' && c != '1') return std::nullopt;
    p.table.push_back(static_cast<uint8_t>(c - '0'));
  }
  return p;
}

// Output bit t: the predicate on the seed restricted to window t (window
// positions ascending, position j feeding bit j of the predicate input).
inline int nw_bit(const NWDesign& d, const HardPredicate& pred, uint32_t seed, int t) {
  uint32_t z = 0;
  const auto& w = d.windows[t];
  for (size_t j = 0; j < w.size(); ++j) z |= ((seed >> w[j]) & 1u) << j;
  return pred.eval(z);
}

inline BitVec nw_generate(const NWDesign& d, const HardPredicate& pred, uint32_t seed) {
  if (pred.ell != d.ell) throw std::invalid_argument("nw_generate: predicate arity != window size");
  BitVec out;
  for (int t = 0; t < d.M; ++t) out.push(nw_bit(d, pred, seed, t));
  return out;
}

// --- derandomized search -------------------------------------------------

// Dyadic inclusion threshold: a member is selected when its block value is
// < ceil(q 2^b), i.e. with probability ceil(q 2^b)/2^b >= q over uniform
// blocks.
inline uint32_t block_threshold(int k, int n, int block_bits) {
  double q = inclusion_probability(k, n);
  auto t = static_cast<uint32_t>(std::ceil(q * std::ldexp(1.0, block_bits)));
  return std::min<uint32_t>(t, 1u << block_bits);
}

inline std::vector<uint8_t> subfamily_from_seed(const NWDesign& d, const HardPredicate& pred,
                                                uint32_t seed, size_t members, int block_bits,
                                                uint32_t threshold) {
  std::vector<uint8_t> mask(members);
  for (size_t t = 0; t < members; ++t) {
    uint32_t block = 0;
    for (int j = 0; j < block_bits; ++j)
      block = (block << 1) | static_cast<uint32_t>(nw_bit(d, pred, seed, t * block_bits + j));
    mask[t] = block < threshold ? 1 : 0;
  }
  return mask;
}

struct SearchResult {
  bool found = false;
  uint32_t seed = 0;
  uint64_t seeds_tried = 0;
  std::vector<uint8_t> mask;
  PropertyVerdict verdict;
  CertifiedDescription cert;  // emitted when a target string is supplied
  std::string error;
};

// Fixed payload width from the (1*) size bound |B| <= 2^(islots-k) (n+k)^2:
// certificates of every strategy share it, so certified lengths are
// comparable instance-wise.
inline int certificate_payload_width(int islots, int k, int n) {
  return std::max(0, islots - k) + ceil_log2(static_cast<uint64_t>(n + k) *
                                             static_cast<uint64_t>(n + k));
}

namespace detail {

inline void fill_search_params(CertifiedDescription* cert, const SliceContext& ctx, int k,
                               int islots) {
  const FamilySlice& sl = ctx.slice;
  cert->set("family", family_name(sl.family.kind));
  cert->set("n", sl.n());
  cert->set("m", sl.m);
  cert->set("i", sl.i);
  cert->set("j", sl.j);
  cert->set("k", k);
  cert->set("islots", islots);
  cert->set("mode", mode_name(sl.mode));
  if (sl.mode == CdMode::Measured) cert->set("cap", sl.cd_cap);
}

// Payload = ordinal, within the good subfamily, of its first member
// containing the target, written at the fixed width. False if the target
// is uncovered (cannot happen when the target is heavy, by property (2)).
inline bool emit_target_certificate(CertifiedDescription* cert, const SliceContext& ctx, int k,
                                    const std::vector<uint8_t>& mask, uint64_t target,
                                    const char* strategy) {
  int islots = std::max(ctx.islots(), k);
  int width = certificate_payload_width(islots, k, ctx.n());
  uint64_t ordinal = 0;
  bool found = false;
  for (size_t pos = 0; pos < mask.size(); ++pos) {
    if (!mask[pos]) continue;
    if (ctx.slice.family.member(ctx.slice.members[pos], Bitstring(target, ctx.n()))) {
      found = true;
      break;
    }
    ++ordinal;
  }
  if (!found) return false;
  cert->decoder = "improved_model";
  cert->payload = BitVec::from_value(ordinal, width);
  fill_search_params(cert, ctx, k, islots);
  cert->set("strategy", strategy);
  cert->set("x", static_cast<int64_t>(target));
  return true;
}

}  // namespace detail

// Scans seeds in lexicographic order for the first whose image subfamily
// satisfies (1*) and (2). When `target` is given, emits a certificate of
// the first selected member containing it (the improved-model payload).
inline SearchResult derandomized_search(const SliceContext& ctx, int k, const NWDesign& design,
                                        const HardPredicate& pred, int block_bits = 4,
                                        std::optional<uint64_t> target = std::nullopt) {
  SearchResult res;
  size_t members = ctx.size();
  if (design.M < static_cast<int>(members) * block_bits) {
    res.error = "design output too short: need M >= block_bits * |slice|";
    return res;
  }
  if (design.f > 24) {
    res.error = "seed space too large to exhaust (f > 24)";
    return res;
  }
  uint32_t threshold = block_threshold(k, ctx.n(), block_bits);
  uint64_t seed_count = uint64_t{1} << design.f;
  for (uint64_t seed = 0; seed < seed_count; ++seed) {
    std::vector<uint8_t> mask = subfamily_from_seed(design, pred, static_cast<uint32_t>(seed),
                                                    members, block_bits, threshold);
    PropertyVerdict v = check_properties(ctx, mask, k);
    ++res.seeds_tried;
    if (!(v.prop1_star && v.prop2)) continue;
    res.found = true;
    res.seed = static_cast<uint32_t>(seed);
    res.mask = std::move(mask);
    res.verdict = v;
    break;
  }
  if (!res.found) {
    res.error = "no good seed in the whole seed space";
    return res;
  }
  if (target) {
    if (!detail::emit_target_certificate(&res.cert, ctx, k, res.mask, *target, "nw")) {
      res.found = false;
      res.error = "target string not covered by the good subfamily";
      return res;
    }
    res.cert.set("block_bits", block_bits);
    res.cert.set("threshold", static_cast<int64_t>(threshold));
    res.cert.set("f", design.f);
    res.cert.set("M", design.M);
    res.cert.set("ell", design.ell);
    res.cert.set("bound", design.bound);
    res.cert.set("predicate", pred.name);
    res.cert.set("seed_is_first", 1);
  }
  return res;
}

// The desk oracle for the seed search: first good subfamily over all
// bitmasks in lexicographic (integer) order. Feasible for slices of at
// most ~22 members.
inline SearchResult bruteforce_search(const SliceContext& ctx, int k,
                                      std::optional<uint64_t> target = std::nullopt) {
  SearchResult res;
  size_t members = ctx.size();
  if (members > 22) {
    res.error = "bruteforce mask scan needs |slice| <= 22";
    return res;
  }
  uint64_t mask_count = uint64_t{1} << members;
  std::vector<uint8_t> mask(members);
  for (uint64_t bits = 0; bits < mask_count; ++bits) {
    for (size_t t = 0; t < members; ++t) mask[t] = static_cast<uint8_t>((bits >> t) & 1u);
    PropertyVerdict v = check_properties(ctx, mask, k);
    ++res.seeds_tried;
    if (!(v.prop1_star && v.prop2)) continue;
    res.found = true;
    res.mask = mask;
    res.verdict = v;
    break;
  }
  if (!res.found) {
    res.error = "no good subfamily exists";
    return res;
  }
  if (target) {
    if (!detail::emit_target_certificate(&res.cert, ctx, k, res.mask, *target, "bruteforce")) {
      res.found = false;
      res.error = "target string not covered by the good subfamily";
      return res;
    }
    res.cert.set("mask_is_first", 1);
  }
  return res;
}

// Monte Carlo fallback: seeded Bernoulli draws until a good subfamily
// appears. The winning draw index is recorded so decoding can replay it.
inline SearchResult mc_search(const SliceContext& ctx, int k, uint64_t seed, int max_tries,
                              std::optional<uint64_t> target = std::nullopt) {
  SearchResult res;
  for (int t = 0; t < max_tries; ++t) {
    Subfamily b = sample_subfamily(ctx.slice, k, derive_seed(seed, t));
    PropertyVerdict v = check_properties(ctx, b.mask, k);
    ++res.seeds_tried;
    if (!(v.prop1_star && v.prop2)) continue;
    res.found = true;
    res.mask = b.mask;
    res.verdict = v;
    if (target) {
      if (!detail::emit_target_certificate(&res.cert, ctx, k, res.mask, *target, "mc")) {
        res.found = false;
        res.error = "target string not covered by the good subfamily";
        return res;
      }
      res.cert.set("mc_seed", static_cast<int64_t>(seed));
      res.cert.set("mc_trial", t);
    }
    return res;
  }
  res.error = "no good subfamily within " + std::to_string(max_tries) + " draws";
  return res;
}

}  // namespace sbstat
