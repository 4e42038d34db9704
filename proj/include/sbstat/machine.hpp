#pragma once
// The space-metered toy machine every complexity measure is defined over.
//
// Model: one read-only input tape with merged end markers ($), one binary
// work tape of exactly `space` cells, a finite-state control. A program is
// a self-delimiting bitstring decoding to (state count Q, transition table
// over (state, input symbol, work symbol)). Invalid encodings decode to a
// canonical always-reject table so counting arguments over bitstrings stay
// exact.
//
// Encoding, per state, prefix-coded with compact forms for the patterns
// that dominate short programs:
//   '1'b        match-advance(b): on input b keep the work cell, move input
//               right, go to state s+1; reject otherwise. 2 bits.
//   '01'        accept-at-end: accept on $, reject on 0/1. 2 bits.
//   '001'       accept-always. 3 bits.
//   '0001' R    uniform: one record R applied to every (input, work) pair.
//   '0000' F Rs general: F=0 three records (input 0, 1, $) ignoring the
//               work symbol, F=1 six records in order (0,0)(0,1)(1,0)(1,1)
//               ($,0)($,1).
// Records:
//   '00' reject | '010' accept | '1' continue w imove wmove next |
//   '0110' output w imove wmove next | '0111' oracle imove wmove next
// Fields: imove '1'=R '00'=S '01'=L; wmove '0'=S '10'=R '11'=L;
//   next '1'=s+1 '00'=s '01'+ceil(log2 Q) bits = explicit (must differ
//   from s and s+1).
// Decoding enforces a canonical minimal form (a state expressible by a
// shorter descriptor is invalid in a longer one), which makes decoding
// injective on valid encodings.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bits.hpp"
#include "rng.hpp"

namespace sbstat {

constexpr int kMaxStates = 60;
constexpr int kMaxSpace = 40;
constexpr int kMaxInputLen = 64;

enum class Act : uint8_t { Continue, Accept, Reject, Output, Oracle };

struct Transition {
  Act act = Act::Reject;
  uint8_t write = 0;  // Continue: bit written to the work cell; Output: emitted bit
  int8_t imove = 0;   // -1, 0, +1
  int8_t wmove = 0;
  uint16_t next = 0;

  bool operator==(const Transition&) const = default;
};

// Halting records carry no operands; keep them zeroed so tables compare
// structurally.
inline Transition make_accept() { return Transition{Act::Accept, 0, 0, 0, 0}; }
inline Transition make_reject() { return Transition{Act::Reject, 0, 0, 0, 0}; }

inline Transition normalized(Transition t) {
  if (t.act == Act::Accept) return make_accept();
  if (t.act == Act::Reject) return make_reject();
  if (t.act == Act::Oracle) t.write = 0;
  return t;
}

// Input symbols: 0, 1, and $ (either end marker). Row index = sym*2 + work.
struct TransitionTable {
  int q = 1;
  std::vector<std::array<Transition, 6>> rows;

  TransitionTable() : rows(1) { rows[0].fill(make_reject()); }
  explicit TransitionTable(int states) : q(states), rows(states) {
    for (auto& r : rows) r.fill(make_reject());
  }

  Transition& at(int state, int sym, int work) { return rows[state][sym * 2 + work]; }
  const Transition& at(int state, int sym, int work) const { return rows[state][sym * 2 + work]; }

  bool operator==(const TransitionTable&) const = default;
};

namespace detail {

inline bool is_match_advance(const std::array<Transition, 6>& r, int s, int q, int* bit_out) {
  if (s + 1 >= q) return false;
  for (int b = 0; b <= 1; ++b) {
    bool ok = r[b * 2 + 0] == Transition{Act::Continue, 0, +1, 0, static_cast<uint16_t>(s + 1)} &&
              r[b * 2 + 1] == Transition{Act::Continue, 1, +1, 0, static_cast<uint16_t>(s + 1)} &&
              r[(1 - b) * 2 + 0] == make_reject() && r[(1 - b) * 2 + 1] == make_reject() &&
              r[4] == make_reject() && r[5] == make_reject();
    if (ok) {
      if (bit_out) *bit_out = b;
      return true;
    }
  }
  return false;
}

inline bool is_accept_at_end(const std::array<Transition, 6>& r) {
  return r[0] == make_reject() && r[1] == make_reject() && r[2] == make_reject() &&
         r[3] == make_reject() && r[4] == make_accept() && r[5] == make_accept();
}

inline bool is_accept_always(const std::array<Transition, 6>& r) {
  for (const auto& t : r)
    if (!(t == make_accept())) return false;
  return true;
}

inline bool is_uniform(const std::array<Transition, 6>& r) {
  for (int i = 1; i < 6; ++i)
    if (!(r[i] == r[0])) return false;
  return true;
}

inline bool is_work_oblivious(const std::array<Transition, 6>& r) {
  return r[0] == r[1] && r[2] == r[3] && r[4] == r[5];
}

}  // namespace detail

// --- decoding ---------------------------------------------------------

namespace detail {

inline bool read_imove(BitReader& r, int8_t* out) {
  auto b = r.next();
  if (!b) return false;
  if (*b == 1) {
    *out = +1;
    return true;
  }
  auto b2 = r.next();
  if (!b2) return false;
  *out = (*b2 == 0) ? 0 : -1;
  return true;
}

inline bool read_wmove(BitReader& r, int8_t* out) {
  auto b = r.next();
  if (!b) return false;
  if (*b == 0) {
    *out = 0;
    return true;
  }
  auto b2 = r.next();
  if (!b2) return false;
  *out = (*b2 == 0) ? +1 : -1;
  return true;
}

inline bool read_next(BitReader& r, int s, int q, uint16_t* out) {
  auto b = r.next();
  if (!b) return false;
  if (*b == 1) {
    if (s + 1 >= q) return false;
    *out = static_cast<uint16_t>(s + 1);
    return true;
  }
  auto b2 = r.next();
  if (!b2) return false;
  if (*b2 == 0) {
    *out = static_cast<uint16_t>(s);
    return true;
  }
  int width = ceil_log2(static_cast<uint64_t>(q));
  auto t = r.take(width);
  if (!t) return false;
  if (*t >= static_cast<uint64_t>(q)) return false;
  if (*t == static_cast<uint64_t>(s) || *t == static_cast<uint64_t>(s) + 1) return false;
  *out = static_cast<uint16_t>(*t);
  return true;
}

inline bool read_record(BitReader& r, int s, int q, Transition* out) {
  auto b0 = r.next();
  if (!b0) return false;
  if (*b0 == 1) {
    out->act = Act::Continue;
    auto w = r.next();
    if (!w) return false;
    out->write = static_cast<uint8_t>(*w);
    return read_imove(r, &out->imove) && read_wmove(r, &out->wmove) &&
           read_next(r, s, q, &out->next);
  }
  auto b1 = r.next();
  if (!b1) return false;
  if (*b1 == 0) {
    *out = make_reject();
    return true;
  }
  auto b2 = r.next();
  if (!b2) return false;
  if (*b2 == 0) {
    *out = make_accept();
    return true;
  }
  auto b3 = r.next();
  if (!b3) return false;
  if (*b3 == 0) {
    out->act = Act::Output;
    auto w = r.next();
    if (!w) return false;
    out->write = static_cast<uint8_t>(*w);
  } else {
    out->act = Act::Oracle;
    out->write = 0;
  }
  return read_imove(r, &out->imove) && read_wmove(r, &out->wmove) &&
         read_next(r, s, q, &out->next);
}

}  // namespace detail

// Decode result: valid flag plus table (canonical always-reject if invalid).
struct Decoded {
  TransitionTable table;
  bool valid = false;
};

inline Decoded decode_program(const BitVec& code) {
  Decoded out;
  BitReader r(code);
  auto q64 = gamma_read(r, 5);
  if (!q64 || *q64 > static_cast<uint64_t>(kMaxStates)) return out;
  int q = static_cast<int>(*q64);
  TransitionTable table(q);
  for (int s = 0; s < q; ++s) {
    auto& row = table.rows[s];
    auto b0 = r.next();
    if (!b0) return out;
    if (*b0 == 1) {  // match-advance
      auto b = r.next();
      if (!b) return out;
      if (s + 1 >= q) return out;
      int a = *b;
      row[a * 2 + 0] = Transition{Act::Continue, 0, +1, 0, static_cast<uint16_t>(s + 1)};
      row[a * 2 + 1] = Transition{Act::Continue, 1, +1, 0, static_cast<uint16_t>(s + 1)};
      continue;
    }
    auto b1 = r.next();
    if (!b1) return out;
    if (*b1 == 1) {  // accept-at-end
      row[4] = make_accept();
      row[5] = make_accept();
      continue;
    }
    auto b2 = r.next();
    if (!b2) return out;
    if (*b2 == 1) {  // accept-always
      row.fill(make_accept());
      continue;
    }
    auto b3 = r.next();
    if (!b3) return out;
    if (*b3 == 1) {  // uniform
      Transition t;
      if (!detail::read_record(r, s, q, &t)) return out;
      if (t.act == Act::Accept) return out;  // canonical form is accept-always
      row.fill(t);
      continue;
    }
    // general
    auto f = r.next();
    if (!f) return out;
    if (*f == 0) {
      Transition recs[3];
      for (auto& t : recs)
        if (!detail::read_record(r, s, q, &t)) return out;
      if (recs[0] == recs[1] && recs[1] == recs[2]) return out;  // canonical: uniform
      if (recs[0] == make_reject() && recs[1] == make_reject() && recs[2] == make_accept())
        return out;  // canonical: accept-at-end
      for (int a = 0; a < 3; ++a) {
        row[a * 2 + 0] = recs[a];
        row[a * 2 + 1] = recs[a];
      }
    } else {
      for (int idx = 0; idx < 6; ++idx)
        if (!detail::read_record(r, s, q, &row[idx])) return out;
      if (detail::is_work_oblivious(row)) return out;  // canonical: F=0
      if (detail::is_match_advance(row, s, q, nullptr)) return out;
    }
  }
  if (!r.done()) return out;
  out.table = std::move(table);
  out.valid = true;
  return out;
}

// --- canonical encoding ------------------------------------------------

namespace detail {

inline void append_imove(BitVec& v, int8_t m) {
  if (m > 0) v.push(1);
  else {
    v.push(0);
    v.push(m == 0 ? 0 : 1);
  }
}

inline void append_wmove(BitVec& v, int8_t m) {
  if (m == 0) v.push(0);
  else {
    v.push(1);
    v.push(m > 0 ? 0 : 1);
  }
}

inline void append_next(BitVec& v, uint16_t next, int s, int q) {
  if (next == s + 1) {
    v.push(1);
  } else if (next == s) {
    v.push(0);
    v.push(0);
  } else {
    v.push(0);
    v.push(1);
    v.append_value(next, ceil_log2(static_cast<uint64_t>(q)));
  }
}

inline void append_record(BitVec& v, const Transition& t, int s, int q) {
  switch (t.act) {
    case Act::Reject:
      v.push(0);
      v.push(0);
      return;
    case Act::Accept:
      v.push(0);
      v.push(1);
      v.push(0);
      return;
    case Act::Continue:
      v.push(1);
      v.push(t.write);
      break;
    case Act::Output:
      v.push(0);
      v.push(1);
      v.push(1);
      v.push(0);
      v.push(t.write);
      break;
    case Act::Oracle:
      v.push(0);
      v.push(1);
      v.push(1);
      v.push(1);
      break;
  }
  append_imove(v, t.imove);
  append_wmove(v, t.wmove);
  append_next(v, t.next, s, q);
}

}  // namespace detail

// Canonical (minimal-form) encoding of a table; nullopt when the table is
// out of range (too many states, dangling next pointers).
inline std::optional<BitVec> encode_table(const TransitionTable& table) {
  if (table.q < 1 || table.q > kMaxStates) return std::nullopt;
  for (const auto& row : table.rows)
    for (const auto& t : row) {
      if (t.act == Act::Accept || t.act == Act::Reject) {
        if (!(t == make_accept() || t == make_reject())) return std::nullopt;
      } else if (t.next >= table.q) {
        return std::nullopt;
      }
    }
  BitVec v;
  gamma_append(v, static_cast<uint64_t>(table.q));
  for (int s = 0; s < table.q; ++s) {
    const auto& row = table.rows[s];
    int b;
    if (detail::is_match_advance(row, s, table.q, &b)) {
      v.push(1);
      v.push(b);
    } else if (detail::is_accept_at_end(row)) {
      v.push(0);
      v.push(1);
    } else if (detail::is_accept_always(row)) {
      v.push(0);
      v.push(0);
      v.push(1);
    } else if (detail::is_uniform(row)) {
      v.push(0);
      v.push(0);
      v.push(0);
      v.push(1);
      detail::append_record(v, row[0], s, table.q);
    } else if (detail::is_work_oblivious(row)) {
      v.push(0);
      v.push(0);
      v.push(0);
      v.push(0);
      v.push(0);
      for (int a = 0; a < 3; ++a) detail::append_record(v, row[a * 2], s, table.q);
    } else {
      v.push(0);
      v.push(0);
      v.push(0);
      v.push(0);
      v.push(1);
      for (int idx = 0; idx < 6; ++idx) detail::append_record(v, row[idx], s, table.q);
    }
  }
  return v;
}

// A program is its encoding plus the decoded table. `valid` records whether
// the encoding was well-formed; invalid programs behave as always-reject
// but keep their own length.
struct Program {
  BitVec code;
  TransitionTable table;
  bool valid = false;

  static Program from_code(const BitVec& code) {
    Program p;
    p.code = code;
    Decoded d = decode_program(code);
    p.table = std::move(d.table);
    p.valid = d.valid;
    return p;
  }

  static std::optional<Program> from_table(const TransitionTable& t) {
    auto code = encode_table(t);
    if (!code) return std::nullopt;
    Program p;
    p.code = *code;
    p.table = t;
    p.valid = true;
    return p;
  }

  // The canonical always-reject program (what invalid encodings decode to).
  static Program canonical_reject() {
    TransitionTable t(1);
    return *from_table(t);
  }

  int length() const { return static_cast<int>(code.size()); }
};

// --- execution ---------------------------------------------------------

enum class Outcome : uint8_t { Accept, Reject, Output, SpaceExceeded, Loop };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Accept: return "accept";
    case Outcome::Reject: return "reject";
    case Outcome::Output: return "output";
    case Outcome::SpaceExceeded: return "space-exceeded";
    case Outcome::Loop: return "loop";
  }
  return "?";
}

struct RunResult {
  Outcome outcome = Outcome::Reject;
  Bitstring output;            // set when outcome == Output
  bool output_overflow = false;  // more than 64 bits emitted
  uint64_t steps = 0;
  int peak_space = 0;
};

using OracleFn = std::function<bool(const Bitstring&)>;

struct MachineConfig {
  Bitstring input;
  int space = 1;  // work-tape cells, >= 1
  const OracleFn* oracle = nullptr;
};

namespace detail {

// Reusable open-addressing set of visited configurations. Epoch tagging
// makes reset O(1); when the table saturates we stop inserting and rely on
// the configuration-count step bound.
class VisitedSet {
 public:
  void reset() {
    if (keys_.empty()) {
      keys_.resize(kSlots);
      epochs_.resize(kSlots, 0);
    }
    if (++epoch_ == 0) {
      std::fill(epochs_.begin(), epochs_.end(), 0);
      epoch_ = 1;
    }
    count_ = 0;
  }

  // Returns true if cfg was already present; inserts it otherwise.
  bool seen_or_insert(uint64_t cfg) {
    if (count_ >= kSlots / 2) return false;
    size_t i = static_cast<size_t>(splitmix64(cfg)) & (kSlots - 1);
    for (;;) {
      if (epochs_[i] != epoch_) {
        epochs_[i] = epoch_;
        keys_[i] = cfg;
        ++count_;
        return false;
      }
      if (keys_[i] == cfg) return true;
      i = (i + 1) & (kSlots - 1);
    }
  }

 private:
  static constexpr size_t kSlots = 1u << 16;
  std::vector<uint64_t> keys_;
  std::vector<uint32_t> epochs_;
  uint32_t epoch_ = 0;
  size_t count_ = 0;
};

inline uint64_t pack_config(int state, int ih, int wh, uint64_t tape) {
  return (static_cast<uint64_t>(state) << 58) | (static_cast<uint64_t>(ih + 1) << 51) |
         (static_cast<uint64_t>(wh) << 45) | tape;
}

}  // namespace detail

// Runs `p` on `cfg.input` with exactly `cfg.space` work cells. Total work is
// bounded by the configuration count Q*(n+2)*(m+1)*2^m; a repeated
// configuration is reported as Loop well before that in practice.
inline RunResult run(const Program& p, const MachineConfig& cfg) {
  const int n = cfg.input.len;
  const int m = cfg.space;
  if (m < 1 || m > kMaxSpace || n > kMaxInputLen)
    throw std::invalid_argument("run: space must be in [1,40], input length <= 64");

  const TransitionTable& table = p.table;
  uint64_t step_bound = static_cast<uint64_t>(table.q) * static_cast<uint64_t>(n + 2) *
                        static_cast<uint64_t>(m + 1);
  // 2^m configurations of the work tape; saturate rather than overflow.
  if (m < 50) step_bound *= (uint64_t{1} << m);
  else step_bound = ~uint64_t{0};

  thread_local detail::VisitedSet visited;
  visited.reset();

  RunResult res;
  int state = 0, ih = 0, wh = 0;
  uint64_t tape = 0;
  uint64_t outbits = 0;
  int outlen = 0;
  res.peak_space = 1;

  visited.seen_or_insert(detail::pack_config(state, ih, wh, tape));
  for (;;) {
    int sym = (ih < 0 || ih >= n) ? 2 : cfg.input.bit(ih);
    int w = static_cast<int>((tape >> wh) & 1u);
    const Transition& t = table.at(state, sym, w);
    ++res.steps;
    switch (t.act) {
      case Act::Accept:
        if (outlen > 0 || res.output_overflow) {
          res.outcome = Outcome::Output;
          res.output = Bitstring(outbits, res.output_overflow ? 64 : outlen);
        } else {
          res.outcome = Outcome::Accept;
        }
        return res;
      case Act::Reject:
        res.outcome = Outcome::Reject;
        return res;
      case Act::Continue:
        tape = (tape & ~(uint64_t{1} << wh)) | (static_cast<uint64_t>(t.write) << wh);
        break;
      case Act::Output:
        if (outlen < 64) outbits = (outbits << 1) | t.write;
        else res.output_overflow = true;
        ++outlen;
        break;
      case Act::Oracle: {
        // Query = work cells 0..wh, cell 0 leftmost.
        uint64_t q = 0;
        for (int i = 0; i <= wh; ++i) q = (q << 1) | ((tape >> i) & 1u);
        bool ans = cfg.oracle && (*cfg.oracle)(Bitstring(q, wh + 1));
        tape = (tape & ~(uint64_t{1} << wh)) | (static_cast<uint64_t>(ans ? 1 : 0) << wh);
        break;
      }
    }
    ih += t.imove;
    if (ih < -1) ih = -1;
    if (ih > n) ih = n;
    if (t.wmove > 0) {
      if (wh == m - 1) {
        res.outcome = Outcome::SpaceExceeded;
        return res;
      }
      ++wh;
      if (wh + 1 > res.peak_space) res.peak_space = wh + 1;
    } else if (t.wmove < 0 && wh > 0) {
      --wh;
    }
    state = t.next;

    if (visited.seen_or_insert(detail::pack_config(state, ih, wh, tape))) {
      res.outcome = Outcome::Loop;
      return res;
    }
    if (res.steps >= step_bound) {
      res.outcome = Outcome::Loop;  // pigeonhole: some configuration repeated
      return res;
    }
  }
}

// True iff p accepts exactly x among length-|x| inputs, halting within the
// space bound on every one of them.
inline bool distinguishes(const Program& p, const Bitstring& x, int space,
                          const OracleFn* oracle = nullptr) {
  MachineConfig cfg;
  cfg.space = space;
  cfg.oracle = oracle;
  cfg.input = x;
  if (run(p, cfg).outcome != Outcome::Accept) return false;
  for (uint64_t y = 0; y < (uint64_t{1} << x.len); ++y) {
    if (y == x.bits) continue;
    cfg.input = Bitstring(y, x.len);
    if (run(p, cfg).outcome != Outcome::Reject) return false;
  }
  return true;
}

// The set of length-n strings p accepts, or nullopt if p fails to halt
// cleanly (accept/reject) on some input. Requires n <= 6 (bitmask result).
inline std::optional<uint64_t> accepted_set(const Program& p, int n, int space,
                                            const OracleFn* oracle = nullptr) {
  MachineConfig cfg;
  cfg.space = space;
  cfg.oracle = oracle;
  uint64_t mask = 0;
  for (uint64_t y = 0; y < (uint64_t{1} << n); ++y) {
    cfg.input = Bitstring(y, n);
    RunResult r = run(p, cfg);
    if (r.outcome == Outcome::Accept) mask |= uint64_t{1} << y;
    else if (r.outcome != Outcome::Reject) return std::nullopt;
  }
  return mask;
}

}  // namespace sbstat
