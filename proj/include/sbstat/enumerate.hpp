#pragma once
// Enumeration of valid program encodings in (length, lexicographic) order —
// the search substrate for every CD computation. The enumerator walks all
// bitstrings of each length and keeps the ones that decode; validity rates
// are high enough at the lengths we search that this stays cheap, and it is
// trivially in canonical order.

#include <functional>
#include <stdexcept>

#include "machine.hpp"

namespace sbstat {

// Thrown when a caller asks for more resources than the configured cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kDefaultProgramCap = 16;
constexpr int kHardProgramCap = 26;

// Calls fn for every valid program of length <= max_len, in (length, lex)
// order. fn returning false stops the walk early.
inline void for_each_valid_program(int max_len, const std::function<bool(const Program&)>& fn) {
  if (max_len > kHardProgramCap)
    throw CapExceeded("program enumeration beyond hard cap " + std::to_string(kHardProgramCap) +
                      " (asked " + std::to_string(max_len) + ")");
  for (int len = 0; len <= max_len; ++len) {
    for (uint64_t v = 0; v < (uint64_t{1} << len); ++v) {
      Program p = Program::from_code(BitVec::from_value(v, len));
      if (!p.valid) continue;
      if (!fn(p)) return;
    }
  }
}

inline uint64_t count_valid_programs(int max_len) {
  uint64_t n = 0;
  for_each_valid_program(max_len, [&](const Program&) {
    ++n;
    return true;
  });
  return n;
}

}  // namespace sbstat
