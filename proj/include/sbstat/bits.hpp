#pragma once
// Bit-level plumbing shared by every module: fixed-width bitstrings
// (machine inputs, outputs, oracle queries), growable bit vectors
// (program encodings, certificate payloads), Elias gamma coding and a
// compact hex serialization used in reports.

#include <cstdint>
#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbstat {

inline int floor_log2(uint64_t v) {
  if (v == 0) throw std::invalid_argument("floor_log2(0)");
  return 63 - __builtin_clzll(v);
}

inline int ceil_log2(uint64_t v) {
  if (v <= 1) return 0;
  return floor_log2(v - 1) + 1;
}

inline int bit_width_u64(uint64_t v) { return v == 0 ? 0 : floor_log2(v) + 1; }

// A binary string of length <= 64. Cell i (tape order, leftmost first) is
// bit (len-1-i) of `bits`, so the numeric value of `bits` equals the string
// read MSB-first and enumerating 0..2^n-1 walks length-n strings in
// lexicographic order.
struct Bitstring {
  uint64_t bits = 0;
  int len = 0;

  Bitstring() = default;
  Bitstring(uint64_t value, int length) : bits(value), len(length) {
    if (length < 0 || length > 64) throw std::invalid_argument("Bitstring length");
    if (length < 64) bits &= (length == 0 ? 0 : ((~uint64_t{0}) >> (64 - length)));
  }

  static Bitstring from_string(const std::string& s) {
    Bitstring r(0, static_cast<int>(s.size()));
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("Bitstring::from_string: " + s);
      r.bits = (r.bits << 1) | static_cast<uint64_t>(s[i] - '0');
    }
    return r;
  }

  int bit(int i) const { return static_cast<int>((bits >> (len - 1 - i)) & 1u); }

  std::string str() const {
    std::string s;
    s.reserve(len);
    for (int i = 0; i < len; ++i) s.push_back(static_cast<char>('0' + bit(i)));
    return s;
  }

  bool operator==(const Bitstring& o) const { return bits == o.bits && len == o.len; }
  bool operator!=(const Bitstring& o) const { return !(*this == o); }
  // (length, lexicographic) order; lexicographic == numeric at equal length.
  bool operator<(const Bitstring& o) const {
    if (len != o.len) return len < o.len;
    return bits < o.bits;
  }
};

// Growable bit vector, one bit per byte. Program encodings and certificate
// payloads are small (hundreds of bits), so simplicity wins over packing.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::vector<uint8_t> raw) : b_(std::move(raw)) {}

  static BitVec from_value(uint64_t v, int width) {
    BitVec r;
    for (int i = width - 1; i >= 0; --i) r.push(static_cast<int>((v >> i) & 1u));
    return r;
  }

  static BitVec from_string(const std::string& s) {
    BitVec r;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BitVec::from_string");
      r.push(c - '0');
    }
    return r;
  }

  static BitVec from_bitstring(const Bitstring& s) {
    BitVec r;
    for (int i = 0; i < s.len; ++i) r.push(s.bit(i));
    return r;
  }

  size_t size() const { return b_.size(); }
  bool empty() const { return b_.empty(); }
  int bit(size_t i) const { return b_[i]; }
  void push(int bit) { b_.push_back(static_cast<uint8_t>(bit & 1)); }
  void append(const BitVec& o) { b_.insert(b_.end(), o.b_.begin(), o.b_.end()); }
  void append_value(uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) push(static_cast<int>((v >> i) & 1u));
  }

  uint64_t as_value() const {
    if (size() > 64) throw std::length_error("BitVec::as_value: too long");
    uint64_t v = 0;
    for (uint8_t b : b_) v = (v << 1) | b;
    return v;
  }

  std::string str() const {
    std::string s;
    s.reserve(size());
    for (uint8_t b : b_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  // "<len>:<hex>", bits MSB-first, zero-padded on the right to a nibble.
  std::string to_compact() const {
    static const char* digits = "0123456789abcdef";
    std::string s = std::to_string(size());
    s.push_back(':');
    for (size_t i = 0; i < size(); i += 4) {
      int nib = 0;
      for (size_t j = 0; j < 4; ++j) nib = (nib << 1) | (i + j < size() ? b_[i + j] : 0);
      s.push_back(digits[nib]);
    }
    return s;
  }

  static std::optional<BitVec> from_compact(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) return std::nullopt;
    size_t len = 0;
    try {
      len = std::stoul(s.substr(0, colon));
    } catch (...) {
      return std::nullopt;
    }
    std::string hex = s.substr(colon + 1);
    if (hex.size() * 4 < len || hex.size() * 4 >= len + 4) return std::nullopt;
    BitVec r;
    for (char c : hex) {
      int nib;
      if (c >= '0' && c <= '9') nib = c - '0';
      else if (c >= 'a' && c <= 'f') nib = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') nib = c - 'A' + 10;
      else return std::nullopt;
      for (int j = 3; j >= 0; --j) r.push((nib >> j) & 1);
    }
    while (r.size() > len) {
      if (r.b_.back() != 0) return std::nullopt;  // padding must be zero
      r.b_.pop_back();
    }
    return r;
  }

  bool operator==(const BitVec& o) const { return b_ == o.b_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }
  bool operator<(const BitVec& o) const {  // (length, lexicographic)
    if (size() != o.size()) return size() < o.size();
    return b_ < o.b_;
  }

 private:
  std::vector<uint8_t> b_;
};

// Sequential reader over a BitVec; all reads report exhaustion explicitly.
class BitReader {
 public:
  explicit BitReader(const BitVec& v) : v_(&v) {}

  std::optional<int> next() {
    if (pos_ >= v_->size()) return std::nullopt;
    return v_->bit(pos_++);
  }

  std::optional<uint64_t> take(int width) {
    if (pos_ + static_cast<size_t>(width) > v_->size()) return std::nullopt;
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<uint64_t>(v_->bit(pos_++));
    return v;
  }

  bool done() const { return pos_ == v_->size(); }
  size_t pos() const { return pos_; }

 private:
  const BitVec* v_;
  size_t pos_ = 0;
};

// Elias gamma code for integers >= 1: (bit_width-1) zeros, then the value
// MSB-first. gamma(1) = "1", gamma(2) = "010", gamma(6) = "00110".
inline void gamma_append(BitVec& out, uint64_t v) {
  if (v == 0) throw std::invalid_argument("gamma_append(0)");
  int w = bit_width_u64(v);
  for (int i = 0; i < w - 1; ++i) out.push(0);
  out.append_value(v, w);
}

inline int gamma_length(uint64_t v) { return 2 * bit_width_u64(v) - 1; }

// Reads a gamma-coded value; fails on exhaustion or more than `max_zeros`
// leading zeros.
inline std::optional<uint64_t> gamma_read(BitReader& r, int max_zeros) {
  int zeros = 0;
  for (;;) {
    auto b = r.next();
    if (!b) return std::nullopt;
    if (*b == 1) break;
    if (++zeros > max_zeros) return std::nullopt;
  }
  auto rest = r.take(zeros);
  if (!rest) return std::nullopt;
  return (uint64_t{1} << zeros) | *rest;
}

}  // namespace sbstat
