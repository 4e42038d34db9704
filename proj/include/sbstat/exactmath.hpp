#pragma once
// Exact rational arithmetic for the binomial tail chain. The inclusion
// probability 2^-k (n+2) ln 2 is irrational, so every quantity is carried
// as a rational interval certified to contain the true value; an
// inequality is asserted only when the intervals separate. Since the
// compared quantities are either rationals or differ by factors bounded
// away from 1, a 96-bit-wide ln 2 interval settles everything we check.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace sbstat {

// Closed interval [lo, hi] with rational endpoints, lo <= true value <= hi.
// Arithmetic is restricted to nonnegative operands, which is all the tail
// chain needs.
struct QInterval {
  mpq_class lo, hi;

  QInterval() : lo(0), hi(0) {}
  explicit QInterval(const mpq_class& exact) : lo(exact), hi(exact) {}
  QInterval(mpq_class l, mpq_class h) : lo(std::move(l)), hi(std::move(h)) {}

  bool is_point() const { return lo == hi; }

  QInterval operator+(const QInterval& o) const { return {lo + o.lo, hi + o.hi}; }
  QInterval operator-(const QInterval& o) const { return {lo - o.hi, hi - o.lo}; }

  QInterval operator*(const QInterval& o) const {
    if (sgn(lo) < 0 || sgn(o.lo) < 0) throw std::domain_error("QInterval: negative operand");
    return {lo * o.lo, hi * o.hi};
  }

  QInterval pow(unsigned long e) const {
    if (sgn(lo) < 0) throw std::domain_error("QInterval::pow: negative base");
    QInterval r(mpq_class(1));
    QInterval base = *this;
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  QInterval div_exact(const mpq_class& d) const {
    if (sgn(d) <= 0) throw std::domain_error("QInterval: nonpositive divisor");
    return {lo / d, hi / d};
  }

  // Certified comparisons: true only when provable from the interval.
  bool certainly_le(const QInterval& o) const { return hi <= o.lo; }
  bool certainly_lt(const QInterval& o) const { return hi < o.lo; }
  bool certainly_ge(const mpq_class& v) const { return lo >= v; }
  bool certainly_le(const mpq_class& v) const { return hi <= v; }
  bool certainly_lt(const mpq_class& v) const { return hi < v; }

  double mid_double() const { return (lo.get_d() + hi.get_d()) / 2; }
};

// ln 2 = 2 atanh(1/3) = 2 sum_{i>=0} (1/3)^(2i+1) / (2i+1); the truncation
// error after T terms is below the next term times 9/8.
inline const QInterval& ln2_interval() {
  static const QInterval v = [] {
    const int terms = 40;  // ~ 3^-81, far below 2^-96
    mpq_class sum = 0;
    mpq_class third(1, 3);
    mpq_class p = third;
    for (int i = 0; i < terms; ++i) {
      sum += 2 * p / (2 * i + 1);
      p *= third * third;
    }
    mpq_class tail = 2 * p / (2 * terms + 1) * mpq_class(9, 8);
    return QInterval(sum, sum + tail);
  }();
  return v;
}

inline mpz_class binom(unsigned long w, unsigned long v) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), w, v);
  return r;
}

inline mpq_class pow2q(long e) {
  mpq_class r;
  if (e >= 0) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(e));
    r = z;
  } else {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    r = mpq_class(1) / mpq_class(z);
  }
  return r;
}

inline mpz_class factorial(unsigned long v) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), v);
  return r;
}

// The appendix chain around Pr[Binomial(w, p) >= v]:
//   exact = sum_{i=v}^{w} C(w,i) p^i (1-p)^(w-i)
//         <= w C(w,v) p^v (1-p)^(w-v)  <= w C(w,v) p^v  <= w (wp)^v / v!
// valid under wp <= v (and p <= 1 for the sum to be a probability).
struct TailChain {
  bool pre_wp_le_v = false;
  bool pre_p_le_1 = false;
  QInterval wp;
  QInterval exact_sum;
  QInterval bound1, bound2, bound3;
  bool chain_holds = false;      // exact <= b1 <= b2 <= b3, certified
  std::string failed_stage;      // empty when chain_holds
};

inline TailChain binomial_tail(unsigned long w, const QInterval& p, unsigned long v) {
  TailChain t;
  t.wp = QInterval(mpq_class(static_cast<unsigned long>(w))) * p;
  t.pre_wp_le_v = t.wp.certainly_le(mpq_class(static_cast<unsigned long>(v)));
  t.pre_p_le_1 = p.certainly_le(mpq_class(1));

  mpq_class wq(static_cast<unsigned long>(w));

  // bound3 = w (wp)^v / v!  (positive even when the tail itself is empty)
  t.bound3 = (QInterval(wq) * t.wp.pow(v)).div_exact(mpq_class(factorial(v)));

  if (v > w) {
    // Empty tail: the two middle bounds carry C(w,v) = 0.
    t.exact_sum = QInterval(mpq_class(0));
    t.bound1 = QInterval(mpq_class(0));
    t.bound2 = QInterval(mpq_class(0));
  } else {
    if (!t.pre_p_le_1) {
      t.failed_stage = "p <= 1";
      return t;
    }
    QInterval one_minus_p(mpq_class(1) - p.hi, mpq_class(1) - p.lo);
    if (sgn(one_minus_p.lo) < 0) one_minus_p.lo = 0;
    QInterval sum(mpq_class(0));
    for (unsigned long i = v; i <= w; ++i) {
      QInterval term = QInterval(mpq_class(binom(w, i))) * p.pow(i) * one_minus_p.pow(w - i);
      sum = sum + term;
    }
    t.exact_sum = sum;
    mpq_class cwv(binom(w, v));
    t.bound1 = QInterval(wq) * QInterval(cwv) * p.pow(v) * one_minus_p.pow(w - v);
    t.bound2 = QInterval(wq) * QInterval(cwv) * p.pow(v);
  }

  if (!t.pre_wp_le_v) {
    t.failed_stage = "wp <= v";
    return t;
  }
  if (!t.exact_sum.certainly_le(t.bound1)) t.failed_stage = "exact <= w C(w,v) p^v (1-p)^(w-v)";
  else if (!t.bound1.certainly_le(t.bound2)) t.failed_stage = "b1 <= w C(w,v) p^v";
  else if (!t.bound2.certainly_le(t.bound3)) t.failed_stage = "b2 <= w (wp)^v / v!";
  else t.chain_holds = true;
  return t;
}

// The chain instantiated as in the appendix: w = 2^k, p = 2^-k (n+2) ln 2,
// v = (n+k)^2, with the final bound compared against 2^-2n.
struct InstantiatedTail {
  TailChain chain;
  unsigned long w = 0, v = 0;
  int n = 0, k = 0;
  bool final_below_2_min2n = false;
};

inline InstantiatedTail appendix_tail(int k, int n) {
  InstantiatedTail r;
  r.n = n;
  r.k = k;
  r.w = 1ul << k;
  r.v = static_cast<unsigned long>((n + k)) * static_cast<unsigned long>((n + k));
  QInterval p = QInterval(mpq_class(n + 2)).div_exact(mpq_class(static_cast<unsigned long>(r.w))) *
                ln2_interval();
  r.chain = binomial_tail(r.w, p, r.v);
  r.final_below_2_min2n = r.chain.bound3.certainly_lt(pow2q(-2 * n));
  return r;
}

}  // namespace sbstat
