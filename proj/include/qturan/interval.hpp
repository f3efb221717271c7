// Certified enclosures. Box<Rational> is exact; Box<BigFloat> rounds every
// endpoint outward (RNDD/RNDU), so a Box always contains the true value of
// the expression it was built from.
#pragma once

#include <string>
#include <utility>

#include "qturan/numeric.hpp"

namespace qturan {

// Directed scalar primitives. The _dn variants never exceed the exact
// result, the _up variants never fall below it.
inline Rational add_dn(const Rational& a, const Rational& b) { return Rational(a + b); }
inline Rational add_up(const Rational& a, const Rational& b) { return Rational(a + b); }
inline Rational sub_dn(const Rational& a, const Rational& b) { return Rational(a - b); }
inline Rational sub_up(const Rational& a, const Rational& b) { return Rational(a - b); }
inline Rational mul_dn(const Rational& a, const Rational& b) { return Rational(a * b); }
inline Rational mul_up(const Rational& a, const Rational& b) { return Rational(a * b); }
inline Rational div_dn(const Rational& a, const Rational& b) {
  if (b == 0) throw DomainError("division by zero");
  return Rational(a / b);
}
inline Rational div_up(const Rational& a, const Rational& b) { return div_dn(a, b); }
inline Rational scalar_abs(const Rational& a) { return rational_abs(a); }
inline int scalar_sgn(const Rational& a) { return sgn(a); }
inline bool scalar_finite(const Rational&) { return true; }
inline std::string scalar_to_string(const Rational& r, int = 20) { return r.get_str(); }

inline BigFloat add_dn(const BigFloat& a, const BigFloat& b) { return BigFloat::add(a, b, MPFR_RNDD); }
inline BigFloat add_up(const BigFloat& a, const BigFloat& b) { return BigFloat::add(a, b, MPFR_RNDU); }
inline BigFloat sub_dn(const BigFloat& a, const BigFloat& b) { return BigFloat::sub(a, b, MPFR_RNDD); }
inline BigFloat sub_up(const BigFloat& a, const BigFloat& b) { return BigFloat::sub(a, b, MPFR_RNDU); }
inline BigFloat mul_dn(const BigFloat& a, const BigFloat& b) { return BigFloat::mul(a, b, MPFR_RNDD); }
inline BigFloat mul_up(const BigFloat& a, const BigFloat& b) { return BigFloat::mul(a, b, MPFR_RNDU); }
inline BigFloat div_dn(const BigFloat& a, const BigFloat& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  return BigFloat::div(a, b, MPFR_RNDD);
}
inline BigFloat div_up(const BigFloat& a, const BigFloat& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  return BigFloat::div(a, b, MPFR_RNDU);
}
inline BigFloat scalar_abs(const BigFloat& a) { return a.abs(); }
inline int scalar_sgn(const BigFloat& a) { return a.sgn(); }
inline bool scalar_finite(const BigFloat& a) { return a.is_finite(); }
inline std::string scalar_to_string(const BigFloat& v, int digits = 20) {
  if (v.is_zero()) return "0";  // normalize -0
  return v.to_string(digits);
}

// Rational -> scalar conversions keyed on the target type; _dn never
// exceeds the exact value, _up never falls below it.
template <class B>
B scalar_cast_dn(const Rational& r);
template <class B>
B scalar_cast_up(const Rational& r);
template <>
inline Rational scalar_cast_dn<Rational>(const Rational& r) { return r; }
template <>
inline Rational scalar_cast_up<Rational>(const Rational& r) { return r; }
template <>
inline BigFloat scalar_cast_dn<BigFloat>(const Rational& r) {
  return BigFloat::from_rational(r, MPFR_RNDD);
}
template <>
inline BigFloat scalar_cast_up<BigFloat>(const Rational& r) {
  return BigFloat::from_rational(r, MPFR_RNDU);
}

template <class B>
class Box {
 public:
  Box() : lo_(0), hi_(0) {}
  Box(B lo, B hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) throw Error("malformed interval: hi < lo");
  }

  static Box point(const B& v) { return Box(v, v); }
  static Box from_long(long v) { return Box(B(v), B(v)); }
  static Box from_rational(const Rational& r) {
    return Box(scalar_cast_dn<B>(r), scalar_cast_up<B>(r));
  }

  const B& lo() const { return lo_; }
  const B& hi() const { return hi_; }
  B mid() const {
    if constexpr (std::is_same_v<B, Rational>) {
      return B((lo_ + hi_) / 2);
    } else {
      return (lo_ + hi_) / B(2);
    }
  }
  // Upper bound on the distance from mid() to either endpoint.
  B rad_ub() const {
    const B m = mid();
    const B a = sub_up(hi_, m);
    const B b = sub_up(m, lo_);
    return a < b ? b : a;
  }

  bool is_point() const { return lo_ == hi_; }
  bool contains_zero() const { return scalar_sgn(lo_) <= 0 && scalar_sgn(hi_) >= 0; }
  bool strictly_positive() const { return scalar_sgn(lo_) > 0; }
  bool finite() const { return scalar_finite(lo_) && scalar_finite(hi_); }
  bool exactly_zero() const { return scalar_sgn(lo_) == 0 && scalar_sgn(hi_) == 0; }

  // max |y| over the enclosure
  B abs_ub() const {
    const B a = scalar_abs(lo_);
    const B b = scalar_abs(hi_);
    return a < b ? b : a;
  }

  friend Box operator+(const Box& a, const Box& b) {
    return Box(add_dn(a.lo_, b.lo_), add_up(a.hi_, b.hi_));
  }
  friend Box operator-(const Box& a, const Box& b) {
    return Box(sub_dn(a.lo_, b.hi_), sub_up(a.hi_, b.lo_));
  }
  Box operator-() const { return Box(-hi_, -lo_); }

  friend Box operator*(const Box& a, const Box& b) {
    // fast path: both enclosures nonnegative
    if (scalar_sgn(a.lo_) >= 0 && scalar_sgn(b.lo_) >= 0)
      return Box(mul_dn(a.lo_, b.lo_), mul_up(a.hi_, b.hi_));
    B lo = mul_dn(a.lo_, b.lo_);
    B hi = mul_up(a.lo_, b.lo_);
    const auto consider = [&](const B& x, const B& y) {
      const B d = mul_dn(x, y);
      const B u = mul_up(x, y);
      if (d < lo) lo = d;
      if (u > hi) hi = u;
    };
    consider(a.lo_, b.hi_);
    consider(a.hi_, b.lo_);
    consider(a.hi_, b.hi_);
    return Box(lo, hi);
  }

  friend Box operator/(const Box& a, const Box& b) {
    if (b.contains_zero())
      throw DomainError("interval division by an enclosure containing zero");
    if (scalar_sgn(b.lo_) > 0) {
      if (scalar_sgn(a.lo_) >= 0) return Box(div_dn(a.lo_, b.hi_), div_up(a.hi_, b.lo_));
      if (scalar_sgn(a.hi_) <= 0) return Box(div_dn(a.lo_, b.lo_), div_up(a.hi_, b.hi_));
      return Box(div_dn(a.lo_, b.lo_), div_up(a.hi_, b.lo_));
    }
    // b strictly negative
    if (scalar_sgn(a.lo_) >= 0) return Box(div_dn(a.hi_, b.hi_), div_up(a.lo_, b.lo_));
    if (scalar_sgn(a.hi_) <= 0) return Box(div_dn(a.hi_, b.lo_), div_up(a.lo_, b.hi_));
    return Box(div_dn(a.hi_, b.hi_), div_up(a.lo_, b.hi_));
  }

  Box abs() const {
    if (scalar_sgn(lo_) >= 0) return *this;
    if (scalar_sgn(hi_) <= 0) return -*this;
    return Box(B(0), abs_ub());
  }

  Box pow_i(long e) const {
    if (e < 0) return Box::from_long(1) / pow_i(-e);
    Box acc = Box::from_long(1);
    Box base = *this;
    unsigned long k = static_cast<unsigned long>(e);
    while (k != 0) {
      if (k & 1UL) acc = acc * base;
      base = base * base;
      k >>= 1;
    }
    return acc;
  }

  // Certified order tests against a scalar threshold.
  bool ge_certain(const B& t) const { return lo_ >= t; }
  bool gt_certain(const B& t) const { return lo_ > t; }
  bool le_certain(const B& t) const { return hi_ <= t; }
  bool lt_certain(const B& t) const { return hi_ < t; }

  std::string to_string(int digits = 20) const {
    return "[" + scalar_to_string(lo_, digits) + ", " + scalar_to_string(hi_, digits) + "]";
  }

 private:
  B lo_, hi_;
};

using FloatBox = Box<BigFloat>;
using RationalBox = Box<Rational>;

// q^e for q in (0,1) and rational exponent e; monotone endpoint evaluation.
// Integer exponents go through exact binary powering; fractional exponents
// use MPFR's correctly rounded pow.
inline FloatBox box_qpow(const FloatBox& q, const Rational& e) {
  if (!(q.strictly_positive() && q.lt_certain(BigFloat(1))))
    throw DomainError("box_qpow requires base inside (0,1)");
  if (is_integer(e)) return q.pow_i(to_long(e));
  // base^e with base in (0,1): increasing in base, decreasing in e
  const BigFloat e_dn = scalar_cast_dn<BigFloat>(e);
  const BigFloat e_up = scalar_cast_up<BigFloat>(e);
  return FloatBox(BigFloat::pow(q.lo(), e_up, MPFR_RNDD),
                  BigFloat::pow(q.hi(), e_dn, MPFR_RNDU));
}

inline RationalBox box_qpow(const RationalBox& q, const Rational& e) {
  if (!is_integer(e))
    throw BackendMismatch("rational backend requires integer q-exponents; got q^(" + e.get_str() + ")");
  return q.pow_i(to_long(e));
}

}  // namespace qturan
