// Arbitrary-precision scalars: exact rationals (GMP) and directed-rounding
// big floats (MPFR). Everything certified in this library is built on the
// two types defined here.
#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qturan {

// ---------------------------------------------------------------------------
// Errors. One base class so the CLI can map any evaluation failure to a
// single exit code; distinct derived types so callers can tell them apart.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The summation engine could not establish a ratio bound rho < 1 within n_max.
struct NoGeometricBound : Error {
  using Error::Error;
};
// Arithmetic overflowed, produced non-finite values, or the term budget ran
// out before the requested eps was reached.
struct PrecisionExhausted : Error {
  using Error::Error;
};
struct OutOfConvergenceDomain : Error {
  using Error::Error;
};
struct NonTerminatingSeries : Error {
  using Error::Error;
};
// A lower-parameter q-Pochhammer or Pochhammer factor vanishes.
struct PoleParameter : Error {
  using Error::Error;
};
struct HypothesisViolation : Error {
  using Error::Error;
};
struct BadIndex : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
// Operation requires the other arithmetic backend (e.g. non-integer exponent
// under the exact-rational backend).
struct BackendMismatch : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Exact rationals
// ---------------------------------------------------------------------------

using Rational = mpq_class;

inline bool is_integer(const Rational& r) {
  return mpz_cmp_ui(r.get_den().get_mpz_t(), 1) == 0;
}

inline bool fits_long(const Rational& r) {
  return is_integer(r) && r.get_num().fits_slong_p();
}

inline long to_long(const Rational& r) {
  if (!fits_long(r)) throw DomainError("rational does not fit a machine integer: " + r.get_str());
  return r.get_num().get_si();
}

inline Rational rational_abs(const Rational& r) { return Rational(abs(r)); }

// floor(r) as an integer rational
inline Rational rational_floor(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rational(q);
}

inline Rational rational_ipow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  const unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), mag);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), mag);
  if (e < 0) {
    if (num == 0) throw DomainError("0 raised to a negative power");
    std::swap(num, den);
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational rational_pow10(long k) { return rational_ipow(Rational(10), k); }

// Accepts integers ("42"), fractions ("-3/7"), decimals ("0.95") and
// scientific notation ("1e-30", "2.5e3"). Parsing is exact.
inline Rational rational_from_string(std::string_view s) {
  auto fail = [&] { throw DomainError("cannot parse rational literal: '" + std::string(s) + "'"); };
  if (s.empty()) fail();
  std::string body(s);
  long exp10 = 0;
  if (auto epos = body.find_first_of("eE"); epos != std::string::npos) {
    const std::string etail = body.substr(epos + 1);
    if (etail.empty()) fail();
    char* end = nullptr;
    exp10 = std::strtol(etail.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') fail();
    body = body.substr(0, epos);
  }
  if (body.empty()) fail();
  Rational value;
  if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string digits = body.substr(0, dot) + body.substr(dot + 1);
    const long frac_digits = static_cast<long>(body.size() - dot - 1);
    if (digits.empty() || digits == "-" || digits == "+") fail();
    mpz_class num;
    if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0) fail();
    value = Rational(num) / rational_pow10(frac_digits);
  } else {
    mpq_t tmp;
    mpq_init(tmp);
    if (mpq_set_str(tmp, body.c_str(), 10) != 0 || mpz_sgn(mpq_denref(tmp)) == 0) {
      mpq_clear(tmp);
      fail();
    }
    mpq_canonicalize(tmp);
    value = Rational(tmp);
    mpq_clear(tmp);
  }
  if (exp10 != 0) value *= rational_pow10(exp10);
  value.canonicalize();
  return value;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Working precision (bits) for newly created BigFloats, thread-local.
// ---------------------------------------------------------------------------

namespace detail {
inline mpfr_prec_t& tls_precision() {
  static thread_local mpfr_prec_t prec = 256;
  return prec;
}
}  // namespace detail

inline mpfr_prec_t working_precision() { return detail::tls_precision(); }

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(detail::tls_precision()) {
    if (bits < 53) throw DomainError("float precision must be at least 53 bits");
    detail::tls_precision() = static_cast<mpfr_prec_t>(bits);
  }
  ~PrecisionScope() { detail::tls_precision() = saved_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

// ---------------------------------------------------------------------------
// BigFloat: RAII wrapper over mpfr_t. Operators round to nearest at the
// working precision; the static directed variants (RNDD/RNDU) are what the
// interval layer uses to keep enclosures sound.
// ---------------------------------------------------------------------------

class BigFloat {
 public:
  BigFloat() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  BigFloat(long n) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_si(v_, n, MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);  // same precision: exact
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat from_rational(const Rational& r, mpfr_rnd_t rnd) {
    BigFloat x;
    mpfr_set_q(x.v_, r.get_mpq_t(), rnd);
    return x;
  }
  // Exact inverse of from_rational for finite values.
  Rational to_rational_exact() const {
    if (!is_finite()) throw DomainError("cannot convert non-finite float to rational");
    if (mpfr_zero_p(v_)) return Rational(0);
    mpz_class m;
    const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    Rational r(m);
    if (e >= 0) {
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e));
      r *= Rational(p);
    } else {
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(-e));
      r /= Rational(p);
    }
    r.canonicalize();
    return r;
  }

  static BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_add(x.v_, a.v_, b.v_, r);
    return x;
  }
  static BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_sub(x.v_, a.v_, b.v_, r);
    return x;
  }
  static BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_mul(x.v_, a.v_, b.v_, r);
    return x;
  }
  static BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_div(x.v_, a.v_, b.v_, r);
    return x;
  }
  // MPFR pow/exp are correctly rounded, so the directed modes give tight
  // one-sided bounds.
  static BigFloat pow(const BigFloat& base, const BigFloat& e, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_pow(x.v_, base.v_, e.v_, r);
    return x;
  }
  static BigFloat exp(const BigFloat& a, mpfr_rnd_t r) {
    BigFloat x;
    mpfr_exp(x.v_, a.v_, r);
    return x;
  }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return add(a, b, MPFR_RNDN); }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return sub(a, b, MPFR_RNDN); }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return mul(a, b, MPFR_RNDN); }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return div(a, b, MPFR_RNDN); }
  BigFloat operator-() const {
    BigFloat x;
    mpfr_set_prec(x.v_, mpfr_get_prec(v_));
    mpfr_neg(x.v_, v_, MPFR_RNDN);  // exact
    return x;
  }
  BigFloat abs() const {
    BigFloat x;
    mpfr_set_prec(x.v_, mpfr_get_prec(v_));
    mpfr_abs(x.v_, v_, MPFR_RNDN);  // exact
    return x;
  }

  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return a.cmp(b) < 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return a.cmp(b) > 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) <= 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) >= 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return !(a == b); }

  int sgn() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  std::string to_string(int significant_digits = 20, mpfr_rnd_t rnd = MPFR_RNDN) const {
    char* buf = nullptr;
    if (mpfr_asprintf(&buf, "%.*R*g", significant_digits, rnd, v_) < 0)
      throw Error("mpfr_asprintf failed");
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

 private:
  mpfr_t v_;
};

inline BigFloat bigfloat_from_string(std::string_view s, mpfr_rnd_t rnd = MPFR_RNDN) {
  return BigFloat::from_rational(rational_from_string(s), rnd);
}

}  // namespace qturan
