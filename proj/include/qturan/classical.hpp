// Classical-limit reference functions: exponential sections and remainders,
// the ratios f_n and g_n, Ramanujan's theta, Kummer 1F1, generalized pFq and
// the classical ratio h. These are the q -> 1 oracles for the q-side.
#pragma once

#include <memory>

#include "qturan/qfunctions.hpp"

namespace qturan {

namespace detail {

// Term stream of sum_n prod_i (a_i)_n / (prod_j (b_j)_n n!) x^n.
template <class M>
struct PfqStreamState {
  using V = typename M::Value;

  std::vector<Rational> upper, lower;
  Rational x;
  long n_dec = 0;

  PfqStreamState(std::vector<Rational> up, std::vector<Rational> low, Rational x_)
      : upper(std::move(up)), lower(std::move(low)), x(std::move(x_)) {
    for (const Rational& b : lower) {
      const Rational neg = -b;
      if (neg >= 0) n_dec = std::max(n_dec, to_long(Rational(rational_floor(neg) + 1)));
    }
  }

  V ratio_at(long n) const {
    Rational num = x;
    for (const Rational& a : upper) num *= (a + n);
    Rational den(n + 1);
    for (const Rational& b : lower) {
      if (b + n == 0)
        throw PoleParameter("Pochhammer lower factor (" + b.get_str() + ")_n vanishes at index " +
                            std::to_string(n + 1));
      den *= (b + n);
    }
    return M::value_from_rational(Rational(num / den));
  }

  // sup_{m>=n} |a+m|/(b+m) = max(|a+n|/(b+n), 1) once b+n > 0; pairing the
  // parameters this way gives a bound on |ratio(m)| for every m >= n.
  std::optional<typename M::Scalar> rho_at(long n) const {
    const size_t p = upper.size(), r = lower.size();
    if (p > r + 1) return std::nullopt;
    if (n < n_dec) return std::nullopt;
    Rational acc = rational_abs(x);
    const size_t paired = std::min(p, r);
    for (size_t i = 0; i < paired; ++i) {
      Rational f = rational_abs(upper[i] + n) / (lower[i] + n);
      if (f < 1) f = 1;
      acc *= f;
    }
    if (p == r + 1) {
      Rational f = rational_abs(upper[p - 1] + n) / (n + 1);
      if (f < 1) f = 1;
      acc *= f;
    } else {
      for (size_t j = p; j < r; ++j) acc /= (lower[j] + n);
      acc /= (n + 1);
    }
    return M::scalar_ub(acc);
  }
};

template <class M>
TermStream<M> make_pfq_stream(std::vector<Rational> upper, std::vector<Rational> lower,
                              const Rational& x) {
  auto st = std::make_shared<PfqStreamState<M>>(std::move(upper), std::move(lower), x);
  TermStream<M> s;
  s.first_term = M::value_one();
  s.ratio = [st](long n) { return st->ratio_at(n); };
  s.rho_from = [st](long n) { return st->rho_at(n); };
  std::optional<long> last;
  for (const Rational& a : st->upper) {
    if (is_integer(a) && a <= 0) {
      const long stop = to_long(Rational(-a));
      last = last ? std::min(*last, stop) : stop;
    }
  }
  s.last_nonzero_term = last;
  return s;
}

inline void check_lower_parameters(const std::vector<Rational>& lower) {
  for (const Rational& b : lower)
    if (is_integer(b) && b <= 0)
      throw PoleParameter("lower parameter " + b.get_str() + " is a nonpositive integer");
}

}  // namespace detail

// 1F1(a;c;x)
template <class M>
SeriesValue<M> kummer_1f1(const Rational& a, const Rational& c, const Rational& x,
                          const SumPolicy& pol = {}) {
  detail::check_lower_parameters({c});
  return sum_with_tail_bound(detail::make_pfq_stream<M>({a}, {c}, x), pol);
}

// pFq(a_1..a_p; b_1..b_r; x)
template <class M>
SeriesValue<M> generalized_pfq(const std::vector<Rational>& upper,
                               const std::vector<Rational>& lower, const Rational& x,
                               const SumPolicy& pol = {}) {
  detail::check_lower_parameters(lower);
  const int p = static_cast<int>(upper.size());
  const int r = static_cast<int>(lower.size());
  const ConvergenceClass cls = classify_convergence(p, r);
  if (cls == ConvergenceClass::UnitDisk && rational_abs(x) >= 1)
    throw OutOfConvergenceDomain("pFq with p = q+1 requires |x| < 1");
  if (cls == ConvergenceClass::TerminatingOnly) {
    const bool terminating = [&] {
      for (const Rational& a : upper)
        if (is_integer(a) && a <= 0) return true;
      return false;
    }();
    if (!terminating && x != 0)
      throw NonTerminatingSeries("pFq with p > q+1 diverges unless it terminates or x = 0");
  }
  return sum_with_tail_bound(detail::make_pfq_stream<M>(upper, lower, x), pol);
}

// S_n(x) and R_n(x) with the remainder summed forward as its own series
// (never by subtraction from exp, which cancels catastrophically).
template <class M>
struct ExpSplit {
  long n = 0;
  Rational x;
  typename M::Value section;       // S_n(x), exact sum
  SeriesValue<M> remainder;        // R_n(x) with certified tail bound
};

template <class M>
ExpSplit<M> exp_split(long n, const Rational& x, const SumPolicy& pol = {}) {
  if (n < 0) throw DomainError("exp_split requires n >= 0");
  if (x < 0) throw DomainError("exp_split requires x >= 0");
  Rational section(0);
  Rational term(1);
  for (long k = 0; k <= n; ++k) {
    section += term;
    term *= x;
    term /= (k + 1);
  }
  // after the loop, term = x^{n+1}/(n+1)!
  TermStream<M> tail;
  tail.first_term = M::value_from_rational(term);
  const Rational xr = x;
  tail.ratio = [xr, n](long j) { return M::value_from_rational(Rational(xr / (n + 2 + j))); };
  tail.rho_from = [xr, n](long j) -> std::optional<typename M::Scalar> {
    return M::scalar_ub(Rational(xr / (n + 2 + j)));
  };
  ExpSplit<M> out;
  out.n = n;
  out.x = x;
  out.section = M::value_from_rational(section);
  out.remainder = sum_with_tail_bound(tail, pol);
  return out;
}

namespace detail {

// R_m(x) for small x is of order x^{m+1}/(m+1)!, far below any fixed
// absolute eps; scale the truncation target by the first-term magnitude so
// the ratio f_n keeps a tight relative enclosure across the whole grid.
inline SumPolicy scale_to_first_term(const SumPolicy& pol, long m, const Rational& x) {
  Rational t(1);
  for (long k = 1; k <= m + 1; ++k) {
    t *= x;
    t /= k;
  }
  if (t >= 1) return pol;
  return SumPolicy{Rational(pol.eps * t), pol.n_max};
}

}  // namespace detail

// f_n(x) = R_{n-1}(x) R_{n+1}(x) / R_n(x)^2, with f_n(0) = (n+1)/(n+2).
template <class M>
RatioValue<M> f_ratio(long n, const Rational& x, const SumPolicy& pol = {}) {
  if (n < 1) throw DomainError("f_ratio requires n >= 1");
  if (x < 0) throw DomainError("f_ratio requires x >= 0");
  if (x == 0) {
    RatioValue<M> out;
    using BoxT = Box<typename M::Scalar>;
    out.enclosure = BoxT::from_rational(Rational(Rational(n + 1) / Rational(n + 2)));
    out.terms_used_max = 1;
    return out;
  }
  const auto rm = exp_split<M>(n - 1, x, detail::scale_to_first_term(pol, n - 1, x)).remainder;
  const auto rp = exp_split<M>(n + 1, x, detail::scale_to_first_term(pol, n + 1, x)).remainder;
  const auto rc = exp_split<M>(n, x, detail::scale_to_first_term(pol, n, x)).remainder;
  return detail::combine_ratio(rm, rp, rc);
}

// g_n(x) = 1F1(1;n+1;x) 1F1(1;n+3;x) / 1F1(1;n+2;x)^2, so that
// f_n = (n+1)/(n+2) * g_n.
template <class M>
RatioValue<M> g_ratio(long n, const Rational& x, const SumPolicy& pol = {}) {
  if (n < 1) throw DomainError("g_ratio requires n >= 1");
  const auto s1 = kummer_1f1<M>(Rational(1), Rational(n + 1), x, pol);
  const auto s2 = kummer_1f1<M>(Rational(1), Rational(n + 3), x, pol);
  const auto s3 = kummer_1f1<M>(Rational(1), Rational(n + 2), x, pol);
  return detail::combine_ratio(s1, s2, s3);
}

// h(a,b,c,x) for Problem 1 (p = q = 1) and h_{p,q} for Problem 2.
struct ClassicalRatioParams {
  std::vector<Rational> a;  // length p
  std::vector<Rational> b;  // length q
  std::vector<Rational> c;  // length q

  static ClassicalRatioParams scalar(Rational a, Rational b, Rational c) {
    return {{std::move(a)}, {std::move(b)}, {std::move(c)}};
  }
};

template <class M>
RatioValue<M> classical_ratio_h(const ClassicalRatioParams& p, const Rational& x,
                                const SumPolicy& pol = {}) {
  const size_t qn = p.b.size();
  if (p.c.size() != qn || qn == 0) throw DomainError("h_{p,q} requires |b| = |c| >= 1");
  const bool all_zero = [&] {
    for (const Rational& ci : p.c)
      if (ci != 0) return false;
    return true;
  }();
  if (all_zero) return {Box<typename M::Scalar>::from_long(1), 1};
  std::vector<Rational> lo_minus, lo_plus;
  for (size_t i = 0; i < qn; ++i) {
    lo_minus.push_back(p.b[i] - p.c[i]);
    lo_plus.push_back(p.b[i] + p.c[i]);
  }
  const auto s1 = generalized_pfq<M>(p.a, lo_minus, x, pol);
  const auto s2 = generalized_pfq<M>(p.a, lo_plus, x, pol);
  const auto s3 = generalized_pfq<M>(p.a, p.b, x, pol);
  return detail::combine_ratio(s1, s2, s3);
}

// theta(n) = n! (e^n/2 - S_{n-1}(n)) / n^n; Ramanujan's quantity in
// (1/3, 1/2). The e^n/2 and S_{n-1}(n) agree to O(n^n e^{-n} / n!) relative
// scale, so the working precision grows with n before the subtraction.
struct ThetaValue {
  FloatBox enclosure;
  unsigned precision_bits = 0;
};

inline ThetaValue ramanujan_theta(long n, const Rational& eps = rational_pow10(-30),
                                  unsigned max_bits = 1u << 20) {
  if (n < 1) throw DomainError("ramanujan_theta requires n >= 1");
  unsigned bits = std::max<unsigned>(256, static_cast<unsigned>(1.4426950408889634 * n) + 65);
  Rational section(0), term(1);
  for (long k = 0; k <= n - 1; ++k) {
    section += term;
    term *= n;
    term /= (k + 1);
  }
  mpz_class fact, npow;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
  mpz_ui_pow_ui(npow.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n));
  const Rational scale(Rational(fact) / Rational(npow));
  for (;; bits *= 2) {
    PrecisionScope scope(bits);
    const BigFloat nf(n);
    const FloatBox en(BigFloat::exp(nf, MPFR_RNDD), BigFloat::exp(nf, MPFR_RNDU));
    const FloatBox half = FloatBox::from_rational(Rational(1, 2));
    const FloatBox diff = en * half - FloatBox::from_rational(section);
    const FloatBox theta = FloatBox::from_rational(scale) * diff;
    if (theta.rad_ub() <= scalar_cast_dn<BigFloat>(eps)) return {theta, bits};
    if (bits >= max_bits)
      throw PrecisionExhausted("ramanujan_theta could not resolve the cancellation at " +
                               std::to_string(max_bits) + " bits");
  }
}

}  // namespace qturan
