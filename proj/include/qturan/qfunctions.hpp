// q-shifted factorials, the q-Kummer confluent hypergeometric function, the
// general basic hypergeometric series pPhi_r, and the monotone-ratio
// functions h and h_r built from them.
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qturan/series.hpp"

namespace qturan {

struct NumericBackend {
  enum class Kind { Float, Rational };
  Kind kind = Kind::Float;
  unsigned precision_bits = 256;

  static NumericBackend floating(unsigned bits = 256) {
    if (bits < 53) throw DomainError("float precision must be at least 53 bits");
    return {Kind::Float, bits};
  }
  static NumericBackend rational() { return {Kind::Rational, 0}; }
};

struct QContext {
  Rational q;
  NumericBackend backend{};

  explicit QContext(Rational q_, NumericBackend b = {}) : q(std::move(q_)), backend(b) {
    if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  }
};

template <class M>
struct mode_tag {};

// Runs f under the arithmetic selected by the backend; float mode installs
// the requested working precision for the duration of the call.
template <class F>
decltype(auto) with_backend(const NumericBackend& b, F&& f) {
  if (b.kind == NumericBackend::Kind::Rational) return f(mode_tag<RationalMode>{});
  PrecisionScope scope(b.precision_bits);
  return f(mode_tag<FloatMode>{});
}

enum class ConvergenceClass { Entire, UnitDisk, TerminatingOnly };

inline ConvergenceClass classify_convergence(int p_count, int r_count) {
  if (p_count < 0 || r_count < 0) throw DomainError("series parameter counts must be nonnegative");
  if (p_count < r_count + 1) return ConvergenceClass::Entire;
  if (p_count == r_count + 1) return ConvergenceClass::UnitDisk;
  return ConvergenceClass::TerminatingOnly;
}

struct QKummerParams {
  Rational a;
  Rational c;
};

enum class QKummerVariant {
  AsDisplayed,    // positive-term series, converges for (1-q)|x| < 1
  Standard1Phi1,  // with the (-1)^n q^(n choose 2) factor; entire
};

struct PhiParams {
  std::vector<Rational> upper;  // exponents a_1..a_p of q^{a_i}
  std::vector<Rational> lower;  // exponents b_1..b_r of q^{b_j}
};

struct QRatioParams {
  std::vector<Rational> a;  // length r+1 for h_r, length 1 for h
  std::vector<Rational> b;  // length r (length 1 for h)
  std::vector<Rational> c;  // length r (length 1 for h)

  static QRatioParams scalar(Rational a, Rational b, Rational c) {
    return {{std::move(a)}, {std::move(b)}, {std::move(c)}};
  }
  bool is_scalar() const { return a.size() == 1 && b.size() == 1 && c.size() == 1; }
};

template <class M>
typename M::Value mode_qpow(const typename M::Value& q, const Rational& e) {
  if constexpr (M::exact) {
    if (!is_integer(e))
      throw BackendMismatch("rational backend requires integer q-exponents; got q^(" + e.get_str() + ")");
    return rational_ipow(q, to_long(e));
  } else {
    return box_qpow(q, e);
  }
}

template <class M>
typename M::Value mode_ipow(const typename M::Value& v, long e) {
  if constexpr (M::exact) {
    return rational_ipow(v, e);
  } else {
    return v.pow_i(e);
  }
}

namespace detail {

// Shared state behind the ratio/rho closures of a Phi-type term stream.
// Maintains the powers q^{e+n} incrementally; random access recomputes.
template <class M>
struct PhiStreamState {
  using V = typename M::Value;

  V q;
  std::vector<Rational> upper, lower;
  int bal_e = 0;  // exponent on [(-1)^n q^(n choose 2)]
  V z;            // effective series argument
  V abs_z;
  long n_dec = 0;  // first index with every lower factor strictly positive
  V one = M::value_one();

  long cur_n = -1;
  std::vector<V> pu, pl;  // q^{upper[i]+n}, q^{lower[j]+n}
  V pqq;                  // q^{n+1}
  V pqn;                  // q^n

  PhiStreamState(const Rational& q_rat, std::vector<Rational> up, std::vector<Rational> low,
                 int bal, const Rational& z_rat)
      : q(M::value_from_rational(q_rat)),
        upper(std::move(up)),
        lower(std::move(low)),
        bal_e(bal),
        z(M::value_from_rational(z_rat)),
        abs_z(M::value_from_rational(rational_abs(z_rat))) {
    for (const Rational& b : lower) {
      const Rational neg = -b;
      if (neg >= 0) {
        const long nj = to_long(Rational(rational_floor(neg) + 1));
        n_dec = std::max(n_dec, nj);
      }
    }
  }

  void recompute(long n) {
    pu.clear();
    pl.clear();
    for (const Rational& e : upper) pu.push_back(mode_qpow<M>(q, e + n));
    for (const Rational& e : lower) pl.push_back(mode_qpow<M>(q, e + n));
    pqq = mode_qpow<M>(q, Rational(n + 1));
    pqn = mode_qpow<M>(q, Rational(n));
    cur_n = n;
  }

  void advance_to(long n) {
    if (cur_n >= 0 && n == cur_n) return;
    if (cur_n >= 0 && n == cur_n + 1) {
      for (V& v : pu) v = v * q;
      for (V& v : pl) v = v * q;
      pqq = pqq * q;
      pqn = pqn * q;
      cur_n = n;
      return;
    }
    recompute(n);
  }

  V ratio_at(long n) {
    advance_to(n);
    V num = z;
    for (const V& p : pu) num = num * (one - p);
    V den = one - pqq;
    for (size_t j = 0; j < lower.size(); ++j) {
      if (lower[j] + n == 0)
        throw PoleParameter("q-Pochhammer lower factor (q^(" + lower[j].get_str() +
                            ");q) vanishes at index " + std::to_string(n + 1));
      den = den * (one - pl[j]);
    }
    V r = num / den;
    if (bal_e != 0) r = r * mode_ipow<M>(-pqn, bal_e);
    return r;
  }

  // Upper bound on |ratio(m)| valid for every m >= n; see the derivation in
  // the stream contract: each factor bound is monotone nonincreasing in n.
  std::optional<typename M::Scalar> rho_at(long n) {
    if (bal_e < 0) return std::nullopt;  // p > r+1: no geometric contract
    if (n < n_dec) return std::nullopt;
    advance_to(n);
    V acc = abs_z;
    for (const V& p : pu) acc = acc * (one + p);
    for (const V& p : pl) acc = acc / (one - p);
    acc = acc / (one - pqq);
    if (bal_e > 0) acc = acc * mode_ipow<M>(pqn, bal_e);
    return M::abs_ub(acc);
  }
};

}  // namespace detail

// Term stream of sum_n  prod_i (q^{u_i};q)_n / (prod_j (q^{l_j};q)_n (q;q)_n)
//   * [(-1)^n q^(n choose 2)]^{bal_e} * z^n.
template <class M>
TermStream<M> make_phi_stream(const Rational& q, std::vector<Rational> upper,
                              std::vector<Rational> lower, int bal_e, const Rational& z) {
  auto st = std::make_shared<detail::PhiStreamState<M>>(q, std::move(upper), std::move(lower),
                                                        bal_e, z);
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

// (a;q)_n = prod_{k=0}^{n-1} (1 - a q^k); exact finite product.
template <class M>
typename M::Value q_pochhammer(const Rational& q, const Rational& a, long n) {
  if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  if (n < 0) throw DomainError("q_pochhammer requires n >= 0");
  using V = typename M::Value;
  const V qv = M::value_from_rational(q);
  const V one = M::value_one();
  V aqk = M::value_from_rational(a);
  V acc = one;
  for (long k = 0; k < n; ++k) {
    acc = acc * (one - aqk);
    aqk = aqk * qv;
  }
  return acc;
}

// (a;q)_infty as a truncated product with a certified remainder:
// value carries the product of the first terms_used factors and tail_bound
// bounds |(a;q)_infty - value|.
template <class M>
SeriesValue<M> q_pochhammer_inf(const Rational& q, const Rational& a,
                                const SumPolicy& pol = {}) {
  if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  using V = typename M::Value;
  const V qv = M::value_from_rational(q);
  const V one = M::value_one();
  const Rational abs_a = rational_abs(a);
  V aqk = M::value_from_rational(a);
  Rational aqk_abs = abs_a;  // |a| q^k, tracked exactly
  V acc = one;
  const typename M::Scalar eps = M::scalar_lb(pol.eps);
  for (long k = 0;; ++k) {
    // remainder of the product from factor k on: |prod_{j>=k}(1-aq^j) - 1|
    // <= 2s with s = 2|a|q^k/(1-q), valid once |a|q^k <= 1/2 and s <= 1/2
    const Rational s = 2 * aqk_abs / (1 - q);
    if (aqk_abs * 2 <= 1 && s * 2 <= 1) {
      const auto tail = mul_up(M::abs_ub(acc), M::scalar_ub(Rational(2 * s)));
      if (tail <= eps) return {acc, std::max(k, 1L), tail};
    }
    if (k >= pol.n_max)
      throw PrecisionExhausted("q_pochhammer_inf remainder did not reach eps within n_max factors");
    acc = acc * (one - aqk);
    if (M::exactly_zero(acc)) return {acc, k + 1, typename M::Scalar(0)};
    aqk = aqk * qv;
    aqk_abs *= q;
  }
}

// phi(q^a, q^c; q, x), Eq-(2.1) style q-Kummer series.
template <class M>
SeriesValue<M> q_kummer_phi(const Rational& q, const QKummerParams& p, const Rational& x,
                            QKummerVariant variant = QKummerVariant::AsDisplayed,
                            const SumPolicy& pol = {}) {
  if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  if (variant == QKummerVariant::AsDisplayed && (1 - q) * rational_abs(x) >= 1)
    throw OutOfConvergenceDomain(
        "displayed q-Kummer series requires (1-q)|x| < 1; use the Standard1Phi1 variant beyond");
  const Rational z = (1 - q) * x;
  const int bal = variant == QKummerVariant::AsDisplayed ? 0 : 1;
  return sum_with_tail_bound(make_phi_stream<M>(q, {p.a}, {p.c}, bal, z), pol);
}

// pPhi_r(q^{a_1},...,q^{a_p}; q^{b_1},...,q^{b_r}; q, x), Eq. (2.2).
template <class M>
SeriesValue<M> basic_hypergeometric(const Rational& q, const PhiParams& p, const Rational& x,
                                    const SumPolicy& pol = {}) {
  if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  const int pc = static_cast<int>(p.upper.size());
  const int rc = static_cast<int>(p.lower.size());
  const ConvergenceClass cls = classify_convergence(pc, rc);
  const bool terminating = [&] {
    for (const Rational& a : p.upper)
      if (is_integer(a) && a <= 0) return true;
    return false;
  }();
  if (cls == ConvergenceClass::UnitDisk && rational_abs(x) >= 1)
    throw OutOfConvergenceDomain("pPhi_r with p = r+1 requires |x| < 1");
  if (cls == ConvergenceClass::TerminatingOnly && !terminating && x != 0)
    throw NonTerminatingSeries(
        "pPhi_r with p > r+1 converges only for x = 0 unless a numerator parameter terminates it");
  return sum_with_tail_bound(make_phi_stream<M>(q, p.upper, p.lower, 1 + rc - pc, x), pol);
}

// A ratio evaluation: certified enclosure plus bookkeeping for reports.
template <class M>
struct RatioValue {
  Box<typename M::Scalar> enclosure;
  long terms_used_max = 0;
};

namespace detail {

template <class M>
RatioValue<M> combine_ratio(const SeriesValue<M>& num1, const SeriesValue<M>& num2,
                            const SeriesValue<M>& den) {
  const auto e1 = num1.enclosure();
  const auto e2 = num2.enclosure();
  const auto e3 = den.enclosure();
  RatioValue<M> out;
  out.enclosure = (e1 * e2) / (e3 * e3);
  out.terms_used_max = std::max({num1.terms_used, num2.terms_used, den.terms_used});
  return out;
}

}  // namespace detail

inline void require_h_hypotheses(const Rational& a, const Rational& b, const Rational& c) {
  if (!(a > b && b > c && c > 0 && b > 1))
    throw DomainError("Turan hypotheses require a > b > c > 0 and b > 1");
}

inline void require_hr_hypotheses(const QRatioParams& p) {
  for (size_t i = 0; i < p.b.size(); ++i)
    if (!(p.b[i] > p.c[i] && p.c[i] > 0 && p.b[i] > 1))
      throw DomainError("Turan hypotheses require b_i > c_i > 0 and b_i > 1 for every i");
}

// h(a,b,c,q,x) = phi(q^a,q^{b-c};q,x) phi(q^a,q^{b+c};q,x) / phi(q^a,q^b;q,x)^2
template <class M>
RatioValue<M> q_ratio_h(const Rational& q, const Rational& a, const Rational& b, const Rational& c,
                        const Rational& x, QKummerVariant variant = QKummerVariant::AsDisplayed,
                        const SumPolicy& pol = {}, bool require_hypotheses = false) {
  if (require_hypotheses) require_h_hypotheses(a, b, c);
  if (c == 0) return {Box<typename M::Scalar>::from_long(1), 1};  // numerator == denominator
  const SeriesValue<M> s1 = q_kummer_phi<M>(q, {a, b - c}, x, variant, pol);
  const SeriesValue<M> s2 = q_kummer_phi<M>(q, {a, b + c}, x, variant, pol);
  const SeriesValue<M> s3 = q_kummer_phi<M>(q, {a, b}, x, variant, pol);
  return detail::combine_ratio(s1, s2, s3);
}

template <class M>
RatioValue<M> q_ratio_h(const Rational& q, const QRatioParams& p, const Rational& x,
                        QKummerVariant variant = QKummerVariant::AsDisplayed,
                        const SumPolicy& pol = {}, bool require_hypotheses = false) {
  if (!p.is_scalar()) throw DomainError("q_ratio_h takes scalar parameters; use q_ratio_hr");
  return q_ratio_h<M>(q, p.a[0], p.b[0], p.c[0], x, variant, pol, require_hypotheses);
}

// h_r: numerator parameter shifts b_j - c_j and b_j + c_j against the
// squared phi at b_j (the displayed Eq. (4.1) repeats b - c twice; the proof
// and inequality (4.2) use b - c and b + c, which is what we evaluate).
template <class M>
RatioValue<M> q_ratio_hr(const Rational& q, const QRatioParams& p, const Rational& x,
                         const SumPolicy& pol = {}, bool require_hypotheses = false) {
  const size_t r = p.b.size();
  if (r < 1 || p.c.size() != r || p.a.size() != r + 1)
    throw DomainError("h_r requires r >= 1 with |a| = r+1, |b| = |c| = r");
  if (require_hypotheses) require_hr_hypotheses(p);
  const bool all_zero = [&] {
    for (const Rational& ci : p.c)
      if (ci != 0) return false;
    return true;
  }();
  if (all_zero) return {Box<typename M::Scalar>::from_long(1), 1};
  if (rational_abs(x) >= 1)
    throw OutOfConvergenceDomain("h_r is a ratio of (r+1)Phi_r series and requires |x| < 1");
  std::vector<Rational> lo_minus, lo_plus;
  for (size_t i = 0; i < r; ++i) {
    lo_minus.push_back(p.b[i] - p.c[i]);
    lo_plus.push_back(p.b[i] + p.c[i]);
  }
  const SeriesValue<M> s1 = basic_hypergeometric<M>(q, {p.a, lo_minus}, x, pol);
  const SeriesValue<M> s2 = basic_hypergeometric<M>(q, {p.a, lo_plus}, x, pol);
  const SeriesValue<M> s3 = basic_hypergeometric<M>(q, {p.a, p.b}, x, pol);
  return detail::combine_ratio(s1, s2, s3);
}

}  // namespace qturan
