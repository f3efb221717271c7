// Generic power-series summation with certified geometric tail bounds.
// Two interchangeable arithmetic modes share one engine:
//   RationalMode — exact rationals, no rounding anywhere
//   FloatMode    — outward-rounded BigFloat intervals
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qturan/interval.hpp"

namespace qturan {

struct RationalMode {
  using Value = Rational;   // carrier for terms and partial sums
  using Scalar = Rational;  // tail bounds and thresholds
  static constexpr bool exact = true;

  static Value value_one() { return Rational(1); }
  static Value value_from_rational(const Rational& r) { return r; }
  static Scalar abs_ub(const Value& v) { return rational_abs(v); }
  static Scalar scalar_ub(const Rational& r) { return r; }
  static Scalar scalar_lb(const Rational& r) { return r; }
  static bool exactly_zero(const Value& v) { return v == 0; }
  static bool finite(const Value&) { return true; }
  static Box<Scalar> enclose(const Value& v, const Scalar& tail) {
    return Box<Scalar>(v - tail, v + tail);
  }
};

struct FloatMode {
  using Value = FloatBox;
  using Scalar = BigFloat;
  static constexpr bool exact = false;

  static Value value_one() { return FloatBox::from_long(1); }
  static Value value_from_rational(const Rational& r) { return FloatBox::from_rational(r); }
  static Scalar abs_ub(const Value& v) { return v.abs_ub(); }
  static Scalar scalar_ub(const Rational& r) { return scalar_cast_up<BigFloat>(r); }
  static Scalar scalar_lb(const Rational& r) { return scalar_cast_dn<BigFloat>(r); }
  static bool exactly_zero(const Value& v) { return v.exactly_zero(); }
  static bool finite(const Value& v) { return v.finite(); }
  static Box<Scalar> enclose(const Value& v, const Scalar& tail) {
    return Box<Scalar>(sub_dn(v.lo(), tail), add_up(v.hi(), tail));
  }
};

// A power series presented by its first term and running term ratios.
// Invariants:
//   * t_n = first_term * prod_{j<n} ratio(j); a term that is exactly zero
//     implies every later term is zero (all streams in this library satisfy
//     this: zeros come from a vanished numerator factor that persists).
//   * rho_from(n), when set, is an upper bound on |ratio(m)| for EVERY
//     m >= n. This is the geometric-tail contract used by
//     sum_with_tail_bound; it is the caller's proof obligation.
//   * last_nonzero_term marks structural termination: terms with index
//     greater than it are identically zero.
template <class M>
struct TermStream {
  using Value = typename M::Value;
  using Scalar = typename M::Scalar;

  Value first_term = M::value_one();
  std::function<Value(long)> ratio;
  std::function<std::optional<Scalar>(long)> rho_from = [](long) { return std::nullopt; };
  std::optional<long> last_nonzero_term;
};

template <class M>
struct SeriesValue {
  using Scalar = typename M::Scalar;

  typename M::Value value;  // partial sum through the first terms_used terms
  long terms_used = 0;
  Scalar tail_bound = Scalar(0);  // proven bound on |true sum - value|

  // [value - tail, value + tail], widened by any carried rounding envelope.
  Box<Scalar> enclosure() const { return M::enclose(value, tail_bound); }
};

struct SumPolicy {
  Rational eps = rational_pow10(-30);
  long n_max = 500000;

  SumPolicy() = default;
  SumPolicy(Rational e, long n) : eps(std::move(e)), n_max(n) {}
};

// Sums the stream until the geometric tail bound |t_n| * rho / (1 - rho)
// drops to eps, or the series terminates (tail_bound 0). Throws
// NoGeometricBound if no rho < 1 was ever available, PrecisionExhausted if
// one was but the budget n_max ran out or arithmetic became non-finite.
template <class M>
SeriesValue<M> sum_with_tail_bound(const TermStream<M>& stream, const SumPolicy& pol) {
  using Scalar = typename M::Scalar;
  const Scalar one(1);
  const Scalar eps = M::scalar_lb(pol.eps);  // stricter than requested, never looser
  if (!(pol.eps > 0)) throw DomainError("sum_with_tail_bound requires eps > 0");
  if (pol.n_max < 1) throw DomainError("sum_with_tail_bound requires n_max >= 1");

  typename M::Value t = stream.first_term;
  typename M::Value sum = t;
  bool contract_seen = false;
  for (long n = 0;; ++n) {
    if (!M::finite(t) || !M::finite(sum))
      throw PrecisionExhausted("series summation produced a non-finite value");
    if (stream.last_nonzero_term && n >= *stream.last_nonzero_term)
      return {sum, n + 1, Scalar(0)};
    if (auto rho = stream.rho_from(n); rho && *rho < one) {
      contract_seen = true;
      const Scalar tb = div_up(mul_up(M::abs_ub(t), *rho), sub_dn(one, *rho));
      if (tb <= eps) return {sum, n + 1, tb};
    }
    if (n >= pol.n_max) {
      if (!contract_seen)
        throw NoGeometricBound("no term-ratio bound rho < 1 established within n_max terms");
      throw PrecisionExhausted("tail bound did not reach eps within n_max terms");
    }
    t = t * stream.ratio(n);
    if (M::exactly_zero(t)) return {sum, n + 1, Scalar(0)};
    sum = sum + t;
  }
}

// [t_0, t_0 + t_1, ..., sum_{k<=n} t_k], exact under the chosen mode.
template <class M>
std::vector<typename M::Value> partial_sums(const TermStream<M>& stream, long n) {
  if (n < 0) throw DomainError("partial_sums requires n >= 0");
  std::vector<typename M::Value> out;
  out.reserve(static_cast<size_t>(n) + 1);
  typename M::Value t = stream.first_term;
  typename M::Value sum = t;
  out.push_back(sum);
  for (long k = 0; k < n; ++k) {
    t = t * stream.ratio(k);
    sum = sum + t;
    out.push_back(sum);
  }
  return out;
}

}  // namespace qturan
