// The coefficient machinery behind the monotonicity proofs: Cauchy-product
// tables A_n, B_n, C_n = A_n/B_n, the inner-ratio witnesses A_{n,k+1}/A_{n,k}
// (and their r-parameter generalization W), and the Cesaro-quotient lemma as
// an executable check.
#pragma once

#include <vector>

#include "qturan/qfunctions.hpp"

namespace qturan {

template <class M>
struct CoefficientTable {
  long n_max = 0;
  std::vector<typename M::Value> u_num1;  // coefficients of the b-c series
  std::vector<typename M::Value> u_num2;  // coefficients of the b+c series
  std::vector<typename M::Value> u_den;   // coefficients of the b series
  std::vector<typename M::Value> A;       // Cauchy product of the numerators
  std::vector<typename M::Value> B;       // Cauchy square of the denominator
  std::vector<typename M::Value> C;       // A_n / B_n
};

namespace detail {

template <class M>
std::vector<typename M::Value> stream_coefficients(const TermStream<M>& s, long n_max) {
  std::vector<typename M::Value> u;
  u.reserve(static_cast<size_t>(n_max) + 1);
  typename M::Value t = s.first_term;
  u.push_back(t);
  for (long k = 0; k < n_max; ++k) {
    t = t * s.ratio(k);
    u.push_back(t);
  }
  return u;
}

// Coefficient sequence u_n of the series underlying one phi factor of the
// ratio: for the scalar h family this is u_n(a, B, q) with the (1-q)^n
// factor; for the h_r family it is the (r+1)Phi_r coefficient.
template <class M>
std::vector<typename M::Value> ratio_factor_coefficients(const Rational& q, const QRatioParams& p,
                                                         const std::vector<Rational>& lower,
                                                         long n_max) {
  const Rational z = p.is_scalar() ? Rational(1 - q) : Rational(1);
  return stream_coefficients(make_phi_stream<M>(q, p.a, lower, 0, z), n_max);
}

template <class M>
std::vector<typename M::Value> cauchy_product(const std::vector<typename M::Value>& f,
                                              const std::vector<typename M::Value>& g) {
  const size_t n = f.size();
  std::vector<typename M::Value> out;
  out.reserve(n);
  for (size_t m = 0; m < n; ++m) {
    typename M::Value acc = f[0] * g[m];
    for (size_t k = 1; k <= m; ++k) acc = acc + f[k] * g[m - k];
    out.push_back(acc);
  }
  return out;
}

template <class M>
bool value_positive(const typename M::Value& v) {
  if constexpr (M::exact) {
    return v > 0;
  } else {
    return v.strictly_positive();
  }
}

}  // namespace detail

template <class M>
CoefficientTable<M> build_coefficient_table(const Rational& q, const QRatioParams& p, long n_max) {
  if (!(q > 0 && q < 1)) throw DomainError("q must lie strictly inside (0,1)");
  if (n_max < 2) throw DomainError("build_coefficient_table requires n_max >= 2");
  const size_t r = p.b.size();
  if (p.c.size() != r || r == 0 || p.a.size() != (p.is_scalar() ? 1 : r + 1))
    throw DomainError("parameter vectors must describe either h (scalars) or h_r");
  std::vector<Rational> lo_minus, lo_plus;
  for (size_t i = 0; i < r; ++i) {
    lo_minus.push_back(p.b[i] - p.c[i]);
    lo_plus.push_back(p.b[i] + p.c[i]);
  }
  CoefficientTable<M> t;
  t.n_max = n_max;
  t.u_num1 = detail::ratio_factor_coefficients<M>(q, p, lo_minus, n_max);
  t.u_num2 = detail::ratio_factor_coefficients<M>(q, p, lo_plus, n_max);
  t.u_den = detail::ratio_factor_coefficients<M>(q, p, p.b, n_max);
  t.A = detail::cauchy_product<M>(t.u_num1, t.u_num2);
  t.B = detail::cauchy_product<M>(t.u_den, t.u_den);
  t.C.reserve(t.A.size());
  for (size_t n = 0; n < t.A.size(); ++n) {
    if (!detail::value_positive<M>(t.B[n]))
      throw HypothesisViolation("denominator Cauchy coefficient B_" + std::to_string(n) +
                                " is not (certainly) positive");
    t.C.push_back(t.A[n] / t.B[n]);
  }
  return t;
}

template <class M>
struct InnerRatioWitness {
  long n = 0;
  long k = 0;
  typename M::Value value;        // direct quotient A_{n,k+1}/A_{n,k} from the u's
  typename M::Value closed_form;  // the factored product of 1-q^e terms
};

namespace detail {

// prod_j [(1-q^{b_j+k})/(1-q^{b_j-c_j+shifted k})] *
//        [(1-q^{b_j+c_j+n-k-1})/(1-q^{b_j+n-k-1})]
// with shifted k = +k for the corrected reading, -k for the reading printed
// in the r-parameter display.
template <class M>
typename M::Value inner_ratio_product(const Rational& q, const QRatioParams& p, long n, long k,
                                      bool displayed_minus_k) {
  using V = typename M::Value;
  const V qv = M::value_from_rational(q);
  const V one = M::value_one();
  V acc = one;
  for (size_t j = 0; j < p.b.size(); ++j) {
    const Rational& b = p.b[j];
    const Rational& c = p.c[j];
    const Rational e1 = b + k;
    const Rational e2 = displayed_minus_k ? Rational(b - c - k) : Rational(b - c + k);
    const Rational e3 = b + c + n - k - 1;
    const Rational e4 = b + n - k - 1;
    for (const Rational& e : {e2, e4})
      if (e == 0)
        throw PoleParameter("inner-ratio factor 1-q^0 vanishes (exponent " + e.get_str() + ")");
    acc = acc * ((one - mode_qpow<M>(qv, e1)) / (one - mode_qpow<M>(qv, e2)));
    acc = acc * ((one - mode_qpow<M>(qv, e3)) / (one - mode_qpow<M>(qv, e4)));
  }
  return acc;
}

}  // namespace detail

// The checkable core of the proofs: the closed-form factored ratio must
// equal the direct quotient of the Cauchy summands exactly.
template <class M>
InnerRatioWitness<M> check_inner_ratio(const Rational& q, const QRatioParams& p, long n, long k) {
  if (!(n >= 1)) throw BadIndex("check_inner_ratio requires n >= 1");
  if (!(k >= 0 && k < n)) throw BadIndex("check_inner_ratio requires 0 <= k < n");
  const size_t r = p.b.size();
  std::vector<Rational> lo_minus, lo_plus;
  for (size_t i = 0; i < r; ++i) {
    lo_minus.push_back(p.b[i] - p.c[i]);
    lo_plus.push_back(p.b[i] + p.c[i]);
  }
  const auto u1 = detail::ratio_factor_coefficients<M>(q, p, lo_minus, n);
  const auto u2 = detail::ratio_factor_coefficients<M>(q, p, lo_plus, n);
  const auto ud = detail::ratio_factor_coefficients<M>(q, p, p.b, n);
  const auto at = [&](const std::vector<typename M::Value>& u, long i) { return u[static_cast<size_t>(i)]; };
  // A_{n,k} = u1_k u2_{n-k} / (ud_k ud_{n-k})
  const typename M::Value num = (at(u1, k + 1) * at(u2, n - k - 1)) * (at(ud, k) * at(ud, n - k));
  const typename M::Value den = (at(u1, k) * at(u2, n - k)) * (at(ud, k + 1) * at(ud, n - k - 1));
  InnerRatioWitness<M> w;
  w.n = n;
  w.k = k;
  w.value = num / den;
  w.closed_form = detail::inner_ratio_product<M>(q, p, n, k, /*displayed_minus_k=*/false);
  return w;
}

// The r-parameter display prints the first denominator exponent as
// b_j - c_j - k; this evaluates that reading so callers can compare it
// against the direct quotient.
template <class M>
typename M::Value inner_ratio_display_form(const Rational& q, const QRatioParams& p, long n,
                                           long k) {
  if (!(k >= 0 && k < n)) throw BadIndex("inner_ratio_display_form requires 0 <= k < n");
  return detail::inner_ratio_product<M>(q, p, n, k, /*displayed_minus_k=*/true);
}

// Lemma: if b_k > 0 and a_k/b_k is monotone, the partial-sum quotients
// (a_0+..+a_n)/(b_0+..+b_n) are monotone in the same direction. Returns
// whether the conclusion holds for the given finite sequences.
template <class T>
bool check_lemma_cesaro(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size() || a.empty())
    throw HypothesisViolation("check_lemma_cesaro requires equally sized, nonempty sequences");
  for (const T& bk : b)
    if (!(bk > T(0))) throw HypothesisViolation("check_lemma_cesaro requires b_k > 0");
  bool nondecreasing = true, nonincreasing = true;
  for (size_t k = 0; k + 1 < a.size(); ++k) {
    // a_{k+1}/b_{k+1} vs a_k/b_k by cross-multiplication (b > 0)
    const T lhs = a[k + 1] * b[k];
    const T rhs = a[k] * b[k + 1];
    if (lhs < rhs) nondecreasing = false;
    if (lhs > rhs) nonincreasing = false;
  }
  if (!nondecreasing && !nonincreasing)
    throw HypothesisViolation("check_lemma_cesaro requires a_k/b_k monotone");
  T sa = a[0], sb = b[0];
  bool q_nondecreasing = true, q_nonincreasing = true;
  for (size_t k = 1; k < a.size(); ++k) {
    const T sa_next = sa + a[k];
    const T sb_next = sb + b[k];
    const T lhs = sa_next * sb;
    const T rhs = sa * sb_next;
    if (lhs < rhs) q_nondecreasing = false;
    if (lhs > rhs) q_nonincreasing = false;
    sa = sa_next;
    sb = sb_next;
  }
  if (nondecreasing && q_nondecreasing) return true;
  if (nonincreasing && q_nonincreasing) return true;
  return false;
}

}  // namespace qturan
