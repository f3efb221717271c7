#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qturan/qfunctions.hpp"
#include "qturan/series.hpp"

using namespace qturan;

namespace {

// Brute-force oracle: n-th term of the displayed q-Kummer series by direct
// q-Pochhammer products. Deliberately independent of the running-ratio
// engine under test.
Rational qpoch_oracle(const Rational& q, const Rational& arg, long n) {
  Rational acc(1), p(arg);
  for (long k = 0; k < n; ++k) {
    acc *= (1 - p);
    p *= q;
  }
  return acc;
}

Rational phi_term_oracle(const Rational& q, long a, long c, const Rational& x, long n) {
  const Rational num = qpoch_oracle(q, rational_ipow(q, a), n) * rational_ipow(Rational(1 - q), n);
  const Rational den = qpoch_oracle(q, rational_ipow(q, c), n) * qpoch_oracle(q, q, n);
  return Rational(num / den) * rational_ipow(x, n);
}

Rational phi_partial_oracle(const Rational& q, long a, long c, const Rational& x, long terms) {
  Rational s(0);
  for (long n = 0; n < terms; ++n) s += phi_term_oracle(q, a, c, x, n);
  return s;
}

template <class M>
TermStream<M> geometric_stream(const Rational& x) {
  TermStream<M> s;
  s.first_term = M::value_one();
  s.ratio = [x](long) { return M::value_from_rational(x); };
  s.rho_from = [x](long) -> std::optional<typename M::Scalar> {
    return M::scalar_ub(rational_abs(x));
  };
  return s;
}

}  // namespace

TEST_CASE("geometric stream at x = 0 returns the first term only") {
  const auto v = sum_with_tail_bound(geometric_stream<RationalMode>(Rational(0)), SumPolicy{});
  CHECK(v.value == 1);
  CHECK(v.terms_used == 1);
  CHECK(v.tail_bound == 0);
}

TEST_CASE("geometric stream sums to 2 within eps") {
  SumPolicy pol{rational_pow10(-12), 100000};
  const auto vr = sum_with_tail_bound(geometric_stream<RationalMode>(Rational(1, 2)), pol);
  CHECK(rational_abs(Rational(vr.value - 2)) <= rational_pow10(-12));
  CHECK(vr.tail_bound <= rational_pow10(-12));

  PrecisionScope scope(256);
  const auto vf = sum_with_tail_bound(geometric_stream<FloatMode>(Rational(1, 2)), pol);
  const auto encl = vf.enclosure();
  CHECK(encl.lo() <= BigFloat(2));
  CHECK(BigFloat(2) <= encl.hi());
  CHECK((encl.hi() - encl.lo()) <= BigFloat::from_rational(rational_pow10(-11), MPFR_RNDU));
}

TEST_CASE("partial sums of the geometric stream are exact") {
  const auto ps = partial_sums(geometric_stream<RationalMode>(Rational(1, 2)), 2);
  REQUIRE(ps.size() == 3);
  CHECK(ps[0] == 1);
  CHECK(ps[1] == Rational(3, 2));
  CHECK(ps[2] == Rational(7, 4));

  const auto single = partial_sums(geometric_stream<RationalMode>(Rational(1, 2)), 0);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 1);
}

TEST_CASE("phi stream partial sums match the direct ratio u1 = 2/3") {
  // q = 1/2, a = 1, c = 2: u_1/u_0 = (1-q^a)(1-q)/((1-q^c)(1-q)) = 2/3
  const Rational q(1, 2);
  const auto stream = make_phi_stream<RationalMode>(q, {Rational(1)}, {Rational(2)}, 0,
                                                    Rational(1 - q) * Rational(1));
  const auto ps = partial_sums(stream, 1);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0] == 1);
  CHECK(ps[1] == Rational(5, 3));
}

TEST_CASE("running-ratio terms reconstruct the direct term formula exactly") {
  const Rational q(2, 5), x(3, 7);
  const auto stream = make_phi_stream<RationalMode>(q, {Rational(2)}, {Rational(3)}, 0,
                                                    Rational(1 - q) * x);
  Rational t(1);
  for (long n = 0; n <= 25; ++n) {
    CHECK(t == phi_term_oracle(q, 2, 3, x, n));
    t *= stream.ratio(n);
  }
}

TEST_CASE("q-Kummer engine value sits within its tail bound of the long oracle") {
  const Rational q(1, 2), x(1, 2);
  const auto stream = make_phi_stream<RationalMode>(q, {Rational(1)}, {Rational(2)}, 0,
                                                    Rational(1 - q) * x);
  const auto v = sum_with_tail_bound(stream, SumPolicy{rational_pow10(-25), 100000});
  const Rational oracle = phi_partial_oracle(q, 1, 2, x, 60);
  // the 60-term oracle itself is within 1e-35 of the true sum
  CHECK(rational_abs(Rational(oracle - v.value)) <= v.tail_bound + rational_pow10(-35));
  CHECK(v.terms_used >= 1);
}

TEST_CASE("tail soundness: doubled-length rational sums stay inside the bound") {
  std::mt19937_64 rng(20240817u);
  std::uniform_int_distribution<long> qnum(1, 9), param(1, 5), xnum(-3, 3);
  for (int rep = 0; rep < 40; ++rep) {
    const Rational q(qnum(rng), 10);
    const long a = param(rng), c = param(rng);
    const Rational x(xnum(rng), 4);
    if ((1 - q) * rational_abs(x) >= 1) continue;
    const auto stream = make_phi_stream<RationalMode>(q, {Rational(a)}, {Rational(c)}, 0,
                                                      Rational(1 - q) * x);
    const auto v = sum_with_tail_bound(stream, SumPolicy{rational_pow10(-20), 100000});
    const auto ps = partial_sums(stream, 2 * v.terms_used);
    CHECK(rational_abs(Rational(ps.back() - v.value)) <= v.tail_bound);
  }
}

TEST_CASE("backend agreement: float-256 tracks exact rationals below 2^-200") {
  PrecisionScope scope(256);
  std::mt19937_64 rng(987654321u);
  std::uniform_int_distribution<long> qnum(1, 9), param(1, 6), xnum(-7, 7);
  Rational two_pow_200 = rational_ipow(Rational(2), 200);
  int checked = 0;
  for (int rep = 0; rep < 120 && checked < 100; ++rep) {
    const Rational q(qnum(rng), 10);
    const long a = param(rng), c = param(rng);
    const Rational x(xnum(rng), 5);
    const Rational z = Rational(1 - q) * x;
    const auto sr = make_phi_stream<RationalMode>(q, {Rational(a)}, {Rational(c)}, 0, z);
    const auto sf = make_phi_stream<FloatMode>(q, {Rational(a)}, {Rational(c)}, 0, z);
    const auto pr = partial_sums(sr, 100);
    const auto pf = partial_sums(sf, 100);
    const Rational exact = pr.back();
    if (exact == 0) continue;
    const FloatBox& box = pf.back();
    // |mid - exact| <= rad + |mid - exact from box|; use the enclosure directly
    const Rational lo = box.lo().to_rational_exact();
    const Rational hi = box.hi().to_rational_exact();
    CHECK(lo <= exact);
    CHECK(exact <= hi);
    const Rational err = std::max(rational_abs(Rational(exact - lo)), rational_abs(Rational(hi - exact)));
    CHECK(err * two_pow_200 <= rational_abs(exact));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("monotone refinement: tighter eps or larger budget never widens the tail") {
  const Rational q(1, 2), x(9, 10);
  const auto mk = [&] {
    return make_phi_stream<RationalMode>(q, {Rational(3)}, {Rational(2)}, 0, Rational(1 - q) * x);
  };
  const auto loose = sum_with_tail_bound(mk(), SumPolicy{rational_pow10(-10), 100000});
  const auto tight = sum_with_tail_bound(mk(), SumPolicy{rational_pow10(-20), 100000});
  CHECK(tight.tail_bound <= loose.tail_bound);
  const auto bigger_budget = sum_with_tail_bound(mk(), SumPolicy{rational_pow10(-10), 200000});
  CHECK(bigger_budget.tail_bound <= loose.tail_bound);
  CHECK(bigger_budget.terms_used == loose.terms_used);
}

TEST_CASE("summation errors are distinct") {
  TermStream<RationalMode> divergent;
  divergent.first_term = Rational(1);
  divergent.ratio = [](long) { return Rational(1); };
  divergent.rho_from = [](long) -> std::optional<Rational> { return std::nullopt; };
  CHECK_THROWS_AS(sum_with_tail_bound(divergent, SumPolicy{rational_pow10(-10), 50}),
                  NoGeometricBound);

  // a contract exists but the budget is too small for the requested eps
  const auto slow = geometric_stream<RationalMode>(Rational(99, 100));
  CHECK_THROWS_AS(sum_with_tail_bound(slow, SumPolicy{rational_pow10(-40), 10}),
                  PrecisionExhausted);
}

TEST_CASE("terminating numerator parameter stops the stream with zero tail") {
  // upper exponent -2: (q^{-2};q)_n vanishes for n >= 3
  const Rational q(1, 3);
  const auto stream = make_phi_stream<RationalMode>(q, {Rational(-2)}, {Rational(2)}, 0,
                                                    Rational(5));  // large argument, still finite
  const auto v = sum_with_tail_bound(stream, SumPolicy{});
  CHECK(v.tail_bound == 0);
  CHECK(v.terms_used == 3);
  const auto ps = partial_sums(stream, 10);
  CHECK(ps.back() == v.value);
}
