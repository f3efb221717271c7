#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qturan/report.hpp"
#include "qturan/verify.hpp"

using namespace qturan;

namespace {

Rational qpoch_oracle(const Rational& q, const Rational& arg, long n) {
  Rational acc(1), p(arg);
  for (long k = 0; k < n; ++k) {
    acc *= (1 - p);
    p *= q;
  }
  return acc;
}

// u_n(a, B, q) of the displayed q-Kummer series, by direct products.
Rational u_oracle(const Rational& q, long a, long B, long n) {
  const Rational num = qpoch_oracle(q, rational_ipow(q, a), n) * rational_ipow(Rational(1 - q), n);
  const Rational den = qpoch_oracle(q, rational_ipow(q, B), n) * qpoch_oracle(q, q, n);
  return Rational(num / den);
}

std::vector<Rational> convolve(const std::vector<Rational>& f, const std::vector<Rational>& g) {
  std::vector<Rational> out(f.size(), Rational(0));
  for (size_t m = 0; m < f.size(); ++m)
    for (size_t k = 0; k <= m; ++k) out[m] += f[k] * g[m - k];
  return out;
}

}  // namespace

TEST_CASE("coefficient table basics") {
  const auto p = QRatioParams::scalar(Rational(3), Rational(2), Rational(1));
  const auto t = build_coefficient_table<RationalMode>(Rational(1, 2), p, 20);
  CHECK(t.C[0] == 1);
  for (long n = 0; n < 20; ++n)
    CHECK(t.C[static_cast<size_t>(n) + 1] >= t.C[static_cast<size_t>(n)]);
}

TEST_CASE("coefficient table with c = 0 is identically one") {
  const auto p = QRatioParams::scalar(Rational(4), Rational(3), Rational(0));
  const auto t = build_coefficient_table<RationalMode>(Rational(2, 5), p, 10);
  for (size_t n = 0; n < t.A.size(); ++n) {
    CHECK(t.A[n] == t.B[n]);
    CHECK(t.C[n] == 1);
  }
}

TEST_CASE("Cauchy products agree with direct polynomial multiplication") {
  const Rational q(1, 2);
  const long a = 3, b = 2, c = 1, n_max = 30;
  const auto p = QRatioParams::scalar(Rational(a), Rational(b), Rational(c));
  const auto t = build_coefficient_table<RationalMode>(q, p, n_max);
  std::vector<Rational> u1, u2, ud;
  for (long n = 0; n <= n_max; ++n) {
    u1.push_back(u_oracle(q, a, b - c, n));
    u2.push_back(u_oracle(q, a, b + c, n));
    ud.push_back(u_oracle(q, a, b, n));
  }
  const auto A = convolve(u1, u2);
  const auto B = convolve(ud, ud);
  for (size_t n = 0; n < A.size(); ++n) {
    CHECK(t.A[n] == A[n]);
    CHECK(t.B[n] == B[n]);
  }
}

TEST_CASE("inner ratio witness: spot value 31/20") {
  // q = 1/2, b = 2, c = 1, n = 3, k = 0:
  // (1-q^{b+k})/(1-q^{b-c+k}) * (1-q^{b+c+n-k-1})/(1-q^{b+n-k-1})
  //   = (1-1/4)/(1-1/2) * (1-1/32)/(1-1/16) = (3/2)(31/30) = 31/20
  const auto p = QRatioParams::scalar(Rational(3), Rational(2), Rational(1));
  const auto w = check_inner_ratio<RationalMode>(Rational(1, 2), p, 3, 0);
  CHECK(w.closed_form == Rational(31, 20));
  CHECK(w.value == Rational(31, 20));
  CHECK(w.value >= 1);
}

TEST_CASE("inner ratio witness: c = 0 gives exactly 1") {
  const auto p = QRatioParams::scalar(Rational(3), Rational(2), Rational(0));
  const auto w = check_inner_ratio<RationalMode>(Rational(1, 2), p, 5, 2);
  CHECK(w.value == 1);
  CHECK(w.closed_form == 1);
}

TEST_CASE("closed form equals the direct quotient exactly for n <= 15") {
  const std::vector<std::array<long, 3>> points = {{3, 2, 1}, {5, 3, 2}, {6, 4, 1}};
  for (const Rational& q : {Rational(1, 2), Rational(3, 10)}) {
    for (const auto& [a, b, c] : points) {
      const auto p = QRatioParams::scalar(Rational(a), Rational(b), Rational(c));
      for (long n = 1; n <= 15; ++n) {
        for (long k = 0; k < n; ++k) {
          const auto w = check_inner_ratio<RationalMode>(q, p, n, k);
          REQUIRE(w.value == w.closed_form);
          REQUIRE(w.value >= 1);
        }
      }
    }
  }
}

TEST_CASE("inner ratios for h_r: corrected reading matches, displayed reading does not") {
  QRatioParams p;
  p.a = {Rational(2), Rational(3), Rational(4)};
  p.b = {Rational(2), Rational(3)};
  p.c = {Rational(1), Rational(1)};
  const Rational q(1, 2);
  bool display_differs_somewhere = false;
  for (long n = 2; n <= 8; ++n) {
    for (long k = 0; k < n; ++k) {
      const auto w = check_inner_ratio<RationalMode>(q, p, n, k);
      REQUIRE(w.value == w.closed_form);
      REQUIRE(w.value >= 1);
      try {
        const Rational displayed = inner_ratio_display_form<RationalMode>(q, p, n, k);
        if (displayed != w.value) display_differs_somewhere = true;
        if (k == 0) CHECK(displayed == w.value);  // the two readings coincide at k = 0
      } catch (const PoleParameter&) {
        // the printed reading even divides by 1-q^0 at k = b_j - c_j
        display_differs_somewhere = true;
      }
    }
  }
  CHECK(display_differs_somewhere);
}

TEST_CASE("inner ratio rejects out-of-range indices") {
  const auto p = QRatioParams::scalar(Rational(3), Rational(2), Rational(1));
  CHECK_THROWS_AS(check_inner_ratio<RationalMode>(Rational(1, 2), p, 3, 3), BadIndex);
  CHECK_THROWS_AS(check_inner_ratio<RationalMode>(Rational(1, 2), p, 3, -1), BadIndex);
}

TEST_CASE("Cesaro-quotient lemma checks") {
  // constant quotient
  const std::vector<Rational> ones(5, Rational(1));
  CHECK(check_lemma_cesaro(ones, ones));

  // a_n/b_n = n with b_n = 1: partial quotients 0, 1/2, 1, 3/2, ...
  std::vector<Rational> a, b;
  for (long n = 0; n < 6; ++n) {
    a.emplace_back(n);
    b.emplace_back(1);
  }
  CHECK(check_lemma_cesaro(a, b));

  // a Theorem-3.1 coefficient table's (A, B)
  const auto p = QRatioParams::scalar(Rational(3), Rational(2), Rational(1));
  const auto t = build_coefficient_table<RationalMode>(Rational(1, 2), p, 15);
  CHECK(check_lemma_cesaro(t.A, t.B));

  // misuse is flagged
  std::vector<Rational> bad_b = {Rational(1), Rational(-1)};
  std::vector<Rational> any = {Rational(1), Rational(1)};
  CHECK_THROWS_AS(check_lemma_cesaro(any, bad_b), HypothesisViolation);
  std::vector<Rational> wobble = {Rational(0), Rational(2), Rational(1)};
  std::vector<Rational> unit = {Rational(1), Rational(1), Rational(1)};
  CHECK_THROWS_AS(check_lemma_cesaro(wobble, unit), HypothesisViolation);
}

TEST_CASE("verify_monotone on a constant ratio reports margin zero") {
  PrecisionScope scope(256);
  const RatioFn<FloatMode> constant = [](const Rational& x) {
    return q_ratio_h<FloatMode>(Rational(1, 2), Rational(3), Rational(2), Rational(0), x);
  };
  const auto grid = make_geometric_grid(Rational(19, 10), 10);
  const auto rep = verify_monotone<FloatMode>(constant, grid, TolPolicy{},
                                              {Target::MonotoneH, {{"case", "constant"}}});
  CHECK(rep.outcome.kind == OutcomeKind::Verified);
  CHECK(rep.margin == "0");
}

TEST_CASE("verify_monotone confirms Theorem 3.1 on the provable x-range") {
  PrecisionScope scope(256);
  const RatioFn<FloatMode> fn = [](const Rational& x) {
    return q_ratio_h<FloatMode>(Rational(1, 2), Rational(3), Rational(2), Rational(1), x);
  };
  const auto grid = make_geometric_grid(Rational(19, 10), 50);
  const auto rep =
      verify_monotone<FloatMode>(fn, grid, TolPolicy{}, {Target::MonotoneH, {}});
  CHECK(rep.outcome.kind == OutcomeKind::Verified);
}

TEST_CASE("verify_monotone confirms Conjecture-1 monotonicity for f_n") {
  PrecisionScope scope(256);
  for (long n : {1L, 5L}) {
    const RatioFn<FloatMode> fn = [n](const Rational& x) { return f_ratio<FloatMode>(n, x); };
    const auto grid = make_geometric_grid(Rational(50), 25);
    const auto rep = verify_monotone<FloatMode>(fn, grid, TolPolicy{}, {Target::MonotoneF, {}});
    CHECK(rep.outcome.kind == OutcomeKind::Verified);
  }
}

TEST_CASE("verify_turan on the single point x = 0 verifies with margin zero") {
  PrecisionScope scope(256);
  const RatioFn<FloatMode> fn = [](const Rational& x) {
    return q_ratio_h<FloatMode>(Rational(1, 2), Rational(3), Rational(2), Rational(1), x);
  };
  const auto rep = verify_turan<FloatMode>(fn, {Rational(0)}, TolPolicy{},
                                           {Target::TuranQKummer, {}});
  CHECK(rep.outcome.kind == OutcomeKind::Verified);
  CHECK(rep.margin == "0");
}

TEST_CASE("run_job records a genuine violation at a hypothesis-breaking point") {
  SweepJob job;
  job.target = Target::TuranQKummer;
  job.q = Rational(1, 2);
  job.params = QRatioParams::scalar(Rational(3), Rational(1), Rational(3, 2));
  job.grid = make_geometric_grid(Rational(19, 10), 20);
  job.exploratory = true;
  const auto rep = run_job(job);
  CHECK(rep.outcome.kind == OutcomeKind::ViolatedAt);

  job.exploratory = false;
  CHECK_THROWS_AS(run_job(job), DomainError);
}

TEST_CASE("hypothesis chain: inner ratios >= 1, C_n nondecreasing, h monotone") {
  PrecisionScope scope(256);
  std::mt19937_64 rng(31337u);
  std::uniform_int_distribution<long> cgen(1, 3), bplus(1, 2), aplus(1, 2), qn(1, 9);
  for (int rep = 0; rep < 6; ++rep) {
    const Rational q(qn(rng), 10);
    const long c = cgen(rng);
    const long b = c + bplus(rng);
    const long a = b + aplus(rng);
    const auto p = QRatioParams::scalar(Rational(a), Rational(b), Rational(c));

    bool inner_ok = true;
    for (long n = 1; n <= 8 && inner_ok; ++n)
      for (long k = 0; k < n && inner_ok; ++k)
        inner_ok = check_inner_ratio<RationalMode>(q, p, n, k).value >= 1;
    REQUIRE(inner_ok);

    const auto t = build_coefficient_table<RationalMode>(q, p, 16);
    for (size_t n = 0; n + 1 < t.C.size(); ++n) REQUIRE(t.C[n + 1] >= t.C[n]);

    const RatioFn<FloatMode> fn = [&](const Rational& x) {
      return q_ratio_h<FloatMode>(q, p, x);
    };
    const auto grid = make_geometric_grid(Rational(Rational(19, 20) / (1 - q)), 12);
    const auto rep2 = verify_monotone<FloatMode>(fn, grid, TolPolicy{}, {Target::MonotoneH, {}});
    REQUIRE(rep2.outcome.kind == OutcomeKind::Verified);
  }
}

TEST_CASE("coefficient_monotone_report verifies theorem parameters exactly") {
  const auto p = QRatioParams::scalar(Rational(4), Rational(3), Rational(2));
  const auto rep = coefficient_monotone_report(Rational(7, 10), p, 30, 15,
                                               {Target::CoefficientMonotone, {}});
  CHECK(rep.outcome.kind == OutcomeKind::Verified);
  CHECK(rational_from_string(rep.margin) >= 0);
}

TEST_CASE("sweep basics: empty, singleton, parallel determinism") {
  CHECK(sweep({}).empty());

  std::vector<SweepJob> jobs;
  for (const Rational& q : {Rational(1, 10), Rational(1, 2), Rational(9, 10)}) {
    SweepJob job;
    job.target = Target::TuranQKummer;
    job.q = q;
    job.params = QRatioParams::scalar(Rational(3), Rational(2), Rational(1));
    job.grid = make_geometric_grid(Rational(Rational(19, 20) / (1 - q)), 12);
    jobs.push_back(job);
  }

  const auto single = sweep({jobs[0]});
  REQUIRE(single.size() == 1);
  CHECK(report_to_json_line(single[0]) == report_to_json_line(run_job(jobs[0])));

  const auto seq = sweep(jobs, /*parallel=*/false);
  const auto par = sweep(jobs, /*parallel=*/true);
  REQUIRE(seq.size() == par.size());
  for (size_t i = 0; i < seq.size(); ++i)
    CHECK(report_to_json_line(seq[i]) == report_to_json_line(par[i]));
  for (const auto& r : seq) CHECK(r.outcome.kind == OutcomeKind::Verified);
}

TEST_CASE("sweep folds per-point failures into inconclusive reports") {
  SweepJob job;
  job.target = Target::TuranQKummer;
  job.q = Rational(1, 2);
  job.params = QRatioParams::scalar(Rational(2), Rational(3), Rational(1));  // a < b
  job.grid = {Rational(0)};
  const auto reps = sweep({job});
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].outcome.kind == OutcomeKind::Inconclusive);
}

TEST_CASE("limit ladder gaps decrease strictly toward the classical value") {
  PrecisionScope scope(256);
  const auto res = limit_ladder({Rational(9, 10), Rational(99, 100), Rational(999, 1000)},
                                Rational(1), Rational(2), Rational(1));
  REQUIRE(res.rows.size() == 3);
  CHECK(res.gaps_strictly_decreasing);
  CHECK(res.rows.back().gap.hi() < scalar_cast_dn<BigFloat>(rational_pow10(-2)));

  // single-element ladder is trivially nonincreasing
  const auto single = limit_ladder({Rational(1, 2)}, Rational(1), Rational(2), Rational(1));
  CHECK(single.gaps_nonincreasing);
}

TEST_CASE("report determinism: identical inputs give byte-identical serialization") {
  SweepJob job;
  job.target = Target::TuranQKummer;
  job.q = Rational(3, 10);
  job.params = QRatioParams::scalar(Rational(4), Rational(2), Rational(1));
  job.grid = make_geometric_grid(Rational(Rational(19, 20) / Rational(7, 10)), 15);
  const auto a = run_job(job);
  const auto b = run_job(job);
  CHECK(report_to_json_line(a) == report_to_json_line(b));
}
