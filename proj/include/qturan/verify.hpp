// Grid-based verification of the Turan inequalities and monotonicity
// statements, with certified enclosures; structured reports; parameter
// sweeps; and the q -> 1 limit ladder.
#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <utility>

#include "qturan/classical.hpp"
#include "qturan/coefficients.hpp"

namespace qturan {

enum class Target {
  TuranQKummer,
  TuranQHyper,
  MonotoneH,
  MonotoneHr,
  MonotoneF,
  CoefficientMonotone,
  ClassicalBounds,
};

inline const char* target_name(Target t) {
  switch (t) {
    case Target::TuranQKummer: return "turan-qkummer";
    case Target::TuranQHyper: return "turan-qhyper";
    case Target::MonotoneH: return "monotone-h";
    case Target::MonotoneHr: return "monotone-hr";
    case Target::MonotoneF: return "monotone-f";
    case Target::CoefficientMonotone: return "coeff-monotone";
    case Target::ClassicalBounds: return "classical-bounds";
  }
  throw DomainError("unknown verification target");
}

inline Target target_from_name(const std::string& s) {
  for (Target t : {Target::TuranQKummer, Target::TuranQHyper, Target::MonotoneH,
                   Target::MonotoneHr, Target::MonotoneF, Target::CoefficientMonotone,
                   Target::ClassicalBounds})
    if (s == target_name(t)) return t;
  throw DomainError("unknown verification target: '" + s + "'");
}

enum class OutcomeKind { Verified, ViolatedAt, Inconclusive };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Inconclusive;
  std::string at;      // grid point or (n,k) index for ViolatedAt
  std::string reason;  // for Inconclusive

  static Outcome verified() { return {OutcomeKind::Verified, "", ""}; }
  static Outcome violated_at(std::string where) { return {OutcomeKind::ViolatedAt, std::move(where), ""}; }
  static Outcome inconclusive(std::string why) { return {OutcomeKind::Inconclusive, "", std::move(why)}; }
};

struct TolPolicy {
  Rational tol = rational_pow10(-20);  // slack on inequality thresholds
  SumPolicy sum{};                     // per-series eps and term budget
  unsigned precision_bits = 256;
};

using ParamList = std::vector<std::pair<std::string, std::string>>;

struct VerificationReport {
  Target target = Target::TuranQKummer;
  ParamList params;
  std::vector<std::string> grid;  // x values as exact rational literals
  Outcome outcome;
  std::string margin;  // minimum certified slack over all grid assertions
  std::string tol, eps;
  unsigned precision_bits = 0;
  long terms_used_max = 0;
};

struct ReportMeta {
  Target target;
  ParamList params;
};

// ---------------------------------------------------------------------------
// Grids. Geometric grids are materialized as 12-digit decimal literals
// (round-toward-zero, so a cap is never exceeded), which keeps reports exact
// and byte-stable.
// ---------------------------------------------------------------------------

inline std::vector<Rational> make_geometric_grid(const Rational& cap, int count,
                                                 int decades = 6) {
  if (!(cap > 0)) throw DomainError("geometric grid requires cap > 0");
  if (count < 1) throw DomainError("grid requires count >= 1");
  std::vector<Rational> g;
  g.push_back(Rational(0));
  if (count == 1) return g;
  PrecisionScope scope(64);
  const BigFloat capf = BigFloat::from_rational(cap, MPFR_RNDD);
  for (int i = 1; i <= count - 1; ++i) {
    if (i == count - 1) {
      g.push_back(cap);
      break;
    }
    // cap * 10^(-decades * (count-1-i) / (count-2))
    const double expo = -static_cast<double>(decades) * (count - 1 - i) / (count - 2);
    const BigFloat factor =
        BigFloat::pow(BigFloat(10), BigFloat::from_rational(rational_from_string(
                                        std::to_string(expo)), MPFR_RNDN),
                      MPFR_RNDN);
    const BigFloat x = BigFloat::mul(capf, factor, MPFR_RNDZ);
    g.push_back(rational_from_string(x.to_string(12, MPFR_RNDZ)));
  }
  return g;
}

inline std::vector<Rational> make_linear_grid(const Rational& lo, const Rational& hi, int count) {
  if (count < 1) throw DomainError("grid requires count >= 1");
  if (count == 1) return {lo};
  if (!(hi >= lo)) throw DomainError("linear grid requires hi >= lo");
  std::vector<Rational> g;
  const Rational step = Rational(hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) g.push_back(Rational(lo + step * i));
  return g;
}

// ---------------------------------------------------------------------------
// Core checkers. A ratio-function handle maps a grid point to a certified
// enclosure.
// ---------------------------------------------------------------------------

template <class M>
using RatioFn = std::function<RatioValue<M>(const Rational& x)>;

namespace detail {

template <class M>
struct GridEval {
  std::vector<Box<typename M::Scalar>> values;
  long terms_used_max = 0;
  std::optional<std::string> failure;  // reason, if any point failed
};

template <class M>
GridEval<M> evaluate_grid(const RatioFn<M>& fn, const std::vector<Rational>& grid) {
  GridEval<M> out;
  out.values.reserve(grid.size());
  for (const Rational& x : grid) {
    try {
      RatioValue<M> v = fn(x);
      out.terms_used_max = std::max(out.terms_used_max, v.terms_used_max);
      out.values.push_back(std::move(v.enclosure));
    } catch (const Error& e) {
      out.failure = "evaluation failed at x = " + x.get_str() + ": " + e.what();
      return out;
    }
  }
  return out;
}

template <class M>
VerificationReport make_report_shell(const ReportMeta& meta, const std::vector<Rational>& grid,
                                     const TolPolicy& tp) {
  VerificationReport r;
  r.target = meta.target;
  r.params = meta.params;
  r.grid.reserve(grid.size());
  for (const Rational& x : grid) r.grid.push_back(x.get_str());
  r.tol = tp.tol.get_str();
  r.eps = tp.sum.eps.get_str();
  r.precision_bits = M::exact ? 0 : tp.precision_bits;
  return r;
}

}  // namespace detail

// Verified iff the certified lower bound of fn(x) stays >= 1 - tol at every
// grid point; a certified upper bound below 1 - tol is a definite violation.
template <class M>
VerificationReport verify_turan(const RatioFn<M>& fn, const std::vector<Rational>& grid,
                                const TolPolicy& tp, const ReportMeta& meta) {
  using S = typename M::Scalar;
  VerificationReport rep = detail::make_report_shell<M>(meta, grid, tp);
  if (grid.empty()) {
    rep.outcome = Outcome::verified();
    rep.margin = "0";
    return rep;
  }
  const auto ev = detail::evaluate_grid<M>(fn, grid);
  rep.terms_used_max = ev.terms_used_max;
  if (ev.failure) {
    rep.outcome = Outcome::inconclusive(*ev.failure);
    return rep;
  }
  const S one(1);
  const S tol = M::scalar_lb(tp.tol);
  const S neg_tol = S(0) - tol;
  std::optional<S> min_slack;
  std::optional<size_t> definite;
  for (size_t i = 0; i < ev.values.size(); ++i) {
    const S slack = sub_dn(ev.values[i].lo(), one);
    if (!min_slack || slack < *min_slack) min_slack = slack;
    if (!definite && sub_up(ev.values[i].hi(), one) < neg_tol) definite = i;
  }
  rep.margin = scalar_to_string(*min_slack);
  if (definite) {
    rep.outcome = Outcome::violated_at(grid[*definite].get_str());
  } else if (*min_slack >= neg_tol) {
    rep.outcome = Outcome::verified();
  } else {
    rep.outcome = Outcome::inconclusive("enclosure overlaps the Turan threshold; tighten eps");
  }
  return rep;
}

// Verified iff every consecutive grid difference fn(x_{i+1}) - fn(x_i) has a
// certified lower bound >= -tol.
template <class M>
VerificationReport verify_monotone(const RatioFn<M>& fn, const std::vector<Rational>& grid,
                                   const TolPolicy& tp, const ReportMeta& meta) {
  using S = typename M::Scalar;
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw DomainError("monotonicity grid must be strictly increasing");
  VerificationReport rep = detail::make_report_shell<M>(meta, grid, tp);
  if (grid.size() < 2) {
    rep.outcome = Outcome::verified();
    rep.margin = "0";
    return rep;
  }
  const auto ev = detail::evaluate_grid<M>(fn, grid);
  rep.terms_used_max = ev.terms_used_max;
  if (ev.failure) {
    rep.outcome = Outcome::inconclusive(*ev.failure);
    return rep;
  }
  const S tol = M::scalar_lb(tp.tol);
  const S neg_tol = S(0) - tol;
  std::optional<S> min_slack;
  std::optional<size_t> definite;
  for (size_t i = 0; i + 1 < ev.values.size(); ++i) {
    const auto diff = ev.values[i + 1] - ev.values[i];
    if (!min_slack || diff.lo() < *min_slack) min_slack = diff.lo();
    if (!definite && diff.hi() < neg_tol) definite = i;
  }
  rep.margin = scalar_to_string(*min_slack);
  if (definite) {
    rep.outcome = Outcome::violated_at(grid[*definite].get_str() + " -> " +
                                       grid[*definite + 1].get_str());
  } else if (*min_slack >= neg_tol) {
    rep.outcome = Outcome::verified();
  } else {
    rep.outcome = Outcome::inconclusive("difference enclosure overlaps zero; tighten eps");
  }
  return rep;
}

// The classical bounds chain (n+1)/(n+2) <= f_n(x) < 1 over a grid.
template <class M>
VerificationReport verify_bounds_f(long n, const std::vector<Rational>& grid, const TolPolicy& tp,
                                   const ReportMeta& meta) {
  using S = typename M::Scalar;
  VerificationReport rep = detail::make_report_shell<M>(meta, grid, tp);
  const RatioFn<M> fn = [n, &tp](const Rational& x) { return f_ratio<M>(n, x, tp.sum); };
  if (grid.empty()) {
    rep.outcome = Outcome::verified();
    rep.margin = "0";
    return rep;
  }
  const auto ev = detail::evaluate_grid<M>(fn, grid);
  rep.terms_used_max = ev.terms_used_max;
  if (ev.failure) {
    rep.outcome = Outcome::inconclusive(*ev.failure);
    return rep;
  }
  const S lower = M::scalar_lb(Rational(Rational(n + 1) / Rational(n + 2)));
  const S one(1);
  const S tol = M::scalar_lb(tp.tol);
  const S neg_tol = S(0) - tol;
  std::optional<S> min_slack;
  std::optional<size_t> definite;
  for (size_t i = 0; i < ev.values.size(); ++i) {
    const S s_lo = sub_dn(ev.values[i].lo(), lower);
    const S s_hi = sub_dn(one, ev.values[i].hi());
    const S slack = s_lo < s_hi ? s_lo : s_hi;
    if (!min_slack || slack < *min_slack) min_slack = slack;
    const bool below_lower = sub_up(ev.values[i].hi(), lower) < neg_tol;
    const bool at_or_above_one = sub_up(one, ev.values[i].lo()) < neg_tol;
    if (!definite && (below_lower || at_or_above_one)) definite = i;
  }
  rep.margin = scalar_to_string(*min_slack);
  if (definite) {
    rep.outcome = Outcome::violated_at(grid[*definite].get_str());
  } else if (*min_slack >= neg_tol) {
    rep.outcome = Outcome::verified();
  } else {
    rep.outcome = Outcome::inconclusive("bounds enclosure overlaps a threshold; tighten eps");
  }
  return rep;
}

// Exact coefficient-level verification: inner ratios >= 1 (n <= n_inner) and
// C_n nondecreasing (n <= n_max), both in exact arithmetic.
inline VerificationReport coefficient_monotone_report(const Rational& q, const QRatioParams& p,
                                                      long n_max, long n_inner,
                                                      const ReportMeta& meta) {
  VerificationReport rep;
  rep.target = meta.target;
  rep.params = meta.params;
  rep.tol = "0";
  rep.eps = "0";
  rep.precision_bits = 0;
  try {
    const auto table = build_coefficient_table<RationalMode>(q, p, n_max);
    std::optional<Rational> min_slack;
    for (long n = 0; n + 1 <= table.n_max; ++n) {
      const Rational d = table.C[static_cast<size_t>(n) + 1] - table.C[static_cast<size_t>(n)];
      if (!min_slack || d < *min_slack) min_slack = d;
      if (d < 0) {
        rep.outcome = Outcome::violated_at("C_" + std::to_string(n + 1));
        rep.margin = d.get_str();
        return rep;
      }
    }
    for (long n = 1; n <= n_inner; ++n) {
      for (long k = 0; k < n; ++k) {
        const auto w = check_inner_ratio<RationalMode>(q, p, n, k);
        if (w.value != w.closed_form) {
          rep.outcome = Outcome::violated_at("(n,k)=(" + std::to_string(n) + "," +
                                             std::to_string(k) + ") closed form mismatch");
          rep.margin = Rational(w.value - w.closed_form).get_str();
          return rep;
        }
        const Rational slack = w.value - 1;
        if (!min_slack || slack < *min_slack) min_slack = slack;
        if (slack < 0) {
          rep.outcome = Outcome::violated_at("(n,k)=(" + std::to_string(n) + "," +
                                             std::to_string(k) + ")");
          rep.margin = slack.get_str();
          return rep;
        }
      }
    }
    rep.outcome = Outcome::verified();
    rep.margin = min_slack ? min_slack->get_str() : "0";
  } catch (const Error& e) {
    rep.outcome = Outcome::inconclusive(e.what());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepJob {
  Target target = Target::TuranQKummer;
  Rational q = Rational(1, 2);
  QRatioParams params;                // for the q-side targets
  long n = 1;                         // for monotone-f / classical-bounds
  QKummerVariant variant = QKummerVariant::AsDisplayed;
  std::vector<Rational> grid;
  TolPolicy tol;
  bool exploratory = false;  // evaluate without enforcing theorem hypotheses
  long coeff_n_max = 30;
  long coeff_n_inner = 15;
};

namespace detail {

inline std::string join_rationals(const std::vector<Rational>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ";";
    s += v[i].get_str();
  }
  return s;
}

inline ParamList job_params(const SweepJob& job) {
  ParamList p;
  switch (job.target) {
    case Target::MonotoneF:
    case Target::ClassicalBounds:
      p.emplace_back("n", std::to_string(job.n));
      break;
    default:
      p.emplace_back("q", job.q.get_str());
      p.emplace_back("a", join_rationals(job.params.a));
      p.emplace_back("b", join_rationals(job.params.b));
      p.emplace_back("c", join_rationals(job.params.c));
      break;
  }
  if (job.exploratory) p.emplace_back("mode", "exploratory");
  return p;
}

inline bool job_hypotheses_hold(const SweepJob& job) {
  switch (job.target) {
    case Target::TuranQKummer:
    case Target::MonotoneH: {
      const auto& pr = job.params;
      if (!pr.is_scalar()) return false;
      return pr.a[0] > pr.b[0] && pr.b[0] > pr.c[0] && pr.c[0] > 0 && pr.b[0] > 1;
    }
    case Target::TuranQHyper:
    case Target::MonotoneHr:
    case Target::CoefficientMonotone: {
      if (job.target == Target::CoefficientMonotone && job.params.is_scalar()) {
        const auto& pr = job.params;
        return pr.a[0] > pr.b[0] && pr.b[0] > pr.c[0] && pr.c[0] > 0 && pr.b[0] > 1;
      }
      for (size_t i = 0; i < job.params.b.size(); ++i)
        if (!(job.params.b[i] > job.params.c[i] && job.params.c[i] > 0 && job.params.b[i] > 1))
          return false;
      return true;
    }
    default:
      return true;
  }
}

}  // namespace detail

inline VerificationReport run_job(const SweepJob& job) {
  PrecisionScope scope(job.tol.precision_bits);
  const ReportMeta meta{job.target, detail::job_params(job)};
  if (!job.exploratory && !detail::job_hypotheses_hold(job))
    throw DomainError(std::string("parameter point violates the theorem hypotheses for ") +
                      target_name(job.target) + "; rerun in exploratory mode to probe it");
  switch (job.target) {
    case Target::TuranQKummer: {
      const RatioFn<FloatMode> fn = [&](const Rational& x) {
        return q_ratio_h<FloatMode>(job.q, job.params, x, job.variant, job.tol.sum);
      };
      return verify_turan<FloatMode>(fn, job.grid, job.tol, meta);
    }
    case Target::MonotoneH: {
      const RatioFn<FloatMode> fn = [&](const Rational& x) {
        return q_ratio_h<FloatMode>(job.q, job.params, x, job.variant, job.tol.sum);
      };
      return verify_monotone<FloatMode>(fn, job.grid, job.tol, meta);
    }
    case Target::TuranQHyper: {
      const RatioFn<FloatMode> fn = [&](const Rational& x) {
        return q_ratio_hr<FloatMode>(job.q, job.params, x, job.tol.sum);
      };
      return verify_turan<FloatMode>(fn, job.grid, job.tol, meta);
    }
    case Target::MonotoneHr: {
      const RatioFn<FloatMode> fn = [&](const Rational& x) {
        return q_ratio_hr<FloatMode>(job.q, job.params, x, job.tol.sum);
      };
      return verify_monotone<FloatMode>(fn, job.grid, job.tol, meta);
    }
    case Target::MonotoneF: {
      const RatioFn<FloatMode> fn = [&](const Rational& x) {
        return f_ratio<FloatMode>(job.n, x, job.tol.sum);
      };
      return verify_monotone<FloatMode>(fn, job.grid, job.tol, meta);
    }
    case Target::ClassicalBounds:
      return verify_bounds_f<FloatMode>(job.n, job.grid, job.tol, meta);
    case Target::CoefficientMonotone:
      return coefficient_monotone_report(job.q, job.params, job.coeff_n_max, job.coeff_n_inner,
                                         meta);
  }
  throw DomainError("unknown verification target");
}

// A failed point never aborts the sweep; it folds into an Inconclusive
// report carrying the error text.
inline VerificationReport run_job_nothrow(const SweepJob& job) {
  try {
    return run_job(job);
  } catch (const std::exception& e) {
    VerificationReport rep;
    rep.target = job.target;
    rep.params = detail::job_params(job);
    for (const Rational& x : job.grid) rep.grid.push_back(x.get_str());
    rep.tol = job.tol.tol.get_str();
    rep.eps = job.tol.sum.eps.get_str();
    rep.precision_bits = job.tol.precision_bits;
    rep.outcome = Outcome::inconclusive(e.what());
    return rep;
  }
}

// Deterministic ordered reduction; points are independent and pure, so
// parallel execution is bit-identical to sequential.
inline std::vector<VerificationReport> sweep(const std::vector<SweepJob>& jobs,
                                             bool parallel = true) {
  std::vector<VerificationReport> out(jobs.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(std::min(hw, 8u), static_cast<unsigned>(jobs.size()));
  if (!parallel || workers < 2) {
    for (size_t i = 0; i < jobs.size(); ++i) out[i] = run_job_nothrow(jobs[i]);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        out[i] = run_job_nothrow(jobs[i]);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// q -> 1 limit ladder: |phi(q^a,q^c;q,x) - 1F1(a;c;x)| per ladder step.
// ---------------------------------------------------------------------------

struct LadderRow {
  Rational q;
  FloatBox q_value;
  FloatBox classical_value;
  FloatBox gap;  // |q_value - classical_value|
};

struct LadderResult {
  std::vector<LadderRow> rows;
  bool gaps_nonincreasing = true;   // certified pairwise, in the order given
  bool gaps_strictly_decreasing = true;
};

inline LadderResult limit_ladder(const std::vector<Rational>& q_ladder, const Rational& a,
                                 const Rational& c, const Rational& x,
                                 const SumPolicy& pol = {}) {
  LadderResult out;
  const auto classical = kummer_1f1<FloatMode>(a, c, x, pol).enclosure();
  for (const Rational& q : q_ladder) {
    const auto phi = q_kummer_phi<FloatMode>(q, {a, c}, x, QKummerVariant::AsDisplayed, pol);
    LadderRow row{q, phi.enclosure(), classical, (phi.enclosure() - classical).abs()};
    out.rows.push_back(std::move(row));
  }
  for (size_t i = 0; i + 1 < out.rows.size(); ++i) {
    const auto& g0 = out.rows[i].gap;
    const auto& g1 = out.rows[i + 1].gap;
    if (!(g1.hi() <= g0.lo())) out.gaps_nonincreasing = false;
    if (!(g1.hi() < g0.lo())) out.gaps_strictly_decreasing = false;
  }
  return out;
}

}  // namespace qturan
