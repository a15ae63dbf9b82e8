#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ial/outer.hpp"

namespace ial {

// High-accuracy primal-dual pair: F(x*) = d(lambda*) by strong duality, used
// to anchor the dual gap series and the primal sandwich bounds. lambda* and
// F* do not depend on the penalty used to build them (the AL dual and the
// ordinary dual share maximizers).
struct ReferenceSolution {
  Vector x_star;
  Vector lambda_star;
  double f_star = 0.0;
  double tol = 0.0;
  double feas = 0.0;  // ||A x* - b|| achieved
};

struct ReferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Drives the IAL loop with a fast custom schedule max(1/k^4, tol) until both
// the certified gap and the feasibility residual are <= tol (the floor keeps
// the late-stage gap targets certifiable in floating point).
inline ReferenceSolution compute_reference(const ProblemInstance& p, double tol,
                                           double beta = 1.0, long max_outer = 20000,
                                           long inner_budget = 1000000) {
  require(tol > 0.0 && tol <= 1e-8, "compute_reference: need 0 < tol <= 1e-8");
  std::vector<double> etas(static_cast<std::size_t>(max_outer));
  for (long k = 1; k <= max_outer; ++k) {
    double k4 = std::pow(static_cast<double>(k), 4.0);
    etas[static_cast<std::size_t>(k - 1)] = std::max(1.0 / k4, tol);
  }
  OuterConfig cfg;
  cfg.beta = beta;
  cfg.max_outer = max_outer;
  cfg.schedule = ToleranceSchedule::custom(std::move(etas));
  cfg.inner.budget = inner_budget;
  cfg.gap_floor = tol;
  cfg.feas_floor = tol;

  OuterTrace trace = run_ial(p, cfg);
  const OuterRow& last = trace.rows.back();
  if (trace.aborted || last.gap > tol || last.feas > tol) {
    throw ReferenceError("compute_reference: targets not reached (gap=" +
                         std::to_string(last.gap) + ", feas=" + std::to_string(last.feas) +
                         ") within " + std::to_string(trace.completed()) + " outer iterations");
  }
  ReferenceSolution ref;
  ref.x_star = last.x_next;
  ref.lambda_star = trace.lambda_final;
  ref.f_star = last.al_bar;  // L_beta(x*; lambda^K) = d-bar at the final solve
  ref.tol = tol;
  ref.feas = last.feas;
  return ref;
}

// d(lambda^k) and grad d(lambda^k) along a trace (indices 0..K-1 follow the
// rows; index K is the final multiplier lambda^{K+1}). Solves are chained
// through warm starts; each value is tol-accurate by the certificate bound.
struct DualPath {
  std::vector<double> value;
  std::vector<Vector> grad;
  double tol = 0.0;
};

inline DualPath compute_dual_path(const ProblemInstance& p, const OuterTrace& trace, double tol,
                                  long inner_budget = 1000000) {
  require(tol > 0.0, "compute_dual_path: tol must be positive");
  DualPath path;
  path.tol = tol;
  path.value.reserve(trace.rows.size() + 1);
  path.grad.reserve(trace.rows.size() + 1);
  const Vector* warm = nullptr;
  Vector last_x;
  for (std::size_t i = 0; i <= trace.rows.size(); ++i) {
    const Vector& lambda =
        i < trace.rows.size() ? trace.rows[i].lambda : trace.lambda_final;
    DualState s{lambda, trace.beta};
    InnerResult r = reference_inner_solve(p, s, tol, warm, inner_budget);
    if (!r.certified()) {
      throw ReferenceError("compute_dual_path: inner budget exceeded at k=" +
                           std::to_string(i + 1));
    }
    path.value.push_back(al_value(p, r.x, s));
    path.grad.push_back(p.constraint.residual(r.x));
    last_x = std::move(r.x);
    warm = &last_x;
  }
  return path;
}

// delta_k = F* - d(lambda^k), k = 1..K. Tiny negatives (surrogate noise) are
// clamped to zero; anything below -10*tol means the reference is inconsistent.
inline std::vector<double> delta_series(const OuterTrace& trace, const ReferenceSolution& ref,
                                        const DualPath& path) {
  require(path.value.size() >= trace.rows.size(), "delta_series: dual path too short");
  std::vector<double> deltas;
  deltas.reserve(trace.rows.size());
  double tol = std::max(path.tol, ref.tol);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    double d = ref.f_star - path.value[i];
    if (d < -10.0 * tol) {
      throw ReferenceError("delta_series: delta_" + std::to_string(i + 1) + " = " +
                           std::to_string(d) + " below -10*tol; reference inconsistent");
    }
    deltas.push_back(std::max(d, 0.0));
  }
  return deltas;
}

inline std::vector<double> delta_series(const ProblemInstance& p, const OuterTrace& trace,
                                        const ReferenceSolution& ref, double tol) {
  return delta_series(trace, ref, compute_dual_path(p, trace, tol));
}

// Constants of the rate analysis, from the schedule, the reference, and the
// measured delta series (k0 is post-hoc: the bound quantifies over the delta
// tail, which is only observable from a run).
struct TheoryConstants {
  double beta = 0.0;
  double lambda1_dist = 0.0;  // ||lambda^1 - lambda*||
  double sum_eta = 0.0;       // upper bound on sum eta_k
  double B = 0.0;
  double theta = 0.0;
  double delta1 = 0.0;
  std::optional<long> k0;
  double tau1 = 0.0;  // k0/(4 theta)
  double tau2 = 0.0;  // 1/(4 theta sqrt(eta_{k0}))
  bool power_law = false;
  double sigma = 0.0;
  double alpha = 0.0;
  double C = 0.0;  // rate constant; power-law schedules only
  double tol_slack = 0.0;

  double psi(long k) const {
    return (2.0 / beta) * (C + std::sqrt(sigma)) / std::pow(static_cast<double>(k), alpha);
  }
};

inline TheoryConstants compute_constants(const OuterTrace& trace,
                                         const std::vector<double>& deltas,
                                         const ReferenceSolution& ref, long horizon) {
  require(!trace.rows.empty(), "compute_constants: empty trace");
  require(deltas.size() >= trace.rows.size(), "compute_constants: delta series too short");
  horizon = std::min<long>(horizon, trace.completed());
  require(horizon >= 1, "compute_constants: empty horizon");

  TheoryConstants tc;
  tc.beta = trace.beta;
  tc.lambda1_dist = (trace.rows.front().lambda - ref.lambda_star).norm();
  tc.sum_eta = trace.schedule.sum_upper();
  double b_sq = tc.lambda1_dist * tc.lambda1_dist + 2.0 * tc.beta * tc.sum_eta;
  tc.B = std::sqrt(b_sq);
  if (tc.B == 0.0) {
    throw std::domain_error("compute_constants: B=0 (theta undefined)");
  }
  tc.theta = tc.beta / (4.0 * b_sq);
  tc.delta1 = deltas.front();
  tc.tol_slack = 100.0 * ref.tol + 1e-8;

  // Smallest k0 >= 4 with suffix-max delta <= 1/(2 theta) and eta_{k0} <=
  // 1/(24 theta); compliance is certified on [k0, horizon] only.
  double delta_cap = 1.0 / (2.0 * tc.theta);
  double eta_cap = 1.0 / (24.0 * tc.theta);
  std::vector<double> suffix_max(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (long k = horizon; k >= 1; --k) {
    suffix_max[static_cast<std::size_t>(k - 1)] =
        std::max(deltas[static_cast<std::size_t>(k - 1)],
                 suffix_max[static_cast<std::size_t>(k)]);
  }
  std::vector<double> eta_suffix_max(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (long k = horizon; k >= 1; --k) {
    eta_suffix_max[static_cast<std::size_t>(k - 1)] =
        std::max(trace.schedule.eta_at(k), eta_suffix_max[static_cast<std::size_t>(k)]);
  }
  for (long k = 4; k <= horizon; ++k) {
    if (suffix_max[static_cast<std::size_t>(k - 1)] <= delta_cap &&
        eta_suffix_max[static_cast<std::size_t>(k - 1)] <= eta_cap) {
      tc.k0 = k;
      break;
    }
  }
  if (tc.k0) {
    double eta_k0 = trace.schedule.eta_at(*tc.k0);
    tc.tau1 = static_cast<double>(*tc.k0) / (4.0 * tc.theta);
    tc.tau2 = eta_k0 > 0.0 ? 1.0 / (4.0 * tc.theta * std::sqrt(eta_k0)) : kInf;
  }

  if (trace.schedule.kind == ScheduleKind::power_law) {
    tc.power_law = true;
    tc.sigma = trace.schedule.sigma;
    tc.alpha = trace.schedule.alpha;
    tc.C = 4.0 * std::sqrt(3.0 * (1.5 * tc.theta * tc.sigma + 1.0) * tc.sigma / tc.theta) +
           (4.0 / 3.0) * std::max(tc.delta1, 4.0 / tc.theta);
  }
  return tc;
}

// One bound family evaluated along a trace: margins are (bound + slack -
// measured), never clamped; a check passes iff no margin is negative.
struct BoundReport {
  std::string check;
  bool passed = false;
  bool skipped = false;
  std::string note;
  std::optional<long> first_violation_k;
  double min_margin = kInf;
  long k_begin = 1;
  std::vector<double> margins;

  void add(long k, double margin) {
    if (margins.empty()) k_begin = k;
    margins.push_back(margin);
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && !first_violation_k) first_violation_k = k;
  }

  void finish() { passed = !skipped && !first_violation_k; }

  static BoundReport skip(std::string name, std::string why) {
    BoundReport rep;
    rep.check = std::move(name);
    rep.skipped = true;
    rep.note = std::move(why);
    rep.passed = false;
    return rep;
  }
};

// delta_k <= tau1/k + tau2*sqrt(eta_k) for k0 <= k <= K.
inline BoundReport check_gap_tail_bound(const std::vector<double>& deltas,
                                        const TheoryConstants& tc,
                                        const ToleranceSchedule& sch) {
  if (!tc.k0) {
    return BoundReport::skip("dual_gap_tail_bound",
                             "no k0 within horizon satisfies the tail conditions");
  }
  if (!std::isfinite(tc.tau2)) {
    return BoundReport::skip("dual_gap_tail_bound", "eta_{k0} = 0: tau2 undefined");
  }
  BoundReport rep;
  rep.check = "dual_gap_tail_bound";
  for (long k = *tc.k0; k <= static_cast<long>(deltas.size()); ++k) {
    double bound = tc.tau1 / static_cast<double>(k) + tc.tau2 * std::sqrt(sch.eta_at(k));
    rep.add(k, bound + tc.tol_slack - deltas[static_cast<std::size_t>(k - 1)]);
  }
  rep.finish();
  return rep;
}

// The three power-law rate families: delta_k <= C/k^alpha, feas^2 <= psi_k,
// and the primal sandwich around F(x*).
inline std::vector<BoundReport> check_rate_bounds(const OuterTrace& trace,
                                                  const std::vector<double>& deltas,
                                                  const TheoryConstants& tc,
                                                  const ReferenceSolution& ref) {
  std::vector<BoundReport> reports;
  if (!tc.power_law) {
    reports.push_back(BoundReport::skip("dual_gap_rate", "schedule is not a power law"));
    reports.push_back(BoundReport::skip("feasibility_rate", "schedule is not a power law"));
    reports.push_back(BoundReport::skip("primal_gap_sandwich", "schedule is not a power law"));
    return reports;
  }
  double lam_star = ref.lambda_star.norm();

  BoundReport delta_rep;
  delta_rep.check = "dual_gap_rate";
  BoundReport feas_rep;
  feas_rep.check = "feasibility_rate";
  BoundReport primal_rep;
  primal_rep.check = "primal_gap_sandwich";

  for (const OuterRow& row : trace.rows) {
    long k = row.k;
    double ka = std::pow(static_cast<double>(k), tc.alpha);
    delta_rep.add(k, tc.C / ka + tc.tol_slack - deltas[static_cast<std::size_t>(k - 1)]);

    double psi = tc.psi(k);
    feas_rep.add(k, psi + tc.tol_slack - row.feas * row.feas);

    double gap = row.objective - ref.f_star;
    double lower = gap + lam_star * std::sqrt(psi) + 0.5 * tc.beta * psi + tc.tol_slack;
    double upper = (lam_star + tc.B) * std::sqrt(psi) + row.eta + tc.tol_slack - gap;
    primal_rep.add(k, std::min(lower, upper));
  }
  delta_rep.finish();
  feas_rep.finish();
  primal_rep.finish();
  reports.push_back(std::move(delta_rep));
  reports.push_back(std::move(feas_rep));
  reports.push_back(std::move(primal_rep));
  return reports;
}

// Simulates the tight recursion delta_{k+1} = (-1 + sqrt(1 + 2E delta_k))/E
// (the equality case of (E/2) d^2 + d <= d_prev) and asserts the closed-form
// consequence delta_k <= max(delta_1, 4/E)/k.
inline BoundReport check_scalar_recursion(double delta1, double E, long K,
                                          double slack = 1e-12) {
  require(E > 0.0, "check_scalar_recursion: E must be positive");
  require(delta1 >= 0.0, "check_scalar_recursion: delta1 must be nonnegative");
  require(K >= 1, "check_scalar_recursion: K must be >= 1");
  BoundReport rep;
  rep.check = "scalar_recursion_bound";
  double cap = std::max(delta1, 4.0 / E);
  double d = delta1;
  for (long k = 1; k <= K; ++k) {
    rep.add(k, cap / static_cast<double>(k) + slack - d);
    // stable form of (-1 + sqrt(1 + 2E d))/E
    d = 2.0 * d / (1.0 + std::sqrt(1.0 + 2.0 * E * d));
  }
  rep.finish();
  return rep;
}

// Trace-level inequality suite: the gradient-error bound, the multiplier bound,
// the dual ascent inequalities, and the delta recursion.
inline std::vector<BoundReport> check_trace_inequalities(const ProblemInstance& p,
                                                         const OuterTrace& trace,
                                                         const ReferenceSolution& ref,
                                                         const std::vector<double>& deltas,
                                                         const TheoryConstants& tc,
                                                         const DualPath& path) {
  require(path.value.size() == trace.rows.size() + 1,
          "check_trace_inequalities: dual path must cover lambda^1..lambda^{K+1}");
  require(deltas.size() == trace.rows.size(), "check_trace_inequalities: delta series size");
  const double slack = tc.tol_slack;
  const double beta = trace.beta;
  std::vector<BoundReport> reports;

  BoundReport grad_err;
  grad_err.check = "dual_gradient_error";
  BoundReport mult_bound;
  mult_bound.check = "multiplier_bound";
  BoundReport decrease;
  decrease.check = "dual_ascent_progress";
  BoundReport descent;
  descent.check = "dual_value_descent";
  BoundReport recursion;
  recursion.check = "dual_gap_recursion";

  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const OuterRow& row = trace.rows[i];
    long k = row.k;
    Vector dbar_grad = p.constraint.residual(row.x_next);

    // ||grad d(lambda^k) - grad dbar(lambda^k)||^2 <= eta_k / beta
    double grad_err_sq = (path.grad[i] - dbar_grad).squaredNorm();
    grad_err.add(k, row.eta / beta + slack - grad_err_sq);

    // ||lambda^k - lambda*|| <= B
    mult_bound.add(k, tc.B + slack - (row.lambda - ref.lambda_star).norm());

    // d(lambda^{k+1}) >= dbar(lambda^k) + (beta/2)||grad dbar||^2 - eta_k
    double ascent = 0.5 * beta * dbar_grad.squaredNorm() - row.eta;
    decrease.add(k, path.value[i + 1] - (row.al_bar + ascent) + slack);

    // d(lambda^{k+1}) >= d(lambda^k) + (beta/2)||grad dbar||^2 - eta_k
    descent.add(k, path.value[i + 1] - (path.value[i] + ascent) + slack);

    // delta_{k+1} <= delta_k - theta*delta_k^2 + (3/2) eta_k
    if (i + 1 < trace.rows.size()) {
      double dk = deltas[i];
      double bound = dk - tc.theta * dk * dk + 1.5 * row.eta;
      recursion.add(k, bound + slack - deltas[i + 1]);
    }
  }
  mult_bound.add(trace.rows.back().k + 1,
                 tc.B + slack - (trace.lambda_final - ref.lambda_star).norm());

  for (BoundReport* rep : {&grad_err, &mult_bound, &decrease, &descent, &recursion}) rep->finish();
  reports.push_back(std::move(decrease));
  reports.push_back(std::move(grad_err));
  reports.push_back(std::move(mult_bound));
  reports.push_back(std::move(descent));
  reports.push_back(std::move(recursion));
  return reports;
}

// Operational form of the global-convergence argument's key estimate: the
// partial sums of delta_k^2 must flatten (increments over [K/2, K] at most
// 10% of the total).
inline BoundReport check_gap_square_summability(const std::vector<double>& deltas) {
  BoundReport rep;
  rep.check = "dual_gap_square_summability";
  if (deltas.size() < 8) {
    return BoundReport::skip(rep.check, "trace too short to assess the tail");
  }
  double total = 0.0;
  for (double d : deltas) total += d * d;
  double tail = 0.0;
  for (std::size_t i = deltas.size() / 2; i < deltas.size(); ++i) tail += deltas[i] * deltas[i];
  if (total == 0.0) {
    rep.add(1, 0.0);
  } else {
    rep.add(static_cast<long>(deltas.size() / 2) + 1, 0.1 * total - tail);
  }
  rep.finish();
  return rep;
}

// d(lambda) <= dbar(mu) + <grad dbar(mu), lambda - mu> for all lambda,
// mu; sampled over multiplier pairs from the run (dbar rows supply mu).
inline BoundReport check_dual_linearization_bound(const ProblemInstance& p,
                                                  const OuterTrace& trace,
                                                  const TheoryConstants& tc, const DualPath& path,
                                                  std::size_t max_pairs = 64) {
  BoundReport rep;
  rep.check = "dual_linearization_bound";
  const std::size_t n = trace.rows.size();
  std::size_t stride = std::max<std::size_t>(1, n * n / std::max<std::size_t>(max_pairs, 1));
  std::size_t counter = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const OuterRow& mu_row = trace.rows[j];
    Vector dbar_grad = p.constraint.residual(mu_row.x_next);
    for (std::size_t i = 0; i < n; ++i, ++counter) {
      if (counter % stride != 0) continue;
      const Vector& lambda = trace.rows[i].lambda;
      double rhs = mu_row.al_bar + dbar_grad.dot(lambda - mu_row.lambda);
      rep.add(static_cast<long>(counter), rhs + tc.tol_slack - path.value[i]);
    }
  }
  rep.finish();
  return rep;
}

}  // namespace ial
