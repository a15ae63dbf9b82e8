#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ial/inner.hpp"
#include "ial/problem.hpp"

namespace ial {

enum class ScheduleKind { power_law, custom_list };

// Inner tolerance sequence {eta_k}. The power law eta_k = sigma/k^(2 alpha)
// with alpha in (1/2, 1] is summable and satisfies the ratio condition
// required by the rate analysis.
struct ToleranceSchedule {
  ScheduleKind kind = ScheduleKind::power_law;
  double sigma = 1.0;
  double alpha = 1.0;
  std::vector<double> values;  // custom_list only

  static ToleranceSchedule power_law(double sigma, double alpha) {
    require(sigma > 0.0, "ToleranceSchedule: sigma must be positive");
    require(alpha > 0.5 && alpha <= 1.0, "ToleranceSchedule: alpha must lie in (1/2, 1]");
    ToleranceSchedule s;
    s.kind = ScheduleKind::power_law;
    s.sigma = sigma;
    s.alpha = alpha;
    return s;
  }

  static ToleranceSchedule custom(std::vector<double> values) {
    require(!values.empty(), "ToleranceSchedule: custom list must be nonempty");
    for (double v : values) require(v >= 0.0 && std::isfinite(v), "ToleranceSchedule: bad entry");
    ToleranceSchedule s;
    s.kind = ScheduleKind::custom_list;
    s.values = std::move(values);
    return s;
  }

  double eta_at(long k) const {
    require(k >= 1, "eta_at: k must be >= 1");
    if (kind == ScheduleKind::power_law) {
      return sigma * std::pow(static_cast<double>(k), -2.0 * alpha);
    }
    if (static_cast<std::size_t>(k) > values.size()) {
      throw std::out_of_range("eta_at: custom schedule exhausted at k=" + std::to_string(k));
    }
    return values[static_cast<std::size_t>(k - 1)];
  }

  // Upper bound on sum_{k>=1} eta_k. Power law: finite sum over the first
  // `finite_terms` entries plus the integral tail sigma*N^(1-2a)/(2a-1).
  double sum_upper(long finite_terms = 1000000) const {
    if (kind == ScheduleKind::custom_list) {
      double s = 0.0;
      for (auto it = values.rbegin(); it != values.rend(); ++it) s += *it;
      return s;
    }
    double s = 0.0;
    for (long k = finite_terms; k >= 1; --k) s += eta_at(k);  // smallest-first
    double n = static_cast<double>(finite_terms);
    s += sigma * std::pow(n, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
    return s;
  }
};

struct ScheduleCheckReport {
  bool nonincreasing = true;
  std::optional<long> first_increase_k;
  bool summable = true;
  double sum_bound = 0.0;
  std::string summability_note;
  bool ratio_ok = true;  // sqrt(eta_{k+1}/eta_k) >= (k-2)/k on [k0, horizon]
  std::optional<long> first_ratio_violation_k;
  bool analytic_power_law = false;  // ratio condition holds for every k by algebra

  bool passed() const { return nonincreasing && summable && ratio_ok; }
};

// Checks the schedule hypotheses of the rate analysis: nonincreasing, summable, and the
// ratio condition sqrt(eta_{k+1}/eta_k) >= (k-2)/k for k0 <= k <= horizon.
// For the power law with alpha <= 1 the ratio condition holds for all k since
// (k/(k+1))^alpha >= k/(k+1) and k^2 >= (k-2)(k+1).
inline ScheduleCheckReport check_schedule_conditions(const ToleranceSchedule& sch, long k0,
                                                     long horizon) {
  require(k0 >= 4, "check_schedule_conditions: k0 must be >= 4");
  require(horizon >= k0, "check_schedule_conditions: horizon must be >= k0");
  ScheduleCheckReport rep;

  for (long k = 1; k < horizon; ++k) {
    if (sch.eta_at(k + 1) > sch.eta_at(k)) {
      rep.nonincreasing = false;
      rep.first_increase_k = k;
      break;
    }
  }

  if (sch.kind == ScheduleKind::power_law) {
    rep.summable = true;
    rep.sum_bound = sch.sum_upper();
    rep.summability_note = "power law, alpha > 1/2: finite sum plus integral tail";
    rep.analytic_power_law = sch.alpha <= 1.0;
  } else {
    // Sufficient test only: a finite list cannot decide summability of the
    // extended sequence. Pass when the tail is exactly zero or decays faster
    // than 1/k by a log-log fit over the last half of the list.
    const auto& v = sch.values;
    std::size_t half = v.size() / 2;
    bool tail_zero = true;
    for (std::size_t i = half; i < v.size(); ++i) tail_zero = tail_zero && v[i] == 0.0;
    if (tail_zero) {
      rep.summable = true;
      rep.summability_note = "tail is identically zero";
    } else if (v.size() < 2) {
      rep.summable = false;
      rep.summability_note = "list too short to assess decay";
    } else {
      std::size_t begin = v.size() - half >= 2 ? half : 0;  // need >= 2 fit points
      std::vector<double> ks, vs;
      for (std::size_t i = begin; i < v.size(); ++i) {
        ks.push_back(static_cast<double>(i + 1));
        vs.push_back(std::max(v[i], 1e-300));
      }
      double slope = fit_loglog_slope(ks, vs);
      rep.summable = slope < -1.001;
      rep.summability_note = "tail log-log slope " + std::to_string(slope) +
                             (rep.summable ? " < -1 (summable-rate decay)"
                                           : " >= -1 (cannot certify summability)");
    }
    double s = 0.0;
    for (double x : v) s += x;
    rep.sum_bound = s;
  }

  for (long k = k0; k < horizon; ++k) {
    double ek = sch.eta_at(k);
    double ek1 = sch.eta_at(k + 1);
    if (ek == 0.0) continue;  // ratio undefined; zero tail handled above
    double lhs = std::sqrt(ek1 / ek);
    double rhs = static_cast<double>(k - 2) / static_cast<double>(k);
    if (lhs < rhs) {
      rep.ratio_ok = false;
      rep.first_ratio_violation_k = k;
      break;
    }
  }
  return rep;
}

enum class BudgetPolicy { abort, accept_best };

// First outer iteration exhausted its inner budget: no certified row exists,
// so there is no trace to return.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OuterConfig {
  double beta = 1.0;
  long max_outer = 100;
  ToleranceSchedule schedule;
  InnerConfig inner;
  Vector lambda_init;  // empty => zeros
  Vector x_init;       // empty => default_start
  bool warm_start = true;
  BudgetPolicy on_budget_exceeded = BudgetPolicy::abort;
  // Practical stop rule (the analyzed loop is infinite): stop once a row has
  // gap <= gap_floor and feas <= feas_floor. Set both to 0 to force max_outer.
  double gap_floor = 1e-10;
  double feas_floor = 1e-8;

  void validate(const ProblemInstance& p) const {
    require(beta > 0.0 && std::isfinite(beta), "OuterConfig: beta must be positive");
    require(max_outer >= 1, "OuterConfig: max_outer must be >= 1");
    inner.validate();
    if (lambda_init.size() > 0) {
      require_dim(lambda_init.size(), p.constraint_dim(), "OuterConfig lambda_init");
      require(all_finite(lambda_init), "OuterConfig: lambda_init must be finite");
    }
    if (x_init.size() > 0) {
      require_dim(x_init.size(), p.dim(), "OuterConfig x_init");
      require(p.composite.contains(x_init), "OuterConfig: x_init must lie in dom g");
    }
    require(gap_floor >= 0.0 && feas_floor >= 0.0, "OuterConfig: floors must be >= 0");
  }
};

// One completed outer iteration k: the multiplier it used, the iterate it
// produced, and the certified quantities the theory checks consume.
struct OuterRow {
  long k = 0;
  double eta = 0.0;
  double gap = 0.0;        // certified gap of x^{k+1} at lambda^k
  double feas = 0.0;       // ||A x^{k+1} - b||
  double objective = 0.0;  // F(x^{k+1})
  double al_bar = 0.0;     // L_beta(x^{k+1}; lambda^k)
  long inner_iters = 0;
  bool budget_flag = false;  // accept_best row whose gap may exceed eta
  Vector x_next;             // x^{k+1}
  Vector lambda;             // lambda^k
};

struct OuterTrace {
  std::vector<OuterRow> rows;
  Vector lambda_final;  // lambda^{K+1}
  double beta = 1.0;
  ToleranceSchedule schedule;
  std::string instance_name;
  bool aborted = false;        // inner budget exhausted under the abort policy
  bool early_stopped = false;  // floors reached before max_outer
  long planned_outer = 0;

  long completed() const { return static_cast<long>(rows.size()); }
  const Vector& x_final() const { return rows.back().x_next; }
};

// Algorithm: for k = 1..K, solve the AL subproblem at lambda^k until the
// certified gap is <= eta_k, then ascend lambda^{k+1} = lambda^k + beta*(A
// x^{k+1} - b). Deterministic given (instance, config).
inline OuterTrace run_ial(const ProblemInstance& p, const OuterConfig& cfg) {
  p.validate();
  cfg.validate(p);

  OuterTrace trace;
  trace.beta = cfg.beta;
  trace.schedule = cfg.schedule;
  trace.instance_name = p.name;
  trace.planned_outer = cfg.max_outer;

  Vector lambda = cfg.lambda_init.size() > 0 ? cfg.lambda_init
                                             : Vector::Zero(p.constraint_dim());
  Vector x = cfg.x_init.size() > 0 ? cfg.x_init : default_start(p);
  const Vector cold = x;

  for (long k = 1; k <= cfg.max_outer; ++k) {
    double eta = cfg.schedule.eta_at(k);
    require(eta > 0.0, "run_ial: schedule must be positive while running");
    DualState s{lambda, cfg.beta};
    InnerResult inner = solve_inner(p, s, cfg.warm_start ? x : cold, eta, cfg.inner);

    bool flagged = false;
    if (!inner.certified()) {
      if (cfg.on_budget_exceeded == BudgetPolicy::abort) {
        trace.aborted = true;
        break;
      }
      flagged = true;  // accept_best: keep the best iterate, flag the row
    }

    OuterRow row;
    row.k = k;
    row.eta = eta;
    row.gap = inner.gap;
    row.inner_iters = inner.iters;
    row.budget_flag = flagged;
    row.lambda = lambda;
    row.x_next = std::move(inner.x);
    Vector r = p.constraint.residual(row.x_next);
    row.feas = r.norm();
    row.objective = eval_objective(p, row.x_next);
    row.al_bar = al_value(p, row.x_next, s);
    x = row.x_next;
    lambda += cfg.beta * r;
    bool stop = row.gap <= cfg.gap_floor && row.feas <= cfg.feas_floor;
    trace.rows.push_back(std::move(row));

    if (stop) {
      trace.early_stopped = k < cfg.max_outer;
      break;
    }
  }

  trace.lambda_final = std::move(lambda);
  if (trace.rows.empty()) {
    throw BudgetError("run_ial: inner budget exceeded on the first iteration");
  }
  return trace;
}

struct TraceAudit {
  bool ok = true;
  std::optional<long> first_bad_k;
  double max_gap_rel_err = 0.0;     // recomputed vs stored certified gap
  double max_lambda_rel_err = 0.0;  // dual-update recursion residual
  bool gap_within_eta = true;
};

// Recomputes every stored gap_k from (x^{k+1}, lambda^k) and the dual-update
// recursion lambda^{k+1} = lambda^k + beta*(A x^{k+1} - b).
inline TraceAudit audit_trace(const ProblemInstance& p, const OuterTrace& trace,
                              double gap_rel_tol = 1e-12, double lambda_rel_tol = 1e-14) {
  TraceAudit audit;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const OuterRow& row = trace.rows[i];
    DualState s{row.lambda, trace.beta};
    double gap = gap_certificate(p, row.x_next, s).gap;
    double scale = std::max({1.0, std::abs(gap), std::abs(row.gap)});
    double gap_err = std::abs(gap - row.gap) / scale;
    audit.max_gap_rel_err = std::max(audit.max_gap_rel_err, gap_err);

    const Vector& next_lambda =
        i + 1 < trace.rows.size() ? trace.rows[i + 1].lambda : trace.lambda_final;
    Vector expect = row.lambda + trace.beta * p.constraint.residual(row.x_next);
    double lam_err = (next_lambda - expect).norm() / std::max(1.0, expect.norm());
    audit.max_lambda_rel_err = std::max(audit.max_lambda_rel_err, lam_err);

    bool row_ok = gap_err <= gap_rel_tol && lam_err <= lambda_rel_tol &&
                  (row.budget_flag || row.gap <= row.eta);
    if (!row_ok) {
      audit.ok = false;
      if (!audit.first_bad_k) audit.first_bad_k = row.k;
      if (!row.budget_flag && row.gap > row.eta) audit.gap_within_eta = false;
    }
  }
  return audit;
}

}  // namespace ial
