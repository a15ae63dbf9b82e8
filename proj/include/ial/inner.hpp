#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "ial/al.hpp"
#include "ial/problem.hpp"

namespace ial {

enum class InnerMethod { frank_wolfe, accel_prox_grad };
enum class StepRule { adaptive, open_loop };

struct InnerConfig {
  InnerMethod method = InnerMethod::accel_prox_grad;
  long budget = 100000;
  std::optional<int> check_every;  // default 1 for FW, 10 for APG
  StepRule step_rule = StepRule::adaptive;

  int resolved_check_every() const {
    int ce = check_every.value_or(method == InnerMethod::frank_wolfe ? 1 : 10);
    require(ce >= 1, "InnerConfig: check_every must be >= 1");
    return ce;
  }

  void validate() const {
    require(budget >= 1, "InnerConfig: budget must be >= 1");
    (void)resolved_check_every();
  }
};

enum class InnerStatus { certified, budget_exceeded };

struct InnerResult {
  Vector x;
  double gap = kInf;
  long iters = 0;
  InnerStatus status = InnerStatus::budget_exceeded;
  std::vector<double> al_values;                    // FW adaptive / APG only
  std::vector<std::pair<long, double>> gap_history;  // (iteration, certified gap)

  bool certified() const { return status == InnerStatus::certified; }
};

// Canonical in-domain starting point (projection of the origin).
inline Vector default_start(const ProblemInstance& p) {
  return p.composite.prox(Vector::Zero(p.dim()), 1.0);
}

namespace detail {

struct BestIterate {
  Vector x;
  double gap = kInf;

  void offer(const Vector& cand, double cand_gap) {
    if (cand_gap < gap) {
      gap = cand_gap;
      x = cand;
    }
  }
};

inline InnerResult solve_inner_fw(const ProblemInstance& p, const DualState& s,
                                  const Vector& warm_start, double eta, const InnerConfig& cfg) {
  const double l_beta = smoothness_bound(p, s.beta);
  const int check_every = cfg.resolved_check_every();
  const bool adaptive = cfg.step_rule == StepRule::adaptive;

  InnerResult res;
  Vector y = warm_start;

  Certificate cert = gap_certificate(p, y, s);
  res.gap_history.emplace_back(0, cert.gap);
  if (adaptive) res.al_values.push_back(al_value(p, y, s));
  BestIterate best;
  best.offer(y, cert.gap);
  if (cert.gap <= eta) {
    res.x = std::move(y);
    res.gap = cert.gap;
    res.iters = 0;
    res.status = InnerStatus::certified;
    return res;
  }

  for (long t = 1; t <= cfg.budget; ++t) {
    // Step along d = w - y; the adaptive rule minimizes the quadratic upper
    // model L(y) - gamma*gap + gamma^2*L_beta*||d||^2/2 over [0, 1], which
    // also guarantees monotone descent in L_beta(.; lambda).
    Vector d = cert.witness - y;
    double dn2 = d.squaredNorm();
    double gamma;
    if (adaptive) {
      gamma = dn2 > 0.0 ? std::min(1.0, cert.gap / (l_beta * dn2)) : 0.0;
    } else {
      gamma = 2.0 / static_cast<double>(t + 1);
    }
    y += gamma * d;
    require(std::isfinite(p.composite.value(y)), "solve_inner_fw: iterate left the domain");

    cert = gap_certificate(p, y, s);
    if (adaptive) res.al_values.push_back(al_value(p, y, s));
    if (t % check_every == 0) {
      res.gap_history.emplace_back(t, cert.gap);
      best.offer(y, cert.gap);
      if (cert.gap <= eta) {
        res.x = std::move(y);
        res.gap = cert.gap;
        res.iters = t;
        res.status = InnerStatus::certified;
        return res;
      }
    }
  }

  res.x = std::move(best.x);
  res.gap = best.gap;
  res.iters = cfg.budget;
  res.status = InnerStatus::budget_exceeded;
  return res;
}

inline InnerResult solve_inner_apg(const ProblemInstance& p, const DualState& s,
                                   const Vector& warm_start, double eta,
                                   const InnerConfig& cfg) {
  const double l_beta = smoothness_bound(p, s.beta);
  require(l_beta > 0.0, "solve_inner_apg: zero smoothness bound");
  const double step = 1.0 / l_beta;
  const int check_every = cfg.resolved_check_every();

  InnerResult res;
  Vector x = warm_start;
  double lx = al_value(p, x, s);

  Certificate cert0 = gap_certificate(p, x, s);
  res.gap_history.emplace_back(0, cert0.gap);
  res.al_values.push_back(lx);
  BestIterate best;
  best.offer(x, cert0.gap);
  if (cert0.gap <= eta) {
    res.x = std::move(x);
    res.gap = cert0.gap;
    res.iters = 0;
    res.status = InnerStatus::certified;
    return res;
  }

  Vector y = x;
  double t_mom = 1.0;

  for (long t = 1; t <= cfg.budget; ++t) {
    Vector xn = p.composite.prox(y - step * al_smooth_grad(p, y, s), step);
    double lxn = al_value(p, xn, s);
    if (lxn > lx) {
      // Momentum restart: a plain proximal-gradient step from x is a descent
      // step (the prox minimizes the quadratic majorant), keeping al_values
      // nonincreasing.
      xn = p.composite.prox(x - step * al_smooth_grad(p, x, s), step);
      lxn = al_value(p, xn, s);
      t_mom = 1.0;
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    y = xn + ((t_mom - 1.0) / t_next) * (xn - x);
    x = std::move(xn);
    lx = lxn;
    t_mom = t_next;
    res.al_values.push_back(lx);

    if (t % check_every == 0) {
      Certificate cert = gap_certificate(p, x, s);
      res.gap_history.emplace_back(t, cert.gap);
      best.offer(x, cert.gap);
      if (cert.gap <= eta) {
        res.x = std::move(x);
        res.gap = cert.gap;
        res.iters = t;
        res.status = InnerStatus::certified;
        return res;
      }
    }
  }

  res.x = std::move(best.x);
  res.gap = best.gap;
  res.iters = cfg.budget;
  res.status = InnerStatus::budget_exceeded;
  return res;
}

}  // namespace detail

// Solve the AL subproblem min_x L_beta(x; lambda) until the certified gap is
// <= eta (checked every check_every iterations, and at the warm start).
inline InnerResult solve_inner(const ProblemInstance& p, const DualState& s,
                               const Vector& warm_start, double eta, const InnerConfig& cfg) {
  p.validate();
  s.validate(p);
  cfg.validate();
  require(eta > 0.0 && std::isfinite(eta), "solve_inner: eta must be positive");
  require_dim(warm_start.size(), p.dim(), "solve_inner warm_start");
  if (!p.composite.contains(warm_start)) {
    throw std::invalid_argument("solve_inner: warm_start is outside dom g");
  }
  require(std::isfinite(smoothness_bound(p, s.beta)), "solve_inner: L_beta must be finite");

  if (cfg.method == InnerMethod::frank_wolfe) {
    return detail::solve_inner_fw(p, s, warm_start, eta, cfg);
  }
  return detail::solve_inner_apg(p, s, warm_start, eta, cfg);
}

// High-accuracy surrogate for x(lambda) = argmin_x L_beta(x; lambda): APG with
// a large budget. Backs d(lambda) evaluations and reference solutions.
inline InnerResult reference_inner_solve(const ProblemInstance& p, const DualState& s, double tol,
                                         const Vector* warm_start = nullptr,
                                         long budget = 1000000) {
  require(tol > 0.0, "reference_inner_solve: tol must be positive");
  InnerConfig cfg;
  cfg.method = InnerMethod::accel_prox_grad;
  cfg.budget = budget;
  Vector x0 = warm_start != nullptr ? *warm_start : default_start(p);
  return solve_inner(p, s, x0, tol, cfg);
}

// Approximate (d(lambda), grad d(lambda)) through a reference solve to gap <=
// tol; the value error is at most tol by convexity of L_beta(.; lambda).
struct DualEval {
  double value;
  Vector grad;
  bool certified;
  long iters;
};

inline DualEval dual_value_and_grad(const ProblemInstance& p, const DualState& s, double tol,
                                    const Vector* warm_start = nullptr, long budget = 1000000) {
  InnerResult r = reference_inner_solve(p, s, tol, warm_start, budget);
  return DualEval{al_value(p, r.x, s), p.constraint.residual(r.x), r.certified(), r.iters};
}

// Iterations needed by open-loop FW to certify each eta from a cold start;
// etas must be positive and decreasing.
inline std::vector<long> iteration_complexity_probe(const ProblemInstance& p, const DualState& s,
                                                    const std::vector<double>& etas,
                                                    long budget = 10000000) {
  require(!etas.empty(), "iteration_complexity_probe: empty eta list");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] > 0.0, "iteration_complexity_probe: etas must be positive");
    if (i > 0) require(etas[i] < etas[i - 1], "iteration_complexity_probe: etas must decrease");
  }
  InnerConfig cfg;
  cfg.method = InnerMethod::frank_wolfe;
  cfg.step_rule = StepRule::open_loop;
  cfg.budget = budget;
  cfg.check_every = 1;
  Vector x0 = default_start(p);
  std::vector<long> counts;
  counts.reserve(etas.size());
  for (double eta : etas) {
    InnerResult r = solve_inner(p, s, x0, eta, cfg);
    if (!r.certified()) {
      throw std::runtime_error("iteration_complexity_probe: budget exceeded at eta=" +
                               std::to_string(eta));
    }
    counts.push_back(r.iters);
  }
  return counts;
}

}  // namespace ial
