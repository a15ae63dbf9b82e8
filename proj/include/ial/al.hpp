#pragma once

#include <cmath>

#include "ial/problem.hpp"
#include "ial/types.hpp"

namespace ial {

struct DualState {
  Vector lambda;
  double beta;

  void validate(const ProblemInstance& p) const {
    require_dim(lambda.size(), p.constraint_dim(), "DualState lambda");
    require(all_finite(lambda), "DualState: lambda must be finite");
    require(beta > 0.0 && std::isfinite(beta), "DualState: beta must be positive");
  }
};

// First-order optimality certificate of the AL subproblem at x:
//   gap = max_u { <grad, x - u> + g(x) - g(u) },
// attained by the LMO at c = grad. Zero exactly at inner minimizers.
struct Certificate {
  double gap;
  Vector witness;    // the maximizing u (LMO output)
  Vector grad_at_x;  // gradient of the smooth AL part at x
};

// Smoothness constant of the AL smooth part: L_f + beta*||A||^2 (upper bound).
inline double smoothness_bound(const ProblemInstance& p, double beta) {
  return p.smooth.lipschitz() + beta * p.constraint.op_norm_sq;
}

// L_beta(x; lambda) = f(x) + <lambda, Ax-b> + (beta/2)||Ax-b||^2 + g(x).
inline double al_value(const ProblemInstance& p, const Vector& x, const DualState& s) {
  require_dim(x.size(), p.dim(), "al_value");
  s.validate(p);
  require(all_finite(x), "al_value: x must be finite");
  double g = p.composite.value(x);
  if (!std::isfinite(g)) return kInf;
  Vector r = p.constraint.residual(x);
  return p.smooth.value(x) + s.lambda.dot(r) + 0.5 * s.beta * r.squaredNorm() + g;
}

// Gradient of the smooth AL part: grad f(x) + A'lambda + beta*A'(Ax-b).
inline Vector al_smooth_grad(const ProblemInstance& p, const Vector& x, const DualState& s) {
  require_dim(x.size(), p.dim(), "al_smooth_grad");
  s.validate(p);
  require(all_finite(x), "al_smooth_grad: x must be finite");
  Vector r = p.constraint.residual(x);
  return p.smooth.gradient(x) + p.constraint.A.transpose() * (s.lambda + s.beta * r);
}

// Exact evaluation of the certificate via one LMO call.
inline Certificate gap_certificate(const ProblemInstance& p, const Vector& x,
                                   const DualState& s) {
  require_dim(x.size(), p.dim(), "gap_certificate");
  if (!p.composite.contains(x)) {
    throw std::invalid_argument("gap_certificate: x is outside dom g");
  }
  Vector c = al_smooth_grad(p, x, s);
  Vector w = p.composite.lmo(c);
  double gap = c.dot(x - w) + p.composite.value(x) - p.composite.value(w);
  return Certificate{gap, std::move(w), std::move(c)};
}

// Diagnostic suboptimality L_beta(x;lambda) - min_u L_beta(u;lambda), clamped
// at zero; used only to compare the function-value termination rule against
// the certificate rule, never to gate the algorithm.
inline double al_suboptimality(const ProblemInstance& p, const Vector& x, const DualState& s,
                               double ref_min) {
  require(std::isfinite(ref_min), "al_suboptimality: ref_min must be finite");
  double v = al_value(p, x, s);
  return std::max(v - ref_min, 0.0);
}

}  // namespace ial
