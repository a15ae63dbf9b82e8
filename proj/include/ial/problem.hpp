#pragma once

#include <string>
#include <utility>

#include "ial/composite.hpp"
#include "ial/linalg.hpp"
#include "ial/smooth.hpp"
#include "ial/types.hpp"

namespace ial {

// Linear equality constraint Ax = b with a cached upper bound on ||A||^2
// (needed for the smoothness constant L_beta = L_f + beta*||A||^2).
struct LinearConstraint {
  Matrix A;
  Vector b;
  double op_norm_sq;

  static LinearConstraint make(Matrix A, Vector b) {
    require(A.rows() >= 1 && A.cols() >= 1, "LinearConstraint: empty A");
    require_dim(b.size(), A.rows(), "LinearConstraint b");
    require(A.allFinite() && b.allFinite(), "LinearConstraint: inputs must be finite");
    double op = power_iteration_norm(A, 1e-6, 1000);
    return LinearConstraint{std::move(A), std::move(b), op};
  }

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }

  Vector residual(const Vector& x) const {
    require_dim(x.size(), A.cols(), "LinearConstraint::residual");
    return A * x - b;
  }
};

struct ProblemInstance {
  SmoothTerm smooth;
  CompositeTerm composite;
  LinearConstraint constraint;
  std::string name;

  Index dim() const { return composite.dim(); }
  Index constraint_dim() const { return constraint.rows(); }

  void validate() const {
    require_dim(smooth.dim(), composite.dim(), "ProblemInstance smooth/composite");
    require_dim(constraint.cols(), composite.dim(), "ProblemInstance constraint");
  }
};

// F(x) = f(x) + g(x); +inf outside dom g.
inline double eval_objective(const ProblemInstance& p, const Vector& x) {
  require_dim(x.size(), p.dim(), "eval_objective");
  require(all_finite(x), "eval_objective: x must be finite");
  double g = p.composite.value(x);
  if (!std::isfinite(g)) return kInf;
  return p.smooth.value(x) + g;
}

}  // namespace ial
