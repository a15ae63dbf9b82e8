#pragma once

#include <utility>
#include <variant>

#include "ial/linalg.hpp"
#include "ial/types.hpp"

namespace ial {

struct ZeroTerm {
  Index n;
};

// (1/2) x'Qx + c'x with Q symmetric positive semidefinite.
struct QuadraticTerm {
  Matrix Q;
  Vector c;
  double lipschitz;
};

// (1/2) ||Mx - y||^2.
struct LeastSquaresTerm {
  Matrix M;
  Vector y;
  double lipschitz;
};

// Smooth part f of the objective: value, gradient, and a gradient Lipschitz
// constant that is guaranteed to majorize the true one (power-iteration upper
// bounds), which inner solvers rely on for their step sizes.
class SmoothTerm {
 public:
  enum class Kind { zero, quadratic, least_squares };

  static SmoothTerm zero(Index n) {
    require(n >= 1, "SmoothTerm::zero: n must be >= 1");
    return SmoothTerm(ZeroTerm{n});
  }

  static SmoothTerm quadratic(Matrix Q, Vector c) {
    require(Q.rows() == Q.cols(), "SmoothTerm::quadratic: Q must be square");
    require_dim(c.size(), Q.rows(), "SmoothTerm::quadratic c");
    require(Q.allFinite() && c.allFinite(), "SmoothTerm::quadratic: inputs must be finite");
    double asym = (Q - Q.transpose()).norm();
    require(asym <= 1e-12 * (1.0 + Q.norm()), "SmoothTerm::quadratic: Q must be symmetric");
    double lip = Q.norm() == 0.0 ? 0.0 : std::sqrt(power_iteration_norm(Q));
    return SmoothTerm(QuadraticTerm{std::move(Q), std::move(c), lip});
  }

  static SmoothTerm least_squares(Matrix M, Vector y) {
    require(M.rows() >= 1 && M.cols() >= 1, "SmoothTerm::least_squares: M must be nonempty");
    require_dim(y.size(), M.rows(), "SmoothTerm::least_squares y");
    require(M.allFinite() && y.allFinite(), "SmoothTerm::least_squares: inputs must be finite");
    double lip = M.norm() == 0.0 ? 0.0 : power_iteration_norm(M);
    return SmoothTerm(LeastSquaresTerm{std::move(M), std::move(y), lip});
  }

  double value(const Vector& x) const {
    check_dim(x);
    return std::visit(
        [&](const auto& t) -> double {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ZeroTerm>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, QuadraticTerm>) {
            return 0.5 * x.dot(t.Q * x) + t.c.dot(x);
          } else {
            return 0.5 * (t.M * x - t.y).squaredNorm();
          }
        },
        term_);
  }

  Vector gradient(const Vector& x) const {
    check_dim(x);
    return std::visit(
        [&](const auto& t) -> Vector {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ZeroTerm>) {
            return Vector::Zero(t.n);
          } else if constexpr (std::is_same_v<T, QuadraticTerm>) {
            return t.Q * x + t.c;
          } else {
            return t.M.transpose() * (t.M * x - t.y);
          }
        },
        term_);
  }

  double lipschitz() const {
    return std::visit(
        [](const auto& t) -> double {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ZeroTerm>) {
            return 0.0;
          } else {
            return t.lipschitz;
          }
        },
        term_);
  }

  Index dim() const {
    return std::visit(
        [](const auto& t) -> Index {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ZeroTerm>) {
            return t.n;
          } else if constexpr (std::is_same_v<T, QuadraticTerm>) {
            return t.Q.rows();
          } else {
            return t.M.cols();
          }
        },
        term_);
  }

  Kind kind() const { return static_cast<Kind>(term_.index()); }

  const QuadraticTerm& as_quadratic() const { return std::get<QuadraticTerm>(term_); }
  const LeastSquaresTerm& as_least_squares() const { return std::get<LeastSquaresTerm>(term_); }

 private:
  template <class T>
  explicit SmoothTerm(T term) : term_(std::move(term)) {}

  void check_dim(const Vector& x) const { require_dim(x.size(), dim(), "SmoothTerm"); }

  std::variant<ZeroTerm, QuadraticTerm, LeastSquaresTerm> term_;
};

}  // namespace ial
