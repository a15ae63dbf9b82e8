#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "ial/types.hpp"

namespace ial {

namespace detail {

// Euclidean projection onto {x >= 0, sum x = r} (sort-based, O(n log n)).
inline Vector project_simplex(const Vector& z, double r) {
  const Index n = z.size();
  std::vector<double> u(z.data(), z.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < n; ++j) {
    cum += u[static_cast<std::size_t>(j)];
    double t = (cum - r) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) tau = t;
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = std::max(z[i] - tau, 0.0);
  return x;
}

}  // namespace detail

struct SimplexDomain {
  Index n;
  double radius;  // {x >= 0, sum x = radius}
};

struct BoxDomain {
  Vector lo;
  Vector hi;
};

// tau*||x||_1 restricted to the box ||x||_inf <= radius.
struct L1BoxDomain {
  Index n;
  double tau;
  double radius;
};

// Composite part g: value (+inf outside the domain), proximal map, and exact
// linear minimization oracle argmin_x <c,x> + g(x). All three variants have
// closed forms, which is what makes the gap certificate a single LMO call.
class CompositeTerm {
 public:
  enum class Kind { simplex, box, l1_box };

  static CompositeTerm simplex(Index n, double radius) {
    require(n >= 1 && radius > 0.0, "CompositeTerm::simplex: need n >= 1, radius > 0");
    return CompositeTerm(SimplexDomain{n, radius});
  }

  static CompositeTerm box(Vector lo, Vector hi) {
    require(lo.size() >= 1, "CompositeTerm::box: empty bounds");
    require_dim(hi.size(), lo.size(), "CompositeTerm::box hi");
    require(lo.allFinite() && hi.allFinite(), "CompositeTerm::box: bounds must be finite");
    require((hi.array() >= lo.array()).all(), "CompositeTerm::box: need hi >= lo");
    return CompositeTerm(BoxDomain{std::move(lo), std::move(hi)});
  }

  static CompositeTerm l1_box(Index n, double tau, double radius) {
    require(n >= 1 && tau >= 0.0 && radius > 0.0,
            "CompositeTerm::l1_box: need n >= 1, tau >= 0, radius > 0");
    return CompositeTerm(L1BoxDomain{n, tau, radius});
  }

  // g(x); +inf when x is outside the domain (membership within a small
  // absolute tolerance so prox outputs and convex combinations stay inside).
  double value(const Vector& x) const {
    check_dim(x);
    if (!contains(x)) return kInf;
    if (kind() == Kind::l1_box) return std::get<L1BoxDomain>(term_).tau * x.lpNorm<1>();
    return 0.0;
  }

  // argmin_u (1/2)||u - z||^2 + t*g(u).
  Vector prox(const Vector& z, double t) const {
    check_dim(z);
    require(t > 0.0, "CompositeTerm::prox: t must be positive");
    require(z.allFinite(), "CompositeTerm::prox: z must be finite");
    return std::visit(
        [&](const auto& d) -> Vector {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, SimplexDomain>) {
            return detail::project_simplex(z, d.radius);
          } else if constexpr (std::is_same_v<T, BoxDomain>) {
            return z.cwiseMax(d.lo).cwiseMin(d.hi);
          } else {
            Vector x(z.size());
            double thr = t * d.tau;
            for (Index i = 0; i < z.size(); ++i) {
              double s = z[i] > 0.0 ? std::max(z[i] - thr, 0.0) : std::min(z[i] + thr, 0.0);
              x[i] = std::clamp(s, -d.radius, d.radius);
            }
            return x;
          }
        },
        term_);
  }

  // argmin_u <c,u> + g(u); exact, with deterministic tie-breaking (lowest
  // index / lower bound).
  Vector lmo(const Vector& c) const {
    check_dim(c);
    require(c.allFinite(), "CompositeTerm::lmo: c must be finite");
    return std::visit(
        [&](const auto& d) -> Vector {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, SimplexDomain>) {
            Index imin = 0;
            for (Index i = 1; i < c.size(); ++i) {
              if (c[i] < c[imin]) imin = i;
            }
            Vector x = Vector::Zero(c.size());
            x[imin] = d.radius;
            return x;
          } else if constexpr (std::is_same_v<T, BoxDomain>) {
            Vector x(c.size());
            for (Index i = 0; i < c.size(); ++i) x[i] = c[i] > 0.0 ? d.lo[i] : d.hi[i];
            return x;
          } else {
            Vector x(c.size());
            for (Index i = 0; i < c.size(); ++i) {
              if (c[i] > d.tau) {
                x[i] = -d.radius;
              } else if (c[i] < -d.tau) {
                x[i] = d.radius;
              } else {
                x[i] = 0.0;
              }
            }
            return x;
          }
        },
        term_);
  }

  // Euclidean bound on the domain, closed form per variant.
  double domain_radius() const {
    return std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, SimplexDomain>) {
            return d.radius;
          } else if constexpr (std::is_same_v<T, BoxDomain>) {
            return d.lo.cwiseAbs().cwiseMax(d.hi.cwiseAbs()).norm();
          } else {
            return d.radius * std::sqrt(static_cast<double>(d.n));
          }
        },
        term_);
  }

  bool contains(const Vector& x, double tol = -1.0) const {
    check_dim(x);
    if (!x.allFinite()) return false;
    if (tol < 0.0) tol = membership_tol();
    return std::visit(
        [&](const auto& d) -> bool {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, SimplexDomain>) {
            return x.minCoeff() >= -tol && std::abs(x.sum() - d.radius) <= tol;
          } else if constexpr (std::is_same_v<T, BoxDomain>) {
            return (x.array() >= d.lo.array() - tol).all() &&
                   (x.array() <= d.hi.array() + tol).all();
          } else {
            return x.cwiseAbs().maxCoeff() <= d.radius + tol;
          }
        },
        term_);
  }

  Index dim() const {
    return std::visit(
        [](const auto& d) -> Index {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, BoxDomain>) {
            return d.lo.size();
          } else {
            return d.n;
          }
        },
        term_);
  }

  Kind kind() const { return static_cast<Kind>(term_.index()); }

  const SimplexDomain& as_simplex() const { return std::get<SimplexDomain>(term_); }
  const BoxDomain& as_box() const { return std::get<BoxDomain>(term_); }
  const L1BoxDomain& as_l1_box() const { return std::get<L1BoxDomain>(term_); }

 private:
  template <class T>
  explicit CompositeTerm(T term) : term_(std::move(term)) {}

  void check_dim(const Vector& x) const { require_dim(x.size(), dim(), "CompositeTerm"); }

  double membership_tol() const { return 1e-9 * (1.0 + domain_radius()); }

  std::variant<SimplexDomain, BoxDomain, L1BoxDomain> term_;
};

}  // namespace ial
