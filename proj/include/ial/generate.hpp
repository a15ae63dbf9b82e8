#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "ial/prng.hpp"
#include "ial/problem.hpp"

namespace ial {

enum class Family { simplex_ls, box_qp, l1_basis_pursuit };

inline std::string family_to_string(Family f) {
  switch (f) {
    case Family::simplex_ls: return "simplex_ls";
    case Family::box_qp: return "box_qp";
    case Family::l1_basis_pursuit: return "l1_basis_pursuit";
  }
  throw std::invalid_argument("family_to_string: unknown family");
}

inline Family family_from_string(const std::string& s) {
  if (s == "simplex_ls") return Family::simplex_ls;
  if (s == "box_qp") return Family::box_qp;
  if (s == "l1_basis_pursuit") return Family::l1_basis_pursuit;
  throw std::invalid_argument("unknown family '" + s +
                              "'; valid families: simplex_ls, box_qp, l1_basis_pursuit");
}

// Uniform-ish draw from dom g, variant-specific: simplex via normalized
// exponentials, boxes via per-coordinate uniforms.
inline Vector sample_domain_point(const CompositeTerm& g, SplitMix64& rng) {
  const Index n = g.dim();
  Vector x(n);
  switch (g.kind()) {
    case CompositeTerm::Kind::simplex: {
      double r = g.as_simplex().radius;
      double sum = 0.0;
      for (Index i = 0; i < n; ++i) {
        x[i] = rng.next_exponential();
        sum += x[i];
      }
      x *= r / sum;
      return x;
    }
    case CompositeTerm::Kind::box: {
      const auto& b = g.as_box();
      for (Index i = 0; i < n; ++i) x[i] = b.lo[i] + rng.next_uniform() * (b.hi[i] - b.lo[i]);
      return x;
    }
    case CompositeTerm::Kind::l1_box: {
      double r = g.as_l1_box().radius;
      for (Index i = 0; i < n; ++i) x[i] = (2.0 * rng.next_uniform() - 1.0) * r;
      return x;
    }
  }
  throw std::logic_error("sample_domain_point: unknown composite kind");
}

struct GeneratedInstance {
  ProblemInstance instance;
  Vector planted;  // feasible point used to build b = A*planted
};

namespace detail {

inline Matrix normal_matrix(SplitMix64& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  }
  return m;
}

inline Vector normal_vector(SplitMix64& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.next_normal();
  return v;
}

}  // namespace detail

// Deterministic in (family, n, m, seed). Draw order is fixed: A first
// (row-major), then family payloads, then the planted point.
inline GeneratedInstance generate_instance_detail(Family family, Index n, Index m,
                                                  std::uint64_t seed) {
  require(m >= 1 && m <= n, "generate_instance: need 1 <= m <= n");
  SplitMix64 rng(seed);
  Matrix A = detail::normal_matrix(rng, m, n);

  std::string name = family_to_string(family) + "_n" + std::to_string(n) + "_m" +
                     std::to_string(m) + "_s" + std::to_string(seed);

  switch (family) {
    case Family::simplex_ls: {
      Matrix M = detail::normal_matrix(rng, n, n);
      CompositeTerm g = CompositeTerm::simplex(n, 1.0);
      Vector planted = sample_domain_point(g, rng);
      Vector y = M * planted + 0.25 * detail::normal_vector(rng, n);
      Vector b = A * planted;
      ProblemInstance p{SmoothTerm::least_squares(std::move(M), std::move(y)), std::move(g),
                        LinearConstraint::make(std::move(A), std::move(b)), std::move(name)};
      p.validate();
      return GeneratedInstance{std::move(p), std::move(planted)};
    }
    case Family::box_qp: {
      Matrix G = detail::normal_matrix(rng, n, n);
      Matrix Q = (G.transpose() * G) / static_cast<double>(n);
      Q += Matrix::Identity(n, n);
      Q = 0.5 * (Q + Q.transpose());  // exact symmetry under roundoff
      Vector c = detail::normal_vector(rng, n);
      CompositeTerm g = CompositeTerm::box(Vector::Zero(n), Vector::Ones(n));
      Vector planted = sample_domain_point(g, rng);
      Vector b = A * planted;
      ProblemInstance p{SmoothTerm::quadratic(std::move(Q), std::move(c)), std::move(g),
                        LinearConstraint::make(std::move(A), std::move(b)), std::move(name)};
      p.validate();
      return GeneratedInstance{std::move(p), std::move(planted)};
    }
    case Family::l1_basis_pursuit: {
      CompositeTerm g = CompositeTerm::l1_box(n, 1.0, 1.0);
      Vector planted = sample_domain_point(g, rng);
      Vector b = A * planted;
      ProblemInstance p{SmoothTerm::zero(n), std::move(g),
                        LinearConstraint::make(std::move(A), std::move(b)), std::move(name)};
      p.validate();
      return GeneratedInstance{std::move(p), std::move(planted)};
    }
  }
  throw std::invalid_argument("generate_instance: unknown family");
}

inline ProblemInstance generate_instance(Family family, Index n, Index m, std::uint64_t seed) {
  return generate_instance_detail(family, n, m, seed).instance;
}

}  // namespace ial
