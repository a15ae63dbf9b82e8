#pragma once

#include <cmath>
#include <vector>

#include "ial/prng.hpp"
#include "ial/types.hpp"

namespace ial {

// Upper estimate of the squared spectral norm ||A||^2 via power iteration on
// A^T A. A converged Rayleigh quotient is inflated by (1 + tol) so the result
// majorizes the true value; if the iteration does not settle within max_iter,
// returns the squared Frobenius norm, which always dominates ||A||^2.
inline double power_iteration_norm(const Matrix& A, double tol = 1e-6, int max_iter = 1000) {
  require(A.size() > 0, "power_iteration_norm: empty matrix");
  require(tol > 0.0, "power_iteration_norm: tol must be positive");
  require(A.allFinite(), "power_iteration_norm: A must be finite");
  if (A.norm() == 0.0) throw std::invalid_argument("power_iteration_norm: A must be nonzero");

  SplitMix64 rng(0x706f776572ULL);  // fixed seed: deterministic start vector
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = 0.5 + rng.next_uniform();
  v /= v.norm();

  double rho_prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector av = A * v;
    double rho = av.squaredNorm();  // Rayleigh quotient of A^T A at unit v
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= 0.1 * tol * rho) {
      return rho * (1.0 + tol);
    }
    rho_prev = rho;
    Vector w = A.transpose() * av;
    double wn = w.norm();
    if (wn == 0.0) break;  // start vector lies in the null space
    v = w / wn;
  }
  return A.squaredNorm();  // Frobenius fallback
}

// Ordinary least squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_slope: need >= 2 points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  require(denom > 0, "fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// Slope of log(v) against log(k); values are floored to keep logs finite.
inline double fit_loglog_slope(const std::vector<double>& k, const std::vector<double>& v,
                               double floor = 1e-300) {
  require(k.size() == v.size() && k.size() >= 2, "fit_loglog_slope: need >= 2 points");
  std::vector<double> lk(k.size()), lv(v.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    require(k[i] > 0, "fit_loglog_slope: abscissae must be positive");
    lk[i] = std::log(k[i]);
    lv[i] = std::log(std::max(v[i], floor));
  }
  return fit_slope(lk, lv);
}

}  // namespace ial
