#pragma once

#include <cmath>
#include <stdexcept>

#include "postcon/param_point.hpp"

namespace postcon {

/// K(N(mu0, s0^2 I), N(mu, s^2 I)) in closed form:
///   (n/2) log(s^2/s0^2) - (n/2)(1 - s0^2/s^2) + ||mu - mu0||^2 / (2 s^2).
inline double kl_divergence(const ParamPoint& truth, const ParamPoint& point) {
  if (truth.n() != point.n())
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  const double n = static_cast<double>(truth.n());
  const double ratio = (truth.sigma * truth.sigma) / (point.sigma * point.sigma);
  const double mean_term =
      (point.mu - truth.mu).squaredNorm() / (2.0 * point.sigma * point.sigma);
  const double value = -0.5 * n * std::log(ratio) - 0.5 * n * (1.0 - ratio) + mean_term;
  return value < 0.0 ? 0.0 : value;  // clamp the ~1e-16 negatives at point == truth
}

/// Second-order variation V = Var_truth(log likelihood ratio):
///   (n/2)(1 - s0^2/s^2)^2 + s0^2 ||mu - mu0||^2 / s^4.
inline double kl_variation(const ParamPoint& truth, const ParamPoint& point) {
  if (truth.n() != point.n())
    throw std::invalid_argument("kl_variation: dimension mismatch");
  const double n = static_cast<double>(truth.n());
  const double s0_sq = truth.sigma * truth.sigma;
  const double s_sq = point.sigma * point.sigma;
  const double w = 1.0 - s0_sq / s_sq;
  return 0.5 * n * w * w + s0_sq * (point.mu - truth.mu).squaredNorm() / (s_sq * s_sq);
}

/// log density of N_n(mu, sigma^2 I) at y.
inline double gaussian_log_density(const ParamPoint& p, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(p.n());
  const double s_sq = p.sigma * p.sigma;
  return -0.5 * n * std::log(2.0 * M_PI * s_sq) -
         (y - p.mu).squaredNorm() / (2.0 * s_sq);
}

}  // namespace postcon
