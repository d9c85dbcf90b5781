#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "postcon/rng.hpp"

namespace postcon {

/// A mean vector together with a noise standard deviation. A single Gaussian
/// model N_n(mu, sigma^2 I_n) is identified by one of these; truth and
/// alternatives are distinguished purely by usage.
struct ParamPoint {
  Eigen::VectorXd mu;
  double sigma = 1.0;

  ParamPoint() = default;
  ParamPoint(Eigen::VectorXd mean, double sd) : mu(std::move(mean)), sigma(sd) {}

  Eigen::Index n() const { return mu.size(); }
};

struct Observation {
  Eigen::VectorXd y;
};

inline void validate_param_point(const ParamPoint& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw std::invalid_argument("ParamPoint: sigma must be positive and finite");
  if (p.mu.size() < 1) throw std::invalid_argument("ParamPoint: mu must be nonempty");
  if (!p.mu.allFinite()) throw std::invalid_argument("ParamPoint: mu must be finite");
}

/// Distance between models: sqrt(n^{-1} ||mu_a - mu_b||_2^2 + |sigma_a - sigma_b|^2).
/// Equivalently the Euclidean distance between (n^{-1/2} mu, sigma) vectors.
template <typename DerivedA, typename DerivedB>
double metric_d(const Eigen::MatrixBase<DerivedA>& mu_a, double sigma_a,
                const Eigen::MatrixBase<DerivedB>& mu_b, double sigma_b) {
  if (mu_a.size() != mu_b.size())
    throw std::invalid_argument("metric_d: mean vectors have different lengths");
  if (mu_a.size() == 0) throw std::invalid_argument("metric_d: empty mean vectors");
  const double n = static_cast<double>(mu_a.size());
  const double mean_part = (mu_a.derived() - mu_b.derived()).squaredNorm() / n;
  const double sigma_part = (sigma_a - sigma_b) * (sigma_a - sigma_b);
  return std::sqrt(mean_part + sigma_part);
}

inline double metric_d(const ParamPoint& a, const ParamPoint& b) {
  return metric_d(a.mu, a.sigma, b.mu, b.sigma);
}

/// One draw y ~ N_n(truth.mu, truth.sigma^2 I_n).
inline Observation sample_observation(const ParamPoint& truth, RngStream stream) {
  validate_param_point(truth);
  Observation obs;
  obs.y = truth.mu + truth.sigma * stream.normal_vector(truth.n());
  return obs;
}

inline Observation sample_observation(const ParamPoint& truth, std::uint64_t rng_seed) {
  return sample_observation(truth, RngStream(rng_seed));
}

}  // namespace postcon
