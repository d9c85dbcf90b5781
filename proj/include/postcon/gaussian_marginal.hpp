#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "postcon/quadrature.hpp"
#include "postcon/rng.hpp"
#include "postcon/sigma_prior.hpp"

namespace postcon {

/// Evidence and coefficient posterior for the conjugate-slab linear model
///   y | beta, s ~ N_n(Phi beta, s I),   beta ~ N_k(0, tau2 I),
/// as functions of the noise variance s. One symmetric eigendecomposition of
/// Phi' Phi diagonalizes everything; rank deficiency is handled by dropping
/// eigenvalues below a relative threshold.
class RidgeGaussianMarginal {
 public:
  RidgeGaussianMarginal(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                        double tau2);

  /// log N_n(y; 0, s I + tau2 Phi Phi').
  double log_marginal_given_variance(double s) const;

  /// Posterior mean of beta given the noise variance s.
  Eigen::VectorXd posterior_mean(double s) const;

  /// Draw beta from its Gaussian posterior given s.
  Eigen::VectorXd sample_coefficients(double s, RngStream& rng) const;

  Eigen::Index n() const { return n_; }
  Eigen::Index k() const { return k_; }
  Eigen::Index rank() const { return rank_; }
  double tau2() const { return tau2_; }

 private:
  Eigen::MatrixXd eigvecs_;   // k x k eigenvectors of Phi' Phi
  Eigen::VectorXd eigvals_;   // eigenvalues, zeros clamped
  Eigen::VectorXd proj_;      // V' Phi' y
  double y_sq_norm_ = 0.0;
  double resid_sq_ = 0.0;     // ||y||^2 minus the explained part
  Eigen::Index n_ = 0, k_ = 0, rank_ = 0;
  double tau2_ = 0.0;
};

/// log of the evidence integral over the noise variance,
///   log Int m(s) g(s) ds,
/// by adaptive Gauss-Kronrod quadrature in u = log s.
double log_evidence(const RidgeGaussianMarginal& marginal,
                    const SigmaPriorSpec& sigma_prior, double rel_tol = 1e-10);

/// Inverse-CDF sampler for the 1-D conditional of the noise variance,
///   p(s) proportional to m(s) g(s),
/// tabulated on a log-spaced grid that is refined until the normalizer is
/// stable.
class VarianceConditional {
 public:
  VarianceConditional(const RidgeGaussianMarginal& marginal,
                      const SigmaPriorSpec& sigma_prior, int initial_grid = 512);

  double sample(RngStream& rng) const;
  double log_normalizer() const { return log_normalizer_; }

 private:
  Eigen::VectorXd grid_u_;  // log-variance grid
  Eigen::VectorXd cdf_;     // normalized cumulative weights
  double log_normalizer_ = 0.0;
};

}  // namespace postcon
