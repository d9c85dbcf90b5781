#include "postcon/gaussian_marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace postcon {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Coarse scan window for locating the variance mass in u = log s. The
// integrand decays at least exponentially in |u| at both ends, so this range
// is effectively (0, infinity).
constexpr double kLogVarLo = -90.0;
constexpr double kLogVarHi = 90.0;

}  // namespace

RidgeGaussianMarginal::RidgeGaussianMarginal(const Eigen::MatrixXd& phi,
                                             const Eigen::VectorXd& y,
                                             double tau2)
    : n_(y.size()), k_(phi.cols()), tau2_(tau2) {
  if (phi.rows() != y.size())
    throw std::invalid_argument("RidgeGaussianMarginal: row count mismatch");
  if (!(tau2 > 0.0))
    throw std::invalid_argument("RidgeGaussianMarginal: tau2 must be > 0");
  y_sq_norm_ = y.squaredNorm();

  if (k_ == 0) {
    resid_sq_ = y_sq_norm_;
    rank_ = 0;
    return;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(phi.transpose() * phi);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("RidgeGaussianMarginal: eigendecomposition failed");
  eigvecs_ = eig.eigenvectors();
  eigvals_ = eig.eigenvalues().cwiseMax(0.0);
  proj_ = eigvecs_.transpose() * (phi.transpose() * y);

  const double cutoff = eigvals_.size() > 0
                            ? eigvals_[eigvals_.size() - 1] * 1e-12
                            : 0.0;
  double explained = 0.0;
  rank_ = 0;
  for (Eigen::Index j = 0; j < k_; ++j) {
    if (eigvals_[j] > cutoff && eigvals_[j] > 0.0) {
      explained += proj_[j] * proj_[j] / eigvals_[j];
      ++rank_;
    } else {
      eigvals_[j] = 0.0;
    }
  }
  resid_sq_ = std::max(0.0, y_sq_norm_ - explained);
}

double RidgeGaussianMarginal::log_marginal_given_variance(double s) const {
  if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n_);
  double log_det = (nd - static_cast<double>(rank_)) * std::log(s);
  double quad = resid_sq_ / s;
  for (Eigen::Index j = 0; j < k_; ++j) {
    if (eigvals_[j] <= 0.0) continue;
    const double cov_eig = s + tau2_ * eigvals_[j];
    log_det += std::log(cov_eig);
    quad += proj_[j] * proj_[j] / eigvals_[j] / cov_eig;
  }
  return -0.5 * (nd * kLog2Pi + log_det + quad);
}

Eigen::VectorXd RidgeGaussianMarginal::posterior_mean(double s) const {
  if (k_ == 0) return Eigen::VectorXd();
  Eigen::VectorXd scaled(k_);
  for (Eigen::Index j = 0; j < k_; ++j)
    scaled[j] = proj_[j] / (eigvals_[j] + s / tau2_);
  return eigvecs_ * scaled;
}

Eigen::VectorXd RidgeGaussianMarginal::sample_coefficients(double s,
                                                           RngStream& rng) const {
  if (k_ == 0) return Eigen::VectorXd();
  Eigen::VectorXd coord(k_);
  for (Eigen::Index j = 0; j < k_; ++j) {
    const double precision = eigvals_[j] / s + 1.0 / tau2_;
    const double mean = proj_[j] / (eigvals_[j] + s / tau2_);
    coord[j] = mean + rng.normal() / std::sqrt(precision);
  }
  return eigvecs_ * coord;
}

namespace {

// Integrand of the evidence in u = log s, including the Jacobian e^u.
double log_posterior_u(const RidgeGaussianMarginal& marginal,
                       const SigmaPriorSpec& prior, double u) {
  const double s = std::exp(u);
  return marginal.log_marginal_given_variance(s) + prior.log_density(s) + u;
}

// Scan window in u = log s, clipped to where the prior carries mass so that
// arbitrarily narrow priors are still resolved. Tabulated densities vanish
// outside their grid, so their window is exact; quantile-based bounds get a
// pad against quantile roundoff.
std::pair<double, double> scan_window(const SigmaPriorSpec& prior) {
  const auto [s_lo, s_hi] = prior.support_bounds();
  const double pad = prior.is_tabulated() ? 0.0 : 1.0;
  const double lo = std::max(kLogVarLo, std::log(std::max(s_lo, 1e-290)) - pad);
  const double hi = std::min(kLogVarHi, std::log(s_hi) + pad);
  return {lo, std::max(hi, lo + 1e-6)};
}

}  // namespace

double log_evidence(const RidgeGaussianMarginal& marginal,
                    const SigmaPriorSpec& sigma_prior, double rel_tol) {
  auto log_f = [&](double u) { return log_posterior_u(marginal, sigma_prior, u); };
  const auto [u_lo, u_hi] = scan_window(sigma_prior);
  const Bracket br = bracket_log_mass(log_f, u_lo, u_hi);
  if (!br.found)
    throw std::runtime_error("log_evidence: integrand vanished on the scan grid");
  const LogIntegralResult result = log_integrate(log_f, br.lo, br.hi, rel_tol);
  if (!result.converged)
    throw std::runtime_error("log_evidence: quadrature failed to converge");
  return result.log_value;
}

VarianceConditional::VarianceConditional(const RidgeGaussianMarginal& marginal,
                                         const SigmaPriorSpec& sigma_prior,
                                         int initial_grid) {
  auto log_f = [&](double u) { return log_posterior_u(marginal, sigma_prior, u); };
  const auto [u_lo, u_hi] = scan_window(sigma_prior);
  const Bracket br = bracket_log_mass(log_f, u_lo, u_hi);
  if (!br.found)
    throw std::runtime_error("VarianceConditional: integrand vanished");

  // Refine the log-spaced grid until the trapezoid normalizer stabilizes.
  int points = initial_grid;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int round = 0; round < 6; ++round, points *= 2) {
    grid_u_.resize(points);
    Eigen::VectorXd log_vals(points);
    const double step = (br.hi - br.lo) / (points - 1);
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      grid_u_[i] = br.lo + i * step;
      log_vals[i] = log_f(grid_u_[i]);
      peak = std::max(peak, log_vals[i]);
    }
    cdf_.resize(points);
    cdf_[0] = 0.0;
    for (int i = 1; i < points; ++i) {
      const double cell = 0.5 *
                          (std::exp(log_vals[i - 1] - peak) +
                           std::exp(log_vals[i] - peak)) *
                          step;
      cdf_[i] = cdf_[i - 1] + cell;
    }
    const double total = cdf_[points - 1];
    if (!(total > 0.0))
      throw std::runtime_error("VarianceConditional: zero normalizer");
    log_normalizer_ = peak + std::log(total);
    cdf_ /= total;
    if (round > 0 && std::abs(log_normalizer_ - prev) < 1e-8) break;
    prev = log_normalizer_;
  }
}

double VarianceConditional::sample(RngStream& rng) const {
  const double u = rng.uniform();
  // Binary search on the CDF, then linear interpolation inside the cell.
  Eigen::Index lo = 0, hi = cdf_.size() - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (cdf_[mid] < u ? lo : hi) = mid;
  }
  const double span = cdf_[hi] - cdf_[lo];
  const double w = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
  return std::exp(grid_u_[lo] + w * (grid_u_[hi] - grid_u_[lo]));
}

}  // namespace postcon
