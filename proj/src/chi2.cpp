#include "postcon/chi2.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/SpecialFunctions>

namespace postcon {

namespace {

double regularized_gamma_p(double a, double x) {
  return Eigen::numext::igamma(a, x);
}

double regularized_gamma_q(double a, double x) {
  return Eigen::numext::igammac(a, x);
}

void require_df(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("chi2: degrees of freedom must be >= 1");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_cdf(std::int64_t k, double x) {
  require_df(k);
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * static_cast<double>(k), 0.5 * x);
}

double chi2_sf(std::int64_t k, double x) {
  require_df(k);
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * static_cast<double>(k), 0.5 * x);
}

double chi2_upper_tail_bound(std::int64_t k, double t) {
  require_df(k);
  if (!(t > 0.0)) throw std::invalid_argument("chi2_upper_tail_bound: t must be > 0");
  return std::exp(-t);
}

double chi2_lower_tail_bound(std::int64_t k, double t) {
  require_df(k);
  if (!(t > 0.0)) throw std::invalid_argument("chi2_lower_tail_bound: t must be > 0");
  return std::exp(-t);
}

double chi2_cdf_lower_bound(std::int64_t k, double t) {
  require_df(k);
  if (!(t > 0.0)) throw std::invalid_argument("chi2_cdf_lower_bound: t must be > 0");
  const double half_k = 0.5 * static_cast<double>(k);
  const double log_bound =
      half_k * std::log(0.5 * t) - 0.5 * t - std::lgamma(half_k + 1.0);
  return std::exp(log_bound);
}

double expected_l1_norm(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("expected_l1_norm: n must be >= 1");
  return static_cast<double>(n) * std::sqrt(2.0 / M_PI);
}

double noncentral_chi2_cdf(std::int64_t k, double lambda, double t, double rel_tol) {
  require_df(k);
  if (lambda < 0.0 || t < 0.0 || !std::isfinite(lambda) || !std::isfinite(t))
    throw std::invalid_argument("noncentral_chi2_cdf: lambda and t must be finite and >= 0");
  if (t == 0.0) return 0.0;
  if (lambda == 0.0) return chi2_cdf(k, t);

  // Poisson mixture sum_j pois(j; lambda/2) * P{chi2_{k+2j} <= t}, expanded
  // outward from the modal term with weights normalized at the mode so no
  // term under- or overflows.
  const double half_lambda = 0.5 * lambda;
  const double half_k = 0.5 * static_cast<double>(k);
  const double half_t = 0.5 * t;
  const std::int64_t j0 = static_cast<std::int64_t>(half_lambda);
  const std::int64_t max_terms = 1000000;

  auto cdf_term = [&](std::int64_t j) {
    return regularized_gamma_p(half_k + static_cast<double>(j), half_t);
  };

  double weighted = cdf_term(j0);
  double weight_sum = 1.0;

  // Downward from the mode.
  double w = 1.0;
  for (std::int64_t j = j0; j-- > 0;) {
    w *= static_cast<double>(j + 1) / half_lambda;
    weighted += w * cdf_term(j);
    weight_sum += w;
    if (w < rel_tol * 1e-6 * weight_sum) break;
  }
  // Upward from the mode; the CDF terms are decreasing in j.
  w = 1.0;
  std::int64_t j = j0;
  for (;;) {
    ++j;
    w *= half_lambda / static_cast<double>(j);
    const double term = cdf_term(j);
    weighted += w * term;
    weight_sum += w;
    if (w * (1.0 + term) < rel_tol * 1e-6 * (weight_sum + weighted)) break;
    if (j - j0 > max_terms)
      throw std::runtime_error("noncentral_chi2_cdf: series failed to converge");
  }

  double value = weighted / weight_sum;
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return value;
}

TailBoundReport upper_tail_report(std::int64_t k, double t) {
  const double kd = static_cast<double>(k);
  const double threshold = kd + 2.0 * std::sqrt(kd * t) + 2.0 * t;
  return {k, t, chi2_upper_tail_bound(k, t), chi2_sf(k, threshold)};
}

TailBoundReport lower_tail_report(std::int64_t k, double t) {
  const double kd = static_cast<double>(k);
  const double threshold = kd - 2.0 * std::sqrt(kd * t);
  return {k, t, chi2_lower_tail_bound(k, t), chi2_cdf(k, threshold)};
}

TailBoundReport cdf_lower_report(std::int64_t k, double t) {
  return {k, t, chi2_cdf_lower_bound(k, t), chi2_cdf(k, t)};
}

}  // namespace postcon
