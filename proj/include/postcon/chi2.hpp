#pragma once

#include <cstdint>

namespace postcon {

/// Standard normal CDF.
double normal_cdf(double x);

/// Exact chi-squared CDF with k degrees of freedom (regularized lower
/// incomplete gamma).
double chi2_cdf(std::int64_t k, double x);

/// Exact chi-squared survival function.
double chi2_sf(std::int64_t k, double x);

/// e^{-t}, an upper bound for Pr{chi2_k - k >= 2 sqrt(k t) + 2 t}.
double chi2_upper_tail_bound(std::int64_t k, double t);

/// e^{-t}, an upper bound for Pr{chi2_k - k <= -2 sqrt(k t)}.
double chi2_lower_tail_bound(std::int64_t k, double t);

/// (t/2)^{k/2} e^{-t/2} / Gamma(k/2 + 1), a lower bound for Pr{chi2_k <= t}.
/// Computed in log space so large k does not overflow.
double chi2_cdf_lower_bound(std::int64_t k, double t);

/// E ||z||_1 for z ~ N_n(0, I): n sqrt(2/pi).
double expected_l1_norm(std::int64_t n);

/// CDF of the noncentral chi-squared distribution with k degrees of freedom
/// and noncentrality lambda, by the Poisson mixture series with relative
/// truncation tolerance rel_tol. Throws std::runtime_error if the series
/// fails to converge within the iteration budget.
double noncentral_chi2_cdf(std::int64_t k, double lambda, double t,
                           double rel_tol = 1e-10);

/// Audit record pairing a closed-form bound with the exact probability it
/// must dominate (or be dominated by).
struct TailBoundReport {
  std::int64_t k = 0;
  double t = 0.0;
  double bound = 0.0;
  double exact = 0.0;
};

/// bound = chi2_upper_tail_bound, exact = Pr{chi2_k >= k + 2 sqrt(kt) + 2t}.
TailBoundReport upper_tail_report(std::int64_t k, double t);
/// bound = chi2_lower_tail_bound, exact = Pr{chi2_k <= k - 2 sqrt(kt)}.
TailBoundReport lower_tail_report(std::int64_t k, double t);
/// bound = chi2_cdf_lower_bound, exact = Pr{chi2_k <= t}; here bound <= exact.
TailBoundReport cdf_lower_report(std::int64_t k, double t);

}  // namespace postcon
