#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "postcon/fit.hpp"
#include "postcon/local_test.hpp"
#include "postcon/param_point.hpp"
#include "postcon/sigma_prior.hpp"

namespace postcon {

/// One posterior draw of (mu, sigma); mu lives on the observation scale
/// (X beta for regression, fitted values for splines).
struct PosteriorSample {
  Eigen::VectorXd mu;
  double sigma = 1.0;
};

/// Posterior mass of the bad set {d((mu,sigma),(truth)) >= M eps_n},
/// estimated by the counting fraction over the supplied draws.
double contraction_diagnostic(const std::vector<PosteriorSample>& samples,
                              const ParamPoint& truth, double eps_n, double M);

/// OLS of log(error) on log(n): the fitted slope is the empirical rate
/// exponent.
LinearFit fit_rate_exponent(const std::vector<double>& n_values,
                            const std::vector<double>& error_values);

/// Monte Carlo mass of the prior box
/// {||mu - mu0||^2 <= n eps^2, |sigma^2 - sigma0^2| <= sigma0 eps}
/// under independent mu and sigma^2 priors. zero_hits flags an estimate of 0
/// (mass below Monte Carlo resolution).
struct PriorMassEstimate {
  ErrorEstimate estimate;
  bool zero_hits = false;
};
PriorMassEstimate prior_mass_d_box(
    const std::function<Eigen::VectorXd(RngStream&)>& mu_prior_sampler,
    const SigmaPriorSpec& sigma_prior, const ParamPoint& truth, double eps,
    std::int64_t reps, RngStream stream);

/// Rate targets for a contraction run: eps_n and sigma0 sequences along an
/// n-grid plus the free constants of the sufficient conditions.
struct ContractionConfig {
  std::vector<std::int64_t> n_grid;
  std::vector<double> eps_n;
  std::vector<double> sigma0_n;
  double lower_exponent = 1.0;  // B in sigma0^2 > n^{-B}
  double separation_multiplier = 10.0;  // M
  double xi = 0.25;  // exponent in the prior-example windows, in (0, 1/2)
};

/// Checks the config's standing assumptions on its own grid:
///   "eps-over-sigma0-decreasing": eps_n / sigma0_n nonincreasing,
///   "signal-grows":               n eps_n^2 / sigma0^2 >= log n at every n,
///   "sigma0-above-floor":         sigma0^2 > n^{-B},
///   "xi-range":                   xi in (0, 1/2).
std::vector<ConditionReport> validate_contraction_config(const ContractionConfig& config);

}  // namespace postcon
