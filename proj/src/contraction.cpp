#include "postcon/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace postcon {

double contraction_diagnostic(const std::vector<PosteriorSample>& samples,
                              const ParamPoint& truth, double eps_n, double M) {
  if (samples.empty())
    throw std::invalid_argument("contraction_diagnostic: empty sample list");
  const double threshold = M * eps_n;
  std::int64_t bad = 0;
  for (const PosteriorSample& s : samples)
    if (metric_d(s.mu, s.sigma, truth.mu, truth.sigma) >= threshold) ++bad;
  return static_cast<double>(bad) / static_cast<double>(samples.size());
}

LinearFit fit_rate_exponent(const std::vector<double>& n_values,
                            const std::vector<double>& error_values) {
  if (n_values.size() != error_values.size() || n_values.size() < 3)
    throw std::invalid_argument("fit_rate_exponent: need >= 3 matched points");
  std::vector<double> log_n(n_values.size()), log_err(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (!(n_values[i] > 0.0) || !(error_values[i] > 0.0))
      throw std::invalid_argument("fit_rate_exponent: values must be positive");
    log_n[i] = std::log(n_values[i]);
    log_err[i] = std::log(error_values[i]);
  }
  return linear_fit(log_n, log_err);
}

PriorMassEstimate prior_mass_d_box(
    const std::function<Eigen::VectorXd(RngStream&)>& mu_prior_sampler,
    const SigmaPriorSpec& sigma_prior, const ParamPoint& truth, double eps,
    std::int64_t reps, RngStream stream) {
  if (reps < 1) throw std::invalid_argument("prior_mass_d_box: reps must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("prior_mass_d_box: eps must be > 0");
  const double n = static_cast<double>(truth.n());
  const double mu_budget = n * eps * eps;
  const double sigma_sq_budget = truth.sigma * eps;
  const double sigma0_sq = truth.sigma * truth.sigma;

  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < reps; ++i) {
    RngStream draw = stream.split(i);
    const Eigen::VectorXd mu = mu_prior_sampler(draw);
    if (mu.size() != truth.n())
      throw std::invalid_argument("prior_mass_d_box: sampler dimension mismatch");
    const double s_sq = sigma_prior.sample(draw);
    if ((mu - truth.mu).squaredNorm() <= mu_budget &&
        std::abs(s_sq - sigma0_sq) <= sigma_sq_budget)
      ++hits;
  }

  PriorMassEstimate out;
  out.estimate.reps = reps;
  out.estimate.estimate = static_cast<double>(hits) / static_cast<double>(reps);
  out.estimate.std_error = std::sqrt(out.estimate.estimate *
                                     (1.0 - out.estimate.estimate) /
                                     static_cast<double>(reps));
  out.zero_hits = hits == 0;
  return out;
}

std::vector<ConditionReport> validate_contraction_config(
    const ContractionConfig& config) {
  const std::size_t m = config.n_grid.size();
  if (m == 0 || config.eps_n.size() != m || config.sigma0_n.size() != m)
    throw std::invalid_argument(
        "validate_contraction_config: n_grid, eps_n, sigma0_n must be nonempty "
        "and equal-length");

  std::vector<ConditionReport> reports;
  {
    ConditionReport rep;
    rep.condition = "eps-over-sigma0-decreasing";
    double worst = -1e300;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double now = config.eps_n[i] / config.sigma0_n[i];
      const double next = config.eps_n[i + 1] / config.sigma0_n[i + 1];
      worst = std::max(worst, next - now);
    }
    rep.lhs = m > 1 ? worst : 0.0;
    rep.rhs = 0.0;
    rep.satisfied = rep.lhs <= rep.rhs;
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }
  {
    ConditionReport rep;
    rep.condition = "signal-grows";
    double worst = 1e300;  // min over the grid of n eps^2/sigma0^2 - log n
    for (std::size_t i = 0; i < m; ++i) {
      const double n = static_cast<double>(config.n_grid[i]);
      const double ratio = n * config.eps_n[i] * config.eps_n[i] /
                           (config.sigma0_n[i] * config.sigma0_n[i]);
      worst = std::min(worst, ratio - std::log(n));
    }
    rep.lhs = 0.0;
    rep.rhs = worst;
    rep.satisfied = rep.rhs >= 0.0;
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }
  {
    ConditionReport rep;
    rep.condition = "sigma0-above-floor";
    double worst = 1e300;
    for (std::size_t i = 0; i < m; ++i) {
      const double n = static_cast<double>(config.n_grid[i]);
      const double floor = std::pow(n, -config.lower_exponent);
      worst = std::min(worst,
                       config.sigma0_n[i] * config.sigma0_n[i] - floor);
    }
    rep.lhs = 0.0;
    rep.rhs = worst;
    rep.satisfied = rep.rhs > 0.0;
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }
  {
    ConditionReport rep;
    rep.condition = "xi-range";
    rep.lhs = config.xi;
    rep.rhs = 0.5;
    rep.satisfied = config.xi > 0.0 && config.xi < 0.5;
    rep.margin = rep.satisfied ? std::min(config.xi, 0.5 - config.xi)
                               : -std::abs(config.xi - 0.25);
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace postcon
