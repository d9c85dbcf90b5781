#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "postcon/contraction.hpp"
#include "postcon/gaussian_marginal.hpp"
#include "postcon/local_test.hpp"
#include "postcon/sigma_prior.hpp"

namespace postcon {

/// Sorted, duplicate-free column indices.
using Support = std::vector<std::int32_t>;

struct SupportHash {
  std::size_t operator()(const Support& s) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto i : s) h = (h ^ static_cast<std::size_t>(i)) * 0x100000001b3ULL;
    return h;
  }
};

/// Sparse linear model: spike-and-slab prior on the coefficients with a
/// complexity prior on the support, and an independent prior on the noise
/// variance.
struct HighDimModel {
  Eigen::MatrixXd X;           // n x p design
  double support_rate = 1.0;   // A in the support prior exp(-A |S| log p)
  double slab_variance = 1.0;  // tau^2
  SigmaPriorSpec sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);

  Eigen::Index p() const { return X.cols(); }
  Eigen::Index n() const { return X.rows(); }
  double design_sup_norm() const { return X.size() ? X.cwiseAbs().maxCoeff() : 0.0; }
};

struct HighDimTruth {
  Eigen::VectorXd beta0;
  Support support0;  // indices of the nonzero entries
  double sigma0 = 1.0;
};

/// Derives the support from beta0 and validates |S0| > 0 and sigma0 > 0.
HighDimTruth make_highdim_truth(Eigen::VectorXd beta0, double sigma0);

/// Unnormalized log prior of a support: -log C(p, |S|) - A |S| log p.
double support_log_prior(const Support& support, Eigen::Index p, double rate);

/// Log normalizer of the support prior over cardinalities 0..max_card
/// (log sum over k of p^{-A k}), computed in log space.
double support_log_normalizer(Eigen::Index p, double rate, Eigen::Index max_card);

/// log Int N_n(y; 0, s I + tau2 X_S X_S') g(s) ds. Requires |S| <= n.
double marginal_log_likelihood(const Support& support, const Eigen::VectorXd& y,
                               const HighDimModel& model, double rel_tol = 1e-10);

struct SupportPosterior {
  std::vector<Support> supports;
  Eigen::VectorXd probs;       // normalized, same order as supports
  Eigen::VectorXd log_weights; // unnormalized log posterior weights
  Eigen::Index map_index = 0;  // argmax of probs

  double prob_of(const Support& s) const;
};

/// Exact posterior over all supports of cardinality <= max_card. Throws if
/// the enumeration would exceed 10^6 supports.
SupportPosterior exact_posterior(const Eigen::VectorXd& y, const HighDimModel& model,
                                 Eigen::Index max_card);

struct McmcOptions {
  std::int64_t iterations = 20000;
  std::int64_t burn_in = 5000;
  std::int64_t thin = 10;
  Eigen::Index max_card = 15;
};

struct HighDimSample {
  Support support;
  Eigen::VectorXd beta;  // full length-p vector, zeros off the support
  double sigma = 1.0;
};

struct McmcResult {
  std::vector<HighDimSample> samples;
  std::unordered_map<Support, double, SupportHash> support_frequency;  // over all
                                                                       // post-burn states
  double acceptance_rate = 0.0;
  double ess = 0.0;  // effective sample size of the |S| trace
  std::int64_t distinct_supports = 0;
};

/// Collapsed Metropolis sampler on supports (add / delete / swap moves with
/// the coefficients and noise variance integrated out), followed by exact
/// conditional draws of (beta_S, sigma) for each retained state. The support
/// marginal of the chain targets the same distribution as exact_posterior.
McmcResult mcmc_posterior(const Eigen::VectorXd& y, const HighDimModel& model,
                          const McmcOptions& options, RngStream stream);

/// Target contraction rate sigma0 sqrt(s0 log p / n).
double eps_n_highdim(double sigma0, std::int64_t s0, std::int64_t p, std::int64_t n);

/// Prior mass escaping the sieve {mu = X_S beta_S : ||beta||_inf <= n,
/// |S| <= M0 s0}: the closed-form bound
///   2 exp(-A M0 s0 log p) + 2 M0 s0 exp(-n^2 / (2 tau^2))
/// together with a direct Monte Carlo estimate of the true escaping mass.
struct SieveMassBound {
  double analytic = 0.0;
  ErrorEstimate mc;
};
SieveMassBound sieve_mass_bound(const HighDimModel& model, std::int64_t s0,
                                double m0_multiplier, std::int64_t n,
                                std::int64_t reps, RngStream stream);

/// Log of the sieve covering-number bound
///   log C(p, M0 s0) + M0 s0 log(3 ||X||_inf s0 n / eps_n).
double entropy_log_bound_highdim(const HighDimModel& model, std::int64_t s0,
                                 double m0_multiplier, double eps_n,
                                 std::int64_t n);

struct HighDimExperimentConfig {
  std::vector<std::int64_t> n_grid{200, 400, 800, 1600};
  int replicates = 10;
  Eigen::Index p = 100;
  std::vector<std::int32_t> support0;     // empty: indices spread over 1..p
  std::vector<double> beta0_values{2.0, -3.0, 1.5};
  double sigma0 = 1.0;
  double support_rate = 1.0;
  double slab_variance = 1.0;
  double design_halfwidth = 1.0;  // X entries iid uniform on [-c, c]
  SigmaPriorSpec sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);
  double separation_multiplier = 10.0;  // M for the bad-set mass
  McmcOptions mcmc;
  Eigen::MatrixXd fixed_design;   // optional: rows >= max n, cols = p
  bool use_fixed_design = false;
  Eigen::VectorXd fixed_response; // optional: single run on supplied (X, y)
  bool use_fixed_response = false;
};

struct HighDimExperimentRow {
  std::int64_t n = 0;
  int replicate = 0;
  double median_d_error = 0.0;
  double mean_d_error = 0.0;
  double eps_n = 0.0;
  double bad_mass = 0.0;
  int support_hit = 0;
  double acceptance_rate = 0.0;
  double ess = 0.0;
};

/// Simulates data on the n-grid, runs the posterior sampler, and reports the
/// posterior error n^{-1/2} ||X(beta - beta0)||_2 + |sigma - sigma0| against
/// the target rate. Deterministic for a fixed seed, independent of threads.
std::vector<HighDimExperimentRow> contraction_experiment_highdim(
    const HighDimExperimentConfig& config, std::uint64_t seed, int threads = 1);

/// Standing-assumption checks per grid point, reported rather than fatal:
///   "signal-grows(n=...)":       s0 log p >= log n,
///   "sparsity-vanishes(n=...)":  s0 log p <= n / log n
/// (the vanishing-sparsity side carries the log n slack).
std::vector<ConditionReport> highdim_assumption_reports(
    const HighDimExperimentConfig& config);

}  // namespace postcon
