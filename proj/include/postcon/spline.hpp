#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "postcon/contraction.hpp"
#include "postcon/gaussian_marginal.hpp"
#include "postcon/rng.hpp"
#include "postcon/sigma_prior.hpp"

namespace postcon {

/// Clamped uniform B-spline basis on [0, 1]: degree q, K interior knots,
/// dimension J = q + K + 1, boundary knots repeated q + 1 times.
struct SplineBasisSpec {
  int degree = 3;
  int interior_knots = 0;

  int dimension() const { return degree + interior_knots + 1; }
};

/// Full knot vector, length J + q + 1.
Eigen::VectorXd spline_knots(const SplineBasisSpec& spec);

/// All J basis functions at x (at most q + 1 nonzero, summing to one).
/// Throws if x is outside [0, 1].
Eigen::VectorXd bspline_basis_eval(const SplineBasisSpec& spec, double x);

/// Row i holds the basis evaluated at xs[i]; every row sums to one.
Eigen::MatrixXd basis_matrix(const SplineBasisSpec& spec, const Eigen::VectorXd& xs);

/// Unnormalized log prior of the basis dimension: -A j log j.
double dimension_log_prior(std::int64_t j, double rate);

/// Normalized dimension prior over {j_lo, ..., j_hi}.
Eigen::VectorXd normalize_dimension_prior(std::int64_t j_lo, std::int64_t j_hi,
                                          double rate);

struct SplineModel {
  double dim_rate = 1.0;        // A in exp(-A j log j)
  double coef_variance = 1.0;   // tau^2
  int j_max = 60;
  int degree = 3;
  SigmaPriorSpec sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);
};

/// Exact trans-dimensional posterior over the basis dimension: one
/// conjugate-slab evidence per J combined with the dimension prior.
struct SplinePosterior {
  int j_lo = 0;
  int j_hi = 0;
  Eigen::VectorXd probs;           // over {j_lo..j_hi}
  Eigen::VectorXd log_evidences;   // per-J marginal log likelihood
  std::vector<SplineBasisSpec> specs;
  std::vector<Eigen::MatrixXd> bases;                // per-J basis matrices
  std::vector<RidgeGaussianMarginal> marginals;
  SigmaPriorSpec sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);

  int mode_j() const;
};

SplinePosterior posterior_over_J(const Eigen::VectorXd& y, const Eigen::VectorXd& xs,
                                 const SplineModel& model);

struct FunctionSample {
  Eigen::VectorXd fvals;  // fitted values at the design points
  double sigma = 1.0;
  int j = 0;
};

/// Joint posterior draws (J, sigma, beta_J) reported as fitted values.
std::vector<FunctionSample> sample_f_posterior(const SplinePosterior& posterior,
                                               int draws, RngStream stream);

/// Root mean square of the entries: sqrt(n^{-1} sum f_i^2).
double empirical_l2_norm(const Eigen::VectorXd& fvals);

/// Target contraction rate ((sigma0^2 log n) / n)^{alpha / (2 alpha + 1)}.
double eps_n_spline(double sigma0, std::int64_t n, double alpha);

enum class TruthFamily { kFractional, kSinusoid };

/// A test function with analytically known smoothness.
struct HolderTruth {
  std::function<double(double)> f0;
  double alpha = 1.0;
  double holder_norm = 1.0;  // recorded bound
  std::string family;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& xs) const;
};

/// Built-in truths: "fractional" has exactly alpha-Holder roughness at
/// x = 1/2 (|x-1/2|^alpha, with the sign flipped on one side when alpha is an
/// even integer so the alpha-th derivative genuinely jumps); "sinusoid" is
/// sin(2 pi x), smooth at every order.
HolderTruth holder_truth(TruthFamily family, double alpha);

struct ApproximationPoint {
  int j = 0;
  double sup_error = 0.0;
};

/// Sup-norm error of the least-squares spline fit of the truth on a fine
/// grid, per basis dimension. Requires degree + 1 >= alpha.
std::vector<ApproximationPoint> approximation_error_curve(
    const HolderTruth& truth, int degree, const std::vector<int>& j_values,
    int grid_points = 10000);

struct SplineExperimentConfig {
  std::vector<std::int64_t> n_grid{128, 256, 512, 1024, 2048};
  int replicates = 10;
  TruthFamily family = TruthFamily::kSinusoid;
  double alpha = 2.0;
  double sigma0 = 1.0;
  SplineModel model;
  double separation_multiplier = 10.0;
  int posterior_draws = 400;
  bool random_design = false;  // default: deterministic uniform grid
  Eigen::VectorXd fixed_xs;    // optional externally supplied design points
  Eigen::VectorXd fixed_y;     // optional externally supplied responses
  bool use_fixed_data = false;
};

struct SplineExperimentRow {
  std::int64_t n = 0;
  int replicate = 0;
  double median_error = 0.0;
  double eps_n = 0.0;
  double bad_mass = 0.0;
  int posterior_mode_j = 0;
};

/// Per (n, replicate): simulate (or take the supplied data), compute the
/// posterior, and report the median posterior error ||f - f0||_n + |sigma -
/// sigma0| with the bad-set mass at M eps_n.
std::vector<SplineExperimentRow> contraction_experiment_spline(
    const SplineExperimentConfig& config, std::uint64_t seed, int threads = 1);

/// Standing-assumption check per grid point ("sigma0-window-spline(n=...)"):
///   ((log n)/n)^{2 alpha} log n <= sigma0^2 <= n / log n,
/// the strict-domination side carrying the log n slack. Violations are
/// reported, not fatal: the run proceeds but the rate target loses its
/// backing.
std::vector<ConditionReport> spline_assumption_reports(
    const SplineExperimentConfig& config);

}  // namespace postcon
