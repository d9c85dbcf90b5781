// Acceptance suite: one verdict line per criterion, exit code = number of
// failures. Run with no arguments for all criteria or pass indices to run a
// subset, e.g. `acceptance 3 12`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "postcon/chi2.hpp"
#include "postcon/experiments.hpp"
#include "postcon/kl.hpp"

using namespace postcon;

namespace {

struct CriterionResult {
  bool pass = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (condition) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += message;
  }
  void note(const std::string& message) {
    if (!detail.empty()) detail += "; ";
    detail += message;
  }
};

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4g", v);
  return buffer;
}

// --- 1. concentration-bound validity ---------------------------------------
CriterionResult criterion_01() {
  CriterionResult result;
  std::int64_t violations = 0;
  for (std::int64_t k = 1; k <= 50; ++k) {
    for (int ti = 1; ti <= 100; ++ti) {
      const double t = 0.1 * ti;
      const TailBoundReport upper = upper_tail_report(k, t);
      const TailBoundReport lower = lower_tail_report(k, t);
      const TailBoundReport cdf = cdf_lower_report(k, t);
      if (upper.bound < upper.exact) ++violations;
      if (lower.bound < lower.exact) ++violations;
      if (cdf.bound > cdf.exact) ++violations;
    }
  }
  result.require(violations == 0,
                 "bound violations on the (k, t) grid: " + std::to_string(violations));
  result.note("5000 grid points x 3 bounds, 0 violations allowed");
  return result;
}

// --- 2. mean-dominant type-I exactness anchor -------------------------------
CriterionResult criterion_02() {
  CriterionResult result;
  RngStream rng(20260810);
  const std::int64_t reps = 10000;
  double worst_sigmas = 0.0;
  for (int config = 0; config < 20; ++config) {
    RngStream sub = rng.split(config);
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(sub.uniform_index(491));
    const double sigma0 = std::exp(sub.uniform(-1.5, 1.5));
    const ParamPoint truth(sub.normal_vector(n), sigma0);
    Eigen::VectorXd dir = sub.normal_vector(n);
    dir /= dir.norm();
    const double shift = 2.0 * sigma0 * sub.uniform(0.6, 2.4);
    const ParamPoint alt(truth.mu + shift * dir, sigma0);
    const LocalTest test = build_local_test(
        truth, alt, 0.9 * std::min(metric_d(alt, truth), sigma0), {});
    if (test.test_case != TestCase::kMeanDominant) {
      result.require(false, "config " + std::to_string(config) + " left the regime");
      continue;
    }
    const double exact = normal_cdf(-shift / (2.0 * sigma0));
    const double se = std::sqrt(exact * (1.0 - exact) / double(reps));
    const ErrorEstimate estimate = mc_type1_error(test, reps, sub.split(1));
    const double sigmas = std::abs(estimate.estimate - exact) / se;
    worst_sigmas = std::max(worst_sigmas, sigmas);
  }
  result.require(worst_sigmas <= 3.0,
                 "worst deviation " + fmt(worst_sigmas) + " binomial SEs (limit 3)");
  result.note("20 configs, worst |estimate - Phi| = " + fmt(worst_sigmas) + " SEs");
  return result;
}

// --- 3. exponential error decay in n eps^2 / sigma0^2 -----------------------
CriterionResult criterion_03() {
  CriterionResult result;
  TestErrorsConfig config;  // defaults: sigma0 in {0.1,1,10}, levels {5..80}
  CommonConfig common;
  common.seed = 31;
  const auto rows = run_test_errors(config, common);

  std::map<std::string, double> slope1, slope2, r2_1, r2_2;
  for (const auto& row : rows) {
    const auto series = params_lookup(row.params, "series");
    if (!series) continue;
    const bool is_type1 = series->find("|type1") != std::string::npos;
    const bool is_type2 = series->find("|type2") != std::string::npos;
    if (!is_type1 && !is_type2) continue;
    const std::string key = series->substr(0, series->find('|'));
    if (row.metric == "fit_slope") (is_type1 ? slope1 : slope2)[key] = row.value;
    if (row.metric == "fit_r_squared") (is_type1 ? r2_1 : r2_2)[key] = row.value;
  }
  result.require(slope1.size() == 3 && slope2.size() == 3, "expected 3 sigma0 curves");

  for (const auto& [key, slope] : slope1) {
    result.require(slope < 0.0, key + " type1 slope " + fmt(slope) + " not negative");
    result.require(r2_1[key] >= 0.9, key + " type1 R^2 " + fmt(r2_1[key]) + " < 0.9");
  }
  for (const auto& [key, slope] : slope2) {
    result.require(slope < 0.0, key + " type2 slope " + fmt(slope) + " not negative");
    result.require(r2_2[key] >= 0.9, key + " type2 R^2 " + fmt(r2_2[key]) + " < 0.9");
  }
  for (const auto* slopes : {&slope1, &slope2}) {
    double lo = 0.0, hi = -1e300;
    for (const auto& [key, slope] : *slopes) {
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
    }
    // All negative: agreement within a factor of two.
    result.require(lo >= 2.0 * hi,
                   "sigma0 slopes " + fmt(lo) + ".." + fmt(hi) + " differ by > 2x");
  }
  std::ostringstream note;
  note << "type1 slopes";
  for (const auto& [key, slope] : slope1) note << " " << fmt(slope);
  note << ", type2 slopes";
  for (const auto& [key, slope] : slope2) note << " " << fmt(slope);
  note << ", min R^2 " << fmt(std::min(std::min_element(r2_1.begin(), r2_1.end(), [](auto& a, auto& b) { return a.second < b.second; })->second,
                                       std::min_element(r2_2.begin(), r2_2.end(), [](auto& a, auto& b) { return a.second < b.second; })->second));
  result.note(note.str());
  return result;
}

// --- 4. case partition -------------------------------------------------------
CriterionResult criterion_04() {
  CriterionResult result;
  RngStream rng(404);
  const TestConstants constants;
  std::int64_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    RngStream sub = rng.split(trial);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(sub.uniform_index(50));
    const double sigma0 = std::exp(sub.uniform(-2.0, 2.0));
    const ParamPoint truth(sub.normal_vector(n) * sigma0, sigma0);
    const double sigma1 = sub.uniform() < 0.25
                              ? sigma0 * (12.0 + 20.0 * sub.uniform())
                              : sigma0 * (0.2 + 2.2 * sub.uniform());
    const ParamPoint alt(truth.mu + sigma0 * sub.normal_vector(n), sigma1);

    const double nd = static_cast<double>(n);
    const double mean_sq = (alt.mu - truth.mu).squaredNorm();
    const double gap = alt.sigma - truth.sigma;
    const int matches = int(alt.sigma >= constants.variance_split * truth.sigma) +
                        int(alt.sigma < constants.variance_split * truth.sigma &&
                            7.0 * mean_sq > nd * gap * gap) +
                        int(alt.sigma < constants.variance_split * truth.sigma &&
                            7.0 * mean_sq <= nd * gap * gap &&
                            truth.sigma <= alt.sigma) +
                        int(alt.sigma < constants.variance_split * truth.sigma &&
                            7.0 * mean_sq <= nd * gap * gap &&
                            truth.sigma > alt.sigma);
    if (matches != 1) ++violations;
    // Built tests agree with the predicate that fired (admissible separation).
    const double d = metric_d(alt, truth);
    if (d > 0.0 && std::min(d, sigma0) > 1e-8) {
      const LocalTest test = build_local_test(
          truth, alt, 0.9 * std::min(d, sigma0), constants);
      if (test.test_case != select_case(truth, alt, constants)) ++violations;
    }
  }
  result.require(violations == 0,
                 std::to_string(violations) + " partition violations");
  result.note("10^4 admissible pairs, exactly one regime each");
  return result;
}

// --- 5. global test union bound ---------------------------------------------
CriterionResult criterion_05() {
  CriterionResult result;
  GlobalTestConfig config;  // <= 200 centers by construction
  CommonConfig common;
  common.seed = 55;
  const auto rows = run_global_test(config, common);

  double components = 0.0, global_type1 = -1.0, global_se = 0.0;
  double sum_local = -1.0, pooled_se = 0.0;
  std::vector<std::pair<double, double>> accepts;  // (global, local) estimates
  std::vector<std::pair<double, double>> accept_ses;
  for (const auto& row : rows) {
    if (row.metric == "components") components = row.value;
    if (row.metric == "global_type1") {
      global_type1 = row.value;
      global_se = row.std_error.value_or(0.0);
    }
    if (row.metric == "local_type1_sum") sum_local = row.value;
    if (row.metric == "pooled_se") pooled_se = row.value;
    if (row.metric == "global_accept") {
      accepts.emplace_back(row.value, -1.0);
      accept_ses.emplace_back(row.std_error.value_or(0.0), 0.0);
    }
    if (row.metric == "local_accept") {
      accepts.back().second = row.value;
      accept_ses.back().second = row.std_error.value_or(0.0);
    }
  }
  result.require(components >= 1.0 && components <= 200.0,
                 "cover size " + fmt(components) + " outside [1, 200]");
  const double union_slack =
      3.0 * std::sqrt(pooled_se * pooled_se + global_se * global_se);
  result.require(global_type1 <= sum_local + union_slack,
                 "union bound: global " + fmt(global_type1) + " > sum " +
                     fmt(sum_local) + " + " + fmt(union_slack));
  result.require(!accepts.empty(), "no covered-alternative probes emitted");
  for (std::size_t i = 0; i < accepts.size(); ++i) {
    const double slack = 3.0 * std::sqrt(accept_ses[i].first * accept_ses[i].first +
                                         accept_ses[i].second * accept_ses[i].second);
    result.require(accepts[i].first <= accepts[i].second + slack,
                   "covered alternative " + std::to_string(i) + ": global accept " +
                       fmt(accepts[i].first) + " > local " + fmt(accepts[i].second) +
                       " + " + fmt(slack));
  }
  result.note(fmt(components) + " centers, global type1 " + fmt(global_type1) +
              " <= sum " + fmt(sum_local) + ", " + std::to_string(accepts.size()) +
              " covered probes");
  return result;
}

// --- 6. KL closed forms vs Monte Carlo moments -------------------------------
CriterionResult criterion_06() {
  CriterionResult result;
  RngStream rng(606);
  const int reps = 100000;
  double worst_k = 0.0, worst_v = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    RngStream sub = rng.split(pair);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(sub.uniform_index(49));
    const ParamPoint truth(sub.normal_vector(n), 0.5 + 1.5 * sub.uniform());
    const ParamPoint point(
        truth.mu + (0.6 / std::sqrt(double(n))) * sub.normal_vector(n),
        truth.sigma * (0.85 + 0.3 * sub.uniform()));
    const double k_closed = kl_divergence(truth, point);
    const double v_closed = kl_variation(truth, point);

    double acc = 0.0, acc_sq = 0.0, acc_4 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const Observation obs = sample_observation(truth, sub.split(r));
      const double ratio =
          gaussian_log_density(truth, obs.y) - gaussian_log_density(point, obs.y);
      acc += ratio;
      const double centered = (ratio - k_closed) * (ratio - k_closed);
      acc_sq += centered;
      acc_4 += centered * centered;
    }
    const double k_se = std::sqrt((acc_sq / reps) / reps);
    const double v_mc = acc_sq / reps;
    const double v_se = std::sqrt(std::max(1e-300, acc_4 / reps - v_mc * v_mc) / reps);
    worst_k = std::max(worst_k, std::abs(k_closed - acc / reps) / k_se);
    worst_v = std::max(worst_v, std::abs(v_closed - v_mc) / v_se);
  }
  result.require(worst_k <= 3.0, "K deviates by " + fmt(worst_k) + " SEs");
  result.require(worst_v <= 3.0, "V deviates by " + fmt(worst_v) + " SEs");
  result.note("50 pairs x 10^5 draws, worst K " + fmt(worst_k) + " SE, worst V " +
              fmt(worst_v) + " SE");
  return result;
}

// --- 7. variance-prior audits ------------------------------------------------
CriterionResult criterion_07() {
  CriterionResult result;
  const std::int64_t n = 1000000;
  const double xi = 0.45;

  // Inverse gamma with shape 1 inside its admissible window.
  {
    const double shape = 1.0, scale = 0.05;
    const double sigma0_sq = 0.1;
    const auto window =
        example_window_inverse_gamma(shape, scale, xi, n, sigma0_sq);
    result.require(window.satisfied, "inverse-gamma sigma0 not inside its window");
    const double sigma0 = std::sqrt(sigma0_sq);
    const double eps_n = sigma0 * std::pow(double(n), -xi);
    const auto reports =
        audit_sigma_prior(SigmaPriorSpec::inverse_gamma(shape, scale), sigma0, eps_n);
    for (const auto& rep : reports)
      result.require(rep.satisfied, "inverse-gamma audit failed: " + rep.condition);

    // Pushed below the window by a factor n, the floor check must fail.
    const double outside_sq = window.lhs / static_cast<double>(n);
    result.require(
        !example_window_inverse_gamma(shape, scale, xi, n, outside_sq).satisfied,
        "pushed inverse-gamma sigma0 still inside the window");
    const double sigma_out = std::sqrt(outside_sq);
    const auto outside = audit_sigma_prior(
        SigmaPriorSpec::inverse_gamma(shape, scale), sigma_out,
        sigma_out * std::pow(double(n), -xi));
    result.require(!outside[2].satisfied,
                   "inverse-gamma floor check passed outside the window");
  }

  // Half-Cauchy inside its window.
  {
    const double scale = 1.0, sigma0_sq = 1.0;
    const auto window = example_window_half_cauchy(scale, xi, n, sigma0_sq);
    result.require(window.satisfied, "half-Cauchy sigma0 not inside its window");
    const double sigma0 = std::sqrt(sigma0_sq);
    const auto reports = audit_sigma_prior(SigmaPriorSpec::half_cauchy(scale), sigma0,
                                           sigma0 * std::pow(double(n), -xi));
    for (const auto& rep : reports)
      result.require(rep.satisfied, "half-Cauchy audit failed: " + rep.condition);

    // Pushed above the window by a factor n.
    const double outside_sq = window.rhs * static_cast<double>(n);
    result.require(!example_window_half_cauchy(scale, xi, n, outside_sq).satisfied,
                   "pushed half-Cauchy sigma0 still inside the window");
    const double sigma_out = std::sqrt(outside_sq);
    const auto outside = audit_sigma_prior(SigmaPriorSpec::half_cauchy(scale),
                                           sigma_out,
                                           sigma_out * std::pow(double(n), -xi));
    result.require(!outside[2].satisfied,
                   "half-Cauchy floor check passed outside the window");
  }
  result.note("both families pass inside their windows, floor fails outside");
  return result;
}

// --- 8. B-spline correctness -------------------------------------------------
CriterionResult criterion_08() {
  CriterionResult result;
  double worst_unity = 0.0;
  for (int degree = 0; degree <= 5; ++degree) {
    for (int interior = 0; interior <= 50; ++interior) {
      const SplineBasisSpec spec{degree, interior};
      for (int i = 0; i < 10000; ++i) {
        const double x = static_cast<double>(i) / 9999.0;
        const Eigen::VectorXd basis = bspline_basis_eval(spec, x);
        worst_unity = std::max(worst_unity, std::abs(basis.sum() - 1.0));
      }
    }
  }
  result.require(worst_unity <= 1e-10,
                 "partition-of-unity defect " + fmt(worst_unity) + " > 1e-10");

  std::string slope_note;
  for (const double alpha : {0.5, 1.0, 2.0}) {
    const HolderTruth truth = holder_truth(TruthFamily::kFractional, alpha);
    const auto curve =
        approximation_error_curve(truth, 3, {16, 32, 64, 128, 256}, 10000);
    std::vector<double> js, errors;
    for (const auto& point : curve) {
      js.push_back(point.j);
      errors.push_back(point.sup_error);
    }
    const LinearFit fit = fit_rate_exponent(js, errors);
    result.require(std::abs(fit.slope + alpha) <= 0.2,
                   "alpha " + fmt(alpha) + ": slope " + fmt(fit.slope) +
                       " outside -alpha +- 0.2");
    slope_note += " " + fmt(fit.slope);
  }
  result.note("unity defect " + fmt(worst_unity) + ", approximation slopes" +
              slope_note + " for alpha 0.5/1/2");
  return result;
}

// --- 9. posterior oracle equivalence ------------------------------------------
CriterionResult criterion_09() {
  CriterionResult result;

  // High-dimensional sampler vs exact enumeration at p = 8, n = 100.
  {
    RngStream rng(909);
    const Eigen::Index n = 100, p = 8;
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta[1] = 2.0;
    beta[5] = -1.5;
    const Eigen::VectorXd y = X * beta + rng.normal_vector(n);
    HighDimModel model;
    model.X = X;
    model.support_rate = 1.0;
    model.slab_variance = 1.0;
    model.sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);

    const SupportPosterior exact = exact_posterior(y, model, p);
    McmcOptions options;
    options.iterations = 100000;
    options.burn_in = 10000;
    options.thin = 10;
    options.max_card = p;
    const McmcResult chain = mcmc_posterior(y, model, options, RngStream(9001));

    double tv = 0.0;
    for (std::size_t i = 0; i < exact.supports.size(); ++i) {
      const auto it = chain.support_frequency.find(exact.supports[i]);
      const double freq = it == chain.support_frequency.end() ? 0.0 : it->second;
      tv += std::abs(exact.probs[static_cast<Eigen::Index>(i)] - freq);
    }
    tv *= 0.5;
    result.require(tv <= 0.05, "support-marginal TV " + fmt(tv) + " > 0.05");
    result.note("highdim TV " + fmt(tv) + " (acc rate " +
                fmt(chain.acceptance_rate) + ")");
  }

  // Spline posterior over J vs brute-force double integration.
  {
    RngStream rng(910);
    const Eigen::Index n = 50;
    Eigen::VectorXd xs(n);
    for (Eigen::Index i = 0; i < n; ++i) xs[i] = (i + 0.5) / double(n);
    const HolderTruth truth = holder_truth(TruthFamily::kSinusoid, 2.0);
    const Eigen::VectorXd y = truth.evaluate(xs) + 0.5 * rng.normal_vector(n);
    SplineModel model;
    model.j_max = 10;
    model.sigma_prior = SigmaPriorSpec::inverse_gamma(2.0, 2.0);

    const SplinePosterior post = posterior_over_J(y, xs, model);
    const Eigen::VectorXd brute = oracles::brute_force_spline_posterior(y, xs, model);
    double worst_rel = 0.0;
    for (Eigen::Index i = 0; i < brute.size(); ++i) {
      if (brute[i] > 1e-12)
        worst_rel = std::max(worst_rel,
                             std::abs(post.probs[i] - brute[i]) / brute[i]);
      else
        result.require(post.probs[i] <= 2e-12, "mass appeared on a null dimension");
    }
    result.require(worst_rel <= 1e-4,
                   "posterior-over-J relative gap " + fmt(worst_rel) + " > 1e-4");
    result.note("spline relative gap " + fmt(worst_rel));
  }
  return result;
}

// --- 10. empirical contraction, sparse regression ----------------------------
CriterionResult criterion_10() {
  CriterionResult result;
  HighDimExperimentConfig config;  // p=100, s0=3, sigma0=1, n-grid, 10 replicates
  config.mcmc.iterations = 20000;
  config.mcmc.burn_in = 5000;
  config.mcmc.thin = 10;
  config.mcmc.max_card = 15;

  const auto rows = contraction_experiment_highdim(config, 1010, 1);
  std::vector<std::pair<std::int64_t, double>> medians;
  std::map<std::int64_t, double> eps_by_n;
  std::map<std::int64_t, std::vector<double>> bad_by_n;
  for (const auto& row : rows) {
    medians.emplace_back(row.n, row.median_d_error);
    eps_by_n[row.n] = row.eps_n;
    bad_by_n[row.n].push_back(row.bad_mass);
  }
  const auto aggregated = aggregate_median_by_n(medians);
  double ratio_lo = 1e300, ratio_hi = 0.0;
  std::string ratios;
  for (const auto& [n, median] : aggregated) {
    const double ratio = median / eps_by_n[n];
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    ratios += " " + fmt(ratio);
  }
  result.require(ratio_hi / ratio_lo <= 2.0,
                 "error/eps_n ratio spread " + fmt(ratio_hi / ratio_lo) + " > 2");

  const std::int64_t largest = config.n_grid.back();
  double bad_sum = 0.0;
  for (const double b : bad_by_n[largest]) bad_sum += b;
  const double bad_mean = bad_sum / double(bad_by_n[largest].size());
  result.require(bad_mean <= 0.1, "bad-set mass " + fmt(bad_mean) +
                                      " > 0.1 at n = " + std::to_string(largest));
  result.note("ratios" + ratios + ", spread " + fmt(ratio_hi / ratio_lo) +
              ", bad mass " + fmt(bad_mean) + " at n=" + std::to_string(largest));
  return result;
}

// --- 11. empirical contraction, adaptive splines -----------------------------
CriterionResult criterion_11() {
  CriterionResult result;
  SplineExperimentConfig config;  // alpha=2 sinusoid, sigma0=1, n-grid, 10 reps
  const auto rows = contraction_experiment_spline(config, 1111, 1);

  std::vector<std::pair<std::int64_t, double>> medians;
  for (const auto& row : rows) medians.emplace_back(row.n, row.median_error);
  const auto aggregated = aggregate_median_by_n(medians);
  std::vector<double> ns, errors;
  for (const auto& [n, median] : aggregated) {
    ns.push_back(static_cast<double>(n));
    errors.push_back(median);
  }
  const LinearFit fit = fit_rate_exponent(ns, errors);
  result.require(std::abs(fit.slope + 0.4) <= 0.2,
                 "rate slope " + fmt(fit.slope) + " outside -0.4 +- 0.2");
  result.note("fitted slope " + fmt(fit.slope) + " (target -0.4 +- 0.2), R^2 " +
              fmt(fit.r_squared));
  return result;
}

// --- 12. determinism across reruns and thread counts -------------------------
CriterionResult criterion_12() {
  CriterionResult result;
  CommonConfig serial{12, 1, "."};
  CommonConfig threaded{12, 4, "."};

  {
    TestErrorsConfig config;
    config.n = 100;
    config.sigma0_values = {0.5, 2.0};
    config.signal_levels = {8.0, 24.0};
    config.mc_reps = 2000;
    config.ball_samples = 4;
    const std::string a = csv_to_string(run_test_errors(config, serial));
    const std::string b = csv_to_string(run_test_errors(config, serial));
    const std::string c = csv_to_string(run_test_errors(config, threaded));
    result.require(a == b, "test-errors rerun differs");
    result.require(a == c, "test-errors differs across thread counts");
  }
  {
    GlobalTestConfig config;
    config.n = 100;
    config.mc_reps = 500;
    const std::string a = csv_to_string(run_global_test(config, serial));
    const std::string b = csv_to_string(run_global_test(config, threaded));
    result.require(a == b, "global-test differs across thread counts");
  }
  {
    PriorAuditConfig config;
    config.check_window = true;
    const std::string a = condition_reports_to_string(run_prior_audit(config));
    const std::string b = condition_reports_to_string(run_prior_audit(config));
    result.require(a == b, "prior-audit rerun differs");
  }
  {
    HighDimExperimentConfig config;
    config.n_grid = {80};
    config.replicates = 2;
    config.p = 12;
    config.beta0_values = {2.0, -1.5};
    config.support0 = {2, 9};
    config.mcmc.iterations = 2000;
    config.mcmc.burn_in = 500;
    config.mcmc.thin = 5;
    config.mcmc.max_card = 6;
    const std::string a =
        highdim_table_to_string(contraction_experiment_highdim(config, 12, 1));
    const std::string b =
        highdim_table_to_string(contraction_experiment_highdim(config, 12, 4));
    result.require(a == b, "highdim differs across thread counts");
  }
  {
    SplineExperimentConfig config;
    config.n_grid = {64};
    config.replicates = 2;
    config.model.j_max = 12;
    config.posterior_draws = 50;
    const std::string a =
        spline_table_to_string(contraction_experiment_spline(config, 12, 1));
    const std::string b =
        spline_table_to_string(contraction_experiment_spline(config, 12, 4));
    result.require(a == b, "spline differs across thread counts");
  }
  result.note("all five experiment kinds byte-identical across reruns and threads");
  return result;
}

struct Criterion {
  int index;
  const char* name;
  std::function<CriterionResult()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "concentration-bound validity", criterion_01},
      {2, "local test exactness anchor", criterion_02},
      {3, "exponential error decay", criterion_03},
      {4, "case partition", criterion_04},
      {5, "global test union bound", criterion_05},
      {6, "KL closed forms", criterion_06},
      {7, "variance-prior audits", criterion_07},
      {8, "B-spline correctness", criterion_08},
      {9, "posterior oracle equivalence", criterion_09},
      {10, "empirical contraction, sparse regression", criterion_10},
      {11, "empirical contraction, adaptive splines", criterion_11},
      {12, "determinism", criterion_12},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& criterion : criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.index) ==
            selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = criterion.run();
    } catch (const std::exception& err) {
      result.pass = false;
      result.detail = std::string("exception: ") + err.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d (%s): %s [%.1fs]\n",
                result.pass ? "PASS" : "FAIL", criterion.index, criterion.name,
                result.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures;
}
