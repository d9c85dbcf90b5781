#include "postcon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "postcon/fit.hpp"

namespace postcon {

namespace {

double clipped_log(double estimate, std::int64_t reps) {
  return std::log(std::max(estimate, 1.0 / static_cast<double>(reps)));
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

// ---------------------------------------------------------------------------
// test-errors
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const TestErrorsConfig& config) {
  std::vector<std::string> errors;
  if (config.n < 2) errors.push_back("n: must be >= 2");
  if (config.sigma0_values.empty()) errors.push_back("sigma0_values: must be nonempty");
  for (const double s : config.sigma0_values)
    if (!(s > 0.0)) errors.push_back("sigma0_values: entries must be > 0");
  if (config.signal_levels.empty()) errors.push_back("signal_levels: must be nonempty");
  for (const double v : config.signal_levels) {
    if (!(v > 0.0)) errors.push_back("signal_levels: entries must be > 0");
    if (v >= static_cast<double>(config.n))
      errors.push_back("signal_levels: level must be < n so that eps < sigma0");
  }
  if (config.mc_reps < 1) errors.push_back("mc_reps: must be >= 1");
  if (config.ball_samples < 1) errors.push_back("ball_samples: must be >= 1");
  if (!(config.constants.variance_split > 1.0))
    errors.push_back("constants.variance_split: must exceed 1");
  if (!(config.constants.threshold_multiplier > 0.0))
    errors.push_back("constants.threshold_multiplier: must be > 0");
  return errors;
}

namespace {

struct Alternative {
  std::string name;
  ParamPoint point;
};

// One alternative per testing regime, all at d-distance eps from the truth.
// The mixed point keeps a nonzero mean shift but stays safely inside the
// variance-dominant regime (7 ||dmu||^2 = 7/16 n dsigma^2 < 15/16 n dsigma^2);
// a point on the regime boundary would be classified by rounding noise and
// its mean-dominant error constant is too small to show decay at desk scale.
// Offsets carry a 1e-9 relative inflation so rounding never drops the
// distance below eps.
std::vector<Alternative> decay_alternatives(const ParamPoint& truth, double eps) {
  const Eigen::Index n = truth.n();
  const double pad = 1.0 + 1e-9;
  const double root_n = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
  dir[0] = 1.0;

  std::vector<Alternative> alts;
  alts.push_back(
      {"mean", ParamPoint(truth.mu + root_n * eps * pad * dir, truth.sigma)});
  alts.push_back({"sigma-above", ParamPoint(truth.mu, truth.sigma + eps * pad)});
  if (truth.sigma - eps * pad > 0.0)
    alts.push_back({"sigma-below", ParamPoint(truth.mu, truth.sigma - eps * pad)});
  const double mean_part = eps * pad / 4.0;
  const double sigma_part = eps * pad * std::sqrt(15.0) / 4.0;
  alts.push_back({"mixed", ParamPoint(truth.mu + root_n * mean_part * dir,
                                      truth.sigma + sigma_part)});
  return alts;
}

}  // namespace

std::vector<ResultRow> run_test_errors(const TestErrorsConfig& config,
                                       const CommonConfig& common) {
  if (const auto errors = validate(config); !errors.empty())
    throw std::invalid_argument("test-errors config: " + errors.front());
  RngStream root(common.seed);
  std::vector<ResultRow> rows;

  for (std::size_t a = 0; a < config.sigma0_values.size(); ++a) {
    const double sigma0 = config.sigma0_values[a];
    const ParamPoint truth(Eigen::VectorXd::Zero(config.n), sigma0);
    const std::string sigma_tag = "sigma0=" + format_double(sigma0);

    std::vector<double> levels, log_worst_type1, log_worst_type2;
    for (std::size_t b = 0; b < config.signal_levels.size(); ++b) {
      const double level = config.signal_levels[b];
      const double eps = sigma0 * std::sqrt(level / static_cast<double>(config.n));
      double worst_type1 = 0.0, worst_type2 = 0.0;

      const auto alts = decay_alternatives(truth, eps);
      for (std::size_t c = 0; c < alts.size(); ++c) {
        RngStream stream = root.split((a * 1024 + b) * 16 + c);
        const LocalTest test =
            build_local_test(truth, alts[c].point, eps, config.constants);
        const ErrorEstimate type1 =
            mc_type1_error(test, config.mc_reps, stream.split(0), common.threads);
        const ErrorEstimate type2 =
            mc_type2_error(test, config.mc_reps, config.ball_samples,
                           stream.split(1), common.threads);
        worst_type1 = std::max(worst_type1, type1.estimate);
        worst_type2 = std::max(worst_type2, type2.estimate);

        ParamsBuilder params;
        params.add("sigma0", sigma0)
            .add("n", config.n)
            .add("eps", eps)
            .add("alt", alts[c].name)
            .add("case", test_case_name(test.test_case))
            .add("x", level)
            .add("series", sigma_tag + "|" + alts[c].name);
        rows.push_back({"test-errors", params.str(), "type1", type1.estimate,
                        type1.std_error});
        rows.push_back({"test-errors", params.str(), "type2", type2.estimate,
                        type2.std_error});
      }

      ParamsBuilder worst_params;
      worst_params.add("sigma0", sigma0)
          .add("n", config.n)
          .add("eps", eps)
          .add("x", level)
          .add("series", sigma_tag + "|worst");
      rows.push_back({"test-errors", worst_params.str(), "worst_type1", worst_type1,
                      std::nullopt});
      rows.push_back({"test-errors", worst_params.str(), "worst_type2", worst_type2,
                      std::nullopt});

      levels.push_back(level);
      log_worst_type1.push_back(clipped_log(worst_type1, config.mc_reps));
      log_worst_type2.push_back(clipped_log(worst_type2, config.mc_reps));
    }

    if (levels.size() >= 2) {
      const LinearFit fit1 = linear_fit(levels, log_worst_type1);
      const LinearFit fit2 = linear_fit(levels, log_worst_type2);
      ParamsBuilder p1;
      p1.add("sigma0", sigma0).add("n", config.n).add("series", sigma_tag + "|type1");
      rows.push_back({"test-errors", p1.str(), "fit_slope", fit1.slope, std::nullopt});
      rows.push_back(
          {"test-errors", p1.str(), "fit_r_squared", fit1.r_squared, std::nullopt});
      ParamsBuilder p2;
      p2.add("sigma0", sigma0).add("n", config.n).add("series", sigma_tag + "|type2");
      rows.push_back({"test-errors", p2.str(), "fit_slope", fit2.slope, std::nullopt});
      rows.push_back(
          {"test-errors", p2.str(), "fit_r_squared", fit2.r_squared, std::nullopt});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// global-test
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const GlobalTestConfig& config) {
  std::vector<std::string> errors;
  if (config.n < 2) errors.push_back("n: must be >= 2");
  if (!(config.sigma0 > 0.0)) errors.push_back("sigma0: must be > 0");
  if (!(config.eps_n > 0.0)) errors.push_back("eps_n: must be > 0");
  if (!(config.separation_multiplier > 6.0))
    errors.push_back("separation_multiplier: must exceed 6");
  if (!(config.separation_multiplier * config.eps_n < config.sigma0))
    errors.push_back("eps_n: M * eps_n must be < sigma0");
  if (!(config.sigma_upper > 0.0)) errors.push_back("sigma_upper: must be > 0");
  if (config.mean_offsets.empty()) errors.push_back("mean_offsets: must be nonempty");
  if (config.mc_reps < 1) errors.push_back("mc_reps: must be >= 1");
  if (config.covered_probes < 1) errors.push_back("covered_probes: must be >= 1");
  const double radius = config.separation_multiplier * config.eps_n / 6.0;
  const double centers = std::ceil(config.sigma_upper / (2.0 * radius)) *
                         static_cast<double>(config.mean_offsets.size());
  if (centers > 200.0)
    errors.push_back("sigma_upper/mean_offsets: cover would exceed 200 centers");
  return errors;
}

std::vector<ResultRow> run_global_test(const GlobalTestConfig& config,
                                       const CommonConfig& common) {
  if (const auto errors = validate(config); !errors.empty())
    throw std::invalid_argument("global-test config: " + errors.front());
  RngStream root(common.seed);
  std::vector<ResultRow> rows;

  const ParamPoint truth(Eigen::VectorXd::Zero(config.n), config.sigma0);
  const double separation = config.separation_multiplier * config.eps_n;
  const double radius = separation / 6.0;
  const double root_n = std::sqrt(static_cast<double>(config.n));
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(config.n);
  dir[0] = 1.0;

  std::vector<ParamPoint> cover;
  for (const double offset : config.mean_offsets)
    for (const double sigma_center : cover_interval(config.sigma_upper, radius))
      cover.emplace_back(truth.mu + root_n * offset * dir, sigma_center);

  const GlobalTest global =
      build_global_test(truth, cover, config.separation_multiplier, config.eps_n,
                        config.constants);
  ParamsBuilder base;
  base.add("n", config.n)
      .add("sigma0", config.sigma0)
      .add("eps_n", config.eps_n)
      .add("M", config.separation_multiplier);
  rows.push_back({"global-test", base.str(), "components",
                  static_cast<double>(global.components.size()), std::nullopt});
  if (global.degenerate)
    throw std::runtime_error("global-test: cover degenerated to always-accept");

  const ErrorEstimate global_type1 =
      mc_global_type1(global, config.mc_reps, root.split(0), common.threads);
  rows.push_back({"global-test", base.str(), "global_type1", global_type1.estimate,
                  global_type1.std_error});

  double sum_local = 0.0, pooled_var = 0.0;
  for (std::size_t j = 0; j < global.components.size(); ++j) {
    const ErrorEstimate local = mc_type1_error(global.components[j], config.mc_reps,
                                               root.split(100 + j), common.threads);
    sum_local += local.estimate;
    pooled_var += local.std_error * local.std_error;
  }
  rows.push_back({"global-test", base.str(), "local_type1_sum", sum_local, std::nullopt});
  rows.push_back({"global-test", base.str(), "pooled_se", std::sqrt(pooled_var),
                  std::nullopt});

  // Type-II at covered alternatives: the max test can only reject more often
  // than the component covering the probe, so its acceptance error is no
  // larger up to Monte Carlo noise.
  const std::size_t stride =
      std::max<std::size_t>(1, global.components.size() /
                                   static_cast<std::size_t>(config.covered_probes));
  for (std::size_t j = 0; j < global.components.size();
       j += stride) {
    const ParamPoint& center = global.components[j].alt;
    const ErrorEstimate global_accept = mc_global_accept_at(
        global, center, config.mc_reps, root.split(5000 + 2 * j), common.threads);
    const ErrorEstimate local_accept =
        mc_accept_error_at(global.components[j], center, config.mc_reps,
                           root.split(5000 + 2 * j + 1), common.threads);
    ParamsBuilder params;
    params.add("n", config.n)
        .add("sigma0", config.sigma0)
        .add("component", static_cast<std::int64_t>(j))
        .add("center_sigma", center.sigma)
        .add("x", static_cast<std::int64_t>(j))
        .add("series", "covered-alternative");
    rows.push_back({"global-test", params.str(), "global_accept",
                    global_accept.estimate, global_accept.std_error});
    rows.push_back({"global-test", params.str(), "local_accept",
                    local_accept.estimate, local_accept.std_error});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// prior-audit
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const PriorAuditConfig& config) {
  std::vector<std::string> errors;
  if (config.family != "inverse-gamma" && config.family != "half-cauchy" &&
      config.family != "tabulated")
    errors.push_back("family: must be inverse-gamma, half-cauchy, or tabulated");
  if (config.family == "inverse-gamma" && !(config.shape > 0.0))
    errors.push_back("shape: must be > 0");
  if (config.family != "tabulated" && !(config.scale > 0.0))
    errors.push_back("scale: must be > 0");
  if (config.family == "tabulated" && config.tabulated_file.empty())
    errors.push_back("tabulated_file: required for the tabulated family");
  if (!(config.sigma0 > 0.0)) errors.push_back("sigma0: must be > 0");
  if (config.n < 2) errors.push_back("n: must be >= 2");
  if (!(config.xi > 0.0) || !(config.xi < 0.5))
    errors.push_back("xi: must lie in (0, 1/2)");
  return errors;
}

SigmaPriorSpec make_sigma_prior(const PriorAuditConfig& config) {
  if (config.family == "inverse-gamma")
    return SigmaPriorSpec::inverse_gamma(config.shape, config.scale);
  if (config.family == "half-cauchy") return SigmaPriorSpec::half_cauchy(config.scale);
  const Eigen::MatrixXd table = read_numeric_matrix(config.tabulated_file);
  if (table.cols() != 2)
    throw std::invalid_argument("tabulated prior file must have two columns");
  return SigmaPriorSpec::tabulated(table.col(0), table.col(1));
}

std::vector<ConditionReport> run_prior_audit(const PriorAuditConfig& config) {
  if (const auto errors = validate(config); !errors.empty())
    throw std::invalid_argument("prior-audit config: " + errors.front());
  const SigmaPriorSpec spec = make_sigma_prior(config);
  const double eps_n =
      config.sigma0 * std::pow(static_cast<double>(config.n), -config.xi);
  std::vector<ConditionReport> reports =
      audit_sigma_prior(spec, config.sigma0, eps_n);
  if (config.check_window) {
    const double sigma0_sq = config.sigma0 * config.sigma0;
    if (config.family == "inverse-gamma")
      reports.push_back(example_window_inverse_gamma(config.shape, config.scale,
                                                     config.xi, config.n, sigma0_sq));
    else if (config.family == "half-cauchy")
      reports.push_back(
          example_window_half_cauchy(config.scale, config.xi, config.n, sigma0_sq));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// highdim / spline
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const HighDimExperimentConfig& config) {
  std::vector<std::string> errors;
  if (config.n_grid.empty()) errors.push_back("n_grid: must be nonempty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 4) errors.push_back("n_grid: entries must be >= 4");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
      errors.push_back("n_grid: must be strictly increasing");
  }
  if (config.replicates < 1) errors.push_back("replicates: must be >= 1");
  if (config.p < 2) errors.push_back("p: must be >= 2");
  if (config.beta0_values.empty()) errors.push_back("beta0_values: must be nonempty");
  bool any_nonzero = false;
  for (const double b : config.beta0_values) any_nonzero |= b != 0.0;
  if (!any_nonzero) errors.push_back("beta0_values: the true support must be nonempty");
  if (!config.support0.empty() &&
      config.support0.size() != config.beta0_values.size())
    errors.push_back("support0: length must match beta0_values");
  for (const auto idx : config.support0)
    if (idx < 0 || idx >= config.p) errors.push_back("support0: index out of range");
  if (!(config.sigma0 > 0.0)) errors.push_back("sigma0: must be > 0");
  if (!(config.support_rate > 0.0)) errors.push_back("support_rate: must be > 0");
  if (!(config.slab_variance > 0.0)) errors.push_back("slab_variance: must be > 0");
  if (!(config.design_halfwidth > 0.0)) errors.push_back("design_halfwidth: must be > 0");
  if (!(config.separation_multiplier > 0.0))
    errors.push_back("separation_multiplier: must be > 0");
  if (config.mcmc.iterations <= config.mcmc.burn_in)
    errors.push_back("mcmc.iterations: must exceed mcmc.burn_in");
  if (config.mcmc.thin < 1) errors.push_back("mcmc.thin: must be >= 1");
  if (config.mcmc.max_card < 1) errors.push_back("mcmc.max_card: must be >= 1");
  return errors;
}

std::vector<std::string> validate(const SplineExperimentConfig& config) {
  std::vector<std::string> errors;
  if (config.n_grid.empty()) errors.push_back("n_grid: must be nonempty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 8) errors.push_back("n_grid: entries must be >= 8");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
      errors.push_back("n_grid: must be strictly increasing");
  }
  if (config.replicates < 1) errors.push_back("replicates: must be >= 1");
  if (!(config.alpha > 0.0)) errors.push_back("alpha: must be > 0");
  if (!(config.sigma0 > 0.0)) errors.push_back("sigma0: must be > 0");
  if (config.model.degree < 0) errors.push_back("model.degree: must be >= 0");
  if (config.model.j_max < config.model.degree + 1)
    errors.push_back("model.j_max: must be >= degree + 1");
  if (!(config.model.dim_rate > 0.0)) errors.push_back("model.dim_rate: must be > 0");
  if (!(config.model.coef_variance > 0.0))
    errors.push_back("model.coef_variance: must be > 0");
  if (config.posterior_draws < 1) errors.push_back("posterior_draws: must be >= 1");
  if (!(config.separation_multiplier > 0.0))
    errors.push_back("separation_multiplier: must be > 0");
  if (config.use_fixed_data) {
    if (config.fixed_xs.size() != config.fixed_y.size())
      errors.push_back("fixed data: xs and y lengths differ");
    for (Eigen::Index i = 0; i < config.fixed_xs.size(); ++i)
      if (!(config.fixed_xs[i] >= 0.0) || !(config.fixed_xs[i] <= 1.0))
        errors.push_back("fixed data: design points must lie in [0, 1]");
  }
  return errors;
}

std::string highdim_table_to_string(const std::vector<HighDimExperimentRow>& rows) {
  std::string out = "n,replicate,median_d_error,eps_n,bad_mass,support_hit\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
           format_double(r.median_d_error) + "," + format_double(r.eps_n) + "," +
           format_double(r.bad_mass) + "," + std::to_string(r.support_hit) + "\n";
  }
  return out;
}

void write_highdim_table(const std::vector<HighDimExperimentRow>& rows,
                         const std::filesystem::path& path) {
  write_text_file(path, highdim_table_to_string(rows));
}

void write_highdim_diagnostics(const std::vector<HighDimExperimentRow>& rows,
                               const std::filesystem::path& path) {
  std::string out = "n,replicate,mean_d_error,acceptance_rate,ess\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
           format_double(r.mean_d_error) + "," + format_double(r.acceptance_rate) +
           "," + format_double(r.ess) + "\n";
  }
  write_text_file(path, out);
}

std::string spline_table_to_string(const std::vector<SplineExperimentRow>& rows) {
  std::string out = "n,replicate,median_error,eps_n,bad_mass,posterior_mode_J\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
           format_double(r.median_error) + "," + format_double(r.eps_n) + "," +
           format_double(r.bad_mass) + "," + std::to_string(r.posterior_mode_j) +
           "\n";
  }
  return out;
}

void write_spline_table(const std::vector<SplineExperimentRow>& rows,
                        const std::filesystem::path& path) {
  write_text_file(path, spline_table_to_string(rows));
}

std::string condition_reports_to_string(const std::vector<ConditionReport>& reports) {
  std::string out = "condition,lhs,rhs,satisfied,margin\n";
  for (const auto& rep : reports) {
    out += rep.condition + "," + format_double(rep.lhs) + "," +
           format_double(rep.rhs) + "," + (rep.satisfied ? "1" : "0") + "," +
           format_double(rep.margin) + "\n";
  }
  return out;
}

void write_condition_reports(const std::vector<ConditionReport>& reports,
                             const std::filesystem::path& path) {
  write_text_file(path, condition_reports_to_string(reports));
}

std::vector<std::pair<std::int64_t, double>> aggregate_median_by_n(
    const std::vector<std::pair<std::int64_t, double>>& per_replicate) {
  std::map<std::int64_t, std::vector<double>> grouped;
  for (const auto& [n, value] : per_replicate) grouped[n].push_back(value);
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(grouped.size());
  for (auto& [n, values] : grouped) out.emplace_back(n, median_of(values));
  return out;
}

namespace {

template <typename Row>
std::vector<ResultRow> rate_plot_rows(const std::vector<Row>& rows,
                                      const std::string& experiment,
                                      double Row::*error_field) {
  std::vector<std::pair<std::int64_t, double>> per_replicate;
  per_replicate.reserve(rows.size());
  for (const auto& r : rows) per_replicate.emplace_back(r.n, r.*error_field);
  const auto aggregated = aggregate_median_by_n(per_replicate);

  std::vector<ResultRow> out;
  std::vector<double> ns, errors;
  for (const auto& [n, err] : aggregated) {
    ParamsBuilder params;
    params.add("n", n).add("x", std::log(static_cast<double>(n)))
        .add("series", experiment);
    out.push_back({experiment, params.str(), "median_error", err, std::nullopt});
    if (err > 0.0) {
      ns.push_back(static_cast<double>(n));
      errors.push_back(err);
    }
  }
  if (ns.size() >= 3) {
    const LinearFit fit = fit_rate_exponent(ns, errors);
    ParamsBuilder params;
    params.add("series", experiment);
    out.push_back({experiment, params.str(), "fit_slope", fit.slope, std::nullopt});
    out.push_back(
        {experiment, params.str(), "fit_r_squared", fit.r_squared, std::nullopt});
  }
  return out;
}

}  // namespace

std::vector<ResultRow> highdim_plot_rows(const std::vector<HighDimExperimentRow>& rows) {
  return rate_plot_rows(rows, "highdim", &HighDimExperimentRow::median_d_error);
}

std::vector<ResultRow> spline_plot_rows(const std::vector<SplineExperimentRow>& rows) {
  return rate_plot_rows(rows, "spline", &SplineExperimentRow::median_error);
}

}  // namespace postcon
