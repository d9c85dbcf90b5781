// Command-line experiment runner: dispatches the five experiment kinds with
// deterministic seeding and CSV output. Identical config + seed produce
// byte-identical files, regardless of --threads.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "postcon/experiments.hpp"

namespace {

namespace fs = std::filesystem;
using namespace postcon;

fs::path prepare_out_dir(const CommonConfig& common) {
  fs::path dir(common.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  return dir;
}

void report_written(const fs::path& path) {
  std::cout << "wrote " << path.string() << "\n";
}

void require_valid(const std::vector<std::string>& errors, const std::string& kind) {
  if (errors.empty()) return;
  std::string message = kind + " config invalid:";
  for (const auto& e : errors) message += "\n  " + e;
  throw CLI::ValidationError(message);
}

struct SigmaPriorOptions {
  std::string family = "inverse-gamma";
  double shape = 2.0;
  double scale = 2.0;

  SigmaPriorSpec build() const {
    if (family == "inverse-gamma") return SigmaPriorSpec::inverse_gamma(shape, scale);
    if (family == "half-cauchy") return SigmaPriorSpec::half_cauchy(scale);
    throw CLI::ValidationError("sigma-prior-family must be inverse-gamma or half-cauchy");
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--sigma-prior-family", family,
                    "Noise-variance prior family (inverse-gamma | half-cauchy)")
        ->capture_default_str();
    cmd->add_option("--sigma-prior-shape", shape, "Inverse gamma shape a")
        ->capture_default_str();
    cmd->add_option("--sigma-prior-scale", scale,
                    "Inverse gamma scale b / half-Cauchy scale r")
        ->capture_default_str();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-model testing and posterior-contraction experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from an INI/TOML config file");

  CommonConfig common;
  app.add_option("--seed", common.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--threads", common.threads,
                 "Worker threads (0 = hardware); never affects results")
      ->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "Output directory for CSV files")
      ->capture_default_str();
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "Print a complete config template and exit");

  // ---- test-errors -------------------------------------------------------
  TestErrorsConfig test_errors;
  CLI::App* cmd_test = app.add_subcommand(
      "test-errors", "Local-test type-I/II error decay across separations");
  cmd_test->add_option("--n", test_errors.n, "Sample size")->capture_default_str();
  cmd_test->add_option("--sigma0-values", test_errors.sigma0_values,
                       "True noise standard deviations")
      ->capture_default_str();
  cmd_test->add_option("--signal-levels", test_errors.signal_levels,
                       "Separation levels n eps^2 / sigma0^2")
      ->capture_default_str();
  cmd_test->add_option("--mc-reps", test_errors.mc_reps, "Monte Carlo replications")
      ->capture_default_str();
  cmd_test->add_option("--ball-samples", test_errors.ball_samples,
                       "Random probe points for the type-II ball supremum")
      ->capture_default_str();
  cmd_test->add_option("--m0", test_errors.constants.threshold_multiplier,
                       "Variance-blowup test threshold multiplier")
      ->capture_default_str();
  cmd_test->add_option("--m1", test_errors.constants.variance_split,
                       "Large-sigma regime split (> 1)")
      ->capture_default_str();

  // ---- global-test -------------------------------------------------------
  GlobalTestConfig global_cfg;
  CLI::App* cmd_global = app.add_subcommand(
      "global-test", "Union bound and coverage checks for the max test");
  cmd_global->add_option("--n", global_cfg.n, "Sample size")->capture_default_str();
  cmd_global->add_option("--sigma0", global_cfg.sigma0, "True noise sd")
      ->capture_default_str();
  cmd_global->add_option("--eps-n", global_cfg.eps_n, "Rate target eps_n")
      ->capture_default_str();
  cmd_global->add_option("--m", global_cfg.separation_multiplier,
                         "Separation multiplier M (> 6)")
      ->capture_default_str();
  cmd_global->add_option("--sigma-upper", global_cfg.sigma_upper,
                         "Upper end of the sieve's sigma interval")
      ->capture_default_str();
  cmd_global->add_option("--mean-offsets", global_cfg.mean_offsets,
                         "Mean shifts of the cover, in d-metric units")
      ->capture_default_str();
  cmd_global->add_option("--mc-reps", global_cfg.mc_reps, "Monte Carlo replications")
      ->capture_default_str();
  cmd_global->add_option("--covered-probes", global_cfg.covered_probes,
                         "Number of centers probed for the type-II comparison")
      ->capture_default_str();
  cmd_global->add_option("--m0", global_cfg.constants.threshold_multiplier,
                         "Variance-blowup test threshold multiplier")
      ->capture_default_str();
  cmd_global->add_option("--m1", global_cfg.constants.variance_split,
                         "Large-sigma regime split (> 1)")
      ->capture_default_str();

  // ---- prior-audit -------------------------------------------------------
  PriorAuditConfig audit_cfg;
  CLI::App* cmd_audit = app.add_subcommand(
      "prior-audit", "Lipschitz / tail / floor audits of a variance prior");
  cmd_audit->add_option("--family", audit_cfg.family,
                        "inverse-gamma | half-cauchy | tabulated")
      ->capture_default_str();
  cmd_audit->add_option("--shape", audit_cfg.shape, "Inverse gamma shape a")
      ->capture_default_str();
  cmd_audit->add_option("--scale", audit_cfg.scale,
                        "Inverse gamma scale b / half-Cauchy scale r")
      ->capture_default_str();
  cmd_audit->add_option("--tabulated-file", audit_cfg.tabulated_file,
                        "Two-column (variance, density) text file");
  cmd_audit->add_option("--sigma0", audit_cfg.sigma0, "True noise sd")
      ->capture_default_str();
  cmd_audit->add_option("--n", audit_cfg.n, "Sample size defining eps_n")
      ->capture_default_str();
  cmd_audit->add_option("--xi", audit_cfg.xi, "Exponent in eps_n = sigma0 n^{-xi}")
      ->capture_default_str();
  cmd_audit->add_flag("--check-window", audit_cfg.check_window,
                      "Also report the admissible sigma0^2 window");

  // ---- highdim -----------------------------------------------------------
  HighDimExperimentConfig highdim_cfg;
  SigmaPriorOptions highdim_prior;
  std::string highdim_design_file, highdim_response_file;
  std::int64_t highdim_p = 100;
  CLI::App* cmd_highdim = app.add_subcommand(
      "highdim", "Sparse-regression posterior contraction experiment");
  cmd_highdim->add_option("--n-grid", highdim_cfg.n_grid, "Sample sizes")
      ->capture_default_str();
  cmd_highdim->add_option("--replicates", highdim_cfg.replicates,
                          "Replicates per sample size")
      ->capture_default_str();
  cmd_highdim->add_option("--p", highdim_p, "Number of covariates")
      ->capture_default_str();
  cmd_highdim->add_option("--support0", highdim_cfg.support0,
                          "True support indices (default: spread over 1..p)");
  cmd_highdim->add_option("--beta0-values", highdim_cfg.beta0_values,
                          "Nonzero true coefficients")
      ->capture_default_str();
  cmd_highdim->add_option("--sigma0", highdim_cfg.sigma0, "True noise sd")
      ->capture_default_str();
  cmd_highdim->add_option("--support-rate", highdim_cfg.support_rate,
                          "Support-prior rate A")
      ->capture_default_str();
  cmd_highdim->add_option("--slab-variance", highdim_cfg.slab_variance,
                          "Slab variance tau^2")
      ->capture_default_str();
  cmd_highdim->add_option("--design-halfwidth", highdim_cfg.design_halfwidth,
                          "Design entries are iid uniform on [-c, c]")
      ->capture_default_str();
  cmd_highdim->add_option("--m", highdim_cfg.separation_multiplier,
                          "Bad-set separation multiplier M")
      ->capture_default_str();
  cmd_highdim->add_option("--iterations", highdim_cfg.mcmc.iterations,
                          "MCMC iterations")
      ->capture_default_str();
  cmd_highdim->add_option("--burn-in", highdim_cfg.mcmc.burn_in, "MCMC burn-in")
      ->capture_default_str();
  cmd_highdim->add_option("--thin", highdim_cfg.mcmc.thin, "MCMC thinning stride")
      ->capture_default_str();
  cmd_highdim->add_option("--max-card", highdim_cfg.mcmc.max_card,
                          "Support-size cap of the sampler")
      ->capture_default_str();
  cmd_highdim->add_option("--design-file", highdim_design_file,
                          "Delimited design matrix, one row per observation");
  cmd_highdim->add_option("--response-file", highdim_response_file,
                          "Single-column response; runs one analysis on the file data");
  highdim_prior.attach(cmd_highdim);

  // ---- spline ------------------------------------------------------------
  SplineExperimentConfig spline_cfg;
  SigmaPriorOptions spline_prior;
  std::string spline_family = "sinusoid", spline_data_file;
  CLI::App* cmd_spline = app.add_subcommand(
      "spline", "Adaptive B-spline regression contraction experiment");
  cmd_spline->add_option("--n-grid", spline_cfg.n_grid, "Sample sizes")
      ->capture_default_str();
  cmd_spline->add_option("--replicates", spline_cfg.replicates,
                         "Replicates per sample size")
      ->capture_default_str();
  cmd_spline->add_option("--family", spline_family,
                         "Truth family (fractional | sinusoid)")
      ->capture_default_str();
  cmd_spline->add_option("--alpha", spline_cfg.alpha, "Truth smoothness")
      ->capture_default_str();
  cmd_spline->add_option("--sigma0", spline_cfg.sigma0, "True noise sd")
      ->capture_default_str();
  cmd_spline->add_option("--dim-rate", spline_cfg.model.dim_rate,
                         "Dimension-prior rate A")
      ->capture_default_str();
  cmd_spline->add_option("--coef-variance", spline_cfg.model.coef_variance,
                         "Coefficient prior variance tau^2")
      ->capture_default_str();
  cmd_spline->add_option("--j-max", spline_cfg.model.j_max, "Largest basis dimension")
      ->capture_default_str();
  cmd_spline->add_option("--degree", spline_cfg.model.degree, "B-spline degree q")
      ->capture_default_str();
  cmd_spline->add_option("--draws", spline_cfg.posterior_draws,
                         "Posterior draws per replicate")
      ->capture_default_str();
  cmd_spline->add_option("--m", spline_cfg.separation_multiplier,
                         "Bad-set separation multiplier M")
      ->capture_default_str();
  cmd_spline->add_flag("--random-design", spline_cfg.random_design,
                       "Draw design points uniformly instead of the fixed grid");
  cmd_spline->add_option("--data-file", spline_data_file,
                         "Two-column (x, y) file; runs one analysis on the file data");
  spline_prior.attach(cmd_spline);

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_defaults) {
      std::cout << app.config_to_str(true, true);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << "no experiment selected; see --help\n";
      return 1;
    }
    const fs::path out = prepare_out_dir(common);

    if (cmd_test->parsed()) {
      require_valid(validate(test_errors), "test-errors");
      const auto rows = run_test_errors(test_errors, common);
      emit_csv(rows, out / "test_errors.csv");
      emit_plot_data(rows, out / "test_errors_plot.csv");
      report_written(out / "test_errors.csv");
      report_written(out / "test_errors_plot.csv");
    } else if (cmd_global->parsed()) {
      require_valid(validate(global_cfg), "global-test");
      const auto rows = run_global_test(global_cfg, common);
      emit_csv(rows, out / "global_test.csv");
      emit_plot_data(rows, out / "global_test_plot.csv");
      report_written(out / "global_test.csv");
      report_written(out / "global_test_plot.csv");
    } else if (cmd_audit->parsed()) {
      require_valid(validate(audit_cfg), "prior-audit");
      const auto reports = run_prior_audit(audit_cfg);
      write_condition_reports(reports, out / "prior_audit.csv");
      report_written(out / "prior_audit.csv");
      for (const auto& rep : reports)
        std::cout << rep.condition << ": " << (rep.satisfied ? "satisfied" : "violated")
                  << " (margin " << format_double(rep.margin) << ")\n";
    } else if (cmd_highdim->parsed()) {
      highdim_cfg.p = highdim_p;
      highdim_cfg.sigma_prior = highdim_prior.build();
      if (!highdim_design_file.empty()) {
        highdim_cfg.fixed_design = read_numeric_matrix(highdim_design_file);
        highdim_cfg.use_fixed_design = true;
        highdim_cfg.p = highdim_cfg.fixed_design.cols();
      }
      if (!highdim_response_file.empty()) {
        const Eigen::MatrixXd data = read_numeric_matrix(highdim_response_file);
        if (data.cols() != 1)
          throw CLI::ValidationError("response-file must have a single column");
        highdim_cfg.fixed_response = data.col(0);
        highdim_cfg.use_fixed_response = true;
        highdim_cfg.n_grid = {data.rows()};
        highdim_cfg.replicates = 1;
        if (!highdim_cfg.use_fixed_design)
          throw CLI::ValidationError("response-file requires design-file");
      }
      require_valid(validate(highdim_cfg), "highdim");
      const auto assumptions = highdim_assumption_reports(highdim_cfg);
      for (const auto& rep : assumptions)
        if (!rep.satisfied)
          std::cerr << "warning: standing assumption violated: " << rep.condition
                    << " (margin " << format_double(rep.margin) << ")\n";
      const auto rows =
          contraction_experiment_highdim(highdim_cfg, common.seed, common.threads);
      write_highdim_table(rows, out / "highdim.csv");
      write_highdim_diagnostics(rows, out / "highdim_diagnostics.csv");
      write_condition_reports(assumptions, out / "highdim_assumptions.csv");
      emit_plot_data(highdim_plot_rows(rows), out / "highdim_plot.csv");
      report_written(out / "highdim.csv");
      report_written(out / "highdim_diagnostics.csv");
      report_written(out / "highdim_assumptions.csv");
      report_written(out / "highdim_plot.csv");
    } else if (cmd_spline->parsed()) {
      spline_cfg.model.sigma_prior = spline_prior.build();
      if (spline_family == "fractional")
        spline_cfg.family = TruthFamily::kFractional;
      else if (spline_family == "sinusoid")
        spline_cfg.family = TruthFamily::kSinusoid;
      else
        throw CLI::ValidationError("family must be fractional or sinusoid");
      if (!spline_data_file.empty()) {
        const Eigen::MatrixXd data = read_numeric_matrix(spline_data_file);
        if (data.cols() != 2)
          throw CLI::ValidationError("data-file must have two columns (x, y)");
        spline_cfg.fixed_xs = data.col(0);
        spline_cfg.fixed_y = data.col(1);
        spline_cfg.use_fixed_data = true;
        spline_cfg.n_grid = {data.rows()};
        spline_cfg.replicates = 1;
      }
      require_valid(validate(spline_cfg), "spline");
      const auto assumptions = spline_assumption_reports(spline_cfg);
      for (const auto& rep : assumptions)
        if (!rep.satisfied)
          std::cerr << "warning: standing assumption violated: " << rep.condition
                    << " (margin " << format_double(rep.margin) << ")\n";
      const auto rows =
          contraction_experiment_spline(spline_cfg, common.seed, common.threads);
      write_spline_table(rows, out / "spline.csv");
      write_condition_reports(assumptions, out / "spline_assumptions.csv");
      emit_plot_data(spline_plot_rows(rows), out / "spline_plot.csv");
      report_written(out / "spline.csv");
      report_written(out / "spline_assumptions.csv");
      report_written(out / "spline_plot.csv");
    }
  } catch (const CLI::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
