#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "postcon/csv.hpp"
#include "postcon/global_test.hpp"
#include "postcon/highdim.hpp"
#include "postcon/local_test.hpp"
#include "postcon/sigma_prior.hpp"
#include "postcon/spline.hpp"

namespace postcon {

/// Seed, thread count, and output directory shared by every experiment kind.
/// Thread count affects scheduling only; results are identical for any value.
struct CommonConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

// ---------------------------------------------------------------------------
// test-errors: local-test error decay across separation levels
// ---------------------------------------------------------------------------

struct TestErrorsConfig {
  std::int64_t n = 400;
  std::vector<double> sigma0_values{0.1, 1.0, 10.0};
  // Separation levels expressed as n eps^2 / sigma0^2.
  std::vector<double> signal_levels{5.0, 10.0, 20.0, 40.0, 80.0};
  std::int64_t mc_reps = 10000;
  std::int64_t ball_samples = 8;
  TestConstants constants;
};

std::vector<std::string> validate(const TestErrorsConfig& config);

/// Per (sigma0, level): builds one alternative in each testing regime at
/// separation eps = sigma0 sqrt(level / n), estimates type-I/type-II errors,
/// takes the regime-wise worst case, and regresses the worst-case log errors
/// on the separation level (estimates clipped below at 1/reps).
std::vector<ResultRow> run_test_errors(const TestErrorsConfig& config,
                                       const CommonConfig& common);

// ---------------------------------------------------------------------------
// global-test: union bound and covered-alternative comparison for the max test
// ---------------------------------------------------------------------------

// Defaults give ~50 centers whose per-component type-I errors sit near 1%:
// large enough to measure at mc_reps, small enough that the summed bound
// stays far below one and the union-bound comparison is informative.
struct GlobalTestConfig {
  std::int64_t n = 1700;
  double sigma0 = 1.0;
  double eps_n = 0.05;
  double separation_multiplier = 10.0;  // M > 6
  double sigma_upper = 3.0;             // sieve covers sigma in (0, sigma_upper]
  std::vector<double> mean_offsets{0.0, 0.45, 0.9};  // in d-metric units
  std::int64_t mc_reps = 2000;
  std::int64_t covered_probes = 5;  // centers probed for the type-II comparison
  TestConstants constants;
};

std::vector<std::string> validate(const GlobalTestConfig& config);

std::vector<ResultRow> run_global_test(const GlobalTestConfig& config,
                                       const CommonConfig& common);

// ---------------------------------------------------------------------------
// prior-audit: Lipschitz / tail / floor audits of a variance prior
// ---------------------------------------------------------------------------

struct PriorAuditConfig {
  std::string family = "half-cauchy";  // inverse-gamma | half-cauchy | tabulated
  double shape = 1.0;                  // inverse gamma a
  double scale = 1.0;                  // inverse gamma b or half-Cauchy r
  std::string tabulated_file;          // two columns: variance, density
  double sigma0 = 1.0;
  std::int64_t n = 1000000;
  double xi = 0.45;  // eps_n = sigma0 n^{-xi}
  bool check_window = false;
};

std::vector<std::string> validate(const PriorAuditConfig& config);

SigmaPriorSpec make_sigma_prior(const PriorAuditConfig& config);

/// The three audit reports (plus the admissible-sigma0 window when
/// check_window is set and the family has one).
std::vector<ConditionReport> run_prior_audit(const PriorAuditConfig& config);

// ---------------------------------------------------------------------------
// highdim / spline wrappers and table writers
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const HighDimExperimentConfig& config);
std::vector<std::string> validate(const SplineExperimentConfig& config);

std::string highdim_table_to_string(const std::vector<HighDimExperimentRow>& rows);
void write_highdim_table(const std::vector<HighDimExperimentRow>& rows,
                         const std::filesystem::path& path);
void write_highdim_diagnostics(const std::vector<HighDimExperimentRow>& rows,
                               const std::filesystem::path& path);

std::string spline_table_to_string(const std::vector<SplineExperimentRow>& rows);
void write_spline_table(const std::vector<SplineExperimentRow>& rows,
                        const std::filesystem::path& path);

std::string condition_reports_to_string(const std::vector<ConditionReport>& reports);
void write_condition_reports(const std::vector<ConditionReport>& reports,
                             const std::filesystem::path& path);

/// Per-n aggregate rows (median over replicates) plus a fitted log-log rate
/// row, in plot-data form.
std::vector<ResultRow> highdim_plot_rows(const std::vector<HighDimExperimentRow>& rows);
std::vector<ResultRow> spline_plot_rows(const std::vector<SplineExperimentRow>& rows);

/// Median over replicates of the per-replicate median error, keyed by n.
std::vector<std::pair<std::int64_t, double>> aggregate_median_by_n(
    const std::vector<std::pair<std::int64_t, double>>& per_replicate);

}  // namespace postcon
