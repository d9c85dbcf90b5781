#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "postcon/rng.hpp"

namespace postcon {

/// One audited inequality. The convention is uniform: satisfied <=> margin >= 0,
/// with lhs/rhs recording the two sides being compared (meaning documented per
/// condition id).
struct ConditionReport {
  std::string condition;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;
};

struct InverseGammaParams {
  double shape = 1.0;  // a
  double scale = 1.0;  // b
};

struct HalfCauchyParams {
  double scale = 1.0;  // r
};

struct TabulatedDensity {
  Eigen::VectorXd grid;    // increasing variance values
  Eigen::VectorXd density; // nonnegative, renormalized on construction
};

/// Prior for the noise variance sigma^2 on (0, infinity).
///
/// Families: inverse gamma (density b^a/Gamma(a) s^{-a-1} e^{-b/s}),
/// half-Cauchy on the variance ((2/pi) r / (r^2 + s^2)), or a tabulated
/// density interpolated linearly on its grid.
class SigmaPriorSpec {
 public:
  static SigmaPriorSpec inverse_gamma(double shape, double scale);
  static SigmaPriorSpec half_cauchy(double scale);
  static SigmaPriorSpec tabulated(Eigen::VectorXd grid, Eigen::VectorXd density);

  double density(double s) const;
  double log_density(double s) const;
  double density_derivative(double s) const;
  double survival(double t) const;  // Pi{sigma^2 > t}
  double quantile(double p) const;
  double sample(RngStream& rng) const;

  /// max |g'| over a log-spaced grid on (0, quantile(0.9999)).
  double lipschitz_estimate(int grid_points = 4096) const;

  const std::string& family_name() const { return family_name_; }
  bool is_tabulated() const;

  /// Variance interval carrying essentially all prior mass: exact grid ends
  /// for tabulated densities, extreme quantiles otherwise. Integrals over the
  /// variance restrict their search to this window.
  std::pair<double, double> support_bounds() const;

  /// Mass of the interval [lo, hi] (quadrature for tabulated, closed form
  /// otherwise).
  double interval_mass(double lo, double hi) const;

 private:
  SigmaPriorSpec() = default;
  std::variant<InverseGammaParams, HalfCauchyParams, TabulatedDensity> family_;
  std::string family_name_;
};

/// The three prior audits used by the sufficient conditions:
///   "lipschitz-finite":  L (lhs) must be finite (rhs = cap).
///   "polynomial-tail":   fitted log-log slope of t * Pi{sigma^2 > t} over the
///                        last decade of a wide t-grid (lhs) must be <= slack
///                        (rhs), i.e. t * survival stays bounded.
///   "density-floor":     2 L sigma0 eps_n (lhs) must be <= g(sigma0^2) (rhs).
std::vector<ConditionReport> audit_sigma_prior(const SigmaPriorSpec& spec,
                                               double sigma0, double eps_n);

/// Admissible window for sigma0^2 under an inverse gamma prior:
/// b/(xi log n) <= sigma0^2 <= n^{xi/(a+2)} / log n (the strict-domination
/// upper side is made operational by the 1/log n slack). lhs/rhs are the
/// window edges; margin = min(sigma0^2 - lhs, rhs - sigma0^2).
ConditionReport example_window_inverse_gamma(double shape, double scale, double xi,
                                             std::int64_t n, double sigma0_sq);

/// Admissible window under a half-Cauchy prior: sigma0^2 <= n^{xi/2} / log n
/// (no lower edge; lhs = 0).
ConditionReport example_window_half_cauchy(double scale, double xi, std::int64_t n,
                                           double sigma0_sq);

}  // namespace postcon
