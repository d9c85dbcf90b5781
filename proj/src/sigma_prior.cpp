#include "postcon/sigma_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/SpecialFunctions>

#include "postcon/fit.hpp"

namespace postcon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double trapezoid_mass(const Eigen::VectorXd& s, const Eigen::VectorXd& g) {
  double mass = 0.0;
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i)
    mass += 0.5 * (g[i] + g[i + 1]) * (s[i + 1] - s[i]);
  return mass;
}

// CDF of a tabulated density at t (exact integral of the linear interpolant).
double tabulated_cdf(const TabulatedDensity& tab, double t) {
  const auto& s = tab.grid;
  const auto& g = tab.density;
  if (t <= s[0]) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i) {
    if (t >= s[i + 1]) {
      acc += 0.5 * (g[i] + g[i + 1]) * (s[i + 1] - s[i]);
      continue;
    }
    const double w = (t - s[i]) / (s[i + 1] - s[i]);
    const double gt = g[i] + w * (g[i + 1] - g[i]);
    acc += 0.5 * (g[i] + gt) * (t - s[i]);
    return acc;
  }
  return acc;
}

}  // namespace

SigmaPriorSpec SigmaPriorSpec::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("inverse gamma prior: shape and scale must be > 0");
  SigmaPriorSpec spec;
  spec.family_ = InverseGammaParams{shape, scale};
  spec.family_name_ = "inverse-gamma";
  return spec;
}

SigmaPriorSpec SigmaPriorSpec::half_cauchy(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("half-Cauchy prior: scale must be > 0");
  SigmaPriorSpec spec;
  spec.family_ = HalfCauchyParams{scale};
  spec.family_name_ = "half-cauchy";
  return spec;
}

SigmaPriorSpec SigmaPriorSpec::tabulated(Eigen::VectorXd grid, Eigen::VectorXd density) {
  if (grid.size() != density.size() || grid.size() < 2)
    throw std::invalid_argument("tabulated prior: need matching grids with >= 2 points");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (density[i] < 0.0) throw std::invalid_argument("tabulated prior: negative density");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("tabulated prior: grid must be strictly increasing");
  }
  if (!(grid[0] > 0.0)) throw std::invalid_argument("tabulated prior: grid must be positive");
  const double mass = trapezoid_mass(grid, density);
  if (!(mass > 0.0)) throw std::invalid_argument("tabulated prior: zero total mass");
  SigmaPriorSpec spec;
  spec.family_ = TabulatedDensity{std::move(grid), density / mass};
  spec.family_name_ = "tabulated";
  return spec;
}

bool SigmaPriorSpec::is_tabulated() const {
  return std::holds_alternative<TabulatedDensity>(family_);
}

std::pair<double, double> SigmaPriorSpec::support_bounds() const {
  if (const auto* tab = std::get_if<TabulatedDensity>(&family_))
    return {tab->grid[0], tab->grid[tab->grid.size() - 1]};
  return {quantile(1e-13), quantile(1.0 - 1e-13)};
}

double SigmaPriorSpec::log_density(double s) const {
  if (!(s > 0.0)) return kNegInf;
  if (const auto* ig = std::get_if<InverseGammaParams>(&family_)) {
    const double a = ig->shape, b = ig->scale;
    return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(s) - b / s;
  }
  if (const auto* hc = std::get_if<HalfCauchyParams>(&family_)) {
    const double r = hc->scale;
    return std::log(2.0 / M_PI) + std::log(r) - std::log(r * r + s * s);
  }
  const double g = density(s);
  return g > 0.0 ? std::log(g) : kNegInf;
}

double SigmaPriorSpec::density(double s) const {
  if (!(s > 0.0)) return 0.0;
  if (const auto* tab = std::get_if<TabulatedDensity>(&family_)) {
    const auto& grid = tab->grid;
    if (s < grid[0] || s > grid[grid.size() - 1]) return 0.0;
    const auto it = std::upper_bound(grid.data(), grid.data() + grid.size(), s);
    Eigen::Index hi = std::min<Eigen::Index>(it - grid.data(), grid.size() - 1);
    const Eigen::Index lo = hi - 1;
    const double w = (s - grid[lo]) / (grid[hi] - grid[lo]);
    return tab->density[lo] + w * (tab->density[hi] - tab->density[lo]);
  }
  return std::exp(log_density(s));
}

double SigmaPriorSpec::density_derivative(double s) const {
  if (!(s > 0.0)) return 0.0;
  if (const auto* ig = std::get_if<InverseGammaParams>(&family_)) {
    return density(s) * (-(ig->shape + 1.0) / s + ig->scale / (s * s));
  }
  if (const auto* hc = std::get_if<HalfCauchyParams>(&family_)) {
    const double r = hc->scale;
    const double denom = r * r + s * s;
    return -(2.0 / M_PI) * r * 2.0 * s / (denom * denom);
  }
  const auto& tab = std::get<TabulatedDensity>(family_);
  const auto& grid = tab.grid;
  if (s <= grid[0] || s >= grid[grid.size() - 1]) return 0.0;
  const auto it = std::upper_bound(grid.data(), grid.data() + grid.size(), s);
  Eigen::Index hi = std::min<Eigen::Index>(it - grid.data(), grid.size() - 1);
  const Eigen::Index lo = hi - 1;
  return (tab.density[hi] - tab.density[lo]) / (grid[hi] - grid[lo]);
}

double SigmaPriorSpec::survival(double t) const {
  if (!(t > 0.0)) return 1.0;
  if (const auto* ig = std::get_if<InverseGammaParams>(&family_)) {
    // sigma^2 > t  <=>  1/sigma^2 < 1/t with 1/sigma^2 ~ Gamma(a, rate b).
    return Eigen::numext::igamma(ig->shape, ig->scale / t);
  }
  if (const auto* hc = std::get_if<HalfCauchyParams>(&family_)) {
    return (2.0 / M_PI) * std::atan(hc->scale / t);
  }
  const auto& tab = std::get<TabulatedDensity>(family_);
  return std::max(0.0, 1.0 - tabulated_cdf(tab, t));
}

double SigmaPriorSpec::quantile(double p) const {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("quantile: p must be in (0,1)");
  if (const auto* hc = std::get_if<HalfCauchyParams>(&family_)) {
    return hc->scale * std::tan(0.5 * M_PI * p);
  }
  if (const auto* tab = std::get_if<TabulatedDensity>(&family_)) {
    double lo = tab->grid[0], hi = tab->grid[tab->grid.size() - 1];
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tabulated_cdf(*tab, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  // Inverse gamma: bisection on the survival function in log space.
  double lo = 1e-300, hi = 1e300;
  for (int it = 0; it < 2000; ++it) {
    const double mid = std::sqrt(lo * hi);
    (survival(mid) > 1.0 - p ? lo : hi) = mid;
    if (hi / lo < 1.0 + 1e-14) break;
  }
  return std::sqrt(lo * hi);
}

double SigmaPriorSpec::sample(RngStream& rng) const {
  if (const auto* ig = std::get_if<InverseGammaParams>(&family_)) {
    return ig->scale / rng.gamma(ig->shape);
  }
  if (const auto* hc = std::get_if<HalfCauchyParams>(&family_)) {
    return hc->scale * std::tan(0.5 * M_PI * rng.uniform());
  }
  const auto& tab = std::get<TabulatedDensity>(family_);
  const double u = rng.uniform();
  double lo = tab.grid[0], hi = tab.grid[tab.grid.size() - 1];
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tabulated_cdf(tab, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double SigmaPriorSpec::interval_mass(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  const double s_lo = std::max(lo, 0.0);
  return std::max(0.0, survival(s_lo) - survival(hi));
}

double SigmaPriorSpec::lipschitz_estimate(int grid_points) const {
  if (const auto* tab = std::get_if<TabulatedDensity>(&family_)) {
    // No analytic derivative: use the steepest segment of the provided grid.
    double max_slope = 0.0;
    for (Eigen::Index i = 0; i + 1 < tab->grid.size(); ++i) {
      const double slope = std::abs(tab->density[i + 1] - tab->density[i]) /
                           (tab->grid[i + 1] - tab->grid[i]);
      max_slope = std::max(max_slope, slope);
    }
    return max_slope;
  }
  const double upper = quantile(0.9999);
  const double lower = upper * 1e-12;
  const double ratio = std::pow(upper / lower, 1.0 / (grid_points - 1));
  double max_slope = 0.0;
  double s = lower;
  for (int i = 0; i < grid_points; ++i, s *= ratio)
    max_slope = std::max(max_slope, std::abs(density_derivative(s)));
  return max_slope;
}

std::vector<ConditionReport> audit_sigma_prior(const SigmaPriorSpec& spec,
                                               double sigma0, double eps_n) {
  if (!(sigma0 > 0.0) || !(eps_n > 0.0))
    throw std::invalid_argument("audit_sigma_prior: sigma0 and eps_n must be > 0");
  std::vector<ConditionReport> reports;

  const double lipschitz = spec.lipschitz_estimate();
  {
    ConditionReport rep;
    rep.condition = "lipschitz-finite";
    rep.lhs = lipschitz;
    rep.rhs = 1e300;
    rep.satisfied = std::isfinite(lipschitz) && lipschitz < rep.rhs;
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }

  {
    // t * survival(t) must stay bounded for large t; operationally the
    // log-log slope over the final decade of a wide grid must not rise.
    const double t_lo = spec.quantile(0.5);
    const int points = 256;
    std::vector<double> log_t, log_m;
    const double span = 1e10;
    for (int i = 0; i < points; ++i) {
      const double t = t_lo * std::pow(span, static_cast<double>(i) / (points - 1));
      const double m = t * spec.survival(t);
      if (t >= t_lo * span / 10.0 && m > 0.0) {
        log_t.push_back(std::log(t));
        log_m.push_back(std::log(m));
      }
    }
    ConditionReport rep;
    rep.condition = "polynomial-tail";
    rep.rhs = 0.05;
    if (log_t.size() < 2) {
      rep.lhs = -std::numeric_limits<double>::infinity();  // mass already exhausted
      rep.satisfied = true;
    } else {
      rep.lhs = linear_fit(log_t, log_m).slope;
      rep.satisfied = rep.lhs <= rep.rhs;
    }
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }

  {
    ConditionReport rep;
    rep.condition = "density-floor";
    rep.lhs = 2.0 * lipschitz * sigma0 * eps_n;
    rep.rhs = spec.density(sigma0 * sigma0);
    rep.satisfied = rep.rhs >= rep.lhs;
    rep.margin = rep.rhs - rep.lhs;
    reports.push_back(rep);
  }

  return reports;
}

ConditionReport example_window_inverse_gamma(double shape, double scale, double xi,
                                             std::int64_t n, double sigma0_sq) {
  if (!(xi > 0.0) || !(xi < 0.5)) throw std::invalid_argument("xi must be in (0, 1/2)");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  const double log_n = std::log(static_cast<double>(n));
  ConditionReport rep;
  rep.condition = "sigma0-window-inverse-gamma";
  rep.lhs = scale / (xi * log_n);
  rep.rhs = std::pow(static_cast<double>(n), xi / (shape + 2.0)) / log_n;
  rep.margin = std::min(sigma0_sq - rep.lhs, rep.rhs - sigma0_sq);
  rep.satisfied = rep.margin >= 0.0;
  return rep;
}

ConditionReport example_window_half_cauchy(double /*scale*/, double xi, std::int64_t n,
                                           double sigma0_sq) {
  if (!(xi > 0.0) || !(xi < 0.5)) throw std::invalid_argument("xi must be in (0, 1/2)");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  const double log_n = std::log(static_cast<double>(n));
  ConditionReport rep;
  rep.condition = "sigma0-window-half-cauchy";
  rep.lhs = 0.0;
  rep.rhs = std::pow(static_cast<double>(n), 0.5 * xi) / log_n;
  rep.margin = std::min(sigma0_sq - rep.lhs, rep.rhs - sigma0_sq);
  rep.satisfied = rep.margin >= 0.0;
  return rep;
}

}  // namespace postcon
