#include "postcon/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "postcon/parallel.hpp"
#include "postcon/quadrature.hpp"

namespace postcon {

namespace {

void check_spec(const SplineBasisSpec& spec) {
  if (spec.degree < 0 || spec.interior_knots < 0)
    throw std::invalid_argument("spline spec: degree and interior_knots must be >= 0");
}

// Index of the knot span containing x, in [q, J-1]; x = 1 maps to the last
// nondegenerate span.
int find_span(const SplineBasisSpec& spec, const Eigen::VectorXd& knots, double x) {
  const int j_dim = spec.dimension();
  if (x >= 1.0) return j_dim - 1;
  int lo = spec.degree, hi = j_dim;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (x < knots[mid] ? hi : lo) = mid;
  }
  return lo;
}

// The q+1 nonzero basis values on the given span (Cox-de Boor triangle).
void local_basis(const SplineBasisSpec& spec, const Eigen::VectorXd& knots,
                 int span, double x, double* values) {
  const int q = spec.degree;
  values[0] = 1.0;
  std::vector<double> left(q + 1), right(q + 1);
  for (int j = 1; j <= q; ++j) {
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

Eigen::VectorXd spline_knots(const SplineBasisSpec& spec) {
  check_spec(spec);
  const int q = spec.degree;
  const int k = spec.interior_knots;
  const int j_dim = spec.dimension();
  Eigen::VectorXd knots(j_dim + q + 1);
  for (int i = 0; i <= q; ++i) knots[i] = 0.0;
  for (int i = 1; i <= k; ++i)
    knots[q + i] = static_cast<double>(i) / static_cast<double>(k + 1);
  for (int i = j_dim; i <= j_dim + q; ++i) knots[i] = 1.0;
  return knots;
}

Eigen::VectorXd bspline_basis_eval(const SplineBasisSpec& spec, double x) {
  check_spec(spec);
  if (!(x >= 0.0) || !(x <= 1.0))
    throw std::invalid_argument("bspline_basis_eval: x must lie in [0, 1]");
  const Eigen::VectorXd knots = spline_knots(spec);
  const int span = find_span(spec, knots, x);
  std::vector<double> local(spec.degree + 1);
  local_basis(spec, knots, span, x, local.data());
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(spec.dimension());
  for (int r = 0; r <= spec.degree; ++r) basis[span - spec.degree + r] = local[r];
  return basis;
}

Eigen::MatrixXd basis_matrix(const SplineBasisSpec& spec, const Eigen::VectorXd& xs) {
  check_spec(spec);
  const Eigen::VectorXd knots = spline_knots(spec);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(xs.size(), spec.dimension());
  std::vector<double> local(spec.degree + 1);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0) || !(xs[i] <= 1.0))
      throw std::invalid_argument("basis_matrix: design point outside [0, 1]");
    const int span = find_span(spec, knots, xs[i]);
    local_basis(spec, knots, span, xs[i], local.data());
    for (int r = 0; r <= spec.degree; ++r)
      B(i, span - spec.degree + r) = local[r];
  }
  return B;
}

double dimension_log_prior(std::int64_t j, double rate) {
  if (j < 1) throw std::invalid_argument("dimension_log_prior: j must be >= 1");
  const double jd = static_cast<double>(j);
  return -rate * jd * std::log(jd);
}

Eigen::VectorXd normalize_dimension_prior(std::int64_t j_lo, std::int64_t j_hi,
                                          double rate) {
  if (j_lo < 1 || j_hi < j_lo)
    throw std::invalid_argument("normalize_dimension_prior: bad range");
  Eigen::VectorXd log_mass(j_hi - j_lo + 1);
  for (std::int64_t j = j_lo; j <= j_hi; ++j)
    log_mass[j - j_lo] = dimension_log_prior(j, rate);
  const double peak = log_mass.maxCoeff();
  Eigen::VectorXd mass = (log_mass.array() - peak).exp();
  return mass / mass.sum();
}

int SplinePosterior::mode_j() const {
  Eigen::Index arg = 0;
  probs.maxCoeff(&arg);
  return j_lo + static_cast<int>(arg);
}

SplinePosterior posterior_over_J(const Eigen::VectorXd& y, const Eigen::VectorXd& xs,
                                 const SplineModel& model) {
  if (y.size() != xs.size())
    throw std::invalid_argument("posterior_over_J: y and xs lengths differ");
  if (model.j_max < model.degree + 1)
    throw std::invalid_argument("posterior_over_J: j_max must be >= degree + 1");
  if (model.j_max > 200)
    throw std::invalid_argument("posterior_over_J: j_max beyond enumeration scale");

  SplinePosterior post;
  post.sigma_prior = model.sigma_prior;
  post.j_lo = model.degree + 1;
  post.j_hi = model.j_max;
  const Eigen::Index count = post.j_hi - post.j_lo + 1;
  post.log_evidences.resize(count);
  Eigen::VectorXd log_weight(count);

  for (Eigen::Index idx = 0; idx < count; ++idx) {
    const int j = post.j_lo + static_cast<int>(idx);
    SplineBasisSpec spec{model.degree, j - model.degree - 1};
    Eigen::MatrixXd basis = basis_matrix(spec, xs);
    RidgeGaussianMarginal marginal(basis, y, model.coef_variance);
    post.log_evidences[idx] = log_evidence(marginal, model.sigma_prior);
    log_weight[idx] = dimension_log_prior(j, model.dim_rate) + post.log_evidences[idx];
    post.specs.push_back(spec);
    post.bases.push_back(std::move(basis));
    post.marginals.push_back(std::move(marginal));
  }

  const double peak = log_weight.maxCoeff();
  Eigen::VectorXd mass = (log_weight.array() - peak).exp();
  post.probs = mass / mass.sum();
  return post;
}

std::vector<FunctionSample> sample_f_posterior(const SplinePosterior& posterior,
                                               int draws, RngStream stream) {
  if (draws < 1) throw std::invalid_argument("sample_f_posterior: draws must be >= 1");
  if (posterior.probs.size() == 0)
    throw std::invalid_argument("sample_f_posterior: empty posterior");

  Eigen::VectorXd cdf(posterior.probs.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < posterior.probs.size(); ++i) {
    acc += posterior.probs[i];
    cdf[i] = acc;
  }

  std::vector<std::unique_ptr<VarianceConditional>> conditionals(
      static_cast<std::size_t>(posterior.probs.size()));

  std::vector<FunctionSample> samples;
  samples.reserve(static_cast<std::size_t>(draws));
  // Model mixture: J from its posterior, then sigma^2 | J, then beta | J,
  // sigma^2, reported as fitted values.
  for (int d = 0; d < draws; ++d) {
    RngStream draw = stream.split(d);
    const double u = draw.uniform();
    Eigen::Index idx = 0;
    while (idx + 1 < cdf.size() && cdf[idx] < u) ++idx;
    auto& conditional = conditionals[static_cast<std::size_t>(idx)];
    if (!conditional)
      conditional = std::make_unique<VarianceConditional>(
          posterior.marginals[static_cast<std::size_t>(idx)],
          posterior.sigma_prior);
    const double s_sq = conditional->sample(draw);
    const Eigen::VectorXd beta =
        posterior.marginals[static_cast<std::size_t>(idx)].sample_coefficients(s_sq,
                                                                               draw);
    FunctionSample sample;
    sample.fvals = posterior.bases[static_cast<std::size_t>(idx)] * beta;
    sample.sigma = std::sqrt(s_sq);
    sample.j = posterior.j_lo + static_cast<int>(idx);
    samples.push_back(std::move(sample));
  }
  return samples;
}

double empirical_l2_norm(const Eigen::VectorXd& fvals) {
  if (fvals.size() < 1)
    throw std::invalid_argument("empirical_l2_norm: empty vector");
  return fvals.norm() / std::sqrt(static_cast<double>(fvals.size()));
}

double eps_n_spline(double sigma0, std::int64_t n, double alpha) {
  if (!(sigma0 > 0.0) || n < 2 || !(alpha > 0.0))
    throw std::invalid_argument("eps_n_spline: bad arguments");
  const double nd = static_cast<double>(n);
  const double base = sigma0 * sigma0 * std::log(nd) / nd;
  return std::pow(base, alpha / (2.0 * alpha + 1.0));
}

Eigen::VectorXd HolderTruth::evaluate(const Eigen::VectorXd& xs) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = f0(xs[i]);
  return out;
}

HolderTruth holder_truth(TruthFamily family, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("holder_truth: alpha must be > 0");
  HolderTruth truth;
  truth.alpha = alpha;
  switch (family) {
    case TruthFamily::kFractional: {
      const bool even_integer =
          std::abs(alpha - std::round(alpha)) < 1e-12 &&
          static_cast<std::int64_t>(std::llround(alpha)) % 2 == 0;
      truth.f0 = [alpha, even_integer](double x) {
        const double u = x - 0.5;
        const double mag = std::pow(std::abs(u), alpha);
        return even_integer && u < 0.0 ? -mag : mag;
      };
      truth.family = "fractional";
      truth.holder_norm = std::tgamma(alpha + 1.0) + std::pow(0.5, alpha);
      break;
    }
    case TruthFamily::kSinusoid: {
      truth.f0 = [](double x) { return std::sin(2.0 * M_PI * x); };
      truth.family = "sinusoid";
      truth.holder_norm = std::pow(2.0 * M_PI, alpha);
      break;
    }
  }
  return truth;
}

std::vector<ApproximationPoint> approximation_error_curve(
    const HolderTruth& truth, int degree, const std::vector<int>& j_values,
    int grid_points) {
  if (!(static_cast<double>(degree + 1) >= truth.alpha))
    throw std::invalid_argument(
        "approximation_error_curve: requires degree + 1 >= alpha");
  if (grid_points < 16)
    throw std::invalid_argument("approximation_error_curve: grid too small");

  std::vector<ApproximationPoint> curve;
  Eigen::VectorXd xs(grid_points);
  for (int i = 0; i < grid_points; ++i)
    xs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_points);
  const Eigen::VectorXd f_true = truth.evaluate(xs);

  for (const int j : j_values) {
    if (j < degree + 1)
      throw std::invalid_argument("approximation_error_curve: J must be >= degree + 1");
    const SplineBasisSpec spec{degree, j - degree - 1};
    const Eigen::VectorXd knots = spline_knots(spec);

    // Sparse-aware normal equations: each grid point touches degree + 1
    // consecutive basis functions.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(j, j);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(j);
    std::vector<int> spans(static_cast<std::size_t>(grid_points));
    Eigen::MatrixXd locals(grid_points, degree + 1);
    std::vector<double> local(degree + 1);
    for (int i = 0; i < grid_points; ++i) {
      const int span = find_span(spec, knots, xs[i]);
      local_basis(spec, knots, span, xs[i], local.data());
      spans[static_cast<std::size_t>(i)] = span;
      for (int r = 0; r <= degree; ++r) {
        locals(i, r) = local[r];
        rhs[span - degree + r] += local[r] * f_true[i];
        for (int c = 0; c <= degree; ++c)
          gram(span - degree + r, span - degree + c) += local[r] * local[c];
      }
    }
    const Eigen::VectorXd coef = gram.ldlt().solve(rhs);

    double sup_error = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      double fit = 0.0;
      const int span = spans[static_cast<std::size_t>(i)];
      for (int r = 0; r <= degree; ++r)
        fit += locals(i, r) * coef[span - degree + r];
      sup_error = std::max(sup_error, std::abs(fit - f_true[i]));
    }
    curve.push_back({j, sup_error});
  }
  return curve;
}

std::vector<ConditionReport> spline_assumption_reports(
    const SplineExperimentConfig& config) {
  std::vector<ConditionReport> reports;
  const double sigma0_sq = config.sigma0 * config.sigma0;
  for (const std::int64_t n : config.n_grid) {
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    ConditionReport rep;
    rep.condition = "sigma0-window-spline(n=" + std::to_string(n) + ")";
    rep.lhs = std::pow(log_n / nd, 2.0 * config.alpha) * log_n;
    rep.rhs = nd / log_n;
    rep.margin = std::min(sigma0_sq - rep.lhs, rep.rhs - sigma0_sq);
    rep.satisfied = rep.margin >= 0.0;
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<SplineExperimentRow> contraction_experiment_spline(
    const SplineExperimentConfig& config, std::uint64_t seed, int threads) {
  if (config.n_grid.empty() || config.replicates < 1)
    throw std::invalid_argument("spline experiment: empty grid or replicates < 1");
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1])
      throw std::invalid_argument("spline experiment: n_grid must be increasing");
  const HolderTruth truth = holder_truth(config.family, config.alpha);

  std::vector<std::int64_t> n_grid = config.n_grid;
  int replicates = config.replicates;
  if (config.use_fixed_data) {
    if (config.fixed_xs.size() != config.fixed_y.size() || config.fixed_xs.size() < 2)
      throw std::invalid_argument("spline experiment: bad fixed data");
    n_grid = {config.fixed_xs.size()};
    replicates = 1;
  }

  const std::size_t tasks = n_grid.size() * static_cast<std::size_t>(replicates);
  std::vector<SplineExperimentRow> rows(tasks);
  RngStream root(seed);

  parallel_for(static_cast<std::int64_t>(tasks), threads, [&](std::int64_t task) {
    const std::size_t grid_idx =
        static_cast<std::size_t>(task) / static_cast<std::size_t>(replicates);
    const int replicate = static_cast<int>(task % replicates);
    const std::int64_t n = n_grid[grid_idx];
    RngStream stream = root.split(task);

    Eigen::VectorXd xs(n), y(n);
    if (config.use_fixed_data) {
      xs = config.fixed_xs;
      y = config.fixed_y;
    } else {
      if (config.random_design) {
        RngStream design = stream.split(0);
        for (Eigen::Index i = 0; i < n; ++i) xs[i] = design.uniform();
        std::sort(xs.data(), xs.data() + n);
      } else {
        for (Eigen::Index i = 0; i < n; ++i)
          xs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      }
      y = truth.evaluate(xs) + config.sigma0 * stream.split(1).normal_vector(n);
    }

    const SplinePosterior posterior = posterior_over_J(y, xs, config.model);
    const std::vector<FunctionSample> draws =
        sample_f_posterior(posterior, config.posterior_draws, stream.split(2));

    const Eigen::VectorXd f_true = truth.evaluate(xs);
    std::vector<PosteriorSample> posterior_points;
    std::vector<double> errors;
    posterior_points.reserve(draws.size());
    for (const FunctionSample& s : draws) {
      errors.push_back(empirical_l2_norm(s.fvals - f_true) +
                       std::abs(s.sigma - config.sigma0));
      posterior_points.push_back({s.fvals, s.sigma});
    }

    SplineExperimentRow row;
    row.n = n;
    row.replicate = replicate;
    row.median_error = median_of(errors);
    row.eps_n = eps_n_spline(config.sigma0, n, config.alpha);
    row.bad_mass = contraction_diagnostic(posterior_points,
                                          ParamPoint(f_true, config.sigma0),
                                          row.eps_n, config.separation_multiplier);
    row.posterior_mode_j = posterior.mode_j();
    rows[static_cast<std::size_t>(task)] = row;
  });

  return rows;
}

}  // namespace postcon
