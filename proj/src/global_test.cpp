#include "postcon/global_test.hpp"

#include <cmath>
#include <stdexcept>

#include "postcon/parallel.hpp"

namespace postcon {

std::vector<double> cover_interval(double upper, double radius) {
  if (!(upper > 0.0) || !(radius > 0.0))
    throw std::invalid_argument("cover_interval: upper and radius must be > 0");
  const auto count =
      static_cast<std::int64_t>(std::ceil(upper / (2.0 * radius)));
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    centers.push_back(radius * static_cast<double>(2 * i + 1));
  return centers;
}

Eigen::MatrixXd cover_mean_set(int basis_dim, double box_halfwidth, double radius) {
  if (basis_dim < 1 || !(box_halfwidth > 0.0) || !(radius > 0.0))
    throw std::invalid_argument("cover_mean_set: arguments must be positive");
  const double sqrt_dim = std::sqrt(static_cast<double>(basis_dim));
  // Per-axis spacing 2 radius / sqrt(dim) keeps every point within L2 radius.
  const auto per_axis = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(box_halfwidth * sqrt_dim / radius)));
  double total = 1.0;
  for (int d = 0; d < basis_dim; ++d) {
    total *= static_cast<double>(per_axis);
    if (total > 1e7)
      throw std::invalid_argument("cover_mean_set: grid would exceed 10^7 centers");
  }
  const auto count = static_cast<std::int64_t>(total);
  const double spacing = 2.0 * box_halfwidth / static_cast<double>(per_axis);

  Eigen::MatrixXd centers(count, basis_dim);
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t rem = idx;
    for (int d = 0; d < basis_dim; ++d) {
      const std::int64_t cell = rem % per_axis;
      rem /= per_axis;
      centers(idx, d) =
          -box_halfwidth + (static_cast<double>(cell) + 0.5) * spacing;
    }
  }
  return centers;
}

GlobalTest build_global_test(const ParamPoint& truth,
                             const std::vector<ParamPoint>& sieve_cover, double M,
                             double eps_n, const TestConstants& constants) {
  validate_param_point(truth);
  if (!(M > 6.0)) throw std::invalid_argument("build_global_test: M must exceed 6");
  if (!(eps_n > 0.0)) throw std::invalid_argument("build_global_test: eps_n must be > 0");
  const double separation = M * eps_n;
  if (!(separation < truth.sigma))
    throw std::invalid_argument("build_global_test: M * eps_n must be < truth.sigma");

  GlobalTest global;
  global.truth = truth;
  global.m_multiplier = M;
  global.eps_n = eps_n;
  global.near_sigma_limit = separation > 0.9 * truth.sigma;

  for (const ParamPoint& center : sieve_cover) {
    if (metric_d(center, truth) < separation) continue;
    global.components.push_back(build_local_test(truth, center, separation, constants));
  }
  global.degenerate = global.components.empty();
  return global;
}

int evaluate_global(const GlobalTest& global, const Observation& obs) {
  for (const LocalTest& component : global.components)
    if (evaluate(component, obs)) return 1;
  return 0;
}

namespace {

ErrorEstimate mc_binary(std::int64_t reps, int threads,
                        const std::function<int(std::int64_t)>& bit) {
  if (reps < 1) throw std::invalid_argument("monte carlo: reps must be >= 1");
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](std::int64_t i) {
    hits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(i));
  });
  ErrorEstimate est;
  est.reps = reps;
  std::int64_t sum = 0;
  for (const auto h : hits) sum += h;
  est.estimate = static_cast<double>(sum) / static_cast<double>(reps);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(reps));
  return est;
}

}  // namespace

ErrorEstimate mc_global_type1(const GlobalTest& global, std::int64_t reps,
                              RngStream stream, int threads) {
  return mc_binary(reps, threads, [&](std::int64_t i) {
    Observation obs = sample_observation(global.truth, stream.split(i));
    return evaluate_global(global, obs);
  });
}

ErrorEstimate mc_global_accept_at(const GlobalTest& global, const ParamPoint& point,
                                  std::int64_t reps, RngStream stream, int threads) {
  return mc_binary(reps, threads, [&](std::int64_t i) {
    Observation obs = sample_observation(point, stream.split(i));
    return 1 - evaluate_global(global, obs);
  });
}

}  // namespace postcon
