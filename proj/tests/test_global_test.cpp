#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "postcon/global_test.hpp"

using namespace postcon;

TEST_CASE("cover_interval produces the odd-multiple centers") {
  const auto centers = cover_interval(10.0, 1.0);
  REQUIRE(centers.size() == 5);
  CHECK(centers == std::vector<double>{1.0, 3.0, 5.0, 7.0, 9.0});

  CHECK(cover_interval(1.5, 1.0).size() == 1);  // upper <= 2 radius
  CHECK_THROWS_AS(cover_interval(-1.0, 1.0), std::invalid_argument);

  // Every point of (0, upper] sits within radius of some center.
  RngStream rng(3);
  const double upper = 7.3, radius = 0.42;
  const auto cs = cover_interval(upper, radius);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = rng.uniform() * upper;
    double best = 1e300;
    for (const double c : cs) best = std::min(best, std::abs(x - c));
    REQUIRE(best <= radius + 1e-12);
  }
}

TEST_CASE("cover_mean_set covers the coefficient box") {
  // One dimension, halfwidth = radius = 1: a single pair of centers suffices.
  CHECK(cover_mean_set(1, 1.0, 1.0).rows() <= 2);

  const Eigen::MatrixXd centers = cover_mean_set(2, 1.5, 0.4);
  RngStream rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector2d x(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    double best = 1e300;
    for (Eigen::Index r = 0; r < centers.rows(); ++r)
      best = std::min(best, (centers.row(r).transpose() - x).norm());
    REQUIRE(best <= 0.4 + 1e-12);
  }

  // The count respects the stated ceiling and grows with the halfwidth.
  const double sqrt_dim = std::sqrt(2.0);
  const auto ceiling = [&](double hw, double radius) {
    return std::pow(std::ceil(hw * sqrt_dim / radius) + 1.0, 2.0);
  };
  CHECK(static_cast<double>(centers.rows()) <= ceiling(1.5, 0.4));
  CHECK(cover_mean_set(2, 3.0, 0.4).rows() >= centers.rows());
  CHECK(cover_mean_set(2, 6.0, 0.4).rows() >=
        cover_mean_set(2, 3.0, 0.4).rows());

  // Combinatorial guard.
  CHECK_THROWS_AS(cover_mean_set(12, 10.0, 0.01), std::invalid_argument);
}

namespace {

GlobalTest make_small_global(Eigen::Index n, double sigma0, double m,
                             double eps_n) {
  const ParamPoint truth(Eigen::VectorXd::Zero(n), sigma0);
  std::vector<ParamPoint> cover;
  for (const double sigma_c : cover_interval(3.0, m * eps_n / 6.0))
    cover.emplace_back(truth.mu, sigma_c);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
  dir[0] = 1.0;
  cover.emplace_back(truth.mu + std::sqrt(double(n)) * 0.8 * dir, sigma0);
  return build_global_test(truth, cover, m, eps_n, {});
}

}  // namespace

TEST_CASE("build_global_test filters near centers and flags edge cases") {
  const Eigen::Index n = 20;
  const GlobalTest global = make_small_global(n, 1.0, 8.0, 0.05);
  CHECK_FALSE(global.degenerate);
  CHECK_FALSE(global.near_sigma_limit);
  for (const LocalTest& component : global.components) {
    CHECK(component.epsilon == doctest::Approx(0.4));
    CHECK(metric_d(component.alt, global.truth) >= 0.4 - 1e-12);
  }

  // All centers too close -> degenerate always-accept test.
  const ParamPoint truth(Eigen::VectorXd::Zero(n), 1.0);
  std::vector<ParamPoint> near{ParamPoint(truth.mu, 1.01)};
  const GlobalTest degen = build_global_test(truth, near, 7.0, 0.01, {});
  CHECK(degen.degenerate);
  CHECK(evaluate_global(degen, {truth.mu}) == 0);

  // Separation close to sigma0 is flagged.
  const GlobalTest tight = build_global_test(
      truth, {ParamPoint(truth.mu, 2.0)}, 6.5, 0.145, {});
  CHECK(tight.near_sigma_limit);

  CHECK_THROWS_AS(build_global_test(truth, near, 5.0, 0.01, {}),
                  std::invalid_argument);  // M must exceed 6
  CHECK_THROWS_AS(build_global_test(truth, near, 7.0, 0.2, {}),
                  std::invalid_argument);  // M eps_n >= sigma0
}

TEST_CASE("single-center global test behaves as its local test") {
  const Eigen::Index n = 15;
  const ParamPoint truth(Eigen::VectorXd::Zero(n), 1.0);
  const ParamPoint center(truth.mu, 1.9);
  const GlobalTest global = build_global_test(truth, {center}, 7.0, 0.1, {});
  REQUIRE(global.components.size() == 1);
  RngStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Observation obs = sample_observation(truth, rng.split(trial));
    CHECK(evaluate_global(global, obs) == evaluate(global.components[0], obs));
  }
}

TEST_CASE("evaluate_global equals the brute-force maximum") {
  const GlobalTest global = make_small_global(25, 1.0, 7.0, 0.05);
  REQUIRE(global.components.size() >= 3);
  RngStream rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const ParamPoint source(global.truth.mu,
                            0.3 + 2.5 * rng.split(trial).uniform());
    const Observation obs = sample_observation(source, rng.split(1000 + trial));
    int brute = 0;
    for (const LocalTest& component : global.components)
      brute = std::max(brute, evaluate(component, obs));
    REQUIRE(evaluate_global(global, obs) == brute);
  }
}

TEST_CASE("union bound and covered-alternative comparison hold within noise") {
  const Eigen::Index n = 200;
  const GlobalTest global = make_small_global(n, 1.0, 7.0, 0.03);
  const std::int64_t reps = 2000;

  const ErrorEstimate global_type1 = mc_global_type1(global, reps, RngStream(1));
  double sum_local = 0.0, pooled_var = 0.0;
  for (std::size_t j = 0; j < global.components.size(); ++j) {
    const ErrorEstimate local =
        mc_type1_error(global.components[j], reps, RngStream(100 + j));
    sum_local += local.estimate;
    pooled_var += local.std_error * local.std_error;
  }
  CHECK(global_type1.estimate <=
        sum_local + 3.0 * std::sqrt(pooled_var + global_type1.std_error *
                                                      global_type1.std_error));

  // Coarser form of the same bound: components x worst local type-I.
  double max_local = 0.0, max_local_se = 0.0;
  for (std::size_t j = 0; j < global.components.size(); ++j) {
    const ErrorEstimate local =
        mc_type1_error(global.components[j], reps, RngStream(100 + j));
    if (local.estimate > max_local) {
      max_local = local.estimate;
      max_local_se = local.std_error;
    }
  }
  const double count = static_cast<double>(global.components.size());
  CHECK(global_type1.estimate <=
        count * max_local + 3.0 * std::hypot(count * max_local_se,
                                             global_type1.std_error));

  // At any covered center the max test accepts no more often than the
  // component built for that center.
  for (const std::size_t j : {std::size_t{0}, global.components.size() - 1}) {
    const ParamPoint& center = global.components[j].alt;
    const ErrorEstimate global_accept =
        mc_global_accept_at(global, center, reps, RngStream(500 + j));
    const ErrorEstimate local_accept =
        mc_accept_error_at(global.components[j], center, reps, RngStream(700 + j));
    const double slack = 3.0 * std::sqrt(global_accept.std_error * global_accept.std_error +
                                         local_accept.std_error * local_accept.std_error);
    CHECK(global_accept.estimate <= local_accept.estimate + slack);
  }
}
