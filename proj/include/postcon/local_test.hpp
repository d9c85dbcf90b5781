#pragma once

#include <cstdint>
#include <vector>

#include "postcon/param_point.hpp"
#include "postcon/rng.hpp"

namespace postcon {

/// Free constants of the local test construction. The theory only requires
/// them "sufficiently large"; these defaults work at desk scale and are kept
/// configurable for sensitivity runs.
struct TestConstants {
  double threshold_multiplier = 3.0;  // M0 in the variance-blowup test
  double variance_split = 12.0;       // M1 > 1 separating the large-sigma regime
};

/// Which of the four parameter regimes an alternative falls into. Exactly one
/// applies to any admissible (truth, alternative) pair.
enum class TestCase {
  kLargeSigma,    // sigma1 >= M1 sigma0
  kMeanDominant,  // 7 ||mu1-mu0||^2 > n (sigma1-sigma0)^2
  kSigmaAbove,    // sigma0 <= sigma1, variance-dominant
  kSigmaBelow,    // sigma1 < sigma0, variance-dominant
};

const char* test_case_name(TestCase c);

/// A binary test separating the truth from a ball of radius epsilon/6 around
/// a separated alternative.
struct LocalTest {
  ParamPoint truth;
  ParamPoint alt;
  double epsilon = 0.0;
  TestCase test_case = TestCase::kMeanDominant;
  TestConstants constants;
};

struct ErrorEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t reps = 0;
};

TestCase select_case(const ParamPoint& truth, const ParamPoint& alt,
                     const TestConstants& constants);

/// Throws std::invalid_argument unless epsilon is in (0, truth.sigma) and
/// metric_d(alt, truth) >= epsilon.
LocalTest build_local_test(const ParamPoint& truth, const ParamPoint& alt,
                           double epsilon, const TestConstants& constants = {});

/// 1 = reject the truth. Rejection uses a strict ">" in all regimes except
/// kSigmaBelow, which rejects at "<=".
int evaluate(const LocalTest& test, const Observation& obs);

/// Type-I error: fraction of draws y ~ N(truth) that reject, with binomial
/// standard error.
ErrorEstimate mc_type1_error(const LocalTest& test, std::int64_t reps,
                             RngStream stream, int threads = 1);

/// Points at which the type-II supremum over the epsilon/6 ball is probed:
/// the ball center, then (for ball_samples > 1) the two sigma extremes, the
/// two mean extremes along the mu0 -> mu1 line, and ball_samples - 1 uniform
/// draws from the ball (rejecting nonpositive sigma).
std::vector<ParamPoint> type2_eval_points(const LocalTest& test,
                                          std::int64_t ball_samples,
                                          RngStream stream);

/// Acceptance probability E(1 - phi) under a single alternative.
ErrorEstimate mc_accept_error_at(const LocalTest& test, const ParamPoint& point,
                                 std::int64_t reps, RngStream stream,
                                 int threads = 1);

/// Type-II error: max over the probe points of the per-point acceptance
/// estimates (a Monte Carlo stand-in for the supremum over the ball).
ErrorEstimate mc_type2_error(const LocalTest& test, std::int64_t reps,
                             std::int64_t ball_samples, RngStream stream,
                             int threads = 1);

}  // namespace postcon
