#pragma once

#include <functional>

namespace postcon {

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

struct LogIntegralResult {
  double log_value = 0.0;  // log of the integral of exp(log_f)
  double rel_err = 0.0;    // estimated relative error of the integral
  long evals = 0;
  bool converged = false;
};

/// Adaptive 15-point Gauss-Kronrod integration of exp(log_f) over [a, b],
/// carried out in log space so the integrand may span hundreds of orders of
/// magnitude. rel_tol is relative on the integral, i.e. absolute on its log.
LogIntegralResult log_integrate(const std::function<double(double)>& log_f,
                                double a, double b, double rel_tol = 1e-10,
                                int max_depth = 48);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double arg_max = 0.0;
  double max_value = 0.0;
  bool found = false;
};

/// Locates where exp(log_f) carries its mass: scans [lo0, hi0] on a uniform
/// grid, then expands/trims to the region where log_f >= max - drop.
Bracket bracket_log_mass(const std::function<double(double)>& log_f, double lo0,
                         double hi0, int scan_points = 160, double drop = 80.0);

}  // namespace postcon
