#include "postcon/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace postcon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  int depth;
};

struct SegmentEval {
  double log_value;  // log of Kronrod estimate over the segment
  double rel_err;    // |K - G| / K in scaled space
};

SegmentEval eval_segment(const std::function<double(double)>& log_f, double a,
                         double b, long& evals) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double lf[15];
  double peak = kNegInf;
  int idx = 0;
  for (int i = 0; i < 8; ++i) {
    const int reps = (i == 7) ? 1 : 2;
    for (int r = 0; r < reps; ++r) {
      const double x = (r == 0) ? mid - half * kXgk[i] : mid + half * kXgk[i];
      lf[idx] = log_f(x);
      peak = std::max(peak, lf[idx]);
      ++idx;
      ++evals;
    }
  }
  if (peak == kNegInf) return {kNegInf, 0.0};

  double kron = 0.0, gauss = 0.0;
  idx = 0;
  for (int i = 0; i < 8; ++i) {
    const int reps = (i == 7) ? 1 : 2;
    for (int r = 0; r < reps; ++r) {
      const double v = std::exp(lf[idx] - peak);
      kron += kWgk[i] * v;
      if (i % 2 == 1) gauss += kWg[i / 2] * v;  // Gauss nodes sit at i = 1,3,5,7
      ++idx;
    }
  }
  const double rel = kron > 0.0 ? std::abs(kron - gauss) / kron : 0.0;
  const double log_value = kron > 0.0 ? peak + std::log(kron * half) : kNegInf;
  return {log_value, rel};
}

}  // namespace

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

LogIntegralResult log_integrate(const std::function<double(double)>& log_f,
                                double a, double b, double rel_tol,
                                int max_depth) {
  LogIntegralResult out;
  if (!(b > a)) {
    out.log_value = kNegInf;
    out.converged = true;
    return out;
  }

  std::vector<Segment> stack{{a, b, 0}};
  double total = kNegInf;
  double err_acc = 0.0;  // sum of segment relative errors weighted by mass
  bool all_converged = true;

  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    const SegmentEval ev = eval_segment(log_f, seg.a, seg.b, out.evals);
    if (ev.log_value == kNegInf) continue;
    if (ev.rel_err > rel_tol && seg.depth < max_depth) {
      const double mid = 0.5 * (seg.a + seg.b);
      stack.push_back({seg.a, mid, seg.depth + 1});
      stack.push_back({mid, seg.b, seg.depth + 1});
      continue;
    }
    if (ev.rel_err > rel_tol) all_converged = false;
    const double prev = total;
    total = log_add_exp(total, ev.log_value);
    if (total != kNegInf) {
      const double seg_frac = std::exp(ev.log_value - total);
      err_acc = err_acc * std::exp(prev - total) + ev.rel_err * seg_frac;
    }
  }

  out.log_value = total;
  out.rel_err = err_acc;
  out.converged = all_converged;
  return out;
}

Bracket bracket_log_mass(const std::function<double(double)>& log_f, double lo0,
                         double hi0, int scan_points, double drop) {
  Bracket br;
  if (!(hi0 > lo0) || scan_points < 4) return br;
  const double step = (hi0 - lo0) / (scan_points - 1);

  br.max_value = kNegInf;
  for (int i = 0; i < scan_points; ++i) {
    const double u = lo0 + i * step;
    const double v = log_f(u);
    if (v > br.max_value) {
      br.max_value = v;
      br.arg_max = u;
    }
  }
  if (br.max_value == kNegInf) return br;
  br.found = true;

  const double floor = br.max_value - drop;
  double lo = br.arg_max, hi = br.arg_max;
  while (lo > lo0 + 1e-12 && log_f(lo - step) > floor) lo -= step;
  while (hi < hi0 - 1e-12 && log_f(hi + step) > floor) hi += step;
  // One extra pad step so the quadrature sees the decayed flanks.
  br.lo = std::max(lo0, lo - step);
  br.hi = std::min(hi0, hi + step);
  return br;
}

}  // namespace postcon
