#pragma once

// Small least-squares helpers shared by the trajectory estimators.

#include <cmath>
#include <vector>

#include "wgf/errors.hpp"

namespace wgf {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int n = 0;
};

inline FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw EstimatorError("fit_line: need at least 2 paired samples");
  const int n = static_cast<int>(xs.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw EstimatorError("fit_line: degenerate abscissae");
  FitResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = r.intercept + r.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return r;
}

// fit y = c * x^slope through the positive samples
inline FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw EstimatorError("fit_loglog: nonpositive sample");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace wgf
