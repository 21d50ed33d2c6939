#pragma once

#include <span>

namespace pcount {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

// Ordinary least squares of y on t. Needs at least two samples and two
// distinct t values.
LineFit linear_fit(std::span<const double> t, std::span<const double> y);
// Same, with t = 1, 2, ..., y.size().
LineFit linear_fit(std::span<const double> y);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
};

// Paired two-tailed t-test on d = a - b with n - 1 degrees of freedom.
// All-zero differences give t = 0, p = 1. Constant nonzero differences give
// t = +/-inf, p = 0.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace pcount
