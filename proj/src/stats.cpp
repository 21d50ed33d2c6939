#include "pcount/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "pcount/error.hpp"

namespace pcount {

LineFit linear_fit(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw InvalidArgument("linear_fit: t and y differ in length");
  const std::size_t n = y.size();
  if (n < 2) throw InvalidArgument("linear_fit needs at least two points");
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t_mean += t[i];
    y_mean += y[i];
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - t_mean) * (t[i] - t_mean);
    sty += (t[i] - t_mean) * (y[i] - y_mean);
  }
  if (!(stt > 0.0)) throw InvalidArgument("linear_fit needs at least two distinct t values");
  LineFit fit;
  fit.slope = sty / stt;
  fit.intercept = y_mean - fit.slope * t_mean;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * t[i] + fit.intercept);
    fit.sse += r * r;
  }
  return fit;
}

LineFit linear_fit(std::span<const double> y) {
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i + 1);
  return linear_fit(t, y);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired_ttest: samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("paired_ttest needs at least two pairs");

  double mean = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    mean += d;
    all_zero = all_zero && d == 0.0;
  }
  if (all_zero) return {0.0, 1.0};
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (a[i] - b[i]) - mean;
    ss += r * r;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return {mean > 0.0 ? inf : -inf, 0.0};
  }
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double dof = static_cast<double>(n - 1);
  // Two-sided tail of Student's t: I_{dof / (dof + t^2)}(dof / 2, 1 / 2).
  const double p = boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + t * t));
  return {t, p};
}

}  // namespace pcount
