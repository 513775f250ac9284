#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace trajfda::stats {

/// Consistency constant making the MAD estimate sigma under normality.
inline constexpr double kMadScale = 1.4826;

/// Sample median; even sizes average the two middle order statistics.
inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  if (n == 0) return std::nan("");
  auto mid = v.begin() + std::ptrdiff_t(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  if (std::isinf(lo) && std::isinf(hi) && lo != hi) return std::nan("");
  if (std::isinf(lo) || std::isinf(hi)) return std::isinf(lo) ? lo : hi;
  return 0.5 * (lo + hi);
}

inline double median(std::span<const double> v) { return median(std::vector<double>(v.begin(), v.end())); }

/// Normalized median absolute deviation about `center`.
inline double mad(std::span<const double> v, double center) {
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - center);
  return kMadScale * median(std::move(dev));
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double chi2_cdf(double x, double df) {
  if (x <= 0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(df), x);
}

inline double chi2_quantile(double p, double df) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

inline double f_quantile(double p, double df1, double df2) {
  return boost::math::quantile(boost::math::fisher_f_distribution<double>(df1, df2), p);
}

inline double mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

}  // namespace trajfda::stats
