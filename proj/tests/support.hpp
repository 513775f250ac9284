#pragma once

// Shared fixtures, hand-rolled generators and independent numerical oracles.
// The oracles deliberately avoid the library's own helpers (and Boost) so a
// test compares two separate computations.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "trajfda/core.hpp"

namespace testing {

using trajfda::Matrix;
using trajfda::Vector;

/// Small seeded generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return integer(0, 1) == 1; }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(sd);
    return m;
  }

  /// Random orthogonal 2x2 (rotation or reflection).
  Eigen::Matrix2d orthogonal2() {
    const double a = uniform(0.0, 2.0 * std::numbers::pi);
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    if (coin()) r.col(1) *= -1.0;
    return r;
  }

  /// Random 2x2 with condition number bounded away from singular.
  Eigen::Matrix2d nonsingular2() {
    for (;;) {
      Eigen::Matrix2d a;
      a << normal(), normal(), normal(), normal();
      const Eigen::JacobiSVD<Eigen::Matrix2d> svd(a);
      if (svd.singularValues()(1) > 0.2 * svd.singularValues()(0)) return a;
    }
  }
};

inline std::string curve_id(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

/// Ensemble from k x p matrices on the grid 0, 1, ..., k-1.
inline trajfda::TrajectoryEnsemble ensemble_of(const std::vector<Matrix>& curves) {
  std::vector<trajfda::Trajectory> raw;
  for (std::size_t i = 0; i < curves.size(); ++i) raw.push_back({curve_id(i), curves[i]});
  const auto k = std::size_t(curves.front().rows());
  return trajfda::validate_ensemble(std::move(raw), trajfda::TimeGrid::uniform(0.0, double(k - 1), k));
}

/// A curve sitting at `point` for k time steps.
inline Matrix constant_curve(const Vector& point, std::size_t k) {
  Matrix m(Eigen::Index(k), point.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = point.transpose();
  return m;
}

inline Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

// ---- containment oracle --------------------------------------------------

/// Closed triangle test by the signs of three cross products.
inline bool triangle_oracle(double ax, double ay, double bx, double by, double cx, double cy, double qx, double qy) {
  auto cr = [](double ox, double oy, double px, double py, double rx, double ry) {
    return (px - ox) * (ry - oy) - (py - oy) * (rx - ox);
  };
  const double d1 = cr(ax, ay, bx, by, qx, qy);
  const double d2 = cr(bx, by, cx, cy, qx, qy);
  const double d3 = cr(cx, cy, ax, ay, qx, qy);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// ---- special functions ----------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Root of f on [lo, hi] by plain bisection (f(lo) and f(hi) of opposite sign).
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double normal_quantile(double p) {
  return bisect([p](double x) { return normal_cdf(x) - p; }, -40.0, 40.0);
}

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double incomplete_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(1.0 - x, b, a);
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x)) / a;
  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double num;
    if (i == 0) {
      num = 1.0;
    } else if (i % 2 == 0) {
      num = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    const double cd = c * d;
    f *= cd;
    if (std::abs(1.0 - cd) < 1e-15) break;
  }
  return front * (f - 1.0);
}

inline double f_cdf(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  return incomplete_beta(d1 * x / (d1 * x + d2), d1 / 2.0, d2 / 2.0);
}

inline double f_quantile(double p, double d1, double d2) {
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < p) hi *= 2.0;
  return bisect([&](double x) { return f_cdf(x, d1, d2) - p; }, 0.0, hi);
}

/// Regularized lower incomplete gamma P(a, x) by its power series (x moderate).
inline double lower_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < 2000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double chi2_cdf(double x, double df) { return lower_gamma_p(df / 2.0, x / 2.0); }

inline double chi2_quantile(double p, double df) {
  double hi = df + 10.0;
  while (chi2_cdf(hi, df) < p) hi *= 2.0;
  return bisect([&](double x) { return chi2_cdf(x, df) - p; }, 0.0, hi);
}

/// K_nu(x) from the integral representation int_0^inf exp(-x cosh u) cosh(nu u) du,
/// composite Simpson on a truncated range.
inline double bessel_k(double nu, double x) {
  double upper = 1.0;
  while (x * std::cosh(upper) - nu * upper < 750.0) upper += 0.5;
  const int n = 20000;
  const double h = upper / n;
  auto f = [&](double u) { return std::exp(-x * std::cosh(u)) * std::cosh(nu * u); };
  double s = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double matern_oracle(double h, double nu, double alpha) {
  if (h == 0.0) return 1.0;
  const double x = h / alpha;
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) * bessel_k(nu, x);
}

// ---- misc -----------------------------------------------------------------

inline double plain_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Correlation between sorted standardized values and normal scores (Blom).
inline double normal_quantile_correlation(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = normal_quantile((double(i + 1) - 0.375) / (double(n) + 0.25));
  double mv = 0, mq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mv += v[i];
    mq += q[i];
  }
  mv /= double(n);
  mq /= double(n);
  double sv = 0, sq = 0, c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sv += (v[i] - mv) * (v[i] - mv);
    sq += (q[i] - mq) * (q[i] - mq);
    c += (v[i] - mv) * (q[i] - mq);
  }
  return c / std::sqrt(sv * sq);
}

}  // namespace testing
