#pragma once

// Matérn correlation, the bivariate Matérn cross-covariance with its
// admissibility check, and sampling of the bivariate Gaussian process.

#include <Eigen/Cholesky>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/random.hpp"

namespace trajfda {

/// M(h) = 2^(1-nu) / Gamma(nu) * (h/alpha)^nu * K_nu(h/alpha), M(0) = 1.
inline double matern_corr(double h, double nu, double alpha) {
  if (!(h >= 0.0) || !(nu > 0.0) || !(alpha > 0.0)) {
    throw Error(Errc::InvalidConfig, "matern_corr needs h >= 0, nu > 0, alpha > 0");
  }
  if (h == 0.0) return 1.0;
  const double x = h / alpha;
  if (x > 700.0) return 0.0;
  const double log_scale = (1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(x);
  const double v = std::exp(log_scale) * boost::math::cyl_bessel_k(nu, x);
  return std::min(v, 1.0);
}

struct MaternSpec {
  double sigma1 = 1.0, sigma2 = 1.0;
  double alpha11 = 0.02, alpha22 = 0.01, alpha12 = 0.016;
  double nu11 = 1.2, nu22 = 0.6, nu12 = 1.0;
  double rho12 = 0.6;
  std::size_t k = 200;
  double domain_lo = 0.0, domain_hi = 1.0;

  /// Largest |rho12| for which the cross-covariance is positive definite in
  /// one dimension, given the smoothness and range parameters.
  double rho_bound() const {
    constexpr double d = 1.0;
    const double a11 = 1.0 / alpha11, a22 = 1.0 / alpha22, a12 = 1.0 / alpha12;
    const double e12 = 2.0 * nu12 + d, e11 = nu11 + d / 2.0, e22 = nu22 + d / 2.0;
    auto g = [&](double s) {  // s = t^2
      return e12 * std::log(a12 * a12 + s) - e11 * std::log(a11 * a11 + s) - e22 * std::log(a22 * a22 + s);
    };
    const double amax = std::max({a11, a12, a22});
    double best = g(0.0), best_s = 0.0;
    const int steps = 4000;
    const double lo = std::log(1e-6 * amax * amax), hi = std::log(1e8 * amax * amax);
    for (int i = 0; i <= steps; ++i) {
      const double s = std::exp(lo + (hi - lo) * i / steps);
      const double v = g(s);
      if (v < best) {
        best = v;
        best_s = s;
      }
    }
    if (best_s > 0.0) {
      // Golden-section refinement on log s around the grid minimum.
      const double h = (hi - lo) / steps;
      double x0 = std::log(best_s) - h, x1 = std::log(best_s) + h;
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 100; ++it) {
        const double c = x1 - phi * (x1 - x0), e = x0 + phi * (x1 - x0);
        if (g(std::exp(c)) < g(std::exp(e))) x1 = e; else x0 = c;
      }
      best = std::min(best, g(std::exp(0.5 * (x0 + x1))));
    }
    if (2.0 * nu12 == nu11 + nu22) best = std::min(best, 0.0);  // limit as t -> infinity
    const double log_b = std::lgamma(nu11 + d / 2) - std::lgamma(nu11) + std::lgamma(nu22 + d / 2) -
                         std::lgamma(nu22) + 2.0 * std::lgamma(nu12) - 2.0 * std::lgamma(nu12 + d / 2) +
                         2.0 * nu11 * std::log(a11) + 2.0 * nu22 * std::log(a22) - 4.0 * nu12 * std::log(a12) + best;
    return std::sqrt(std::exp(log_b));
  }

  void validate() const {
    if (!(sigma1 > 0 && sigma2 > 0 && alpha11 > 0 && alpha22 > 0 && alpha12 > 0 && nu11 > 0 && nu22 > 0 &&
          nu12 > 0)) {
      throw Error(Errc::InvalidCrossParams, "sigma, alpha and nu must be positive");
    }
    if (!(std::abs(rho12) < 1.0)) throw Error(Errc::InvalidCrossParams, "|rho12| must be below 1");
    if (k < 5) throw Error(Errc::InvalidConfig, "GP grid needs k >= 5");
    if (!(domain_hi > domain_lo)) throw Error(Errc::InvalidConfig, "empty GP domain");
    if (rho12 == 0.0) return;
    if (nu12 < 0.5 * (nu11 + nu22)) {
      throw Error(Errc::InvalidCrossParams, "nu12 must be at least (nu11 + nu22) / 2");
    }
    const double bound = rho_bound();
    if (std::abs(rho12) > bound) {
      throw Error(Errc::InvalidCrossParams,
                  "|rho12| = " + std::to_string(std::abs(rho12)) + " exceeds the admissible " + std::to_string(bound));
    }
  }

  TimeGrid grid() const { return TimeGrid::uniform(domain_lo, domain_hi, k); }
};

/// The 2k x 2k covariance with blocks [C11 C12; C21 C22] over the grid.
inline Matrix matern_cross_covariance(const MaternSpec& spec) {
  spec.validate();
  const TimeGrid g = spec.grid();
  const auto k = Eigen::Index(spec.k);
  Matrix c(2 * k, 2 * k);
  const double s11 = spec.sigma1 * spec.sigma1, s22 = spec.sigma2 * spec.sigma2;
  const double s12 = spec.rho12 * spec.sigma1 * spec.sigma2;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double h = std::abs(g[std::size_t(i)] - g[std::size_t(j)]);
      const double v11 = s11 * matern_corr(h, spec.nu11, spec.alpha11);
      const double v22 = s22 * matern_corr(h, spec.nu22, spec.alpha22);
      const double v12 = s12 == 0.0 ? 0.0 : s12 * matern_corr(h, spec.nu12, spec.alpha12);
      c(i, j) = c(j, i) = v11;
      c(k + i, k + j) = c(k + j, k + i) = v22;
      c(i, k + j) = c(k + j, i) = v12;
      c(j, k + i) = c(k + i, j) = v12;
    }
  }
  return c;
}

/// Lower Cholesky factor, adding diagonal jitter from 1e-12 up to 1e-8 of
/// the mean variance when the plain factorization fails.
inline Matrix jittered_cholesky(const Matrix& cov) {
  const double base = cov.trace() / double(cov.rows());
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (double rel = 1e-12; rel <= 1e-8 * 1.0000001; rel *= 10.0) {
    Matrix j = cov;
    j.diagonal().array() += rel * base;
    llt.compute(j);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(Errc::NotPositiveDefinite, "covariance not positive definite after maximum jitter");
}

inline std::string padded_id(std::size_t one_based, std::size_t total) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total).size());
  std::string s = std::to_string(one_based);
  return std::string(width - std::min(width, s.size()), '0') + s;
}

/// n independent sample paths (t -> (X1(t), X2(t))) on the uniform grid.
inline TrajectoryEnsemble gp_sample(const MaternSpec& spec, std::size_t n, RandomSeed seed) {
  const Matrix l = jittered_cholesky(matern_cross_covariance(spec));
  const auto k = Eigen::Index(spec.k);
  std::vector<Trajectory> curves;
  curves.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    NormalSource normal(derive_seed(seed, i));
    Vector z(2 * k);
    for (Eigen::Index j = 0; j < 2 * k; ++j) z(j) = normal();
    const Vector x = l.triangularView<Eigen::Lower>() * z;
    Matrix values(k, 2);
    values.col(0) = x.head(k);
    values.col(1) = x.tail(k);
    curves.push_back({padded_id(i + 1, n), std::move(values)});
  }
  return validate_ensemble(std::move(curves), spec.grid());
}

}  // namespace trajfda
