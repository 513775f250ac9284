#pragma once

// Minimum covariance determinant by random elemental starts and
// concentration steps (FastMCD without the subsample partitioning, which the
// small n of curve ensembles does not need).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/random.hpp"
#include "trajfda/stats.hpp"

namespace trajfda {

struct RmdRuleConfig {
  std::optional<double> h_fraction;  // unset: h = floor((n + q + 1) / 2)
  double quantile = 0.993;
  RandomSeed seed{0};
  int n_starts = 500;

  void validate() const {
    if (h_fraction && !(*h_fraction > 0.5 && *h_fraction <= 1.0)) {
      throw Error(Errc::InvalidConfig, "h_fraction must lie in (0.5, 1]");
    }
    if (!(quantile > 0.0 && quantile < 1.0)) throw Error(Errc::InvalidConfig, "quantile must lie in (0, 1)");
    if (n_starts < 1) throw Error(Errc::InvalidConfig, "n_starts must be positive");
  }
};

struct McdResult {
  Vector center;
  Matrix cov;  // subset covariance, divisor h
  std::vector<std::size_t> subset;  // sorted indices, size h
  double det = 0.0;
  std::size_t h = 0;
  bool exact_fit = false;  // the best subset lies on a hyperplane (det = 0)

  // The same fit in the columnwise standardized frame z = (x - loc) / scale.
  Vector loc, scale;
  Vector center_z;
  Matrix cov_z;
  double spread_z = 0.0;  // typical deviation of the subset, see detail::robust_spread
};

/// Determinant sequence of every start, for checking the concentration property.
struct McdTrace {
  std::vector<std::vector<double>> det_by_start;
};

inline std::size_t mcd_subset_size(std::size_t n, std::size_t q, const RmdRuleConfig& cfg) {
  const std::size_t lower = (n + q + 1) / 2;
  if (!cfg.h_fraction) return lower;
  const auto h = std::size_t(std::ceil(*cfg.h_fraction * double(n) - 1e-12));
  return std::clamp(h, lower, n);
}

namespace detail {

inline constexpr double kSingularRel = 1e-12;

struct SubsetFit {
  Vector center;
  Matrix cov;
  Vector eigenvalues;
  Matrix eigenvectors;
  double det = 0.0;
  bool singular = false;
};

/// Typical size of a subset's deviations: the median over its points of the
/// largest coordinate deviation from the coordinatewise median. Unlike the
/// maximum it is not dominated by a few far points, so hyperplane residuals
/// measured against it stay meaningful in badly mixed subsets.
inline double robust_spread(const Matrix& x, const std::vector<std::size_t>& idx) {
  const auto q = x.cols();
  Vector med(q);
  std::vector<double> col(idx.size());
  for (Eigen::Index c = 0; c < q; ++c) {
    for (std::size_t k = 0; k < idx.size(); ++k) col[k] = x(Eigen::Index(idx[k]), c);
    med(c) = stats::median(col);
  }
  std::vector<double> dev(idx.size());
  double widest = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    dev[k] = (x.row(Eigen::Index(idx[k])).transpose() - med).cwiseAbs().maxCoeff();
    widest = std::max(widest, dev[k]);
  }
  const double typical = stats::median(dev);
  return typical > 0.0 ? typical : widest;
}

/// Subset mean and covariance (divisor h). A subset counts as an exact fit
/// only when its points are verified to lie on the hyperplane orthogonal to
/// the weakest eigenvector; a tiny eigenvalue produced by rounding in a
/// badly scaled subset is not an exact fit and gets det = +inf instead.
inline SubsetFit fit_subset(const Matrix& x, const std::vector<std::size_t>& idx) {
  SubsetFit f;
  const auto q = x.cols();
  f.center = Vector::Zero(q);
  for (auto i : idx) f.center += x.row(Eigen::Index(i)).transpose();
  f.center /= double(idx.size());
  f.cov = Matrix::Zero(q, q);
  for (auto i : idx) {
    const Vector d = x.row(Eigen::Index(i)).transpose() - f.center;
    f.cov.noalias() += d * d.transpose();
  }
  f.cov /= double(idx.size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(f.cov);
  f.eigenvalues = eig.eigenvalues();
  f.eigenvectors = eig.eigenvectors();
  const double top = std::max(f.eigenvalues.maxCoeff(), 0.0);
  if (f.eigenvalues.minCoeff() > kSingularRel * top) {
    f.det = f.eigenvalues.prod();
    return f;
  }
  const Vector weakest = f.eigenvectors.col(0);
  const double tol = 1e-9 * std::max(robust_spread(x, idx), 1e-300);
  bool on_plane = true;
  for (auto i : idx) {
    if (std::abs(weakest.dot(x.row(Eigen::Index(i)).transpose() - f.center)) > tol) {
      on_plane = false;
      break;
    }
  }
  f.singular = on_plane;
  f.det = on_plane ? 0.0 : std::numeric_limits<double>::infinity();
  return f;
}

/// Indices of the h smallest squared Mahalanobis distances; ties by index.
inline std::vector<std::size_t> closest(const Matrix& x, const SubsetFit& f, std::size_t h) {
  const double floor = kSingularRel * std::max(f.eigenvalues.maxCoeff(), 1e-300);
  const Vector inv = f.eigenvalues.cwiseMax(floor).cwiseInverse();
  std::vector<double> d2(std::size_t(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector proj = f.eigenvectors.transpose() * (x.row(i).transpose() - f.center);
    d2[std::size_t(i)] = proj.cwiseAbs2().dot(inv);
  }
  std::vector<std::size_t> order(d2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
  order.resize(h);
  std::sort(order.begin(), order.end());
  return order;
}

struct StartOutcome {
  std::vector<std::size_t> subset;
  SubsetFit fit;
  std::vector<double> dets;
};

inline StartOutcome run_start(const Matrix& x, std::size_t h, RandomSeed seed) {
  const std::size_t n = std::size_t(x.rows()), q = std::size_t(x.cols());
  Rng rng = make_rng(seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::size_t take = std::min(n, q + 1);
  std::vector<std::size_t> start(perm.begin(), perm.begin() + std::ptrdiff_t(take));
  SubsetFit fit = fit_subset(x, start);
  while (fit.singular && take < n) {
    start.push_back(perm[take++]);
    fit = fit_subset(x, start);
  }
  StartOutcome out;
  if (fit.singular) {
    // Every point lies on one hyperplane; any h-subset is an exact fit.
    std::sort(perm.begin(), perm.begin() + std::ptrdiff_t(h));
    out.subset.assign(perm.begin(), perm.begin() + std::ptrdiff_t(h));
    out.fit = fit_subset(x, out.subset);
    out.dets.push_back(out.fit.det);
    return out;
  }
  out.subset = closest(x, fit, h);
  out.fit = fit_subset(x, out.subset);
  out.dets.push_back(out.fit.det);
  for (int iter = 0; iter < 50 && !out.fit.singular; ++iter) {
    auto next = closest(x, out.fit, h);
    if (next == out.subset) break;
    SubsetFit next_fit = fit_subset(x, next);
    const double previous = out.fit.det;
    out.dets.push_back(next_fit.det);
    out.subset = std::move(next);
    out.fit = std::move(next_fit);
    if (previous - out.fit.det < 1e-12 * previous) break;
  }
  return out;
}

}  // namespace detail

/// MCD location and scatter of the rows of `points` (n x q).
inline McdResult mcd(const Matrix& points, const RmdRuleConfig& cfg = {}, McdTrace* trace = nullptr) {
  cfg.validate();
  const std::size_t n = std::size_t(points.rows()), q = std::size_t(points.cols());
  if (q == 0 || n < q + 2) {
    throw Error(Errc::TooFewCurves, "MCD needs n >= q + 2, got n=" + std::to_string(n) + " q=" + std::to_string(q));
  }
  if (!points.allFinite()) throw Error(Errc::NonFiniteValue, "MCD input contains a non-finite value");
  const std::size_t h = mcd_subset_size(n, q, cfg);

  // Columnwise robust standardization keeps the singularity tests meaningful
  // when a few points are many orders of magnitude away; subset selection is
  // unchanged by it.
  Vector loc = Vector::Zero(Eigen::Index(q));
  Vector scale = Vector::Ones(Eigen::Index(q));
  for (Eigen::Index c = 0; c < Eigen::Index(q); ++c) {
    std::vector<double> col(points.col(c).data(), points.col(c).data() + n);
    loc(c) = stats::median(col);
    double s = stats::mad(col, loc(c));
    if (!(s > 0.0)) s = stats::sample_sd(col);
    scale(c) = s > 0.0 ? s : 1.0;
  }
  const Matrix z = (points.rowwise() - loc.transpose()).array().rowwise() / scale.transpose().array();

  const auto starts = std::size_t(cfg.n_starts);
  std::vector<detail::StartOutcome> outcomes(starts);
  parallel_for(starts, [&](std::size_t s) { outcomes[s] = detail::run_start(z, h, derive_seed(cfg.seed, s)); });

  std::size_t best = 0;
  for (std::size_t s = 1; s < starts; ++s) {
    if (outcomes[s].fit.det < outcomes[best].fit.det) best = s;
  }
  if (trace) {
    trace->det_by_start.clear();
    const double unit = scale.array().square().prod();
    for (auto& o : outcomes) {
      trace->det_by_start.push_back(o.dets);
      for (auto& d : trace->det_by_start.back()) d *= unit;
    }
  }
  McdResult r;
  r.h = h;
  r.subset = outcomes[best].subset;
  r.center = loc + outcomes[best].fit.center.cwiseProduct(scale);
  r.cov = scale.asDiagonal() * outcomes[best].fit.cov * scale.asDiagonal();
  r.det = outcomes[best].fit.det * scale.array().square().prod();
  r.exact_fit = outcomes[best].fit.singular;
  r.loc = loc;
  r.scale = scale;
  r.center_z = outcomes[best].fit.center;
  r.cov_z = outcomes[best].fit.cov;
  r.spread_z = detail::robust_spread(z, r.subset);
  return r;
}

/// Squared Mahalanobis distance of every row from the MCD estimate using the
/// raw subset covariance. Under an exact fit, rows off the fitted hyperplane
/// get +inf and rows on it are measured within the hyperplane.
inline Vector robust_distances(const Matrix& points, const McdResult& est) {
  const auto n = points.rows();
  Vector out(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(est.cov_z);
  const Vector ev = eig.eigenvalues();
  const Matrix vecs = eig.eigenvectors();
  const double top = std::max(ev.maxCoeff(), 0.0);
  const double off_plane = 1e-9 * std::max(est.spread_z, 1e-300);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector zi = (points.row(i).transpose() - est.loc).cwiseQuotient(est.scale);
    const Vector proj = vecs.transpose() * (zi - est.center_z);
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < proj.size(); ++j) {
      if (top > 0.0 && ev(j) > detail::kSingularRel * top) {
        d2 += proj(j) * proj(j) / ev(j);
      } else if (std::abs(proj(j)) > off_plane) {
        d2 = std::numeric_limits<double>::infinity();
        break;
      }
    }
    out(i) = d2;
  }
  return out;
}

}  // namespace trajfda
