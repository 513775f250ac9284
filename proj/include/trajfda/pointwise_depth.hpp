#pragma once

// Cross-sectional (fixed time) depth machinery: projection and Mahalanobis
// outlyingness, the depth median of a cross-section, and closed simplex
// containment for p in {1, 2}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/random.hpp"
#include "trajfda/stats.hpp"

namespace trajfda::depth {

struct PointwiseDepthMethod {
  enum class Kind { Projection, Mahalanobis };

  Kind kind = Kind::Projection;
  int directions = 180;  // Projection only

  static PointwiseDepthMethod projection(int directions = 180) { return {Kind::Projection, directions}; }
  static PointwiseDepthMethod mahalanobis() { return {Kind::Mahalanobis, 0}; }

  friend bool operator==(const PointwiseDepthMethod&, const PointwiseDepthMethod&) = default;
};

inline constexpr double kMadGuardRel = 1e-12;
inline constexpr double kCappedOutlyingness = 1e12;
inline constexpr double kRidgeRel = 1e-10;

/// Unit directions (rows). p = 2: `count` angles equally spaced on [0, pi).
/// p = 1: the single direction +1. p >= 3: a fixed pseudo-random set (seeded,
/// identical on every call).
inline Matrix direction_set(std::size_t p, int count) {
  if (count < 1) throw Error(Errc::InvalidConfig, "projection needs at least one direction");
  if (p == 1) return Matrix::Ones(1, 1);
  Matrix u(count, Eigen::Index(p));
  if (p == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = std::numbers::pi * double(i) / double(count);
      u(i, 0) = std::cos(a);
      u(i, 1) = std::sin(a);
    }
    return u;
  }
  NormalSource normal(RandomSeed{0x5eed'd1ec'7105ULL + p});
  for (int i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < p; ++j) u(i, Eigen::Index(j)) = normal();
    u.row(i).normalize();
  }
  return u;
}

/// Translation-invariant size of a cross-section: the largest coordinate range.
inline double section_scale(const Matrix& section) {
  if (section.rows() == 0) return 0.0;
  return (section.colwise().maxCoeff() - section.colwise().minCoeff()).maxCoeff();
}

namespace detail {

inline void require_section(const Matrix& section) {
  const auto n = std::size_t(section.rows());
  const auto p = std::size_t(section.cols());
  if (p == 0 || n < p + 2) {
    throw Error(Errc::TooFewCurves, "cross-section has n=" + std::to_string(n) + " points in p=" +
                                        std::to_string(p) + " (need n >= p + 2)");
  }
  if (!section.allFinite()) throw Error(Errc::NonFiniteValue, "cross-section contains a non-finite value");
}

/// Per-direction median and normalized MAD of the projected section.
struct ProjectionSummary {
  Matrix directions;  // D x p
  Vector median;      // D
  Vector mad;         // D
  double eps = 0.0;
};

inline ProjectionSummary summarize_projections(const Matrix& section, int count) {
  ProjectionSummary s;
  s.directions = direction_set(std::size_t(section.cols()), count);
  const Matrix proj = section * s.directions.transpose();  // n x D
  const auto d = proj.cols();
  s.median.resize(d);
  s.mad.resize(d);
  std::vector<double> col(std::size_t(proj.rows()));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < proj.rows(); ++i) col[std::size_t(i)] = proj(i, j);
    const double med = stats::median(col);
    s.median(j) = med;
    s.mad(j) = stats::mad(col, med);
  }
  s.eps = kMadGuardRel * section_scale(section);
  return s;
}

inline double projection_outlyingness(const ProjectionSummary& s, const Vector& query) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.directions.rows(); ++j) {
    const double dev = std::abs(s.directions.row(j).dot(query) - s.median(j));
    double o;
    if (s.mad(j) <= s.eps) {
      o = dev <= s.eps ? 0.0 : kCappedOutlyingness;
    } else {
      o = std::min(dev / s.mad(j), kCappedOutlyingness);
    }
    worst = std::max(worst, o);
  }
  return worst;
}

/// Mean and inverse of the ridge-regularized classical covariance.
struct MahalanobisSummary {
  Vector mean;
  Matrix inverse;
  bool all_identical = false;
};

inline MahalanobisSummary summarize_mahalanobis(const Matrix& section) {
  MahalanobisSummary s;
  const auto n = section.rows();
  const auto p = section.cols();
  s.mean = section.colwise().mean().transpose();
  const Matrix centered = section.rowwise() - s.mean.transpose();
  Matrix cov = (centered.transpose() * centered) / double(n - 1);
  const double trace = cov.trace();
  if (!(trace > 0.0)) {
    s.all_identical = true;
    return s;
  }
  cov.diagonal().array() += kRidgeRel * trace / double(p);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::DegenerateSection, "cross-section covariance is singular beyond the ridge");
  }
  s.inverse = llt.solve(Matrix::Identity(p, p));
  return s;
}

inline double mahalanobis_outlyingness(const MahalanobisSummary& s, const Vector& query) {
  const Vector d = query - s.mean;
  if (s.all_identical) {
    if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    throw Error(Errc::DegenerateSection, "all cross-section points coincide and the query differs");
  }
  return std::max(0.0, d.dot(s.inverse * d));
}

}  // namespace detail

/// Outlyingness o >= 0 of `query` relative to the empirical distribution of
/// the section rows. Mahalanobis: o = 1/d - 1 = squared Mahalanobis distance.
inline double pointwise_outlyingness(const Matrix& section, const Vector& query,
                                     const PointwiseDepthMethod& method) {
  detail::require_section(section);
  if (query.size() != section.cols()) throw Error(Errc::GridMismatch, "query dimension differs from section");
  if (method.kind == PointwiseDepthMethod::Kind::Projection) {
    return detail::projection_outlyingness(detail::summarize_projections(section, method.directions), query);
  }
  return detail::mahalanobis_outlyingness(detail::summarize_mahalanobis(section), query);
}

/// Outlyingness of every row of the section against the section itself.
inline Vector section_outlyingness(const Matrix& section, const PointwiseDepthMethod& method) {
  detail::require_section(section);
  Vector out(section.rows());
  if (method.kind == PointwiseDepthMethod::Kind::Projection) {
    const auto s = detail::summarize_projections(section, method.directions);
    for (Eigen::Index i = 0; i < section.rows(); ++i) {
      out(i) = detail::projection_outlyingness(s, section.row(i).transpose());
    }
  } else {
    const auto s = detail::summarize_mahalanobis(section);
    for (Eigen::Index i = 0; i < section.rows(); ++i) {
      out(i) = detail::mahalanobis_outlyingness(s, section.row(i).transpose());
    }
  }
  return out;
}

/// Row index of the least outlying sample point; ties go to the lowest index.
inline Eigen::Index argmin_lowest(const Vector& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) < values(best)) best = i;
  }
  return best;
}

inline Eigen::Index pointwise_median_index(const Matrix& section, const PointwiseDepthMethod& method) {
  return argmin_lowest(section_outlyingness(section, method));
}

inline Vector pointwise_median(const Matrix& section, const PointwiseDepthMethod& method) {
  return section.row(pointwise_median_index(section, method)).transpose();
}

inline constexpr double kContainmentTol = 1e-12;

namespace detail {

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

inline double point_segment_distance(const Eigen::Vector2d& q, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (q - a).norm();
  const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

inline bool triangle_contains(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                              const Eigen::Vector2d& q, double tol) {
  const double dab = (a - b).norm(), dbc = (b - c).norm(), dca = (c - a).norm();
  const double scale = std::max({dab, dbc, dca});
  const double slack = tol * scale;
  if (scale == 0.0) return (q - a).norm() <= slack;
  const double area2 = cross2(b.x() - a.x(), b.y() - a.y(), c.x() - a.x(), c.y() - a.y());
  if (std::abs(area2) <= tol * scale * scale) {
    // Collinear: the triangle is its longest edge.
    if (dab >= dbc && dab >= dca) return point_segment_distance(q, a, b) <= slack;
    if (dbc >= dca) return point_segment_distance(q, b, c) <= slack;
    return point_segment_distance(q, c, a) <= slack;
  }
  const double orient = area2 > 0 ? 1.0 : -1.0;
  auto inside_edge = [&](const Eigen::Vector2d& s, const Eigen::Vector2d& e, double len) {
    const double signed_dist = orient * cross2(e.x() - s.x(), e.y() - s.y(), q.x() - s.x(), q.y() - s.y()) / len;
    return signed_dist >= -slack;
  };
  return inside_edge(a, b, dab) && inside_edge(b, c, dbc) && inside_edge(c, a, dca);
}

inline bool interval_contains(double a, double b, double q, double tol) {
  const double slack = tol * std::abs(a - b);
  return q >= std::min(a, b) - slack && q <= std::max(a, b) + slack;
}

}  // namespace detail

/// Closed containment of `query` in the simplex spanned by the rows of
/// `vertices` ((p+1) x p, p in {1, 2}). `tol` is relative to the simplex
/// diameter; collinear triangles are treated as their covering segment.
inline bool simplex_contains(const Matrix& vertices, const Vector& query, double tol = kContainmentTol) {
  const auto p = vertices.cols();
  if (vertices.rows() != p + 1 || query.size() != p) {
    throw Error(Errc::InvalidConfig, "simplex needs (p+1) x p vertices and a p-vector query");
  }
  if (tol < 0) throw Error(Errc::InvalidConfig, "containment tolerance must be nonnegative");
  if (p == 1) return detail::interval_contains(vertices(0, 0), vertices(1, 0), query(0), tol);
  if (p == 2) {
    return detail::triangle_contains(vertices.row(0).transpose(), vertices.row(1).transpose(),
                                     vertices.row(2).transpose(), query, tol);
  }
  throw Error(Errc::InvalidConfig, "simplex containment supports p = 1 or p = 2 only");
}

}  // namespace trajfda::depth
