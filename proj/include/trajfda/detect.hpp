#pragma once

// Outlier rules: the robust log-WO cutoff, the inflated central-region rule
// for MSBD, and the robust Mahalanobis distance of (MO, VO) with an F cutoff.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/depth_rank.hpp"
#include "trajfda/mcd.hpp"
#include "trajfda/outlyingness.hpp"
#include "trajfda/stats.hpp"

namespace trajfda {

struct WoRuleConfig {
  double alpha = 0.975;

  void validate() const {
    if (!(alpha > 0.5 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "alpha must lie in (0.5, 1)");
  }
};

struct MsbdRuleConfig {
  double factor = 1.5;

  void validate() const {
    if (!(factor >= 1.0) || !std::isfinite(factor)) throw Error(Errc::InvalidConfig, "factor must be >= 1");
  }
};

struct WoRuleResult {
  std::vector<bool> flags;
  std::vector<double> standardized;  // (log wo - med) / MAD; -inf for wo = 0
  double log_median = 0.0;
  double log_mad = 0.0;
  double cutoff = 0.0;        // normal quantile at alpha
  double wo_threshold = 0.0;  // exp(med + cutoff * MAD)
  bool degenerate = false;    // MAD = 0: flag exactly the curves above the median
};

struct MsbdRuleResult {
  std::vector<bool> flags;
  std::size_t central_count = 0;
  std::size_t collinear_slices = 0;  // slices where the central hull degenerated to a segment or point
};

/// Consistency factor and Wishart degrees of freedom of the raw MCD
/// covariance (asymptotic Croux-Haesbroeck / Hardin-Rocke approximation).
struct McdCalibration {
  double consistency = 1.0;  // multiplies the raw subset covariance
  double m = 0.0;
};

struct RmdRuleResult {
  std::vector<bool> flags;
  Vector rmd2;              // raw-covariance squared distances
  double rmd_threshold = 0.0;  // flag iff rmd2 > rmd_threshold
  double mcd_c = 1.0;       // factor applied to rmd2 (1 / consistency)
  double mcd_m = 0.0;
  bool chi2_fallback = false;
  bool exact_fit = false;
  std::size_t dimension = 0;  // coordinates of Y actually tested
  McdResult estimate;
};

struct DetectionRecord {
  std::string curve_id;
  double wo = 0.0;
  double standardized_log_wo = 0.0;
  bool wo_flag = false;
  double msbd = 0.0;
  bool msbd_flag = false;
  double rmd2 = 0.0;
  bool rmd_flag = false;
};

struct DetectionThresholds {
  double wo_threshold = 0.0;
  double wo_cutoff = 0.0;
  bool wo_degenerate = false;
  double rmd_threshold = 0.0;
  double mcd_c = 1.0;
  double mcd_m = 0.0;
  bool rmd_chi2_fallback = false;
};

struct DetectionReport {
  std::vector<DetectionRecord> records;
  DetectionThresholds thresholds;
};

struct DetectConfigs {
  WoRuleConfig wo;
  MsbdRuleConfig msbd;
  RmdRuleConfig rmd;
};

inline WoRuleResult wo_outliers(const std::vector<OutlyingnessProfile>& profiles, const WoRuleConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = profiles.size();
  if (n == 0) throw Error(Errc::EmptyInput, "no profiles");
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = profiles[i].wo;
    if (!(w >= 0.0)) throw Error(Errc::NonFiniteValue, profiles[i].curve_id + " has invalid wo");
    logs[i] = w == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(w);
  }
  WoRuleResult r;
  r.log_median = stats::median(logs);
  if (!std::isfinite(r.log_median)) {
    throw Error(Errc::AllZeroWo, "at least half of the curves have wo = 0");
  }
  r.log_mad = stats::mad(logs, r.log_median);
  r.cutoff = stats::normal_quantile(cfg.alpha);
  r.degenerate = !(r.log_mad > 0.0);
  r.wo_threshold = std::exp(r.log_median + (r.degenerate ? 0.0 : r.cutoff * r.log_mad));
  r.standardized.resize(n);
  r.flags.resize(n);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = logs[i] - r.log_median;
    double z;
    if (std::isinf(logs[i])) {
      z = -inf;
    } else if (r.degenerate) {
      z = dev > 0 ? inf : (dev < 0 ? -inf : 0.0);
    } else {
      z = dev / r.log_mad;
    }
    r.standardized[i] = z;
    r.flags[i] = z > r.cutoff;
  }
  return r;
}

namespace detail {

using P2 = Eigen::Vector2d;

/// Counter-clockwise convex hull without collinear vertices (monotone chain).
inline std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](const P2& o, const P2& a, const P2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<P2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline P2 polygon_centroid(const std::vector<P2>& poly) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2& p = poly[i];
    const P2& q = poly[(i + 1) % poly.size()];
    const double w = p.x() * q.y() - q.x() * p.y();
    a += w;
    cx += (p.x() + q.x()) * w;
    cy += (p.y() + q.y()) * w;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

/// Region reached by the central points scaled by `scale` about the centre.
class InflatedRegion {
 public:
  InflatedRegion(const std::vector<P2>& central, double scale, double slack) : slack_(slack) {
    hull_ = convex_hull(central);
    if (hull_.size() >= 3) {
      double area2 = 0.0;
      for (std::size_t i = 0; i < hull_.size(); ++i) {
        const P2& p = hull_[i];
        const P2& q = hull_[(i + 1) % hull_.size()];
        area2 += p.x() * q.y() - q.x() * p.y();
      }
      double diam = 0.0;
      for (const auto& p : hull_)
        for (const auto& q : hull_) diam = std::max(diam, (p - q).norm());
      if (area2 > 1e-12 * diam * diam) {
        const P2 c = polygon_centroid(hull_);
        for (auto& v : hull_) v = c + scale * (v - c);
        return;
      }
    }
    // Degenerate hull: the segment between the extreme central points.
    collinear_ = true;
    P2 a = central.front(), b = central.front();
    double best = -1.0;
    for (const auto& p : central)
      for (const auto& q : central) {
        const double d = (p - q).squaredNorm();
        if (d > best) {
          best = d;
          a = p;
          b = q;
        }
      }
    const P2 mid = 0.5 * (a + b);
    seg_a_ = mid + scale * (a - mid);
    seg_b_ = mid + scale * (b - mid);
  }

  bool degenerate() const { return collinear_; }

  bool strictly_outside(const P2& x) const {
    if (collinear_) return depth::detail::point_segment_distance(x, seg_a_, seg_b_) > slack_;
    for (std::size_t i = 0; i < hull_.size(); ++i) {
      const P2& s = hull_[i];
      const P2& e = hull_[(i + 1) % hull_.size()];
      const P2 edge = e - s;
      const double signed_dist = (edge.x() * (x.y() - s.y()) - edge.y() * (x.x() - s.x())) / edge.norm();
      if (signed_dist < -slack_) return true;
    }
    return false;
  }

 private:
  std::vector<P2> hull_;
  bool collinear_ = false;
  P2 seg_a_, seg_b_;
  double slack_;
};

}  // namespace detail

/// Flags curves that leave the central region inflated about its centre at
/// some grid point. The central region at each time is the convex hull of the
/// deepest half of the curves, scaled by `factor` about the hull centroid
/// (about the interval midpoint for p = 1).
inline MsbdRuleResult msbd_outliers(const TrajectoryEnsemble& ensemble, const DepthRanking& ranking,
                                    const MsbdRuleConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = ensemble.size(), p = ensemble.dim(), k = ensemble.grid_size();
  if (p != 1 && p != 2) throw Error(Errc::InvalidConfig, "MSBD rule supports p = 1 or p = 2 only");
  if (ranking.order.size() != n) throw Error(Errc::GridMismatch, "ranking does not cover the ensemble");
  MsbdRuleResult r;
  r.central_count = (n + 1) / 2;
  std::vector<std::size_t> central(r.central_count);
  for (std::size_t i = 0; i < r.central_count; ++i) central[i] = ensemble.require_index(ranking.order[i]);
  const double scale = cfg.factor;
  r.flags.assign(n, false);
  for (std::size_t t = 0; t < k; ++t) {
    const Matrix section = ensemble.section(t);
    const double slack = depth::kContainmentTol * depth::section_scale(section);
    const auto row = [&](std::size_t i) { return section.row(Eigen::Index(i)); };
    if (p == 1) {
      double lo = row(central[0])(0), hi = lo;
      for (auto c : central) {
        lo = std::min(lo, row(c)(0));
        hi = std::max(hi, row(c)(0));
      }
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * scale;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(row(i)(0) - mid) > half + slack) r.flags[i] = true;
      }
      continue;
    }
    std::vector<detail::P2> pts;
    pts.reserve(central.size());
    for (auto c : central) pts.emplace_back(row(c)(0), row(c)(1));
    const detail::InflatedRegion region(pts, scale, slack);
    r.collinear_slices += region.degenerate();
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.flags[i] && region.strictly_outside({row(i)(0), row(i)(1)})) r.flags[i] = true;
    }
  }
  return r;
}

/// gamma = h / n is the retained fraction, q the dimension.
inline McdCalibration mcd_calibration(std::size_t n, std::size_t q, std::size_t h) {
  const double g = double(h) / double(n);
  const double a = 1.0 - g;
  const double qd = double(q);
  McdCalibration cal;
  if (h >= n) {
    cal.consistency = 1.0;
    cal.m = double(n - 1);
    return cal;
  }
  const double qg = stats::chi2_quantile(g, qd);
  const double p2 = stats::chi2_cdf(qg, qd + 2);
  const double cg = g / p2;
  const double c2 = -0.5 * p2;
  const double c3 = -0.5 * stats::chi2_cdf(qg, qd + 4);
  const double c4 = 3.0 * c3;
  const double b1 = cg * (c3 - c4) / g;
  const double b2 = 0.5 + cg / g * (c3 - qg / qd * (c2 + a / 2.0));
  const double v1 = g * b1 * b1 * (a * std::pow(cg * qg / qd - 1.0, 2) - 1.0) -
                    2.0 * c3 * cg * cg * (3.0 * std::pow(b1 - qd * b2, 2) + (qd + 2.0) * b2 * (2.0 * b1 - qd * b2));
  const double v2 = double(n) * std::pow(b1 * (b1 - qd * b2) * g, 2) * cg * cg;
  cal.consistency = cg;
  cal.m = 2.0 / (cg * cg * v1 / v2);
  return cal;
}

/// Robust Mahalanobis rule on Y = (MO, VO).
inline RmdRuleResult rmd_outliers(const std::vector<OutlyingnessProfile>& profiles, const RmdRuleConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = profiles.size();
  if (n == 0) throw Error(Errc::EmptyInput, "no profiles");
  const std::size_t p = std::size_t(profiles.front().mo.size());
  const std::size_t q = p + 1;
  Matrix y = Matrix::Zero(Eigen::Index(n), Eigen::Index(q));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::size_t(profiles[i].mo.size()) != p) throw Error(Errc::GridMismatch, "profiles differ in dimension");
    y.row(Eigen::Index(i)).head(Eigen::Index(p)) = profiles[i].mo.transpose();
    y(Eigen::Index(i), Eigen::Index(p)) = profiles[i].vo;
  }
  // Coordinates that are identical for every curve (MO of a component with no
  // shift at all, e.g. a shared time axis) carry no information and would make
  // every subset an exact fit. Drop them and test in the remaining dimension.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < Eigen::Index(q); ++c) {
    if ((y.col(c).array() != y(0, c)).any()) keep.push_back(c);
  }
  RmdRuleResult r;
  r.flags.assign(n, false);
  r.rmd2 = Vector::Zero(Eigen::Index(n));
  r.dimension = keep.size();
  if (keep.empty()) return r;
  const Matrix yk = y(Eigen::all, keep);
  const std::size_t qk = keep.size();
  r.estimate = mcd(yk, cfg);
  r.exact_fit = r.estimate.exact_fit;
  r.rmd2 = robust_distances(yk, r.estimate);
  const McdCalibration cal = mcd_calibration(n, qk, r.estimate.h);
  r.mcd_c = 1.0 / cal.consistency;
  r.mcd_m = cal.m;
  const double dfd = cal.m - double(qk) + 1.0;
  if (std::isfinite(cal.m) && dfd > 0.0) {
    const double fq = stats::f_quantile(cfg.quantile, double(qk), dfd);
    r.rmd_threshold = cal.m * double(qk) / (r.mcd_c * dfd) * fq;
  } else {
    r.chi2_fallback = true;
    r.rmd_threshold = stats::chi2_quantile(cfg.quantile, double(qk)) / r.mcd_c;
  }
  for (std::size_t i = 0; i < n; ++i) r.flags[i] = r.rmd2(Eigen::Index(i)) > r.rmd_threshold;
  return r;
}

inline DetectionReport detect_all(const TrajectoryEnsemble& ensemble, const std::vector<OutlyingnessProfile>& profiles,
                                  const DepthRanking& ranking, const DetectConfigs& cfgs = {}) {
  const std::size_t n = ensemble.size();
  if (profiles.size() != n || ranking.entries.size() != n) {
    throw Error(Errc::GridMismatch, "profiles and ranking must cover the ensemble");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (profiles[i].curve_id != ensemble[i].id || ranking.entries[i].curve_id != ensemble[i].id) {
      throw Error(Errc::UnknownId, "profile/ranking order differs from the ensemble at " + ensemble[i].id);
    }
  }
  const auto wo_r = wo_outliers(profiles, cfgs.wo);
  const auto msbd_r = msbd_outliers(ensemble, ranking, cfgs.msbd);
  const auto rmd_r = rmd_outliers(profiles, cfgs.rmd);
  DetectionReport rep;
  rep.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = rep.records[i];
    rec.curve_id = ensemble[i].id;
    rec.wo = profiles[i].wo;
    rec.standardized_log_wo = wo_r.standardized[i];
    rec.wo_flag = wo_r.flags[i];
    rec.msbd = ranking.entries[i].msbd;
    rec.msbd_flag = msbd_r.flags[i];
    rec.rmd2 = rmd_r.rmd2(Eigen::Index(i));
    rec.rmd_flag = rmd_r.flags[i];
  }
  rep.thresholds = {wo_r.wo_threshold, wo_r.cutoff, wo_r.degenerate, rmd_r.rmd_threshold,
                    rmd_r.mcd_c,       rmd_r.mcd_m,  rmd_r.chi2_fallback};
  return rep;
}

}  // namespace trajfda
