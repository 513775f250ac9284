#pragma once

// Directional outlyingness O(t) of each curve, its time mean (MO) and
// variation (VO), and the wiggliness statistic WO: the average squared norm of
// the second time difference of O(t).

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/pointwise_depth.hpp"

namespace trajfda {

struct WoConfig {
  enum class Weight { Constant };
  enum class Endpoints { InteriorOnly };
  Weight weight = Weight::Constant;
  Endpoints endpoint_rule = Endpoints::InteriorOnly;
};

struct OutlyingnessProfile {
  std::string curve_id;
  Matrix o_series;  // k x p
  Vector mo;        // p
  double vo = 0.0;
  double wo = 0.0;
};

/// Directional outlyingness of every row of one cross-section (n x p). Rows
/// within the MAD guard distance of the depth median are zero.
inline Matrix section_directional_outlyingness(const Matrix& section, const depth::PointwiseDepthMethod& method) {
  const Vector o = depth::section_outlyingness(section, method);
  const Eigen::Index zi = depth::argmin_lowest(o);
  const Eigen::RowVectorXd z = section.row(zi);
  const double eps = depth::kMadGuardRel * depth::section_scale(section);
  Matrix out = Matrix::Zero(section.rows(), section.cols());
  for (Eigen::Index i = 0; i < section.rows(); ++i) {
    const Eigen::RowVectorXd diff = section.row(i) - z;
    const double dist = diff.norm();
    if (dist < eps || dist == 0.0) continue;
    out.row(i) = (o(i) / dist) * diff;
  }
  return out;
}

/// O(t) for every curve, as k x p matrices in ensemble order. Cross-sections
/// are independent and are evaluated in parallel.
inline std::vector<Matrix> directional_outlyingness_all(const TrajectoryEnsemble& ensemble,
                                                        const depth::PointwiseDepthMethod& method) {
  const std::size_t n = ensemble.size(), k = ensemble.grid_size();
  const auto p = Eigen::Index(ensemble.dim());
  std::vector<Matrix> out(n, Matrix(Eigen::Index(k), p));
  parallel_for(k, [&](std::size_t t) {
    const Matrix rows = section_directional_outlyingness(ensemble.section(t), method);
    for (std::size_t i = 0; i < n; ++i) out[i].row(Eigen::Index(t)) = rows.row(Eigen::Index(i));
  });
  return out;
}

inline Matrix directional_outlyingness(const TrajectoryEnsemble& ensemble, const std::string& curve_id,
                                       const depth::PointwiseDepthMethod& method) {
  const std::size_t idx = ensemble.require_index(curve_id);
  Matrix out(Eigen::Index(ensemble.grid_size()), Eigen::Index(ensemble.dim()));
  for (std::size_t t = 0; t < ensemble.grid_size(); ++t) {
    out.row(Eigen::Index(t)) = section_directional_outlyingness(ensemble.section(t), method).row(Eigen::Index(idx));
  }
  return out;
}

/// MO = row mean of O; VO = mean squared distance of the rows from MO.
inline std::pair<Vector, double> mo_vo(const Matrix& o_series) {
  if (o_series.rows() < 2) throw Error(Errc::TooShort, "MO/VO need k >= 2, got " + std::to_string(o_series.rows()));
  const Vector mo = o_series.colwise().mean().transpose();
  const double vo = (o_series.rowwise() - mo.transpose()).rowwise().squaredNorm().mean();
  return {mo, vo};
}

/// Sample WO with the three-point second-difference stencil at interior grid
/// points: (1/(k-2)) * sum_i ||O''(t_i)||^2 with constant unit weight.
inline double wo(const Matrix& o_series, const TimeGrid& grid, const WoConfig& = {}) {
  const auto k = o_series.rows();
  if (k < 5) throw Error(Errc::TooShort, "WO needs k >= 5, got " + std::to_string(k));
  if (std::size_t(k) != grid.size()) throw Error(Errc::GridMismatch, "O-series length differs from grid");
  const auto step = grid.uniform_step();
  if (!step) throw Error(Errc::NonUniformGrid, "WO requires a uniform time grid");
  const double inv_dt2 = 1.0 / (*step * *step);
  double sum = 0.0;
  for (Eigen::Index i = 1; i + 1 < k; ++i) {
    const Eigen::RowVectorXd second = (o_series.row(i + 1) - 2.0 * o_series.row(i) + o_series.row(i - 1)) * inv_dt2;
    sum += second.squaredNorm();
  }
  return sum / double(k - 2);
}

inline std::vector<OutlyingnessProfile> profile_ensemble(const TrajectoryEnsemble& ensemble,
                                                         const depth::PointwiseDepthMethod& method,
                                                         const WoConfig& config = {}) {
  if (!ensemble.grid().uniform_step()) throw Error(Errc::NonUniformGrid, "profiles require a uniform time grid");
  auto series = directional_outlyingness_all(ensemble, method);
  std::vector<OutlyingnessProfile> out(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    auto& prof = out[i];
    prof.curve_id = ensemble[i].id;
    std::tie(prof.mo, prof.vo) = mo_vo(series[i]);
    prof.wo = wo(series[i], ensemble.grid(), config);
    prof.o_series = std::move(series[i]);
  }
  return out;
}

}  // namespace trajfda
