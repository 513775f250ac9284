#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "trajfda/error.hpp"

namespace trajfda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RandomSeed {
  std::uint64_t value = 0;
  friend bool operator==(RandomSeed, RandomSeed) = default;
};

/// Strictly increasing sample times shared by every curve of an ensemble.
class TimeGrid {
 public:
  TimeGrid() = default;

  explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 3) {
      throw Error(Errc::InvalidGrid, "time grid needs at least 3 points, got " +
                                         std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i])) {
        throw Error(Errc::InvalidGrid, "non-finite time at index " + std::to_string(i));
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw Error(Errc::InvalidGrid,
                    "time grid not strictly increasing at index " + std::to_string(i));
      }
    }
    const double step = (points_.back() - points_.front()) / double(points_.size() - 1);
    double worst = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      worst = std::max(worst, std::abs((points_[i] - points_[i - 1]) - step));
    }
    if (worst <= 1e-9 * step) uniform_step_ = step;
  }

  /// k equally spaced points from `first` to `last` inclusive.
  static TimeGrid uniform(double first, double last, std::size_t k) {
    std::vector<double> pts(k);
    for (std::size_t i = 0; i < k; ++i) {
      pts[i] = (k == 1) ? first : first + (last - first) * double(i) / double(k - 1);
    }
    return TimeGrid(std::move(pts));
  }

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }
  std::optional<double> uniform_step() const { return uniform_step_; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.points_ == b.points_; }

 private:
  std::vector<double> points_;
  std::optional<double> uniform_step_;
};

struct Trajectory {
  std::string id;
  Matrix values;  // k x p
};

/// A validated sample of n curves on a shared grid. Immutable once built;
/// obtain instances through validate_ensemble() or restrict().
class TrajectoryEnsemble {
 public:
  const TimeGrid& grid() const { return grid_; }
  const std::vector<Trajectory>& trajectories() const { return curves_; }
  const Trajectory& operator[](std::size_t i) const { return curves_[i]; }
  std::size_t size() const { return curves_.size(); }
  std::size_t dim() const { return curves_.empty() ? 0 : std::size_t(curves_.front().values.cols()); }
  std::size_t grid_size() const { return grid_.size(); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const std::string& id) const {
    auto idx = index_of(id);
    if (!idx) throw Error(Errc::UnknownId, id);
    return *idx;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(curves_.size());
    for (const auto& c : curves_) out.push_back(c.id);
    return out;
  }

  /// The n x p cross-section at grid index t.
  Matrix section(std::size_t t) const {
    Matrix s(curves_.size(), Eigen::Index(dim()));
    for (std::size_t i = 0; i < curves_.size(); ++i) s.row(Eigen::Index(i)) = curves_[i].values.row(Eigen::Index(t));
    return s;
  }

 private:
  friend TrajectoryEnsemble validate_ensemble(std::vector<Trajectory>, TimeGrid);

  TimeGrid grid_;
  std::vector<Trajectory> curves_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Checks shape, finiteness, id uniqueness and the n >= p + 2 requirement.
inline TrajectoryEnsemble validate_ensemble(std::vector<Trajectory> raw, TimeGrid grid) {
  const std::size_t k = grid.size();
  if (k < 3) throw Error(Errc::InvalidGrid, "grid has fewer than 3 points");
  std::size_t p = 0;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const auto& curve = raw[c];
    if (std::size_t(curve.values.rows()) != k) {
      throw Error(Errc::GridMismatch, curve.id + " has " + std::to_string(curve.values.rows()) +
                                          " rows, grid has " + std::to_string(k));
    }
    if (c == 0) {
      p = std::size_t(curve.values.cols());
      if (p == 0) throw Error(Errc::GridMismatch, curve.id + " has zero coordinates");
    } else if (std::size_t(curve.values.cols()) != p) {
      throw Error(Errc::GridMismatch, curve.id + " has " + std::to_string(curve.values.cols()) +
                                          " coordinates, expected " + std::to_string(p));
    }
    for (Eigen::Index r = 0; r < curve.values.rows(); ++r) {
      for (Eigen::Index col = 0; col < curve.values.cols(); ++col) {
        if (!std::isfinite(curve.values(r, col))) {
          throw Error(Errc::NonFiniteValue,
                      curve.id + " row " + std::to_string(r) + " col " + std::to_string(col));
        }
      }
    }
    if (!seen.insert(curve.id).second) throw Error(Errc::DuplicateId, curve.id);
  }
  if (raw.size() < p + 2 || raw.empty()) {
    throw Error(Errc::TooFewCurves, "n=" + std::to_string(raw.size()) + " p=" + std::to_string(p) +
                                        " (need n >= p + 2)");
  }
  TrajectoryEnsemble e;
  e.grid_ = std::move(grid);
  e.curves_ = std::move(raw);
  for (std::size_t i = 0; i < e.curves_.size(); ++i) e.index_.emplace(e.curves_[i].id, i);
  return e;
}

/// Sub-ensemble in the order the ids are given.
inline TrajectoryEnsemble restrict(const TrajectoryEnsemble& ensemble, std::span<const std::string> ids) {
  std::vector<Trajectory> picked;
  picked.reserve(ids.size());
  for (const auto& id : ids) picked.push_back(ensemble[ensemble.require_index(id)]);
  return validate_ensemble(std::move(picked), ensemble.grid());
}

inline TrajectoryEnsemble restrict(const TrajectoryEnsemble& ensemble, std::initializer_list<std::string> ids) {
  std::vector<std::string> v(ids);
  return restrict(ensemble, std::span<const std::string>(v));
}

}  // namespace trajfda
