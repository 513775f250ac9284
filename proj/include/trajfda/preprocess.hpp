#pragma once

// Conditioning of irregularly sampled tracks: per-coordinate smoothing
// splines evaluated on a shared uniform grid over the common time window, and
// translation of every curve to a common start point.

#include <algorithm>
#include <string>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/smoothing_spline.hpp"
#include "trajfda/stats.hpp"

namespace trajfda {

struct RawTrack {
  std::string id;
  std::vector<double> t;
  Matrix values;  // t.size() x p
};

inline constexpr std::size_t kMinTrackSamples = 8;

struct SmoothingConfig {
  enum class Lambda { Gcv, Fixed };
  enum class Align { None, CommonStart };

  std::size_t target_k = 200;
  Lambda lambda_mode = Lambda::Gcv;
  double lambda = 0.0;  // used when lambda_mode == Fixed
  Align align = Align::None;

  void validate() const {
    if (target_k < 50) throw Error(Errc::InvalidConfig, "target_k must be >= 50");
    if (lambda_mode == Lambda::Fixed && !(lambda > 0.0 && std::isfinite(lambda))) {
      throw Error(Errc::InvalidConfig, "fixed lambda must be positive");
    }
  }
};

inline void validate_tracks(const std::vector<RawTrack>& tracks) {
  if (tracks.empty()) throw Error(Errc::EmptyInput, "no tracks");
  const auto p = tracks.front().values.cols();
  for (const auto& tr : tracks) {
    if (tr.values.cols() != p || std::size_t(tr.values.rows()) != tr.t.size()) {
      throw Error(Errc::GridMismatch, tr.id + " has inconsistent shape");
    }
    if (tr.t.size() < kMinTrackSamples) {
      throw Error(Errc::TooShort, tr.id + " has " + std::to_string(tr.t.size()) + " samples (need 8)");
    }
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      if (!std::isfinite(tr.t[i])) throw Error(Errc::NonFiniteValue, tr.id + " time " + std::to_string(i));
      if (i > 0 && !(tr.t[i] > tr.t[i - 1])) throw Error(Errc::NonMonotoneTime, tr.id);
    }
    if (!tr.values.allFinite()) throw Error(Errc::NonFiniteValue, tr.id);
  }
}

/// Translates each curve so that it starts at the componentwise median of the
/// start points (even counts average the two middle values).
inline TrajectoryEnsemble align_common_start(const TrajectoryEnsemble& ensemble) {
  const auto p = Eigen::Index(ensemble.dim());
  Eigen::RowVectorXd target(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    std::vector<double> starts(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) starts[i] = ensemble[i].values(0, c);
    target(c) = stats::median(std::move(starts));
  }
  std::vector<Trajectory> moved;
  moved.reserve(ensemble.size());
  for (const auto& tr : ensemble.trajectories()) {
    const Eigen::RowVectorXd shift = target - tr.values.row(0);
    moved.push_back({tr.id, tr.values.rowwise() + shift});
  }
  return validate_ensemble(std::move(moved), ensemble.grid());
}

/// Smooths every coordinate of every track and evaluates the fits at target_k
/// uniform times spanning the intersection of the track time ranges. The
/// returned grid is that window rescaled to [0, 1].
inline TrajectoryEnsemble smooth_resample(const std::vector<RawTrack>& tracks, const SmoothingConfig& cfg = {}) {
  cfg.validate();
  validate_tracks(tracks);
  double lo = tracks.front().t.front(), hi = tracks.front().t.back();
  for (const auto& tr : tracks) {
    lo = std::max(lo, tr.t.front());
    hi = std::min(hi, tr.t.back());
  }
  if (!(hi > lo)) throw Error(Errc::NoCommonInterval, "track time ranges do not overlap");
  const std::size_t k = cfg.target_k;
  std::vector<double> eval(k);
  for (std::size_t j = 0; j < k; ++j) eval[j] = j + 1 == k ? hi : lo + (hi - lo) * double(j) / double(k - 1);

  const auto p = tracks.front().values.cols();
  std::vector<Trajectory> curves(tracks.size());
  parallel_for(tracks.size(), [&](std::size_t i) {
    const auto& tr = tracks[i];
    Matrix out(Eigen::Index(k), p);
    for (Eigen::Index c = 0; c < p; ++c) {
      std::vector<double> y(tr.t.size());
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = tr.values(Eigen::Index(j), c);
      SplineFit fit;
      try {
        fit = cfg.lambda_mode == SmoothingConfig::Lambda::Gcv ? smoothing_spline_gcv(tr.t, y)
                                                              : smoothing_spline(tr.t, y, cfg.lambda);
      } catch (const Error& e) {
        if (e.code() == Errc::IllConditionedFit) throw Error(Errc::IllConditionedFit, tr.id);
        throw;
      }
      for (std::size_t j = 0; j < k; ++j) out(Eigen::Index(j), c) = fit(eval[j]);
    }
    curves[i] = {tr.id, std::move(out)};
  });
  auto ensemble = validate_ensemble(std::move(curves), TimeGrid::uniform(0.0, 1.0, k));
  return cfg.align == SmoothingConfig::Align::CommonStart ? align_common_start(ensemble) : ensemble;
}

}  // namespace trajfda
