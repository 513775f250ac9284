#pragma once

// Trajectory functional boxplot: set WO outliers aside, rank the rest by MSBD
// and split them into central bands.

#include <string>
#include <vector>

#include "trajfda/depth_rank.hpp"
#include "trajfda/detect.hpp"
#include "trajfda/outlyingness.hpp"

namespace trajfda {

struct BoxplotConfig {
  depth::PointwiseDepthMethod method = depth::PointwiseDepthMethod::projection();
  WoConfig wo;
  WoRuleConfig rule;
};

struct Boxplot {
  BandAssignment bands;
  std::vector<std::string> outlier_ids;  // ensemble order
  DepthRanking ranking;                  // over the retained curves
  std::vector<OutlyingnessProfile> profiles;  // over the full ensemble
  WoRuleResult wo_rule;
};

inline Boxplot build_boxplot(const TrajectoryEnsemble& ensemble, const BoxplotConfig& cfg = {},
                             const MsbdConfig& msbd_cfg = {}) {
  Boxplot out;
  out.profiles = profile_ensemble(ensemble, cfg.method, cfg.wo);
  out.wo_rule = wo_outliers(out.profiles, cfg.rule);
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    (out.wo_rule.flags[i] ? out.outlier_ids : kept).push_back(ensemble[i].id);
  }
  if (kept.size() < ensemble.dim() + 2) {
    throw Error(Errc::AllCurvesFlagged, std::to_string(kept.size()) + " curves remain after removing WO outliers");
  }
  out.ranking = rank(restrict(ensemble, kept), msbd_cfg);
  out.bands = assign_bands(out.ranking);
  return out;
}

}  // namespace trajfda
