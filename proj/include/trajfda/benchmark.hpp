#pragma once

// Detection-rate benchmark: per replicate, generate a contaminated ensemble,
// run the WO, MSBD and RMD rules and score them against the truth labels.

#include <string>
#include <vector>

#include "trajfda/depth_rank.hpp"
#include "trajfda/detect.hpp"
#include "trajfda/models.hpp"
#include "trajfda/outlyingness.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/stats.hpp"

namespace trajfda {

struct DetectorConfigs {
  depth::PointwiseDepthMethod method = depth::PointwiseDepthMethod::projection();
  WoConfig wo;
  MsbdConfig msbd;
  DetectConfigs rules;
};

struct Rates {
  double pc = 0.0;  // flagged outliers / outliers
  double pf = 0.0;  // flagged clean curves / clean curves
};

struct RateSummary {
  double pc_mean = 0.0, pc_sd = 0.0, pf_mean = 0.0, pf_sd = 0.0;
};

struct ReplicateRates {
  Rates wo, msbd, rmd;
};

struct BenchmarkResult {
  RateSummary wo, msbd, rmd;
  std::size_t replicates = 0;
  std::vector<ReplicateRates> per_replicate;
};

inline Rates score(const std::vector<bool>& flags, const std::vector<bool>& truth) {
  std::size_t out = 0, clean = 0, hit = 0, false_alarm = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++out;
      hit += flags[i];
    } else {
      ++clean;
      false_alarm += flags[i];
    }
  }
  return {out ? double(hit) / double(out) : 0.0, clean ? double(false_alarm) / double(clean) : 0.0};
}

inline ReplicateRates run_replicate(const ModelSpec& model, const DetectorConfigs& det) {
  const auto sim = generate(model);
  const auto& e = sim.ensemble;
  const auto profiles = profile_ensemble(e, det.method, det.wo);
  const auto ranking = rank(e, det.msbd);
  const auto report = detect_all(e, profiles, ranking, det.rules);
  std::vector<bool> wo(e.size()), msbd(e.size()), rmd(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    wo[i] = report.records[i].wo_flag;
    msbd[i] = report.records[i].msbd_flag;
    rmd[i] = report.records[i].rmd_flag;
  }
  return {score(wo, sim.outlier), score(msbd, sim.outlier), score(rmd, sim.outlier)};
}

inline RateSummary summarize(const std::vector<Rates>& r) {
  std::vector<double> pc, pf;
  for (const auto& x : r) {
    pc.push_back(x.pc);
    pf.push_back(x.pf);
  }
  return {stats::mean(pc), stats::sample_sd(pc), stats::mean(pf), stats::sample_sd(pf)};
}

/// Replicate r uses the model seed derived from (model.seed, r); replicates
/// run in parallel and are reduced in index order.
inline BenchmarkResult benchmark(const ModelSpec& model, std::size_t replicates, const DetectorConfigs& det = {}) {
  if (replicates < 2) throw Error(Errc::InvalidConfig, "benchmark needs at least 2 replicates");
  model.validate();
  BenchmarkResult out;
  out.replicates = replicates;
  out.per_replicate.resize(replicates);
  parallel_for(replicates, [&](std::size_t r) {
    ModelSpec m = model;
    m.seed = derive_seed(model.seed, r);
    m.contaminate = true;
    out.per_replicate[r] = run_replicate(m, det);
  });
  std::vector<Rates> wo, msbd, rmd;
  for (const auto& r : out.per_replicate) {
    wo.push_back(r.wo);
    msbd.push_back(r.msbd);
    rmd.push_back(r.rmd);
  }
  out.wo = summarize(wo);
  out.msbd = summarize(msbd);
  out.rmd = summarize(rmd);
  return out;
}

}  // namespace trajfda
