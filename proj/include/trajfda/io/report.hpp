#pragma once

// JSON serialization. Keys keep insertion order and numbers carry at most 12
// significant digits, so reports are stable byte for byte. Non-finite values
// are written as the strings "inf", "-inf" and "nan".

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "json.hpp"
#include "trajfda/benchmark.hpp"
#include "trajfda/depth_rank.hpp"
#include "trajfda/detect.hpp"
#include "trajfda/io/figures.hpp"

namespace trajfda::io {

using Json = nlohmann::ordered_json;

inline Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

inline double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(Errc::MalformedRow, "unexpected string '" + s + "' for a number");
  }
  return j.get<double>();
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json ranking_json(const DepthRanking& r) {
  Json out = Json::array();
  for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
    const auto& id = r.order[pos];
    out.push_back(Json{{"rank", pos + 1}, {"id", id}, {"msbd", json_number(r.msbd_of(id))}});
  }
  return out;
}

inline Json bands_json(const BandAssignment& b, const std::vector<std::string>& outliers) {
  Json out;
  out["median"] = b.median_id;
  for (int level : kBandLevels) out[std::to_string(level)] = b.bands.at(level);
  out["outer"] = b.outer_ids;
  out["outliers"] = outliers;
  return out;
}

inline Json detection_json(const DetectionReport& rep) {
  Json records = Json::array();
  for (const auto& r : rep.records) {
    records.push_back(Json{{"id", r.curve_id},
                           {"wo", json_number(r.wo)},
                           {"standardized_log_wo", json_number(r.standardized_log_wo)},
                           {"wo_flag", r.wo_flag},
                           {"msbd", json_number(r.msbd)},
                           {"msbd_flag", r.msbd_flag},
                           {"rmd2", json_number(r.rmd2)},
                           {"rmd_flag", r.rmd_flag}});
  }
  const auto& t = rep.thresholds;
  Json thresholds{{"wo_threshold", json_number(t.wo_threshold)},
                  {"wo_cutoff", json_number(t.wo_cutoff)},
                  {"wo_degenerate", t.wo_degenerate},
                  {"rmd_threshold", json_number(t.rmd_threshold)},
                  {"mcd_c", json_number(t.mcd_c)},
                  {"mcd_m", json_number(t.mcd_m)},
                  {"rmd_chi2_fallback", t.rmd_chi2_fallback}};
  return Json{{"records", records}, {"thresholds", thresholds}};
}

/// Top-level report; sections that were not computed are null.
inline Json report_json(const Json& config, const DepthRanking* ranking, const DetectionReport* detection,
                        const BandAssignment* bands, const std::vector<std::string>& outliers = {}) {
  Json out;
  out["config"] = config;
  out["ranking"] = ranking ? ranking_json(*ranking) : Json(nullptr);
  out["detection"] = detection ? detection_json(*detection) : Json(nullptr);
  out["bands"] = bands ? bands_json(*bands, outliers) : Json(nullptr);
  return out;
}

inline Json msbdwo_json(const MsbdWoFigure& fig) {
  Json pts = Json::array();
  for (const auto& p : fig.points) {
    pts.push_back(Json{{"id", p.id},
                       {"msbd", json_number(p.msbd)},
                       {"wo", json_number(p.wo)},
                       {"category", category_name(p.category)}});
  }
  return Json{{"points", pts}};
}

inline MsbdWoFigure msbdwo_from_json(const Json& j) {
  MsbdWoFigure fig;
  for (const auto& p : j.at("points")) {
    fig.points.push_back({p.at("id").get<std::string>(), number_from_json(p.at("msbd")),
                          number_from_json(p.at("wo")), parse_category(p.at("category").get<std::string>())});
  }
  return fig;
}

inline Json rate_json(const RateSummary& r) {
  return Json{{"pc", json_number(r.pc_mean)},
              {"sd_pc", json_number(r.pc_sd)},
              {"pf", json_number(r.pf_mean)},
              {"sd_pf", json_number(r.pf_sd)}};
}

inline Json benchmark_json(const Json& config, const BenchmarkResult& b) {
  return Json{{"config", config},
              {"replicates", b.replicates},
              {"methods", Json{{"RMD", rate_json(b.rmd)}, {"MSBD", rate_json(b.msbd)}, {"WO", rate_json(b.wo)}}}};
}

/// Fixed-width text table with one row per method.
inline std::string benchmark_table(const std::string& model, const BenchmarkResult& b) {
  std::string out = "model " + model + ", " + std::to_string(b.replicates) + " replicates\n";
  out += "method      pc  SD(pc)      pf  SD(pf)\n";
  auto row = [&](const char* name, const RateSummary& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-6s %7.2f %7.3f %7.2f %7.3f\n", name, r.pc_mean, r.pc_sd, r.pf_mean, r.pf_sd);
    out += buf;
  };
  row("RMD", b.rmd);
  row("MSBD", b.msbd);
  row("WO", b.wo);
  return out;
}

}  // namespace trajfda::io
