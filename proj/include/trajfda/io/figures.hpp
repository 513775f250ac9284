#pragma once

// Figure models: which curves/points go into which display category.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "trajfda/boxplot.hpp"
#include "trajfda/core.hpp"
#include "trajfda/depth_rank.hpp"

namespace trajfda::io {

enum class Category { Median, Band25, Band50, Band75, Outer, Outlier };

inline std::string category_name(Category c) {
  switch (c) {
    case Category::Median: return "median";
    case Category::Band25: return "b25";
    case Category::Band50: return "b50";
    case Category::Band75: return "b75";
    case Category::Outer: return "outer";
    case Category::Outlier: return "outlier";
  }
  return "?";
}

inline Category parse_category(const std::string& s) {
  for (auto c : {Category::Median, Category::Band25, Category::Band50, Category::Band75, Category::Outer,
                 Category::Outlier}) {
    if (category_name(c) == s) return c;
  }
  throw Error(Errc::MalformedRow, "unknown category '" + s + "'");
}

struct BoxplotFigure {
  std::string median_id;
  std::map<int, std::vector<std::string>> band_members;  // cumulative, as in BandAssignment
  std::vector<std::string> outlier_ids;
  std::vector<std::string> outer_ids;
  std::vector<std::pair<std::string, Matrix>> curves;  // ensemble order, k x 2 polylines

  /// Exactly one category per curve; the median is taken out of the 25% band.
  Category category_of(const std::string& id) const {
    if (id == median_id) return Category::Median;
    for (const auto& o : outlier_ids)
      if (o == id) return Category::Outlier;
    for (int level : kBandLevels) {
      auto it = band_members.find(level);
      if (it == band_members.end()) continue;
      for (const auto& m : it->second) {
        if (m == id) return level == 25 ? Category::Band25 : level == 50 ? Category::Band50 : Category::Band75;
      }
    }
    return Category::Outer;
  }
};

inline BoxplotFigure make_boxplot_figure(const TrajectoryEnsemble& ensemble, const Boxplot& box) {
  if (ensemble.dim() != 2) throw Error(Errc::InvalidConfig, "boxplot figures need p = 2");
  BoxplotFigure f;
  f.median_id = box.bands.median_id;
  f.band_members = box.bands.bands;
  f.outlier_ids = box.outlier_ids;
  f.outer_ids = box.bands.outer_ids;
  for (const auto& tr : ensemble.trajectories()) f.curves.emplace_back(tr.id, tr.values);
  return f;
}

struct MsbdWoPoint {
  std::string id;
  double msbd = 0.0;
  double wo = 0.0;
  Category category = Category::Outer;

  friend bool operator==(const MsbdWoPoint&, const MsbdWoPoint&) = default;
};

struct MsbdWoFigure {
  std::vector<MsbdWoPoint> points;
  friend bool operator==(const MsbdWoFigure&, const MsbdWoFigure&) = default;
};

/// Points (MSBD over the full ensemble, WO) coloured by the boxplot partition.
inline MsbdWoFigure make_msbdwo_figure(const TrajectoryEnsemble& ensemble, const Boxplot& box,
                                       const DepthRanking& full_ranking) {
  const BoxplotFigure parts = [&] {
    BoxplotFigure f;
    f.median_id = box.bands.median_id;
    f.band_members = box.bands.bands;
    f.outlier_ids = box.outlier_ids;
    f.outer_ids = box.bands.outer_ids;
    return f;
  }();
  MsbdWoFigure fig;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& id = ensemble[i].id;
    fig.points.push_back({id, full_ranking.msbd_of(id), box.profiles[i].wo, parts.category_of(id)});
  }
  return fig;
}

}  // namespace trajfda::io
