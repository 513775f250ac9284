#pragma once

// Modified simplicial band depth (MSBD), its all-time variant (SBD), the
// induced center-outward ranking and the 25/50/75% band assignment.
//
// Exact MSBD is computed slice by slice: the number of vertex subsets whose
// simplex contains the query at time t is obtained by counting instead of
// enumerating (angular sweep around the query for p = 2, order statistics for
// collinear slices and for p = 1). A query that sits within a small relative
// distance of a vertex, or whose angular order has near-ties or near-opposite
// pairs, is handed to brute-force enumeration with simplex_contains, so the
// counts equal full enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/pointwise_depth.hpp"
#include "trajfda/random.hpp"

namespace trajfda {

struct MsbdConfig {
  std::optional<std::uint64_t> max_triples = 200000;
  RandomSeed seed{0};
  bool exclude_query = true;

  void validate() const {
    if (max_triples && *max_triples < 100) {
      throw Error(Errc::InvalidConfig, "max_triples must be at least 100");
    }
  }
};

struct DepthEntry {
  std::string curve_id;
  double msbd = 0.0;
};

struct DepthRanking {
  std::vector<DepthEntry> entries;  // ensemble order
  std::vector<std::string> order;   // deepest first, ties by ascending id

  double msbd_of(const std::string& id) const {
    for (const auto& e : entries) {
      if (e.curve_id == id) return e.msbd;
    }
    throw Error(Errc::UnknownId, id);
  }
};

struct BandAssignment {
  std::string median_id;
  std::map<int, std::vector<std::string>> bands;  // level -> cumulative prefix of the order
  std::vector<std::string> outer_ids;
};

inline constexpr int kBandLevels[] = {25, 50, 75};

namespace detail {

inline std::uint64_t binom(std::uint64_t m, unsigned r) {
  if (m < r) return 0;
  switch (r) {
    case 0: return 1;
    case 1: return m;
    case 2: return m * (m - 1) / 2;
    case 3: return m * (m - 1) / 2 * (m - 2) / 3;
    default: break;
  }
  std::uint64_t out = 1;
  for (unsigned i = 1; i <= r; ++i) out = out * (m - r + i) / i;
  return out;
}

inline constexpr double kCoincidenceRel = 1e-4;
inline constexpr double kAngleTol = 1e-7;
inline constexpr double kCollinearCoincidenceRel = 1e-9;

/// One time slice prepared for repeated containment counts.
class SliceCounter {
 public:
  SliceCounter(const Matrix& section, double tol) : pts_(section), tol_(tol) {
    n_ = std::size_t(section.rows());
    p_ = std::size_t(section.cols());
    spread_ = depth::section_scale(section);
    if (p_ == 2) detect_collinear();
  }

  /// Number of (p+1)-subsets of the other points whose simplex contains point q.
  std::uint64_t count_excluding(std::size_t q) const {
    if (p_ == 1) return count_interval(q);
    if (collinear_) return count_collinear(q);
    return count_angular(q);
  }

  std::uint64_t brute_force(std::size_t q) const {
    std::uint64_t count = 0;
    std::vector<std::size_t> others;
    others.reserve(n_ - 1);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != q) others.push_back(j);
    }
    const std::size_t m = others.size();
    if (p_ == 1) {
      const double x = pts_(Eigen::Index(q), 0);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          count += depth::detail::interval_contains(pts_(Eigen::Index(others[a]), 0),
                                                    pts_(Eigen::Index(others[b]), 0), x, tol_);
        }
      }
      return count;
    }
    const Eigen::Vector2d qv = point(q);
    for (std::size_t a = 0; a < m; ++a) {
      const Eigen::Vector2d va = point(others[a]);
      for (std::size_t b = a + 1; b < m; ++b) {
        const Eigen::Vector2d vb = point(others[b]);
        for (std::size_t c = b + 1; c < m; ++c) {
          count += depth::detail::triangle_contains(va, vb, point(others[c]), qv, tol_);
        }
      }
    }
    return count;
  }

 private:
  Eigen::Vector2d point(std::size_t i) const { return {pts_(Eigen::Index(i), 0), pts_(Eigen::Index(i), 1)}; }

  void detect_collinear() {
    if (spread_ == 0.0) return;
    std::size_t far = 0;
    double best = -1.0;
    const Eigen::Vector2d p0 = point(0);
    for (std::size_t j = 1; j < n_; ++j) {
      const double d = (point(j) - p0).squaredNorm();
      if (d > best) {
        best = d;
        far = j;
      }
    }
    const Eigen::Vector2d dir = point(far) - p0;
    for (std::size_t j = 1; j < n_; ++j) {
      const Eigen::Vector2d v = point(j) - p0;
      if (depth::detail::cross2(dir.x(), dir.y(), v.x(), v.y()) != 0.0) return;
    }
    collinear_ = true;
    const Eigen::Vector2d unit = dir.normalized();
    line_pos_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) line_pos_[j] = (point(j) - p0).dot(unit);
  }

  std::uint64_t count_sorted_1d(const std::vector<double>& pos, std::size_t q, unsigned r) const {
    const double x = pos[q];
    const double eps = kCollinearCoincidenceRel * spread_;
    std::uint64_t below = 0, above = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == q) continue;
      if (std::abs(pos[j] - x) <= eps) return brute_force(q);
      (pos[j] < x ? below : above) += 1;
    }
    return binom(n_ - 1, r) - binom(below, r) - binom(above, r);
  }

  std::uint64_t count_interval(std::size_t q) const {
    std::vector<double> pos(n_);
    for (std::size_t j = 0; j < n_; ++j) pos[j] = pts_(Eigen::Index(j), 0);
    return count_sorted_1d(pos, q, 2);
  }

  std::uint64_t count_collinear(std::size_t q) const { return count_sorted_1d(line_pos_, q, 3); }

  std::uint64_t count_angular(std::size_t q) const {
    const Eigen::Vector2d qv = point(q);
    const double coincide = kCoincidenceRel * spread_;
    std::vector<double> ang;
    ang.reserve(n_ - 1);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == q) continue;
      const Eigen::Vector2d d = point(j) - qv;
      if (d.norm() <= coincide) return brute_force(q);
      ang.push_back(std::atan2(d.y(), d.x()));
    }
    std::sort(ang.begin(), ang.end());
    const std::size_t m = ang.size();
    constexpr double pi = std::numbers::pi;
    for (std::size_t i = 0; i < m; ++i) {
      const double gap = (i + 1 < m) ? ang[i + 1] - ang[i] : ang[0] + 2 * pi - ang[i];
      if (gap <= kAngleTol) return brute_force(q);
      double target = ang[i] + pi;
      if (target > pi) target -= 2 * pi;
      auto it = std::lower_bound(ang.begin(), ang.end(), target);
      const std::size_t hi = std::size_t(it - ang.begin()) % m;
      const std::size_t lo = (hi + m - 1) % m;
      for (std::size_t cand : {hi, lo}) {
        double diff = std::abs(ang[cand] - target);
        diff = std::min(diff, 2 * pi - diff);
        if (diff <= kAngleTol) return brute_force(q);
      }
    }
    // Triangles missing q have all vertices inside an open half-plane through q;
    // each is counted once from its angularly first vertex.
    std::uint64_t missing = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < m; ++i) {
      j = std::max(j, i + 1);
      while (j < i + m && (j < m ? ang[j] : ang[j - m] + 2 * pi) - ang[i] < pi) ++j;
      missing += binom(j - i - 1, 2);
    }
    return binom(m, 3) - missing;
  }

  const Matrix& pts_;
  double tol_;
  std::size_t n_ = 0, p_ = 0;
  double spread_ = 0.0;
  bool collinear_ = false;
  std::vector<double> line_pos_;
};

inline void require_depth_input(const TrajectoryEnsemble& ensemble) {
  const std::size_t p = ensemble.dim();
  if (p != 1 && p != 2) throw Error(Errc::InvalidConfig, "band depth supports p = 1 or p = 2 only");
  if (ensemble.size() < p + 2) {
    throw Error(Errc::TooFewCurves, "n=" + std::to_string(ensemble.size()) + " p=" + std::to_string(p));
  }
}

/// `count` distinct r-subsets of {0..m-1}, uniformly without replacement
/// (Floyd sampling of combination ranks, then colex unranking).
inline std::vector<std::vector<std::size_t>> sample_subsets(std::size_t m, unsigned r, std::uint64_t count,
                                                            RandomSeed seed) {
  const std::uint64_t total = binom(m, r);
  Rng rng = make_rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(std::size_t(count) * 2);
  for (std::uint64_t j = total - count; j < total; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    const std::uint64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> ranks(chosen.begin(), chosen.end());
  std::sort(ranks.begin(), ranks.end());
  std::vector<std::vector<std::size_t>> out;
  out.reserve(ranks.size());
  for (std::uint64_t rank : ranks) {
    std::vector<std::size_t> subset(r);
    std::uint64_t rest = rank;
    std::uint64_t top = m;
    for (unsigned k = r; k >= 1; --k) {
      std::uint64_t c = top - 1;
      while (binom(c, k) > rest) --c;
      subset[k - 1] = std::size_t(c);
      rest -= binom(c, k);
      top = c;
    }
    out.push_back(std::move(subset));
  }
  return out;
}

inline std::vector<std::size_t> candidate_vertices(std::size_t n, std::size_t q, bool exclude_query) {
  std::vector<std::size_t> cand;
  cand.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!exclude_query || j != q) cand.push_back(j);
  }
  return cand;
}

inline bool subset_contains(const TrajectoryEnsemble& e, std::size_t t, const std::vector<std::size_t>& verts,
                            std::size_t q) {
  const auto p = Eigen::Index(e.dim());
  const auto row = Eigen::Index(t);
  if (p == 1) {
    return depth::detail::interval_contains(e[verts[0]].values(row, 0), e[verts[1]].values(row, 0),
                                            e[q].values(row, 0), depth::kContainmentTol);
  }
  auto at = [&](std::size_t i) { return Eigen::Vector2d(e[i].values(row, 0), e[i].values(row, 1)); };
  return depth::detail::triangle_contains(at(verts[0]), at(verts[1]), at(verts[2]), at(q), depth::kContainmentTol);
}

struct SubsetPlan {
  std::vector<std::size_t> candidates;
  std::uint64_t total = 0;
  bool exact = true;
};

inline SubsetPlan plan_subsets(const TrajectoryEnsemble& e, std::size_t q, const MsbdConfig& cfg) {
  SubsetPlan plan;
  plan.candidates = candidate_vertices(e.size(), q, cfg.exclude_query);
  plan.total = binom(plan.candidates.size(), unsigned(e.dim() + 1));
  plan.exact = !cfg.max_triples || plan.total <= *cfg.max_triples;
  return plan;
}

inline std::vector<std::vector<std::size_t>> sampled_vertex_sets(const SubsetPlan& plan, unsigned r,
                                                                 const MsbdConfig& cfg, std::size_t q) {
  auto local = sample_subsets(plan.candidates.size(), r, *cfg.max_triples, derive_seed(cfg.seed, q));
  for (auto& s : local) {
    for (auto& v : s) v = plan.candidates[v];
  }
  return local;
}

/// Containment counts summed over all slices for every curve (exact path).
inline std::vector<std::uint64_t> exact_msbd_counts(const TrajectoryEnsemble& e, bool exclude_query,
                                                    const std::vector<std::size_t>& queries) {
  const std::size_t k = e.grid_size(), n = e.size();
  const unsigned p = unsigned(e.dim());
  std::vector<std::vector<std::uint64_t>> per_slice(k, std::vector<std::uint64_t>(queries.size(), 0));
  parallel_for(k, [&](std::size_t t) {
    const Matrix section = e.section(t);
    SliceCounter counter(section, depth::kContainmentTol);
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      std::uint64_t c = counter.count_excluding(queries[qi]);
      if (!exclude_query) c += binom(n - 1, p);
      per_slice[t][qi] = c;
    }
  });
  std::vector<std::uint64_t> totals(queries.size(), 0);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t qi = 0; qi < queries.size(); ++qi) totals[qi] += per_slice[t][qi];
  }
  return totals;
}

inline double msbd_at(const TrajectoryEnsemble& e, std::size_t q, const MsbdConfig& cfg,
                      std::optional<std::uint64_t> exact_count = std::nullopt) {
  const auto plan = plan_subsets(e, q, cfg);
  const std::size_t k = e.grid_size();
  const unsigned r = unsigned(e.dim() + 1);
  if (plan.exact) {
    const std::uint64_t count = exact_count ? *exact_count : exact_msbd_counts(e, cfg.exclude_query, {q})[0];
    return double(count) / (double(plan.total) * double(k));
  }
  const auto subsets = sampled_vertex_sets(plan, r, cfg, q);
  std::uint64_t count = 0;
  for (const auto& s : subsets) {
    for (std::size_t t = 0; t < k; ++t) count += subset_contains(e, t, s, q);
  }
  return double(count) / (double(subsets.size()) * double(k));
}

}  // namespace detail

/// Average over vertex subsets of the fraction of grid points at which the
/// query lies in the simplex spanned by the subset.
inline double msbd(const TrajectoryEnsemble& ensemble, const std::string& curve_id, const MsbdConfig& cfg = {}) {
  cfg.validate();
  detail::require_depth_input(ensemble);
  return detail::msbd_at(ensemble, ensemble.require_index(curve_id), cfg);
}

/// Fraction of vertex subsets whose simplex contains the query at every grid point.
inline double sbd(const TrajectoryEnsemble& ensemble, const std::string& curve_id, const MsbdConfig& cfg = {}) {
  cfg.validate();
  detail::require_depth_input(ensemble);
  const std::size_t q = ensemble.require_index(curve_id);
  const auto plan = detail::plan_subsets(ensemble, q, cfg);
  const unsigned r = unsigned(ensemble.dim() + 1);
  const std::size_t k = ensemble.grid_size();
  auto all_times = [&](const std::vector<std::size_t>& verts) {
    for (std::size_t t = 0; t < k; ++t) {
      if (!detail::subset_contains(ensemble, t, verts, q)) return false;
    }
    return true;
  };
  std::uint64_t hits = 0, seen = 0;
  if (plan.exact) {
    const auto& c = plan.candidates;
    const std::size_t m = c.size();
    std::vector<std::size_t> verts(r);
    if (r == 2) {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
          verts = {c[a], c[b]};
          hits += all_times(verts);
          ++seen;
        }
    } else {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          for (std::size_t d = b + 1; d < m; ++d) {
            verts = {c[a], c[b], c[d]};
            hits += all_times(verts);
            ++seen;
          }
    }
  } else {
    for (const auto& s : detail::sampled_vertex_sets(plan, r, cfg, q)) {
      hits += all_times(s);
      ++seen;
    }
  }
  return seen == 0 ? 0.0 : double(hits) / double(seen);
}

inline DepthRanking rank(const TrajectoryEnsemble& ensemble, const MsbdConfig& cfg = {}) {
  cfg.validate();
  detail::require_depth_input(ensemble);
  const std::size_t n = ensemble.size();
  DepthRanking out;
  out.entries.resize(n);

  std::vector<std::size_t> exact_queries, sampled_queries;
  for (std::size_t i = 0; i < n; ++i) {
    (detail::plan_subsets(ensemble, i, cfg).exact ? exact_queries : sampled_queries).push_back(i);
  }
  if (!exact_queries.empty()) {
    const auto counts = detail::exact_msbd_counts(ensemble, cfg.exclude_query, exact_queries);
    for (std::size_t qi = 0; qi < exact_queries.size(); ++qi) {
      const std::size_t i = exact_queries[qi];
      out.entries[i] = {ensemble[i].id, detail::msbd_at(ensemble, i, cfg, counts[qi])};
    }
  }
  parallel_for(sampled_queries.size(), [&](std::size_t qi) {
    const std::size_t i = sampled_queries[qi];
    out.entries[i] = {ensemble[i].id, detail::msbd_at(ensemble, i, cfg)};
  });

  std::vector<const DepthEntry*> sorted;
  for (const auto& e : out.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const DepthEntry* a, const DepthEntry* b) {
    if (a->msbd != b->msbd) return a->msbd > b->msbd;
    return a->curve_id < b->curve_id;
  });
  for (const auto* e : sorted) out.order.push_back(e->curve_id);
  return out;
}

/// Number of curves in the central `level` percent of m ranked curves.
inline std::size_t band_size(std::size_t m, int level) { return (m * std::size_t(level) + 99) / 100; }

inline BandAssignment assign_bands(const DepthRanking& ranking) {
  const std::size_t m = ranking.order.size();
  if (m < 4) throw Error(Errc::TooFewCurves, "bands need at least 4 ranked curves, got " + std::to_string(m));
  BandAssignment out;
  out.median_id = ranking.order.front();
  for (int level : kBandLevels) {
    const auto size = band_size(m, level);
    out.bands[level] = std::vector<std::string>(ranking.order.begin(), ranking.order.begin() + std::ptrdiff_t(size));
  }
  out.outer_ids.assign(ranking.order.begin() + std::ptrdiff_t(band_size(m, 75)), ranking.order.end());
  return out;
}

}  // namespace trajfda
