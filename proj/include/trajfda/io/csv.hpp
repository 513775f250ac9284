#pragma once

// Ensemble CSV (header id,t,<c1>,...,<cp>), the truth-label sidecar
// (id,clean|outlier per line) and whole-file atomic writes.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/preprocess.hpp"

namespace trajfda::io {

struct TrackTable {
  std::vector<std::string> coordinate_names;
  std::vector<RawTrack> tracks;  // order of first appearance
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

}  // namespace detail

/// Shortest decimal that reads back to the same double.
inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline TrackTable ingest_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  TrackTable table;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    fields = detail::split(line);
    if (fields.size() < 3 || fields[0] != "id" || fields[1] != "t") {
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": header must be id,t,<coords...>");
    }
    for (std::size_t i = 2; i < fields.size(); ++i) table.coordinate_names.emplace_back(fields[i]);
    have_header = true;
  }
  if (!have_header) throw Error(Errc::EmptyInput, "no header row");
  const std::size_t width = table.coordinate_names.size() + 2;
  const std::size_t p = table.coordinate_names.size();

  struct Rows {
    std::vector<double> t;
    std::vector<double> coords;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Rows> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    fields = detail::split(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != width) {
      throw Error(Errc::MalformedRow, where + ": expected " + std::to_string(width) + " fields, got " +
                                          std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw Error(Errc::MalformedRow, where + ": empty id");
    std::string id(fields[0]);
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    double v;
    if (!detail::parse_double(fields[1], v)) throw Error(Errc::MalformedRow, where + ": bad time");
    it->second.t.push_back(v);
    for (std::size_t c = 0; c < p; ++c) {
      if (!detail::parse_double(fields[c + 2], v)) {
        throw Error(Errc::MalformedRow, where + ": bad value in column " + std::to_string(c + 3));
      }
      it->second.coords.push_back(v);
    }
  }
  if (order.empty()) throw Error(Errc::EmptyInput, "no data rows");
  for (const auto& id : order) {
    const Rows& r = rows.at(id);
    std::vector<std::size_t> idx(r.t.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r.t[a] < r.t[b]; });
    RawTrack tr;
    tr.id = id;
    tr.t.resize(idx.size());
    tr.values.resize(Eigen::Index(idx.size()), Eigen::Index(p));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      tr.t[j] = r.t[idx[j]];
      if (j > 0 && !(tr.t[j] > tr.t[j - 1])) throw Error(Errc::NonMonotoneTime, id);
      for (std::size_t c = 0; c < p; ++c) tr.values(Eigen::Index(j), Eigen::Index(c)) = r.coords[idx[j] * p + c];
    }
    table.tracks.push_back(std::move(tr));
  }
  return table;
}

inline TrackTable ingest_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return ingest_csv(in);
}

/// Rows sorted by (id, t).
inline void write_csv(std::ostream& out, const TrackTable& table) {
  out << "id,t";
  for (const auto& c : table.coordinate_names) out << ',' << c;
  out << '\n';
  std::vector<const RawTrack*> sorted;
  for (const auto& tr : table.tracks) sorted.push_back(&tr);
  std::sort(sorted.begin(), sorted.end(), [](const RawTrack* a, const RawTrack* b) { return a->id < b->id; });
  for (const RawTrack* tr : sorted) {
    for (std::size_t j = 0; j < tr->t.size(); ++j) {
      out << tr->id << ',' << format_shortest(tr->t[j]);
      for (Eigen::Index c = 0; c < tr->values.cols(); ++c) out << ',' << format_shortest(tr->values(Eigen::Index(j), c));
      out << '\n';
    }
  }
}

inline std::vector<std::string> default_coordinate_names(std::size_t p) {
  if (p == 2) return {"x", "y"};
  std::vector<std::string> out;
  for (std::size_t c = 0; c < p; ++c) out.push_back("c" + std::to_string(c + 1));
  return out;
}

inline TrackTable to_table(const TrajectoryEnsemble& e, std::vector<std::string> names = {}) {
  TrackTable table;
  table.coordinate_names = names.empty() ? default_coordinate_names(e.dim()) : std::move(names);
  const auto pts = e.grid().points();
  for (const auto& tr : e.trajectories()) table.tracks.push_back({tr.id, {pts.begin(), pts.end()}, tr.values});
  return table;
}

/// All tracks must share identical sample times.
inline TrajectoryEnsemble to_ensemble(const TrackTable& table) {
  if (table.tracks.empty()) throw Error(Errc::EmptyInput, "no tracks");
  const auto& t0 = table.tracks.front().t;
  std::vector<Trajectory> curves;
  for (const auto& tr : table.tracks) {
    if (tr.t != t0) {
      throw Error(Errc::GridMismatch, tr.id + " is sampled at different times; run ingest to resample first");
    }
    curves.push_back({tr.id, tr.values});
  }
  return validate_ensemble(std::move(curves), TimeGrid(t0));
}

inline void write_labels(std::ostream& out, const TrajectoryEnsemble& e, const std::vector<bool>& outlier) {
  std::vector<std::size_t> idx(e.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return e[a].id < e[b].id; });
  for (auto i : idx) out << e[i].id << ',' << (outlier[i] ? "outlier" : "clean") << '\n';
}

inline std::map<std::string, bool> read_labels(std::istream& in) {
  std::map<std::string, bool> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 2 || (f[1] != "clean" && f[1] != "outlier")) {
      throw Error(Errc::MalformedRow, "labels line " + std::to_string(line_no));
    }
    out[std::string(f[0])] = f[1] == "outlier";
  }
  return out;
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace trajfda::io
