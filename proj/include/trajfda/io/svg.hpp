#pragma once

// Standalone SVG output for the boxplot and the MSBD-WO scatterplot. All
// coordinates are printed with fixed precision so identical input gives
// identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "trajfda/io/figures.hpp"

namespace trajfda::io {

struct CategoryStyle {
  const char* color;
  double width;
  bool dashed;
};

inline CategoryStyle style_of(Category c) {
  switch (c) {
    case Category::Median: return {"#000000", 2.5, false};
    case Category::Band25: return {"#800080", 1.2, false};
    case Category::Band50: return {"#FF00FF", 1.2, false};
    case Category::Band75: return {"#FFC0CB", 1.2, false};
    case Category::Outer: return {"#BBBBBB", 1.0, false};
    case Category::Outlier: return {"#FF0000", 1.5, true};
  }
  return {"#000000", 1.0, false};
}

/// Back-to-front painting order; outliers end up on top.
inline constexpr Category kDrawOrder[] = {Category::Outer,  Category::Band75, Category::Band50,
                                          Category::Band25, Category::Median, Category::Outlier};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  static constexpr double width = 800, height = 600, left = 80, right = 20, top = 40, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  Frame(double xlo, double xhi, double ylo, double yhi) : x0(xlo), x1(xhi), y0(ylo), y1(yhi) {
    auto widen = [](double& lo, double& hi) {
      if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.5;
        lo -= pad;
        hi += pad;
      }
    };
    widen(x0, x1);
    widen(y0, y1);
  }

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }

  void axes(std::ostringstream& o, const std::string& xlabel, const std::string& ylabel,
            const std::string& title) const {
    const double bx = left, by = height - bottom, ex = width - right, ey = top;
    o << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<line x1=\"" << fmt("%.2f", bx) << "\" y1=\"" << fmt("%.2f", by) << "\" x2=\"" << fmt("%.2f", ex)
      << "\" y2=\"" << fmt("%.2f", by) << "\"/>\n";
    o << "<line x1=\"" << fmt("%.2f", bx) << "\" y1=\"" << fmt("%.2f", by) << "\" x2=\"" << fmt("%.2f", bx)
      << "\" y2=\"" << fmt("%.2f", ey) << "\"/>\n";
    constexpr int ticks = 5;
    for (int i = 0; i < ticks; ++i) {
      const double xv = x0 + (x1 - x0) * i / (ticks - 1);
      const double yv = y0 + (y1 - y0) * i / (ticks - 1);
      const double tx = px(xv), ty = py(yv);
      o << "<line x1=\"" << fmt("%.2f", tx) << "\" y1=\"" << fmt("%.2f", by) << "\" x2=\"" << fmt("%.2f", tx)
        << "\" y2=\"" << fmt("%.2f", by + 5) << "\"/>\n";
      o << "<text x=\"" << fmt("%.2f", tx) << "\" y=\"" << fmt("%.2f", by + 20)
        << "\" text-anchor=\"middle\" stroke=\"none\">" << fmt("%.4g", xv) << "</text>\n";
      o << "<line x1=\"" << fmt("%.2f", bx - 5) << "\" y1=\"" << fmt("%.2f", ty) << "\" x2=\"" << fmt("%.2f", bx)
        << "\" y2=\"" << fmt("%.2f", ty) << "\"/>\n";
      o << "<text x=\"" << fmt("%.2f", bx - 8) << "\" y=\"" << fmt("%.2f", ty + 4)
        << "\" text-anchor=\"end\" stroke=\"none\">" << fmt("%.4g", yv) << "</text>\n";
    }
    o << "<text x=\"" << fmt("%.2f", (bx + ex) / 2) << "\" y=\"" << fmt("%.2f", height - 15)
      << "\" text-anchor=\"middle\" stroke=\"none\">" << escape(xlabel) << "</text>\n";
    o << "<text x=\"20\" y=\"" << fmt("%.2f", (by + ey) / 2) << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 20 "
      << fmt("%.2f", (by + ey) / 2) << ")\">" << escape(ylabel) << "</text>\n";
    if (!title.empty()) {
      o << "<text x=\"" << fmt("%.2f", (bx + ex) / 2) << "\" y=\"24\" text-anchor=\"middle\" stroke=\"none\" font-size=\"14\">"
        << escape(title) << "</text>\n";
    }
    o << "</g>\n";
  }
};

inline void open_svg(std::ostringstream& o) {
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
    << "<rect width=\"800\" height=\"600\" fill=\"#FFFFFF\"/>\n";
}

}  // namespace detail

inline std::string emit_boxplot_svg(const BoxplotFigure& fig, const std::string& title = "") {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& [id, m] : fig.curves) {
    xlo = std::min(xlo, m.col(0).minCoeff());
    xhi = std::max(xhi, m.col(0).maxCoeff());
    ylo = std::min(ylo, m.col(1).minCoeff());
    yhi = std::max(yhi, m.col(1).maxCoeff());
  }
  if (fig.curves.empty()) xlo = ylo = 0, xhi = yhi = 1;
  const detail::Frame frame(xlo, xhi, ylo, yhi);
  std::ostringstream o;
  detail::open_svg(o);
  frame.axes(o, "x", "y", title);
  for (Category cat : kDrawOrder) {
    const auto st = style_of(cat);
    o << "<g id=\"" << category_name(cat) << "\" fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\""
      << detail::fmt("%.1f", st.width) << "\"" << (st.dashed ? " stroke-dasharray=\"6,4\"" : "") << ">\n";
    for (const auto& [id, m] : fig.curves) {
      if (fig.category_of(id) != cat) continue;
      o << "<polyline data-id=\"" << detail::escape(id) << "\" points=\"";
      for (Eigen::Index j = 0; j < m.rows(); ++j) {
        if (j) o << ' ';
        o << detail::fmt("%.2f", frame.px(m(j, 0))) << ',' << detail::fmt("%.2f", frame.py(m(j, 1)));
      }
      o << "\"/>\n";
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline std::string emit_msbdwo_svg(const MsbdWoFigure& fig, const std::string& title = "") {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& p : fig.points) {
    xlo = std::min(xlo, p.msbd);
    xhi = std::max(xhi, p.msbd);
    if (std::isfinite(p.wo)) {
      ylo = std::min(ylo, p.wo);
      yhi = std::max(yhi, p.wo);
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  const detail::Frame frame(xlo, xhi, ylo, yhi);
  std::ostringstream o;
  detail::open_svg(o);
  frame.axes(o, "MSBD", "WO", title);
  for (Category cat : kDrawOrder) {
    const auto st = style_of(cat);
    o << "<g id=\"" << category_name(cat) << "\" fill=\"" << st.color << "\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
    for (const auto& p : fig.points) {
      if (p.category != cat) continue;
      const double x = frame.px(p.msbd), y = frame.py(std::isfinite(p.wo) ? p.wo : frame.y1);
      if (cat == Category::Median) {
        // Rhombus marker for the deepest curve.
        o << "<polygon data-id=\"" << detail::escape(p.id) << "\" points=\"" << detail::fmt("%.2f", x) << ','
          << detail::fmt("%.2f", y - 7) << ' ' << detail::fmt("%.2f", x + 7) << ',' << detail::fmt("%.2f", y) << ' '
          << detail::fmt("%.2f", x) << ',' << detail::fmt("%.2f", y + 7) << ' ' << detail::fmt("%.2f", x - 7) << ','
          << detail::fmt("%.2f", y) << "\"/>\n";
      } else {
        o << "<circle data-id=\"" << detail::escape(p.id) << "\" cx=\"" << detail::fmt("%.2f", x) << "\" cy=\""
          << detail::fmt("%.2f", y) << "\" r=\"4\"/>\n";
      }
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace trajfda::io
