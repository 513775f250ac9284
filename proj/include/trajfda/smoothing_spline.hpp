#pragma once

// Natural cubic smoothing spline minimizing sum (y_j - f(t_j))^2 + lambda *
// int f''^2, solved in Reinsch form (R + lambda Q'Q) gamma = Q'y with a banded
// LDL' factorization. The GCV score uses the band of the inverse
// (Hutchinson-de Hoog recursion) for the trace of the hat matrix.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trajfda/error.hpp"

namespace trajfda {

struct SplineFit {
  std::vector<double> knots;
  std::vector<double> values;  // fitted g at the knots
  std::vector<double> second;  // f'' at the knots, zero at both ends
  double lambda = 0.0;
  double rss = 0.0;
  double edf = 0.0;  // trace of the hat matrix
  double gcv = 0.0;

  /// Spline value at x; x outside the knot range is clamped to the end knots.
  double operator()(double x) const {
    const std::size_t m = knots.size();
    if (x <= knots.front()) return values.front();
    if (x >= knots.back()) return values.back();
    std::size_t lo = 0, hi = m - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (knots[mid] <= x ? lo : hi) = mid;
    }
    const double h = knots[hi] - knots[lo];
    const double a = x - knots[lo], b = knots[hi] - x;
    return (a * values[hi] + b * values[lo]) / h -
           a * b / 6.0 * ((1.0 + a / h) * second[hi] + (1.0 + b / h) * second[lo]);
  }
};

namespace detail {

/// Symmetric pentadiagonal matrix by its three upper bands.
struct Penta {
  std::vector<double> d0, d1, d2;  // d1[i] = M(i, i+1), d2[i] = M(i, i+2)
  explicit Penta(std::size_t n) : d0(n, 0.0), d1(n, 0.0), d2(n, 0.0) {}
};

/// Reinsch matrices for knots t: Q (m x (m-2), three nonzeros per column) and R.
struct ReinschSystem {
  std::vector<double> qa, qb, qc;  // column c: rows c, c+1, c+2
  Penta qtq{0};
  Penta r{0};

  explicit ReinschSystem(std::span<const double> t) {
    const std::size_t m = t.size(), n = m - 2;
    qa.resize(n);
    qb.resize(n);
    qc.resize(n);
    r = Penta(n);
    qtq = Penta(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double h0 = t[c + 1] - t[c], h1 = t[c + 2] - t[c + 1];
      qa[c] = 1.0 / h0;
      qb[c] = -1.0 / h0 - 1.0 / h1;
      qc[c] = 1.0 / h1;
      r.d0[c] = (h0 + h1) / 3.0;
      if (c + 1 < n) r.d1[c] = h1 / 6.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
      qtq.d0[c] = qa[c] * qa[c] + qb[c] * qb[c] + qc[c] * qc[c];
      if (c + 1 < n) qtq.d1[c] = qb[c] * qa[c + 1] + qc[c] * qb[c + 1];
      if (c + 2 < n) qtq.d2[c] = qc[c] * qa[c + 2];
    }
  }

  std::vector<double> qt_times(std::span<const double> y) const {
    std::vector<double> out(qa.size());
    for (std::size_t c = 0; c < qa.size(); ++c) out[c] = qa[c] * y[c] + qb[c] * y[c + 1] + qc[c] * y[c + 2];
    return out;
  }

  std::vector<double> q_times(std::span<const double> g) const {
    std::vector<double> out(qa.size() + 2, 0.0);
    for (std::size_t c = 0; c < qa.size(); ++c) {
      out[c] += qa[c] * g[c];
      out[c + 1] += qb[c] * g[c];
      out[c + 2] += qc[c] * g[c];
    }
    return out;
  }
};

/// LDL' of a symmetric positive definite pentadiagonal matrix.
struct PentaLdl {
  std::vector<double> d, l1, l2;  // l1[i] = L(i+1, i), l2[i] = L(i+2, i)
  bool ok = true;

  explicit PentaLdl(const Penta& b) {
    const std::size_t n = b.d0.size();
    d.assign(n, 0.0);
    l1.assign(n, 0.0);
    l2.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double di = b.d0[i];
      if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d[i - 1];
      if (i >= 2) di -= l2[i - 2] * l2[i - 2] * d[i - 2];
      if (!(di > 0.0) || !std::isfinite(di)) {
        ok = false;
        return;
      }
      d[i] = di;
      if (i + 1 < n) {
        double v = b.d1[i];
        if (i >= 1) v -= l1[i - 1] * l2[i - 1] * d[i - 1];
        l1[i] = v / di;
      }
      if (i + 2 < n) l2[i] = b.d2[i] / di;
    }
  }

  std::vector<double> solve(std::vector<double> x) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 1) x[i] -= l1[i - 1] * x[i - 1];
      if (i >= 2) x[i] -= l2[i - 2] * x[i - 2];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) x[i] -= l1[i] * x[i + 1];
      if (i + 2 < n) x[i] -= l2[i] * x[i + 2];
    }
    return x;
  }

  /// Entries of the inverse within the pentadiagonal band.
  Penta inverse_band() const {
    const std::size_t n = d.size();
    Penta s(n);
    for (std::size_t i = n; i-- > 0;) {
      const double a = i + 1 < n ? l1[i] : 0.0;
      const double b = i + 2 < n ? l2[i] : 0.0;
      const double s11 = i + 1 < n ? s.d0[i + 1] : 0.0;
      const double s22 = i + 2 < n ? s.d0[i + 2] : 0.0;
      const double s12 = i + 2 < n ? s.d1[i + 1] : 0.0;
      if (i + 2 < n) s.d2[i] = -a * s12 - b * s22;
      if (i + 1 < n) s.d1[i] = -a * s11 - b * s12;
      s.d0[i] = 1.0 / d[i] - a * s.d1[i] - b * s.d2[i];
    }
    return s;
  }
};

inline void check_spline_input(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw Error(Errc::GridMismatch, "spline times and values differ in length");
  if (t.size() < 4) throw Error(Errc::TooShort, "smoothing spline needs at least 4 points");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw Error(Errc::NonFiniteValue, "spline input");
    if (i > 0 && !(t[i] > t[i - 1])) throw Error(Errc::NonMonotoneTime, "spline knots not increasing");
  }
}

inline SplineFit fit_with_system(const ReinschSystem& sys, std::span<const double> t, std::span<const double> y,
                                 double lambda) {
  const std::size_t m = t.size(), n = m - 2;
  Penta b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.d0[i] = sys.r.d0[i] + lambda * sys.qtq.d0[i];
    b.d1[i] = sys.r.d1[i] + lambda * sys.qtq.d1[i];
    b.d2[i] = lambda * sys.qtq.d2[i];
  }
  const PentaLdl ldl(b);
  if (!ldl.ok) throw Error(Errc::IllConditionedFit, "smoothing system not positive definite");
  const auto gamma = ldl.solve(sys.qt_times(y));
  const auto qg = sys.q_times(gamma);
  SplineFit f;
  f.knots.assign(t.begin(), t.end());
  f.values.resize(m);
  f.second.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    f.values[i] = y[i] - lambda * qg[i];
    f.rss += (y[i] - f.values[i]) * (y[i] - f.values[i]);
  }
  for (std::size_t i = 0; i < n; ++i) f.second[i + 1] = gamma[i];
  const Penta inv = ldl.inverse_band();
  double tr = 0.0;  // trace(B^-1 Q'Q)
  for (std::size_t i = 0; i < n; ++i) {
    tr += inv.d0[i] * sys.qtq.d0[i];
    tr += 2.0 * inv.d1[i] * sys.qtq.d1[i];
    tr += 2.0 * inv.d2[i] * sys.qtq.d2[i];
  }
  f.lambda = lambda;
  f.edf = double(m) - lambda * tr;
  const double denom = 1.0 - f.edf / double(m);
  f.gcv = denom > 0.0 ? (f.rss / double(m)) / (denom * denom) : std::numeric_limits<double>::infinity();
  for (double v : f.values) {
    if (!std::isfinite(v)) throw Error(Errc::IllConditionedFit, "non-finite spline value");
  }
  return f;
}

}  // namespace detail

/// Fit with a fixed smoothing parameter (lambda >= 0; 0 interpolates).
inline SplineFit smoothing_spline(std::span<const double> t, std::span<const double> y, double lambda) {
  detail::check_spline_input(t, y);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(Errc::InvalidConfig, "lambda must be >= 0");
  const detail::ReinschSystem sys(t);
  return detail::fit_with_system(sys, t, y, lambda);
}

inline constexpr int kGcvGridSize = 50;

/// Candidate smoothing parameters: 50 log-spaced multiples 1e-6..1e6 of
/// trace(R) / trace(Q'Q), which makes the grid invariant to the time unit.
inline std::vector<double> gcv_lambda_grid(std::span<const double> t) {
  const detail::ReinschSystem sys(t);
  double tr_r = 0.0, tr_q = 0.0;
  for (std::size_t i = 0; i < sys.r.d0.size(); ++i) {
    tr_r += sys.r.d0[i];
    tr_q += sys.qtq.d0[i];
  }
  const double base = tr_r / tr_q;
  std::vector<double> out(kGcvGridSize);
  for (int i = 0; i < kGcvGridSize; ++i) out[std::size_t(i)] = base * std::pow(10.0, -6.0 + 12.0 * i / (kGcvGridSize - 1));
  return out;
}

/// Fit at the GCV-minimizing lambda of the log grid (ties: smallest lambda).
inline SplineFit smoothing_spline_gcv(std::span<const double> t, std::span<const double> y) {
  detail::check_spline_input(t, y);
  const detail::ReinschSystem sys(t);
  SplineFit best;
  bool have = false;
  for (double lambda : gcv_lambda_grid(t)) {
    SplineFit f = detail::fit_with_system(sys, t, y, lambda);
    if (!have || f.gcv < best.gcv) {
      best = std::move(f);
      have = true;
    }
  }
  return best;
}

}  // namespace trajfda
