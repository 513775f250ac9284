#pragma once

// Simulation models with known outliers: sloped lines (1), rotated sinusoids
// (2), and concentric noisy circles contaminated by a noisy circle and
// ellipses (3) or by rose curves (4).

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trajfda/core.hpp"
#include "trajfda/matern.hpp"
#include "trajfda/random.hpp"

namespace trajfda {

enum class ModelKind { M1, M2, M3, M4 };

inline std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::M1: return "m1";
    case ModelKind::M2: return "m2";
    case ModelKind::M3: return "m3";
    case ModelKind::M4: return "m4";
  }
  return "?";
}

inline ModelKind parse_model(const std::string& s) {
  if (s == "m1" || s == "1") return ModelKind::M1;
  if (s == "m2" || s == "2") return ModelKind::M2;
  if (s == "m3" || s == "3") return ModelKind::M3;
  if (s == "m4" || s == "4") return ModelKind::M4;
  throw Error(Errc::InvalidConfig, "unknown model '" + s + "'");
}

/// Grid size used when ModelSpec::k is 0.
inline std::size_t default_grid_size(ModelKind m) {
  switch (m) {
    case ModelKind::M1: return 1000;
    case ModelKind::M2: return 100;
    default: return 360;
  }
}

struct ModelOptions {
  double noise_scale = 1.0;  // multiplies every noise standard deviation
  double m3_noisy_radius = 100.0;
  double m3_noisy_sd = 4.0;
  double m3_ellipse_ratio = 0.6;
  std::vector<double> m3_ellipse_radii{60.0, 100.0, 140.0};
  double m4_rose_amplitude = 100.0;
  std::vector<int> m4_rose_frequencies{2, 3, 4, 5};
};

struct ModelSpec {
  ModelKind model = ModelKind::M1;
  std::size_t k = 0;  // 0: model default
  RandomSeed seed{0};
  bool contaminate = true;
  ModelOptions options;

  std::size_t grid_size() const { return k == 0 ? default_grid_size(model) : k; }

  void validate() const {
    if (grid_size() < 50) throw Error(Errc::InvalidConfig, "model grid needs k >= 50");
    if (!(options.noise_scale >= 0.0)) throw Error(Errc::InvalidConfig, "noise_scale must be >= 0");
  }
};

struct SimulatedEnsemble {
  TrajectoryEnsemble ensemble;
  std::vector<bool> outlier;  // ensemble order
};

namespace detail {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

class CurveBuilder {
 public:
  CurveBuilder(std::size_t total, RandomSeed seed, double noise_scale)
      : total_(total), seed_(seed), scale_(noise_scale) {}

  /// Noise source for the next curve; independent of how many curves follow.
  NormalSource next_noise() { return NormalSource(derive_seed(seed_, curves_.size())); }
  double scale() const { return scale_; }

  void add(Matrix values, bool is_outlier) {
    curves_.push_back({padded_id(curves_.size() + 1, total_), std::move(values)});
    outlier_.push_back(is_outlier);
  }

  SimulatedEnsemble finish(TimeGrid grid) {
    return {validate_ensemble(std::move(curves_), std::move(grid)), std::move(outlier_)};
  }

 private:
  std::size_t total_;
  RandomSeed seed_;
  double scale_;
  std::vector<Trajectory> curves_;
  std::vector<bool> outlier_;
};

inline SimulatedEnsemble model1(const ModelSpec& spec) {
  const auto k = spec.grid_size();
  std::vector<double> t(k);
  for (std::size_t j = 0; j < k; ++j) t[j] = 100.0 * double(j + 1) / double(k + 1);
  CurveBuilder b(spec.contaminate ? 73 : 70, spec.seed, spec.options.noise_scale);
  auto line = [&](double slope, double sd, bool out) {
    NormalSource noise = b.next_noise();
    Matrix v(Eigen::Index(k), 2);
    for (std::size_t j = 0; j < k; ++j) {
      v(Eigen::Index(j), 0) = t[j];
      v(Eigen::Index(j), 1) = slope * t[j] + noise(sd * b.scale());
    }
    b.add(std::move(v), out);
  };
  for (int i = 1; i <= 70; ++i) line(std::tan(deg(i)), 1.0, false);
  if (spec.contaminate) {
    for (double slope : {1.0, 0.5, -1.0}) line(slope, std::sqrt(6.0), true);
  }
  return b.finish(TimeGrid(std::move(t)));
}

inline SimulatedEnsemble model2(const ModelSpec& spec) {
  const auto k = spec.grid_size();
  std::vector<double> x(k);
  for (std::size_t j = 0; j < k; ++j) x[j] = 2.0 * std::numbers::pi * double(j) / double(k - 1);
  CurveBuilder b(spec.contaminate ? 44 : 40, spec.seed, spec.options.noise_scale);
  auto rotated = [&](double theta_deg, double amp, double freq, double sd, bool out) {
    NormalSource noise = b.next_noise();
    const double c = std::cos(deg(theta_deg)), s = std::sin(deg(theta_deg));
    Matrix v(Eigen::Index(k), 2);
    for (std::size_t j = 0; j < k; ++j) {
      const double y = amp * std::sin(freq * x[j]) + (sd > 0 ? noise(sd * b.scale()) : 0.0);
      v(Eigen::Index(j), 0) = s * y + c * x[j];
      v(Eigen::Index(j), 1) = c * y - s * x[j];
    }
    b.add(std::move(v), out);
  };
  for (int d = 2; d <= 80; d += 2) rotated(d, 1.0, 1.0, 0.0, false);
  if (spec.contaminate) {
    for (double d : {30.0, 45.0, 60.0, 80.0}) rotated(d, 2.0, 4.0, std::sqrt(2.0), true);
  }
  return b.finish(TimeGrid::uniform(0.0, 1.0, k));
}

/// Closed curve r(theta) * (a cos theta, b sin theta) plus iid coordinate noise.
template <class Radius>
Matrix closed_curve(const std::vector<double>& theta, Radius radius, double ax, double ay, double sd,
                    NormalSource& noise) {
  Matrix v(Eigen::Index(theta.size()), 2);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double r = radius(theta[j]);
    v(Eigen::Index(j), 0) = ax * r * std::cos(theta[j]) + noise(sd);
    v(Eigen::Index(j), 1) = ay * r * std::sin(theta[j]) + noise(sd);
  }
  return v;
}

inline SimulatedEnsemble model34(const ModelSpec& spec) {
  const auto k = spec.grid_size();
  const auto& o = spec.options;
  std::vector<double> theta(k);
  for (std::size_t j = 0; j < k; ++j) theta[j] = 2.0 * std::numbers::pi * double(j + 1) / double(k);
  const bool m3 = spec.model == ModelKind::M3;
  const std::size_t extra = spec.contaminate ? (m3 ? 1 + o.m3_ellipse_radii.size() : o.m4_rose_frequencies.size()) : 0;
  CurveBuilder b(20 + extra, spec.seed, o.noise_scale);
  const double sd1 = b.scale();
  for (int i = 1; i <= 20; ++i) {
    NormalSource noise = b.next_noise();
    const double r = 20.0 + 8.0 * i;
    b.add(closed_curve(theta, [r](double) { return r; }, 1.0, 1.0, sd1, noise), false);
  }
  if (spec.contaminate) {
    if (m3) {
      NormalSource noise = b.next_noise();
      const double r = o.m3_noisy_radius;
      b.add(closed_curve(theta, [r](double) { return r; }, 1.0, 1.0, o.m3_noisy_sd * sd1, noise), true);
      for (double r2 : o.m3_ellipse_radii) {
        NormalSource en = b.next_noise();
        b.add(closed_curve(theta, [r2](double) { return r2; }, 1.0, o.m3_ellipse_ratio, sd1, en), true);
      }
    } else {
      for (int m : o.m4_rose_frequencies) {
        NormalSource noise = b.next_noise();
        const double amp = o.m4_rose_amplitude;
        b.add(closed_curve(theta, [amp, m](double th) { return amp * std::cos(m * th); }, 1.0, 1.0, sd1, noise),
              true);
      }
    }
  }
  return b.finish(TimeGrid::uniform(1.0 / double(k), 1.0, k));
}

}  // namespace detail

inline SimulatedEnsemble generate(const ModelSpec& spec) {
  spec.validate();
  switch (spec.model) {
    case ModelKind::M1: return detail::model1(spec);
    case ModelKind::M2: return detail::model2(spec);
    default: return detail::model34(spec);
  }
}

inline SimulatedEnsemble gen_model1(std::size_t k, RandomSeed seed, bool contaminate) {
  return generate({ModelKind::M1, k, seed, contaminate, {}});
}
inline SimulatedEnsemble gen_model2(std::size_t k, RandomSeed seed, bool contaminate) {
  return generate({ModelKind::M2, k, seed, contaminate, {}});
}
inline SimulatedEnsemble gen_model3(std::size_t k, RandomSeed seed, bool contaminate) {
  return generate({ModelKind::M3, k, seed, contaminate, {}});
}
inline SimulatedEnsemble gen_model4(std::size_t k, RandomSeed seed, bool contaminate) {
  return generate({ModelKind::M4, k, seed, contaminate, {}});
}

}  // namespace trajfda
