#include <catch_amalgamated.hpp>

#include <algorithm>

#include "support.hpp"
#include "trajfda/models.hpp"
#include "trajfda/outlyingness.hpp"

using namespace trajfda;
using depth::PointwiseDepthMethod;
using testing::Gen;
using testing::vec2;

namespace {

const auto kMaha = PointwiseDepthMethod::mahalanobis();

TrajectoryEnsemble random_walks(Gen& g, std::size_t n, std::size_t k) {
  std::vector<Matrix> curves;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix m(Eigen::Index(k), 2);
    double x = g.normal(), y = g.normal();
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
      x += g.normal(0.3);
      y += g.normal(0.3);
      m(t, 0) = x;
      m(t, 1) = y;
    }
    curves.push_back(m);
  }
  return testing::ensemble_of(curves);
}

/// Independent second-difference WO, written as a plain loop over doubles.
double wo_oracle(const Matrix& o, double dt) {
  double sum = 0;
  const auto k = o.rows();
  for (Eigen::Index i = 1; i + 1 < k; ++i) {
    double sq = 0;
    for (Eigen::Index c = 0; c < o.cols(); ++c) {
      const double d = (o(i + 1, c) - 2 * o(i, c) + o(i - 1, c)) / (dt * dt);
      sq += d * d;
    }
    sum += sq;
  }
  return sum / double(k - 2);
}

}  // namespace

TEST_CASE("the pointwise median curve has zero directional outlyingness") {
  // curve 000 sits at the centre of a symmetric configuration at every t
  std::vector<Matrix> curves;
  const std::size_t k = 12;
  auto moving = [&](double dx, double dy) {
    Matrix m(Eigen::Index(k), 2);
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
      m(t, 0) = double(t) + dx;
      m(t, 1) = 0.5 * double(t) + dy;
    }
    return m;
  };
  curves.push_back(moving(0, 0));
  curves.push_back(moving(1, 0));
  curves.push_back(moving(-1, 0));
  curves.push_back(moving(0, 2));
  curves.push_back(moving(0, -2));
  const auto e = testing::ensemble_of(curves);
  for (const auto& m : {kMaha, PointwiseDepthMethod::projection()}) {
    CHECK(directional_outlyingness(e, "000", m).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("constant curves reproduce a single cross-section computation") {
  Matrix pts(5, 2);
  pts << 0, 0, 2, 1, -1, 3, 4, -2, 1, 1;
  std::vector<Matrix> curves;
  for (Eigen::Index i = 0; i < 5; ++i) curves.push_back(testing::constant_curve(pts.row(i).transpose(), 8));
  const auto e = testing::ensemble_of(curves);

  // hand computation on the one distinct section
  const Vector mean = pts.colwise().mean().transpose();
  const Matrix c = pts.rowwise() - mean.transpose();
  const Matrix cov = c.transpose() * c / 4.0;
  const Matrix inv = cov.inverse();
  Vector o(5);
  for (Eigen::Index i = 0; i < 5; ++i) o(i) = c.row(i) * inv * c.row(i).transpose();
  Eigen::Index zi = 0;
  for (Eigen::Index i = 1; i < 5; ++i)
    if (o(i) < o(zi)) zi = i;

  for (Eigen::Index i = 0; i < 5; ++i) {
    const Matrix series = directional_outlyingness(e, testing::curve_id(std::size_t(i)), kMaha);
    Eigen::RowVector2d expect = Eigen::RowVector2d::Zero();
    if (i != zi) {
      const Eigen::RowVector2d diff = pts.row(i) - pts.row(zi);
      expect = o(i) * diff / diff.norm();
    }
    for (Eigen::Index t = 0; t < series.rows(); ++t) {
      CHECK((series.row(t) - expect).norm() == Catch::Approx(0.0).margin(1e-8 * (1 + expect.norm())));
    }
  }
}

TEST_CASE("rotating every curve rotates the O series") {
  Gen g(31);
  for (int rep = 0; rep < 10; ++rep) {
    const auto e = random_walks(g, 12, 20);
    const Eigen::Matrix2d a = g.orthogonal2();
    std::vector<Matrix> rotated;
    for (const auto& tr : e.trajectories()) rotated.push_back(tr.values * a.transpose());
    const auto er = testing::ensemble_of(rotated);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const Matrix o = directional_outlyingness(e, e[i].id, kMaha);
      const Matrix orot = directional_outlyingness(er, er[i].id, kMaha);
      CHECK((orot - o * a.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + o.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("mo and vo examples") {
  Matrix constant(4, 2);
  constant << 1, 2, 1, 2, 1, 2, 1, 2;
  auto [mo, vo] = mo_vo(constant);
  CHECK(mo == vec2(1, 2));
  CHECK(vo == 0.0);

  Matrix two(2, 2);
  two << 0, 0, 2, 0;
  std::tie(mo, vo) = mo_vo(two);
  CHECK(mo == vec2(1, 0));
  CHECK(vo == 1.0);

  CHECK_THROWS_AS(mo_vo(Matrix::Zero(1, 2)), Error);
}

TEST_CASE("mo, vo and wo homogeneity over random matrices") {
  Gen g(32);
  const auto grid = TimeGrid::uniform(0, 1, 9);
  for (int rep = 0; rep < 1000; ++rep) {
    const Matrix o = g.matrix(9, g.integer(1, 3));
    const double c = g.uniform(-5, 5);
    const auto [mo, vo] = mo_vo(o);
    const auto [mo_c, vo_c] = mo_vo(c * o);
    CHECK((mo_c - c * mo).cwiseAbs().maxCoeff() <= 1e-12 * (1 + mo.cwiseAbs().maxCoeff() * std::abs(c)));
    CHECK(vo_c == Catch::Approx(c * c * vo).epsilon(1e-12).margin(1e-300));
    CHECK(wo(c * o, grid) == Catch::Approx(c * c * wo(o, grid)).epsilon(1e-12).margin(1e-300));
    // mo is the row average
    CHECK((mo - o.colwise().mean().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("wo stencil examples") {
  const auto unit = TimeGrid::uniform(0, 4, 5);
  Matrix spike(5, 1);
  spike << 0, 0, 1, 0, 0;
  CHECK(wo(spike, unit) == Catch::Approx(2.0).epsilon(1e-15));

  Matrix affine(7, 2);
  for (Eigen::Index i = 0; i < 7; ++i) affine.row(i) << 1.5 + 2.0 * double(i), -3.0 + 0.25 * double(i);
  CHECK(wo(affine, TimeGrid::uniform(0, 6, 7)) == Catch::Approx(0.0).margin(1e-20));

  // step enters as 1 / dt^2 per difference, squared
  CHECK(wo(spike, TimeGrid::uniform(0, 2, 5)) == Catch::Approx(2.0 * 16.0).epsilon(1e-14));
}

TEST_CASE("wo invariances") {
  Gen g(33);
  for (int rep = 0; rep < 500; ++rep) {
    const auto k = g.integer(5, 30);
    const auto grid = TimeGrid::uniform(0, g.uniform(0.1, 10), std::size_t(k));
    const Matrix o = g.matrix(k, 2);
    const double base = wo(o, grid);
    const Eigen::RowVector2d shift(g.normal(10), g.normal(10));
    CHECK(wo(o.rowwise() + shift, grid) == Catch::Approx(base).epsilon(1e-9));
    CHECK(wo(o.colwise().reverse(), grid) == Catch::Approx(base).epsilon(1e-12));
    CHECK(base == Catch::Approx(wo_oracle(o, *grid.uniform_step())).epsilon(1e-12));
  }
}

TEST_CASE("wo guards") {
  CHECK_THROWS_AS(wo(Matrix::Zero(4, 2), TimeGrid::uniform(0, 3, 4)), Error);
  try {
    wo(Matrix::Zero(5, 2), TimeGrid({0, 1, 2, 3, 5}));
    FAIL("expected NonUniformGrid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonUniformGrid);
  }
}

TEST_CASE("vo is zero exactly when all rows agree") {
  Gen g(34);
  for (int rep = 0; rep < 200; ++rep) {
    Matrix o = testing::constant_curve(vec2(g.normal(), g.normal()), 6);
    CHECK(mo_vo(o).second == Catch::Approx(0.0).margin(1e-28));
    o(g.integer(0, 5), g.integer(0, 1)) += 0.5;
    CHECK(mo_vo(o).second > 0.0);
  }
}

TEST_CASE("profile_ensemble") {
  SECTION("identical curves give zero wo and vo") {
    Gen g(35);
    const Matrix base = g.matrix(10, 2);
    const auto e = testing::ensemble_of({base, base, base, base, base});
    for (const auto& m : {kMaha, PointwiseDepthMethod::projection()}) {
      const auto prof = profile_ensemble(e, m);
      REQUIRE(prof.size() == 5);
      for (const auto& p : prof) {
        CHECK(p.wo == 0.0);
        CHECK(p.vo == 0.0);
      }
    }
  }
  SECTION("ids follow the ensemble") {
    Gen g(36);
    const auto e = random_walks(g, 9, 15);
    const auto prof = profile_ensemble(e, PointwiseDepthMethod::projection());
    REQUIRE(prof.size() == e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(prof[i].curve_id == e[i].id);
      CHECK(prof[i].o_series == directional_outlyingness(e, e[i].id, PointwiseDepthMethod::projection()));
    }
  }
  SECTION("Model 2 contaminations have the largest wo") {
    ModelSpec spec;
    spec.model = ModelKind::M2;
    spec.seed = RandomSeed{3};
    const auto sim = generate(spec);
    const auto prof = profile_ensemble(sim.ensemble, PointwiseDepthMethod::projection());
    std::vector<std::size_t> idx(prof.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return prof[a].wo > prof[b].wo; });
    for (std::size_t r = 0; r < 4; ++r) CHECK(sim.outlier[idx[r]]);
    const std::size_t probe = idx[0];
    CHECK(prof[probe].wo ==
          Catch::Approx(wo_oracle(prof[probe].o_series, *sim.ensemble.grid().uniform_step())).epsilon(1e-12));
  }
}

TEST_CASE("WO is invariant under time-varying similarity transforms (Mahalanobis)") {
  Gen g(37);
  for (int rep = 0; rep < 20; ++rep) {
    const auto e = random_walks(g, 15, 25);
    const Eigen::Matrix2d a = g.orthogonal2();
    const double f0 = g.uniform(0.5, 2), f1 = g.uniform(-0.4, 0.4), phase = g.uniform(0, 6);
    const Eigen::Vector2d b0(g.normal(5), g.normal(5)), b1(g.normal(), g.normal());
    std::vector<Matrix> moved;
    for (const auto& tr : e.trajectories()) {
      Matrix m = tr.values;
      for (Eigen::Index t = 0; t < m.rows(); ++t) {
        const double f = f0 * (1.0 + f1 * std::sin(0.3 * double(t) + phase));
        const Eigen::Vector2d b = b0 + b1 * std::cos(0.2 * double(t));
        m.row(t) = (f * a * tr.values.row(t).transpose() + b).transpose();
      }
      moved.push_back(m);
    }
    const auto before = profile_ensemble(e, kMaha);
    const auto after = profile_ensemble(testing::ensemble_of(moved), kMaha);
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(after[i].wo == Catch::Approx(before[i].wo).epsilon(1e-8));
    }
  }
}
