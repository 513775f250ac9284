#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "support.hpp"
#include "trajfda/benchmark.hpp"
#include "trajfda/matern.hpp"
#include "trajfda/models.hpp"

using namespace trajfda;

TEST_CASE("matern closed forms at half-integer smoothness") {
  for (double alpha : {0.01, 0.3, 2.0}) {
    for (int i = 0; i < 20; ++i) {
      const double h = alpha * 0.25 * (i + 1);
      const double x = h / alpha;
      CHECK(matern_corr(h, 0.5, alpha) == Catch::Approx(std::exp(-x)).epsilon(1e-12));
      CHECK(matern_corr(h, 1.5, alpha) == Catch::Approx((1 + x) * std::exp(-x)).epsilon(1e-12));
      CHECK(matern_corr(h, 2.5, alpha) == Catch::Approx((1 + x + x * x / 3) * std::exp(-x)).epsilon(1e-12));
    }
  }
  CHECK(matern_corr(0.0, 1.2, 0.02) == 1.0);
  CHECK_THROWS_AS(matern_corr(-1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(matern_corr(1.0, 0.0, 1.0), Error);
}

TEST_CASE("matern at general smoothness against quadrature") {
  for (double nu : {0.6, 1.0, 1.2, 3.3}) {
    for (double h : {0.001, 0.01, 0.05, 0.2}) {
      CHECK(matern_corr(h, nu, 0.02) == Catch::Approx(testing::matern_oracle(h, nu, 0.02)).epsilon(1e-8));
    }
  }
}

TEST_CASE("matern correlation is monotone and bounded") {
  testing::Gen g(71);
  for (int rep = 0; rep < 200; ++rep) {
    const double nu = g.uniform(0.2, 4), alpha = g.uniform(0.01, 2);
    double prev = 1.0;
    for (int i = 1; i < 30; ++i) {
      const double v = matern_corr(alpha * 0.2 * i, nu, alpha);
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("cross-covariance admissibility") {
  MaternSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.rho_bound() > 0.6);

  // common range and averaged smoothness: the bound has a gamma-function closed form
  MaternSpec p;
  p.alpha11 = p.alpha22 = p.alpha12 = 0.1;
  p.nu11 = 0.5;
  p.nu22 = 1.5;
  p.nu12 = 1.0;
  const double expect = std::sqrt(std::tgamma(1.0) * std::tgamma(2.0) / (std::tgamma(0.5) * std::tgamma(1.5))) *
                        std::tgamma(1.0) / std::tgamma(1.5);
  CHECK(p.rho_bound() == Catch::Approx(expect).epsilon(1e-8));
  p.rho12 = expect * 0.99;
  CHECK_NOTHROW(p.validate());
  p.rho12 = expect * 1.01;
  CHECK_THROWS_AS(p.validate(), Error);

  MaternSpec bad;
  bad.nu12 = 0.5;  // below (1.2 + 0.6) / 2
  try {
    bad.validate();
    FAIL("expected InvalidCrossParams");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidCrossParams);
  }
  bad = MaternSpec{};
  bad.rho12 = 0.0;
  bad.nu12 = 0.1;  // independent components need no cross condition
  CHECK_NOTHROW(bad.validate());
  bad.sigma1 = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cross-covariance matrix structure") {
  MaternSpec s;
  s.k = 30;
  const Matrix c = matern_cross_covariance(s);
  REQUIRE(c.rows() == 60);
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const auto grid = s.grid();
  for (int i = 0; i < 30; i += 7) {
    for (int j = 0; j < 30; j += 5) {
      const double h = std::abs(grid[std::size_t(i)] - grid[std::size_t(j)]);
      CHECK(c(i, j) == Catch::Approx(testing::matern_oracle(h, s.nu11, s.alpha11)).epsilon(1e-8).margin(1e-300));
      CHECK(c(30 + i, 30 + j) ==
            Catch::Approx(testing::matern_oracle(h, s.nu22, s.alpha22)).epsilon(1e-8).margin(1e-300));
      CHECK(c(i, 30 + j) ==
            Catch::Approx(s.rho12 * testing::matern_oracle(h, s.nu12, s.alpha12)).epsilon(1e-8).margin(1e-300));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("gp samples are seeded and have the target covariance") {
  MaternSpec s;
  s.k = 12;
  s.alpha11 = 0.2;
  s.alpha22 = 0.1;
  s.alpha12 = 0.16;
  const auto a = gp_sample(s, 4, RandomSeed{1}), b = gp_sample(s, 4, RandomSeed{1});
  for (std::size_t i = 0; i < 4; ++i) CHECK(a[i].values == b[i].values);
  CHECK(a[0].id == "001");
  CHECK_FALSE(gp_sample(s, 4, RandomSeed{2})[0].values == a[0].values);
  // the first curves do not depend on how many are drawn
  CHECK(gp_sample(s, 9, RandomSeed{1})[1].values == a[1].values);

  const std::size_t n = 6000;
  const auto e = gp_sample(s, n, RandomSeed{3});
  const Matrix target = matern_cross_covariance(s);
  Matrix emp = Matrix::Zero(24, 24);
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(24);
    v << e[i].values.col(0), e[i].values.col(1);
    emp += v * v.transpose();
  }
  emp /= double(n);
  // entrywise sd of a product of unit normals is at most sqrt(2 / n)
  CHECK((emp - target).cwiseAbs().maxCoeff() < 5 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("jittered cholesky") {
  Matrix c = Matrix::Ones(4, 4);  // rank one
  const Matrix l = jittered_cholesky(c);
  CHECK((l * l.transpose() - c).cwiseAbs().maxCoeff() < 1e-6);
  Matrix neg = -Matrix::Identity(3, 3);
  try {
    jittered_cholesky(neg);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotPositiveDefinite);
    CHECK(e.numerical());
  }
}

TEST_CASE("model sizes, labels and grids") {
  struct Case {
    ModelKind m;
    std::size_t n_clean, n_out, k;
  };
  for (const auto& c : {Case{ModelKind::M1, 70, 3, 1000}, Case{ModelKind::M2, 40, 4, 100},
                        Case{ModelKind::M3, 20, 4, 360}, Case{ModelKind::M4, 20, 4, 360}}) {
    ModelSpec spec;
    spec.model = c.m;
    const auto sim = generate(spec);
    REQUIRE(sim.ensemble.size() == c.n_clean + c.n_out);
    CHECK(sim.ensemble.grid_size() == c.k);
    CHECK(sim.ensemble.dim() == 2);
    for (std::size_t i = 0; i < sim.outlier.size(); ++i) CHECK(sim.outlier[i] == (i >= c.n_clean));
    CHECK(sim.ensemble.grid().uniform_step());
    spec.contaminate = false;
    CHECK(generate(spec).ensemble.size() == c.n_clean);
    spec.k = 60;
    CHECK(generate(spec).ensemble.grid_size() == 60);
    spec.k = 20;
    CHECK_THROWS_AS(generate(spec), Error);
  }
}

TEST_CASE("models are deterministic in the seed") {
  for (auto m : {ModelKind::M1, ModelKind::M2, ModelKind::M3, ModelKind::M4}) {
    ModelSpec spec;
    spec.model = m;
    spec.k = 80;
    spec.seed = RandomSeed{11};
    const auto a = generate(spec), b = generate(spec);
    spec.seed = RandomSeed{12};
    const auto c = generate(spec);
    bool differs = false;
    for (std::size_t i = 0; i < a.ensemble.size(); ++i) {
      CHECK(a.ensemble[i].values == b.ensemble[i].values);
      differs = differs || !(a.ensemble[i].values == c.ensemble[i].values);
    }
    CHECK(differs);
  }
}

TEST_CASE("model geometry without noise") {
  ModelOptions quiet;
  quiet.noise_scale = 0.0;
  SECTION("lines through the origin at the stated angles") {
    const auto sim = generate({ModelKind::M1, 100, RandomSeed{0}, true, quiet});
    for (int i = 0; i < 70; ++i) {
      const auto& v = sim.ensemble[std::size_t(i)].values;
      CHECK(v(50, 1) / v(50, 0) == Catch::Approx(std::tan((i + 1) * std::numbers::pi / 180)).epsilon(1e-12));
    }
    CHECK(sim.ensemble[70].values(10, 1) == Catch::Approx(sim.ensemble[70].values(10, 0)));
    CHECK(sim.ensemble[72].values(10, 1) == Catch::Approx(-sim.ensemble[72].values(10, 0)));
  }
  SECTION("clean sinusoids rotate back to sin") {
    const auto sim = generate({ModelKind::M2, 100, RandomSeed{0}, true, {}});
    const auto& v = sim.ensemble[4].values;  // rotated by 10 degrees
    const double th = 10 * std::numbers::pi / 180;
    for (Eigen::Index j = 0; j < 100; j += 9) {
      const double x = std::cos(th) * v(j, 0) - std::sin(th) * v(j, 1);
      const double y = std::sin(th) * v(j, 0) + std::cos(th) * v(j, 1);
      CHECK(x == Catch::Approx(2 * std::numbers::pi * double(j) / 99).margin(1e-12));
      CHECK(y == Catch::Approx(std::sin(x)).margin(1e-12));
    }
  }
  SECTION("circles, ellipses and roses") {
    const auto m3 = generate({ModelKind::M3, 90, RandomSeed{0}, true, quiet});
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& v = m3.ensemble[i].values;
      for (Eigen::Index j = 0; j < 90; j += 11) CHECK(v.row(j).norm() == Catch::Approx(28.0 + 8.0 * double(i)));
    }
    const auto& ell = m3.ensemble[21].values;  // ellipse with semi-axes 60 and 36
    for (Eigen::Index j = 0; j < 90; j += 11) {
      CHECK(std::pow(ell(j, 0) / 60, 2) + std::pow(ell(j, 1) / 36, 2) == Catch::Approx(1.0));
    }
    const auto m4 = generate({ModelKind::M4, 90, RandomSeed{0}, true, quiet});
    const auto& rose = m4.ensemble[20].values;  // frequency 2
    for (Eigen::Index j = 0; j < 90; j += 7) {
      const double th = 2 * std::numbers::pi * double(j + 1) / 90;
      CHECK(rose(j, 0) == Catch::Approx(100 * std::cos(2 * th) * std::cos(th)).margin(1e-9));
    }
  }
}

TEST_CASE("model noise has the stated spread") {
  const auto sim = generate({ModelKind::M1, 1000, RandomSeed{3}, true, {}});
  const auto& t = sim.ensemble.grid();
  auto resid_sd = [&](std::size_t i, double slope) {
    std::vector<double> r;
    for (std::size_t j = 0; j < 1000; ++j) r.push_back(sim.ensemble[i].values(Eigen::Index(j), 1) - slope * t[j]);
    return stats::sample_sd(r);
  };
  CHECK(resid_sd(0, std::tan(std::numbers::pi / 180)) == Catch::Approx(1.0).margin(0.1));
  CHECK(resid_sd(70, 1.0) == Catch::Approx(std::sqrt(6.0)).margin(0.2));
}

TEST_CASE("score") {
  const std::vector<bool> truth{false, false, false, false, true, true};
  auto r = score({false, true, false, false, true, false}, truth);
  CHECK(r.pc == 0.5);
  CHECK(r.pf == 0.25);
  r = score(truth, truth);
  CHECK(r.pc == 1.0);
  CHECK(r.pf == 0.0);
}

TEST_CASE("benchmark invariants") {
  ModelSpec spec;
  spec.model = ModelKind::M2;
  spec.k = 60;
  spec.seed = RandomSeed{21};
  const auto a = benchmark(spec, 4);
  REQUIRE(a.per_replicate.size() == 4);
  for (const auto& r : a.per_replicate) {
    for (const auto& rate : {r.wo, r.msbd, r.rmd}) {
      CHECK(rate.pc >= 0.0);
      CHECK(rate.pc <= 1.0);
      CHECK(rate.pf >= 0.0);
      CHECK(rate.pf <= 1.0);
      // pc moves in steps of 1/4 and pf in steps of 1/40
      CHECK(rate.pc * 4 == Catch::Approx(std::round(rate.pc * 4)));
      CHECK(rate.pf * 40 == Catch::Approx(std::round(rate.pf * 40)));
    }
  }
  std::vector<double> pcs;
  for (const auto& r : a.per_replicate) pcs.push_back(r.wo.pc);
  CHECK(a.wo.pc_mean == Catch::Approx(stats::mean(pcs)));
  CHECK(a.wo.pc_sd == Catch::Approx(stats::sample_sd(pcs)).margin(1e-15));

  // replicate r is the model at the derived seed
  ModelSpec first = spec;
  first.seed = derive_seed(spec.seed, 2);
  const auto direct = run_replicate(first, {});
  CHECK(direct.rmd.pf == a.per_replicate[2].rmd.pf);
  CHECK(direct.msbd.pc == a.per_replicate[2].msbd.pc);

  ::setenv("TRAJFDA_THREADS", "3", 1);
  const auto b = benchmark(spec, 4);
  ::unsetenv("TRAJFDA_THREADS");
  CHECK(b.rmd.pf_mean == a.rmd.pf_mean);
  CHECK(b.msbd.pf_mean == a.msbd.pf_mean);
  CHECK(b.wo.pf_sd == a.wo.pf_sd);

  CHECK_THROWS_AS(benchmark(spec, 1), Error);
}

TEST_CASE("gp marginal variances and the independent case") {
  MaternSpec s;
  s.k = 8;
  s.sigma1 = 2.0;
  s.sigma2 = 0.5;
  s.rho12 = 0.0;
  const std::size_t n = 5000;
  const auto e = gp_sample(s, n, RandomSeed{17});
  double v1 = 0, v2 = 0, c12 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v1 += e[i].values(3, 0) * e[i].values(3, 0);
    v2 += e[i].values(3, 1) * e[i].values(3, 1);
    c12 += e[i].values(3, 0) * e[i].values(3, 1);
  }
  v1 /= double(n);
  v2 /= double(n);
  CHECK(v1 == Catch::Approx(4.0).epsilon(0.05));
  CHECK(v2 == Catch::Approx(0.25).epsilon(0.05));
  CHECK(std::abs(c12 / double(n) / std::sqrt(v1 * v2)) < 0.05);
  const Matrix c = matern_cross_covariance(s);
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(c(i, i) == 4.0);
    CHECK(c(8 + i, 8 + i) == 0.25);
  }
}

TEST_CASE("matern is continuous at zero") {
  for (double nu : {0.3, 0.6, 1.2, 2.5}) CHECK(matern_corr(1e-8 * 0.02, nu, 0.02) == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("model 4 shares the model 3 body") {
  const auto m3 = gen_model3(90, RandomSeed{9}, true), m4 = gen_model4(90, RandomSeed{9}, true);
  for (std::size_t i = 0; i < 20; ++i) CHECK(m3.ensemble[i].values == m4.ensemble[i].values);
}
