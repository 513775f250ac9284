#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "support.hpp"
#include "trajfda/parallel.hpp"
#include "trajfda/random.hpp"
#include "trajfda/stats.hpp"

using namespace trajfda;
using testing::Gen;

namespace {

std::vector<Trajectory> random_curves(Gen& g, std::size_t n, std::size_t k, std::size_t p) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({testing::curve_id(i), g.matrix(Eigen::Index(k), Eigen::Index(p))});
  return out;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

}  // namespace

TEST_CASE("time grid validation") {
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0}), Error);
  CHECK(code_of([] { TimeGrid({0.0, 1.0, 1.0}); }) == Errc::InvalidGrid);
  CHECK(code_of([] { TimeGrid({0.0, std::nan(""), 2.0}); }) == Errc::InvalidGrid);

  const TimeGrid u = TimeGrid::uniform(0.0, 2.0, 5);
  REQUIRE(u.uniform_step());
  CHECK(*u.uniform_step() == Catch::Approx(0.5));

  const TimeGrid irregular({0.0, 1.0, 3.0});
  CHECK_FALSE(irregular.uniform_step());

  // a wobble of 1e-12 relative is still uniform
  const TimeGrid nearly({0.0, 1.0 + 1e-12, 2.0});
  CHECK(nearly.uniform_step());
}

TEST_CASE("validate_ensemble happy path") {
  Gen g(1);
  auto e = validate_ensemble(random_curves(g, 5, 10, 2), TimeGrid::uniform(0, 9, 10));
  CHECK(e.size() == 5);
  CHECK(e.dim() == 2);
  CHECK(e.grid_size() == 10);
  CHECK(e.section(3).rows() == 5);
  CHECK(e.section(3)(2, 1) == e[2].values(3, 1));
}

TEST_CASE("validate_ensemble errors") {
  Gen g(2);
  SECTION("non-finite cell is named") {
    auto curves = random_curves(g, 5, 10, 2);
    curves[3].values(4, 1) = std::nan("");
    try {
      validate_ensemble(curves, TimeGrid::uniform(0, 9, 10));
      FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonFiniteValue);
      const std::string msg = e.what();
      CHECK(msg.find("003") != std::string::npos);
      CHECK(msg.find('4') != std::string::npos);
    }
  }
  SECTION("too few curves for p = 2") {
    CHECK(code_of([&] { validate_ensemble(random_curves(g, 3, 10, 2), TimeGrid::uniform(0, 9, 10)); }) ==
          Errc::TooFewCurves);
  }
  SECTION("grid mismatch") {
    auto curves = random_curves(g, 5, 10, 2);
    curves[1].values = g.matrix(9, 2);
    CHECK(code_of([&] { validate_ensemble(curves, TimeGrid::uniform(0, 9, 10)); }) == Errc::GridMismatch);
  }
  SECTION("dimension mismatch") {
    auto curves = random_curves(g, 5, 10, 2);
    curves[1].values = g.matrix(10, 3);
    CHECK(code_of([&] { validate_ensemble(curves, TimeGrid::uniform(0, 9, 10)); }) == Errc::GridMismatch);
  }
  SECTION("duplicate id") {
    auto curves = random_curves(g, 5, 10, 2);
    curves[4].id = curves[0].id;
    CHECK(code_of([&] { validate_ensemble(curves, TimeGrid::uniform(0, 9, 10)); }) == Errc::DuplicateId);
  }
}

TEST_CASE("restrict") {
  Gen g(3);
  const auto e = validate_ensemble(random_curves(g, 10, 6, 2), TimeGrid::uniform(0, 5, 6));

  SECTION("all ids is the identity") {
    const auto ids = e.ids();
    const auto r = restrict(e, ids);
    REQUIRE(r.size() == e.size());
    CHECK(r.grid() == e.grid());
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(r[i].id == e[i].id);
      CHECK(r[i].values == e[i].values);
    }
  }
  SECTION("subset keeps the requested order and the grid") {
    const auto r = restrict(e, {"007", "001", "004", "000", "009", "002"});
    REQUIRE(r.size() == 6);
    CHECK(r[0].id == "007");
    CHECK(r[1].id == "001");
    CHECK(r[0].values == e[7].values);
    CHECK(r.grid() == e.grid());
  }
  SECTION("unknown id") {
    CHECK(code_of([&] { restrict(e, {"001", "nope", "002", "003"}); }) == Errc::UnknownId);
  }
}

TEST_CASE("seed derivation is stable and spreads") {
  const RandomSeed s{42};
  CHECK(derive_seed(s, 0) == derive_seed(s, 0));
  CHECK_FALSE(derive_seed(s, 0) == derive_seed(s, 1));
  CHECK_FALSE(derive_seed(s, 0) == derive_seed(RandomSeed{43}, 0));
  auto a = make_rng(s), b = make_rng(s);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("parallel_for covers every index once regardless of workers") {
  for (const char* threads : {"1", "3", "8"}) {
    ::setenv("TRAJFDA_THREADS", threads, 1);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
  }
  ::unsetenv("TRAJFDA_THREADS");
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  ::setenv("TRAJFDA_THREADS", "4", 1);
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("at " + std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "at 17");
  }
  ::unsetenv("TRAJFDA_THREADS");
}

TEST_CASE("median and MAD against sorted-array oracles") {
  Gen g(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(std::size_t(g.integer(1, 30)));
    for (auto& x : v) x = g.normal();
    const double m = stats::median(v);
    CHECK(m == testing::plain_median(v));
    std::vector<double> dev;
    for (double x : v) dev.push_back(std::abs(x - m));
    CHECK(stats::mad(v, m) == Catch::Approx(1.4826 * testing::plain_median(dev)).epsilon(1e-14));
  }
  CHECK(stats::sample_sd(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
}

TEST_CASE("distribution helpers agree with independent oracles") {
  for (double p : {0.5, 0.9, 0.975, 0.993, 0.999}) {
    CHECK(stats::normal_quantile(p) == Catch::Approx(testing::normal_quantile(p)).margin(1e-9));
  }
  for (double df : {1.0, 3.0, 5.0, 7.0}) {
    for (double p : {0.1, 0.5, 0.993}) {
      CHECK(stats::chi2_quantile(p, df) == Catch::Approx(testing::chi2_quantile(p, df)).epsilon(1e-9));
    }
  }
  for (auto [d1, d2] : {std::pair{3.0, 4.5}, std::pair{2.0, 20.0}, std::pair{3.0, 60.25}}) {
    CHECK(stats::f_quantile(0.993, d1, d2) == Catch::Approx(testing::f_quantile(0.993, d1, d2)).epsilon(1e-9));
  }
}
