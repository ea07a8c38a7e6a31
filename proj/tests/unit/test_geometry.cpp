#include <doctest.h>

#include <cmath>
#include <random>

#include "nnfit/error.hpp"
#include "nnfit/geometry.hpp"
#include "nnfit/rng.hpp"
#include "nnfit/sampling.hpp"
#include "support/oracles.hpp"

using namespace nnfit;

namespace {

Point rotate_z(const Point& p, double t) {
  return {std::cos(t) * p[0] - std::sin(t) * p[1], std::sin(t) * p[0] + std::cos(t) * p[1], p[2]};
}

Point rotate_x(const Point& p, double t) {
  return {p[0], std::cos(t) * p[1] - std::sin(t) * p[2], std::sin(t) * p[1] + std::cos(t) * p[2]};
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("space descriptors") {
  const auto sq = Space::torus_square();
  CHECK(sq.ambient_dim == 2);
  CHECK(sq.intrinsic_dim == 2);
  CHECK(sq.null_density == 1.0);
  CHECK(Space::circle().intrinsic_dim == 1);
  CHECK(Space::circle().null_density == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(Space::sphere().ambient_dim == 3);
  CHECK(Space::sphere().null_density == doctest::Approx(1.0 / (4.0 * M_PI)));
  CHECK(parse_space("circle") == SpaceKind::Circle);
  CHECK(to_string(SpaceKind::TorusSquare) == "torus-square");
  CHECK_THROWS_AS(parse_space("torus"), ConfigError);
}

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
  CHECK_THROWS_AS(unit_ball_volume(0), ParameterError);
}

TEST_CASE("distance examples") {
  const auto sq = Space::torus_square();
  CHECK(distance(sq, {0.1, 0.5, 0}, {0.9, 0.5, 0}) == doctest::Approx(0.2));
  CHECK(distance(sq, {0.3, 0.3, 0}, {0.3, 0.3, 0}) == 0.0);
  CHECK(distance(Space::sphere(), {1, 0, 0}, {-1, 0, 0}) == doctest::Approx(2.0));
  CHECK(distance(Space::circle(), {0, 1, 0}, {0, 1, 0}) == 0.0);
  CHECK_THROWS_AS(distance(Space::circle(), {0.5, 0.5, 0}, {1, 0, 0}), InvalidInput);
  CHECK_THROWS_AS(distance(sq, {1.5, 0.5, 0}, {0.1, 0.1, 0}), InvalidInput);
}

TEST_CASE("sample set validation") {
  CHECK_THROWS_AS(SampleSet(Space::torus_square(), {{0.5, 0.5, 0}}), ParameterError);
  CHECK_THROWS_AS(SampleSet(Space::sphere(), {{1, 0, 0}, {0.5, 0, 0}}), InvalidInput);
  CHECK_NOTHROW(SampleSet(Space::circle(), {{1, 0, 0}, {0, -1, 0}}));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 gen(11);
  for (auto kind : {SpaceKind::TorusSquare, SpaceKind::Circle, SpaceKind::Sphere}) {
    const auto space = Space::of(kind);
    const auto pts = testing::random_points(kind, 30000, gen);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      const double ab = distance(space, pts[i], pts[i + 1]);
      const double ba = distance(space, pts[i + 1], pts[i]);
      const double bc = distance(space, pts[i + 1], pts[i + 2]);
      const double ac = distance(space, pts[i], pts[i + 2]);
      REQUIRE(ab == ba);
      REQUIRE(ab >= 0.0);
      REQUIRE(ac <= ab + bc + 1e-12);
    }
  }
}

TEST_CASE("torus distance never exceeds the euclidean one") {
  std::mt19937_64 gen(12);
  const auto sq = Space::torus_square();
  const auto pts = testing::random_points(SpaceKind::TorusSquare, 2000, gen);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double dx = pts[i][0] - pts[i + 1][0], dy = pts[i][1] - pts[i + 1][1];
    const double euclid = std::hypot(dx, dy);
    const double torus = distance(sq, pts[i], pts[i + 1]);
    CHECK(torus <= euclid + 1e-15);
    if (std::abs(dx) <= 0.5 && std::abs(dy) <= 0.5) CHECK(torus == doctest::Approx(euclid));
  }
}

TEST_CASE("chordal distances are rotation invariant") {
  std::mt19937_64 gen(13);
  const auto circle = testing::random_points(SpaceKind::Circle, 200, gen);
  const auto sphere = testing::random_points(SpaceKind::Sphere, 200, gen);
  for (std::size_t i = 0; i + 1 < circle.size(); ++i) {
    const double before = distance(Space::circle(), circle[i], circle[i + 1]);
    const double after =
        distance(Space::circle(), rotate_z(circle[i], 0.7), rotate_z(circle[i + 1], 0.7));
    CHECK(std::abs(before - after) < 1e-12);
  }
  for (std::size_t i = 0; i + 1 < sphere.size(); ++i) {
    const double before = distance(Space::sphere(), sphere[i], sphere[i + 1]);
    const auto a = rotate_x(rotate_z(sphere[i], 1.1), -0.4);
    const auto b = rotate_x(rotate_z(sphere[i + 1], 1.1), -0.4);
    CHECK(std::abs(before - distance(Space::sphere(), a, b)) < 1e-12);
  }
}

TEST_CASE("knn_brute hand example with wraparound") {
  const SampleSet s(Space::torus_square(), {{0.1, 0.5, 0}, {0.2, 0.5, 0}, {0.9, 0.5, 0}});
  const auto nb = knn_brute(s, 2);
  CHECK(nb[0][0] == doctest::Approx(0.1));
  CHECK(nb[0][1] == doctest::Approx(0.2));
  CHECK(nb[1][0] == doctest::Approx(0.1));
  CHECK(nb[1][1] == doctest::Approx(0.3));
  CHECK(nb[2][0] == doctest::Approx(0.2));
  CHECK(nb[2][1] == doctest::Approx(0.3));
  CHECK(knn_fast(s, 2) == nb);
}

TEST_CASE("knn degenerate inputs") {
  const SampleSet two(Space::sphere(), {{1, 0, 0}, {0, 1, 0}});
  const auto nb = knn_fast(two, 1);
  CHECK(nb[0][0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(nb[1][0] == nb[0][0]);

  const SampleSet dup(Space::torus_square(), {{0.3, 0.3, 0}, {0.3, 0.3, 0}, {0.8, 0.1, 0}});
  CHECK(knn_brute(dup, 1)[0][0] == 0.0);
  CHECK(knn_fast(dup, 1)[1][0] == 0.0);

  CHECK_THROWS_AS(knn_brute(dup, 3), ParameterError);
  CHECK_THROWS_AS(knn_fast(dup, 0), ParameterError);
}

TEST_CASE("knn_brute agrees with an all-pairs sort") {
  std::mt19937_64 gen(14);
  for (auto kind : {SpaceKind::TorusSquare, SpaceKind::Circle, SpaceKind::Sphere}) {
    const auto pts = testing::random_points(kind, 60, gen);
    const SampleSet s(Space::of(kind), pts);
    const auto nb = knn_brute(s, 7);
    const auto ref = testing::naive_knn(s.space(), pts, 7);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = 0; k < 7; ++k) REQUIRE(nb[i][k] == ref[i][k]);
    }
  }
}

TEST_CASE("knn_fast equals knn_brute on random samples") {
  std::mt19937_64 gen(15);
  for (auto kind : {SpaceKind::TorusSquare, SpaceKind::Circle, SpaceKind::Sphere}) {
    for (std::size_t n : {3u, 50u, 200u, 1000u}) {
      for (std::size_t J : {1u, 5u, 25u}) {
        if (J >= n) continue;
        const SampleSet s(Space::of(kind), testing::random_points(kind, n, gen));
        REQUIRE(knn_fast(s, J) == knn_brute(s, J));
      }
    }
  }
}

TEST_CASE("knn_fast equals knn_brute on clustered and concentrated samples") {
  RngStream rng(3, 0);
  const auto clu = sample(Space::torus_square(), Clustering{}, 400, rng);
  CHECK(knn_fast(clu, 10) == knn_brute(clu, 10));
  CHECK(knn_fast(clu, 25) == knn_brute(clu, 25));
  const auto con = sample(Space::torus_square(), Contamination{}, 400, rng);
  CHECK(knn_fast(con, 25) == knn_brute(con, 25));
  const auto mf = sample(Space::sphere(), VonMisesFisher{{0, 0, 1}, 40.0}, 500, rng);
  CHECK(knn_fast(mf, 25) == knn_brute(mf, 25));
  const auto bmf = sample(Space::circle(), BimodalVonMisesFisher{30.0}, 500, rng);
  CHECK(knn_fast(bmf, 25) == knn_brute(bmf, 25));
}

TEST_CASE("knn_fast handles points on the square's edges") {
  const SampleSet s(Space::torus_square(),
                    {{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, 0, 0}});
  CHECK(knn_fast(s, 3) == knn_brute(s, 3));
  CHECK(knn_fast(s, 1)[0][0] == 0.0);
}

}  // TEST_SUITE
