#include <doctest.h>

#include <cmath>
#include <random>

#include "nnfit/error.hpp"
#include "nnfit/numerics.hpp"
#include "nnfit/sampling.hpp"
#include "nnfit/stats.hpp"

using namespace nnfit;

namespace {

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// (1/4pi) int f over the sphere: Gauss-Legendre in cos(theta), trapezoid in phi.
template <class F>
double sphere_average(F&& f, int nt = 200, int np = 400) {
  const auto gl = numerics::gauss_legendre(nt);
  double sum = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double t = gl.nodes[i], s = std::sqrt(1.0 - t * t);
    for (int j = 0; j < np; ++j) {
      const double phi = 2.0 * M_PI * j / np;
      sum += gl.weights[i] * f(Point{s * std::cos(phi), s * std::sin(phi), t});
    }
  }
  return sum / (2.0 * np);
}

template <class F>
double circle_average(F&& f, int np = 4000) {
  double sum = 0.0;
  for (int j = 0; j < np; ++j) {
    const double phi = 2.0 * M_PI * j / np;
    sum += f(Point{std::cos(phi), std::sin(phi), 0.0});
  }
  return sum / np;
}

bool in_unit_square(const Point& p) {
  return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("rng streams are keyed and reproducible") {
  RngStream a(5, 9), b(5, 9), c(5, 10), d(6, 9);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    REQUIRE(x == b());
    differs_c = differs_c || x != c();
    differs_d = differs_d || x != d();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  RngStream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("normal deviates have unit variance") {
  RngStream r(2, 0);
  std::vector<double> z(100000);
  for (double& v : z) v = r.normal();
  CHECK(std::abs(stats::mean(z)) < 0.015);
  CHECK(stats::standard_deviation(z) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("samples are reproducible and on the space") {
  const std::pair<Space, AlternativeSpec> cases[] = {
      {Space::torus_square(), UniformNull{}},   {Space::torus_square(), Contamination{}},
      {Space::torus_square(), Clustering{}},    {Space::circle(), UniformNull{}},
      {Space::circle(), VonMisesFisher{}},      {Space::circle(), BimodalVonMisesFisher{}},
      {Space::sphere(), UniformNull{}},         {Space::sphere(), VonMisesFisher{}},
      {Space::sphere(), Kent{}}};
  for (const auto& [space, spec] : cases) {
    RngStream r1(77, 3), r2(77, 3);
    const auto s1 = sample(space, spec, 503, r1);
    const auto s2 = sample(space, spec, 503, r2);
    REQUIRE(s1.size() == 503);
    for (std::size_t i = 0; i < s1.size(); ++i) {
      REQUIRE(s1[i] == s2[i]);
      REQUIRE(space.contains(s1[i]));
    }
  }
}

TEST_CASE("incompatible specs are rejected") {
  RngStream r(1, 0);
  CHECK_THROWS_AS(sample(Space::circle(), Contamination{}, 10, r), Unsupported);
  CHECK_THROWS_AS(sample(Space::sphere(), BimodalVonMisesFisher{}, 10, r), Unsupported);
  CHECK_THROWS_AS(sample(Space::circle(), Kent{}, 10, r), Unsupported);
  CHECK_THROWS_AS(sample(Space::torus_square(), VonMisesFisher{}, 10, r), Unsupported);
  CHECK_THROWS_AS(sample(Space::circle(), VonMisesFisher{{0, 0, 1}, 1.0}, 10, r),
                  ParameterError);
  CHECK_THROWS_AS(validate(Space::torus_square(), Contamination{0.6, 0.5}), ParameterError);
  CHECK_THROWS_AS(validate(Space::torus_square(), Clustering{0, 0.05}), ParameterError);
  Kent bad;
  bad.tau1 = {1, 0, 0};
  CHECK_THROWS_AS(validate(Space::sphere(), bad), ParameterError);
}

TEST_CASE("uniform sphere sample has a small mean vector") {
  RngStream r(8, 0);
  const auto s = sample(Space::sphere(), UniformNull{}, 10000, r);
  Point m{0, 0, 0};
  for (const auto& p : s.points()) {
    for (int k = 0; k < 3; ++k) m[k] += p[k] / 1e4;
  }
  CHECK(std::sqrt(dot(m, m)) <= 0.03);
}

TEST_CASE("vMF mean resultant lengths") {
  RngStream r(9, 0);
  // d = 3: coth(kappa) - 1/kappa.
  const Point mu{0.0, 0.6, 0.8};
  const auto s3 = sample(Space::sphere(), VonMisesFisher{mu, 0.5}, 100000, r);
  double m3 = 0.0;
  for (const auto& p : s3.points()) m3 += dot(mu, p) / 1e5;
  CHECK(std::abs(m3 - (1.0 / std::tanh(0.5) - 2.0)) < 0.01);
  CHECK(1.0 / std::tanh(0.5) - 2.0 == doctest::Approx(0.16395).epsilon(1e-4));

  // d = 2: I1(kappa) / I0(kappa), by quadrature of cos against the density.
  const Point mu2{0.0, 1.0, 0.0};
  const auto s2 = sample(Space::circle(), VonMisesFisher{mu2, 2.0}, 100000, r);
  double m2 = 0.0;
  for (const auto& p : s2.points()) m2 += dot(mu2, p) / 1e5;
  const double a2 = circle_average([](const Point& x) { return x[1] * std::exp(2.0 * x[1]); }) /
                    circle_average([](const Point& x) { return std::exp(2.0 * x[1]); });
  CHECK(std::abs(m2 - a2) < 0.01);
}

TEST_CASE("small kappa vMF on the sphere stays accurate") {
  RngStream r(10, 0);
  const auto s = sample(Space::sphere(), VonMisesFisher{{1, 0, 0}, 1e-6}, 20000, r);
  double m = 0.0;
  for (const auto& p : s.points()) m += p[0] / 2e4;
  CHECK(std::abs(m) < 0.03);
}

TEST_CASE("bimodal vMF is symmetric with the expected second moment") {
  RngStream r(11, 0);
  const auto s = sample(Space::circle(), BimodalVonMisesFisher{1.0}, 100000, r);
  double m1 = 0.0, c2 = 0.0;
  for (const auto& p : s.points()) {
    m1 += p[0] / 1e5;
    c2 += (2.0 * p[0] * p[0] - 1.0) / 1e5;
  }
  const double expected =
      circle_average([](const Point& x) { return (2 * x[0] * x[0] - 1) * std::exp(x[0]); }) /
      circle_average([](const Point& x) { return std::exp(x[0]); });
  CHECK(std::abs(m1) < 0.01);
  CHECK(std::abs(c2 - expected) < 0.01);
}

TEST_CASE("contamination matches a brute-force rejection sampler") {
  RngStream r(12, 0);
  const Contamination con;
  const auto s = sample(Space::torus_square(), con, 100000, r);
  for (const auto& p : s.points()) REQUIRE(in_unit_square(p));

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> z;
  std::vector<double> ref_x, ref_d, got_x, got_d;
  while (ref_x.size() < 100000) {
    const double c = u(gen);
    Point p;
    if (c < 1.0 - con.eps1 - con.eps2) {
      p = {u(gen), u(gen), 0};
    } else if (c < 1.0 - con.eps2) {
      p = {con.c1[0] + con.sigma1 * z(gen), con.c1[1] + con.sigma1 * z(gen), 0};
    } else {
      p = {con.c2[0] + con.sigma2 * z(gen), con.c2[1] + con.sigma2 * z(gen), 0};
    }
    if (!in_unit_square(p)) continue;
    ref_x.push_back(p[0]);
    ref_d.push_back(std::hypot(p[0] - con.c1[0], p[1] - con.c1[1]));
  }
  for (const auto& p : s.points()) {
    got_x.push_back(p[0]);
    got_d.push_back(std::hypot(p[0] - con.c1[0], p[1] - con.c1[1]));
  }
  CHECK(stats::ks_two_sample(ref_x, got_x).p_value > 0.001);
  CHECK(stats::ks_two_sample(ref_d, got_d).p_value > 0.001);
}

TEST_CASE("clustering layout") {
  RngStream r(13, 0);
  const auto s = sample(Space::torus_square(), Clustering{}, 205, r);
  REQUIRE(s.size() == 205);
  for (const auto& p : s.points()) REQUIRE(in_unit_square(p));
  // Most points lie within 0.1 of at least 20 others' cluster mates.
  std::size_t close = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t mates = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i != j && std::hypot(s[i][0] - s[j][0], s[i][1] - s[j][1]) <= 0.1) ++mates;
    }
    close += mates >= 19 ? 1 : 0;
  }
  CHECK(close >= 150);
  CHECK(sample(Space::torus_square(), Clustering{}, 5, r).size() == 5);
  CHECK_THROWS_AS(sample(Space::torus_square(), Clustering{}, 1, r), ParameterError);
}

TEST_CASE("density values") {
  const Point e1{1, 0, 0};
  CHECK(density(Space::circle(), VonMisesFisher{e1, 1e-8}, {0, 1, 0}) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(density(Space::sphere(), VonMisesFisher{e1, 1e-8}, {0, 0, -1}) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(density(Space::circle(), VonMisesFisher{e1, 0.5}, e1) ==
        doctest::Approx(std::exp(0.5) / std::cyl_bessel_i(0.0, 0.5)).epsilon(1e-12));
  CHECK(density(Space::circle(), VonMisesFisher{e1, 0.5}, e1) ==
        doctest::Approx(1.55030).epsilon(1e-5));
  CHECK(density(Space::sphere(), UniformNull{}, e1) == 1.0);
  CHECK_THROWS_AS(Density(Space::torus_square(), Contamination{}), Unsupported);
  CHECK_THROWS_AS(Density(Space::torus_square(), Clustering{}), Unsupported);

  Kent flat;
  flat.beta = 0.0;
  flat.kappa = 1.3;
  const Density kent(Space::sphere(), flat);
  const Density vmf(Space::sphere(), VonMisesFisher{flat.mu, 1.3});
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  for (int i = 0; i < 50; ++i) {
    Point x{z(gen), z(gen), z(gen)};
    const double r = std::sqrt(dot(x, x));
    for (double& c : x) c /= r;
    CHECK(kent(x) == doctest::Approx(vmf(x)).epsilon(1e-8));
  }
}

TEST_CASE("densities integrate to one") {
  const Density c1(Space::circle(), VonMisesFisher{{0.6, 0.8, 0}, 2.5});
  CHECK(circle_average(c1) == doctest::Approx(1.0).epsilon(1e-6));
  const Density c2(Space::circle(), BimodalVonMisesFisher{1.0});
  CHECK(circle_average(c2) == doctest::Approx(1.0).epsilon(1e-6));
  const Density s1(Space::sphere(), VonMisesFisher{{0, 0, 1}, 3.0});
  CHECK(sphere_average(s1) == doctest::Approx(1.0).epsilon(1e-6));
  const Density s2(Space::sphere(), Kent{});
  CHECK(sphere_average(s2) == doctest::Approx(1.0).epsilon(1e-6));
  Kent peaked;
  peaked.kappa = 8.0;
  peaked.beta = 3.0;
  const Density s3(Space::sphere(), peaked);
  CHECK(sphere_average(s3) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Kent sampler matches quadrature cell probabilities") {
  const Kent k;
  RngStream r(14, 0);
  const std::size_t n = 100000;
  const auto s = sample(Space::sphere(), k, n, r);
  // 20 cells: 5 bands in mu'x times 4 quadrants in (tau1'x, tau2'x).
  const auto cell = [&](const Point& x) {
    const double t = dot(k.mu, x);
    const int band = std::min(4, static_cast<int>((t + 1.0) / 0.4));
    const double a = std::atan2(dot(k.tau2, x), dot(k.tau1, x)) + M_PI;
    const int quad = std::min(3, static_cast<int>(a / (M_PI / 2.0)));
    return band * 4 + quad;
  };
  std::vector<double> counts(20, 0.0);
  for (const auto& p : s.points()) counts[cell(p)] += 1.0;
  // Cells are rectangles in (t, phi) with x = t mu + s (cos phi tau1 + sin phi tau2),
  // so each probability is a product Gauss-Legendre integral.
  const Density f(Space::sphere(), k);
  const auto gl = numerics::gauss_legendre(64);
  for (int c = 0; c < 20; ++c) {
    const double t0 = -1.0 + 0.4 * (c / 4), t1 = t0 + 0.4;
    const double p0 = -M_PI + (M_PI / 2.0) * (c % 4), p1 = p0 + M_PI / 2.0;
    double prob = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl.nodes[i];
      const double sn = std::sqrt(1.0 - t * t);
      for (int j = 0; j < 64; ++j) {
        const double phi = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * gl.nodes[j];
        Point x;
        for (int d = 0; d < 3; ++d) {
          x[d] = t * k.mu[d] + sn * (std::cos(phi) * k.tau1[d] + std::sin(phi) * k.tau2[d]);
        }
        prob += gl.weights[i] * gl.weights[j] * 0.25 * (t1 - t0) * (p1 - p0) * f(x);
      }
    }
    prob /= 4.0 * M_PI;
    const double se = std::sqrt(n * prob * (1.0 - prob));
    CHECK(std::abs(counts[c] - n * prob) <= 3.0 * se);
  }
}

}  // TEST_SUITE
