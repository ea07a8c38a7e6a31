#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "nnfit/geometry.hpp"

namespace nnfit {

// Competitor tests. All of them reject for large values.
enum class ClassicalTest { DB, MS, RaCircle, RaSphere, Kuiper, Watson, Jupp };

// Canonical id: DB, MS, RA_CIRCLE, RA_SPHERE, KUIPER, WATSON, JUPP.
std::string_view to_string(ClassicalTest test);
// Accepts the canonical id or the lower-case CLI spelling (db, ms,
// ra-circle, ra-sphere, kuiper, watson, jupp).
std::optional<ClassicalTest> parse_classical(std::string_view name);
SpaceKind required_space(ClassicalTest test);

// Largest open disc inside the unit square free of sample points.
struct EmptyDisc {
  Point center{0.5, 0.5, 0.0};
  double radius = 0.5;
};

struct ClassicalStatistic {
  ClassicalTest test_id;
  double value = 0.0;
  std::optional<EmptyDisc> largest_empty_disc;  // MS only
  std::optional<int> selected_order;            // JUPP only
};

// Distance-to-boundary test: sqrt(n) sup|G_n - G_0| with G_0 the
// Beta(1,2) cdf, applied to Y_j = dist(X_j, boundary) / 0.5.
ClassicalStatistic db_statistic(std::span<const Point> points);

// Maximal spacing test: V_n = pi * Delta_n^2 with Delta_n the radius of the
// largest empty disc inside the square (Euclidean metric). Delta_n is found
// by a 64x64 coarse grid, the 16 best cells, then 6 levels of 9x9 window
// refinement shrinking by 4 per level.
ClassicalStatistic ms_statistic(std::span<const Point> points);
EmptyDisc largest_empty_disc(std::span<const Point> points);

// Modified Rayleigh statistics (1 - 1/(2n) + T_n/(8n)) T_n on the circle and
// (1 - 1/(2n) + T_n/(16n)) T_n on the sphere, T_n = 2n|mean|^2.
ClassicalStatistic rayleigh_circle(std::span<const Point> points);
ClassicalStatistic rayleigh_sphere(std::span<const Point> points);

ClassicalStatistic kuiper(std::span<const Point> points);
ClassicalStatistic watson(std::span<const Point> points);

// Sobolev score S_n(k) = (2k+1)/n sum_{j,l} P_k(X_j'X_l), diagonal included.
double sobolev_score(std::span<const Point> points, int k);

// Data-driven Sobolev test on the sphere: k chosen in 1..5 as the smallest
// maximizer of S_n(k) - k(k+2) log n; value S_n(k).
ClassicalStatistic jupp(std::span<const Point> points);

ClassicalStatistic evaluate(ClassicalTest test, std::span<const Point> points);

// Threshold from the limit law at the given level: Kolmogorov for DB,
// Gumbel for MS, chi-square(3) for the Rayleigh and Jupp statistics.
// Kuiper and Watson have no built-in limit law here (Unsupported).
double asymptotic_critical_value(ClassicalTest test, double level, std::size_t n);

}  // namespace nnfit
