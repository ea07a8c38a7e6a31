#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace nnfit {

enum class SpaceKind { TorusSquare, Circle, Sphere };

// Ambient coordinates. Two-dimensional spaces leave the third entry at 0.
using Point = std::array<double, 3>;

inline constexpr double kMembershipTolerance = 1e-9;

// Sample space descriptor: ambient/intrinsic dimension, the volume of the
// unit ball in the intrinsic dimension and the (constant) null density.
struct Space {
  SpaceKind kind;
  int ambient_dim;
  int intrinsic_dim;
  double unit_ball_volume;
  double null_density;

  static Space torus_square();
  static Space circle();
  static Space sphere();
  static Space of(SpaceKind kind);

  // Circle/Sphere: |x| = 1 within tol. TorusSquare: coordinates in [0,1].
  bool contains(const Point& x, double tol = kMembershipTolerance) const;

  friend bool operator==(const Space&, const Space&) = default;
};

std::string_view to_string(SpaceKind kind);
// Accepts "torus-square", "circle", "sphere" (case sensitive).
SpaceKind parse_space(std::string_view name);

// Volume of the unit ball in R^m: pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

// Immutable sample of n >= 2 points, each a member of the space.
class SampleSet {
 public:
  SampleSet(Space space, std::vector<Point> points);

  const Space& space() const { return space_; }
  std::span<const Point> points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }

 private:
  Space space_;
  std::vector<Point> points_;
};

// Row i holds the J smallest distances from point i to the other points,
// sorted ascending.
class NeighborDistances {
 public:
  NeighborDistances() = default;
  NeighborDistances(std::size_t n, std::size_t neighbors)
      : n_(n), neighbors_(neighbors), data_(n * neighbors) {}

  std::size_t size() const { return n_; }
  std::size_t neighbors() const { return neighbors_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * neighbors_, neighbors_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * neighbors_, neighbors_};
  }

  friend bool operator==(const NeighborDistances&,
                         const NeighborDistances&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t neighbors_ = 0;
  std::vector<double> data_;
};

// Torus metric on the square, chordal (ambient Euclidean) metric on the
// circle and sphere. Throws InvalidInput if either point is off the space.
double distance(const Space& space, const Point& x, const Point& y);

namespace detail {

// Unchecked version used in the inner loops.
inline double distance_unchecked(SpaceKind kind, const Point& x,
                                 const Point& y) {
  if (kind == SpaceKind::TorusSquare) {
    double dx = x[0] > y[0] ? x[0] - y[0] : y[0] - x[0];
    double dy = x[1] > y[1] ? x[1] - y[1] : y[1] - x[1];
    if (dx > 0.5) dx = 1.0 - dx;
    if (dy > 0.5) dy = 1.0 - dy;
    return std::sqrt(dx * dx + dy * dy);
  }
  const double dx = x[0] - y[0];
  const double dy = x[1] - y[1];
  const double dz = x[2] - y[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace detail

// Exact J-nearest-neighbor distances by exhaustive comparison.
NeighborDistances knn_brute(const SampleSet& sample, std::size_t J);

// Exact J-nearest-neighbor distances using a cell grid (wrapping on the
// torus, angular buckets on the circle, an ambient box grid on the
// sphere). Output equals knn_brute element for element.
NeighborDistances knn_fast(const SampleSet& sample, std::size_t J);

}  // namespace nnfit
