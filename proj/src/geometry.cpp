#include "nnfit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nnfit/error.hpp"

namespace nnfit {

Space Space::torus_square() {
  return {SpaceKind::TorusSquare, 2, 2, std::numbers::pi, 1.0};
}

Space Space::circle() {
  return {SpaceKind::Circle, 2, 1, 2.0, 1.0 / (2.0 * std::numbers::pi)};
}

Space Space::sphere() {
  return {SpaceKind::Sphere, 3, 2, std::numbers::pi,
          1.0 / (4.0 * std::numbers::pi)};
}

Space Space::of(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::TorusSquare:
      return torus_square();
    case SpaceKind::Circle:
      return circle();
    case SpaceKind::Sphere:
      return sphere();
  }
  throw ParameterError("unknown space kind");
}

bool Space::contains(const Point& x, double tol) const {
  for (double c : x) {
    if (!std::isfinite(c)) return false;
  }
  switch (kind) {
    case SpaceKind::TorusSquare:
      return x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0 &&
             x[2] == 0.0;
    case SpaceKind::Circle:
      return x[2] == 0.0 && std::abs(std::hypot(x[0], x[1]) - 1.0) <= tol;
    case SpaceKind::Sphere:
      return std::abs(std::hypot(x[0], x[1], x[2]) - 1.0) <= tol;
  }
  return false;
}

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::TorusSquare:
      return "torus-square";
    case SpaceKind::Circle:
      return "circle";
    case SpaceKind::Sphere:
      return "sphere";
  }
  return "?";
}

SpaceKind parse_space(std::string_view name) {
  if (name == "torus-square") return SpaceKind::TorusSquare;
  if (name == "circle") return SpaceKind::Circle;
  if (name == "sphere") return SpaceKind::Sphere;
  throw ConfigError("unknown space '" + std::string(name) +
                       "' (expected torus-square, circle or sphere)");
}

double unit_ball_volume(int m) {
  if (m <= 0) throw ParameterError("unit_ball_volume: m must be positive");
  const double half = 0.5 * m;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

SampleSet::SampleSet(Space space, std::vector<Point> points)
    : space_(space), points_(std::move(points)) {
  if (points_.size() < 2) {
    throw ParameterError("a sample needs at least two points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!space_.contains(points_[i])) {
      throw InvalidInput("point " + std::to_string(i) + " is not on the " +
                         std::string(to_string(space_.kind)));
    }
  }
}

double distance(const Space& space, const Point& x, const Point& y) {
  if (!space.contains(x) || !space.contains(y)) {
    throw InvalidInput("distance: point is not a member of the space");
  }
  return detail::distance_unchecked(space.kind, x, y);
}

namespace {

void check_neighbor_count(const SampleSet& sample, std::size_t J) {
  if (J < 1 || J >= sample.size()) {
    throw ParameterError("J must satisfy 1 <= J <= n-1 (J=" +
                         std::to_string(J) +
                         ", n=" + std::to_string(sample.size()) + ")");
  }
}

// Keeps the J smallest values offered so far, ascending.
class BestList {
 public:
  explicit BestList(std::span<double> out) : out_(out) {}

  void offer(double d) {
    const std::size_t cap = out_.size();
    if (count_ == cap) {
      if (!(d < out_[cap - 1])) return;
      --count_;
    }
    std::size_t pos = count_;
    while (pos > 0 && out_[pos - 1] > d) {
      out_[pos] = out_[pos - 1];
      --pos;
    }
    out_[pos] = d;
    ++count_;
  }

  bool full() const { return count_ == out_.size(); }
  double worst() const { return out_[out_.size() - 1]; }

 private:
  std::span<double> out_;
  std::size_t count_ = 0;
};

// Points bucketed by a linear cell id (counting sort).
struct CellIndex {
  std::vector<std::size_t> start;  // size cells + 1
  std::vector<std::size_t> order;  // point indices grouped by cell

  CellIndex(std::size_t cells, std::span<const std::size_t> cell_of) {
    start.assign(cells + 1, 0);
    for (std::size_t c : cell_of) ++start[c + 1];
    for (std::size_t c = 0; c < cells; ++c) start[c + 1] += start[c];
    order.resize(cell_of.size());
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < cell_of.size(); ++i) {
      order[fill[cell_of[i]]++] = i;
    }
  }
};

// Slack absorbing rounding in cell assignment and the 1e-9 tolerance on
// unit norms; a lower bound is only trusted after subtracting it.
constexpr double kBoundSlack = 1e-8;

NeighborDistances knn_torus(const SampleSet& sample, std::size_t J) {
  const std::size_t n = sample.size();
  const auto pts = sample.points();
  const double side = std::sqrt(static_cast<double>(std::max<std::size_t>(J, 1)) /
                                static_cast<double>(n));
  const long grid = std::max(4L, static_cast<long>(std::floor(1.0 / side)));
  const double h = 1.0 / static_cast<double>(grid);

  auto axis_cell = [grid](double c) {
    long k = static_cast<long>(std::floor(c * static_cast<double>(grid)));
    if (k >= grid) k -= grid;  // c == 1 is identified with 0
    return std::clamp(k, 0L, grid - 1);
  };
  std::vector<std::size_t> cell_of(n);
  std::vector<long> cx(n), cy(n);
  for (std::size_t i = 0; i < n; ++i) {
    cx[i] = axis_cell(pts[i][0]);
    cy[i] = axis_cell(pts[i][1]);
    cell_of[i] = static_cast<std::size_t>(cx[i] * grid + cy[i]);
  }
  const CellIndex index(static_cast<std::size_t>(grid * grid), cell_of);

  // Offsets in [lo, hi] reach every cell exactly once.
  const long lo = -(grid - 1) / 2;
  const long hi = lo + grid - 1;
  const long max_ring = std::max(-lo, hi);

  NeighborDistances out(n, J);
  for (std::size_t i = 0; i < n; ++i) {
    BestList best(out.row(i));
    auto visit = [&](long dx, long dy) {
      const long x = ((cx[i] + dx) % grid + grid) % grid;
      const long y = ((cy[i] + dy) % grid + grid) % grid;
      const auto cell = static_cast<std::size_t>(x * grid + y);
      for (std::size_t k = index.start[cell]; k < index.start[cell + 1]; ++k) {
        const std::size_t j = index.order[k];
        if (j == i) continue;
        best.offer(detail::distance_unchecked(SpaceKind::TorusSquare, pts[i],
                                              pts[j]));
      }
    };
    for (long r = 0; r <= max_ring; ++r) {
      for (long dx = std::max(-r, lo); dx <= std::min(r, hi); ++dx) {
        for (long dy = std::max(-r, lo); dy <= std::min(r, hi); ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
          visit(dx, dy);
        }
      }
      if (best.full() && best.worst() <= static_cast<double>(r) * h - kBoundSlack) {
        break;
      }
    }
  }
  return out;
}

NeighborDistances knn_circle(const SampleSet& sample, std::size_t J) {
  const std::size_t n = sample.size();
  const auto pts = sample.points();
  const long buckets =
      std::max(4L, static_cast<long>(n / std::max<std::size_t>(J, 1)));
  const double width = 2.0 * std::numbers::pi / static_cast<double>(buckets);

  std::vector<std::size_t> cell_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    double theta = std::atan2(pts[i][1], pts[i][0]);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    long b = static_cast<long>(std::floor(theta / width));
    cell_of[i] = static_cast<std::size_t>(std::clamp(b, 0L, buckets - 1));
  }
  const CellIndex index(static_cast<std::size_t>(buckets), cell_of);

  const long lo = -(buckets - 1) / 2;
  const long hi = lo + buckets - 1;
  const long max_ring = std::max(-lo, hi);

  NeighborDistances out(n, J);
  for (std::size_t i = 0; i < n; ++i) {
    BestList best(out.row(i));
    const auto home = static_cast<long>(cell_of[i]);
    auto visit = [&](long db) {
      const auto cell = static_cast<std::size_t>(((home + db) % buckets + buckets) % buckets);
      for (std::size_t k = index.start[cell]; k < index.start[cell + 1]; ++k) {
        const std::size_t j = index.order[k];
        if (j == i) continue;
        best.offer(detail::distance_unchecked(SpaceKind::Circle, pts[i], pts[j]));
      }
    };
    for (long r = 0; r <= max_ring; ++r) {
      if (r == 0) {
        visit(0);
      } else {
        if (-r >= lo) visit(-r);
        if (r <= hi) visit(r);
      }
      const double gap = std::min(static_cast<double>(r) * width, std::numbers::pi);
      if (best.full() && best.worst() <= 2.0 * std::sin(0.5 * gap) - kBoundSlack) {
        break;
      }
    }
  }
  return out;
}

NeighborDistances knn_sphere(const SampleSet& sample, std::size_t J) {
  const std::size_t n = sample.size();
  const auto pts = sample.points();
  const double side = std::sqrt(4.0 * std::numbers::pi *
                                static_cast<double>(std::max<std::size_t>(J, 1)) /
                                static_cast<double>(n));
  const long grid =
      std::clamp(static_cast<long>(std::ceil(2.0 / side)), 4L, 128L);
  const double h = 2.0 / static_cast<double>(grid);

  auto axis_cell = [grid, h](double c) {
    const long k = static_cast<long>(std::floor((c + 1.0) / h));
    return std::clamp(k, 0L, grid - 1);
  };
  std::vector<std::size_t> cell_of(n);
  std::vector<std::array<long, 3>> cell(n);
  for (std::size_t i = 0; i < n; ++i) {
    cell[i] = {axis_cell(pts[i][0]), axis_cell(pts[i][1]), axis_cell(pts[i][2])};
    cell_of[i] = static_cast<std::size_t>((cell[i][0] * grid + cell[i][1]) * grid +
                                          cell[i][2]);
  }
  const CellIndex index(static_cast<std::size_t>(grid * grid * grid), cell_of);

  NeighborDistances out(n, J);
  for (std::size_t i = 0; i < n; ++i) {
    BestList best(out.row(i));
    const auto& c = cell[i];
    auto visit = [&](long dx, long dy, long dz) {
      const long x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
      if (x < 0 || x >= grid || y < 0 || y >= grid || z < 0 || z >= grid) return;
      const auto id = static_cast<std::size_t>((x * grid + y) * grid + z);
      for (std::size_t k = index.start[id]; k < index.start[id + 1]; ++k) {
        const std::size_t j = index.order[k];
        if (j == i) continue;
        best.offer(detail::distance_unchecked(SpaceKind::Sphere, pts[i], pts[j]));
      }
    };
    for (long r = 0; r < grid; ++r) {
      for (long dx = -r; dx <= r; ++dx) {
        for (long dy = -r; dy <= r; ++dy) {
          if (std::abs(dx) == r || std::abs(dy) == r) {
            for (long dz = -r; dz <= r; ++dz) visit(dx, dy, dz);
          } else {
            visit(dx, dy, -r);
            if (r != 0) visit(dx, dy, r);
          }
        }
      }
      if (best.full() && best.worst() <= static_cast<double>(r) * h - kBoundSlack) {
        break;
      }
    }
  }
  return out;
}

}  // namespace

NeighborDistances knn_brute(const SampleSet& sample, std::size_t J) {
  check_neighbor_count(sample, J);
  const std::size_t n = sample.size();
  const auto kind = sample.space().kind;
  const auto pts = sample.points();
  NeighborDistances out(n, J);
  for (std::size_t i = 0; i < n; ++i) {
    BestList best(out.row(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best.offer(detail::distance_unchecked(kind, pts[i], pts[j]));
    }
  }
  return out;
}

NeighborDistances knn_fast(const SampleSet& sample, std::size_t J) {
  check_neighbor_count(sample, J);
  switch (sample.space().kind) {
    case SpaceKind::TorusSquare:
      return knn_torus(sample, J);
    case SpaceKind::Circle:
      return knn_circle(sample, J);
    case SpaceKind::Sphere:
      return knn_sphere(sample, J);
  }
  throw ParameterError("unknown space kind");
}

}  // namespace nnfit
