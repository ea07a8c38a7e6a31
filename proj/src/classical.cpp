#include "nnfit/classical.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "nnfit/error.hpp"
#include "nnfit/numerics.hpp"

namespace nnfit {

namespace {

void require_unit_square(std::span<const Point> points) {
  for (const auto& p : points) {
    if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0)) {
      throw InvalidInput("point outside the unit square");
    }
  }
}

void require_members(std::span<const Point> points, SpaceKind kind) {
  const Space space = Space::of(kind);
  for (const auto& p : points) {
    if (!space.contains(p)) {
      throw InvalidInput(std::string("point is not on the ") + std::string(to_string(kind)));
    }
  }
}

void require_nonempty(std::span<const Point> points) {
  if (points.empty()) throw ParameterError("statistic needs at least one point");
}

// Uniform bucket grid over the unit square for nearest-point queries.
class SquareGrid {
 public:
  explicit SquareGrid(std::span<const Point> points) : points_(points) {
    const auto n = static_cast<double>(points.size());
    cells_ = std::clamp(static_cast<int>(std::lround(std::sqrt(n / 2.0))), 1, 64);
    h_ = 1.0 / cells_;
    start_.assign(static_cast<std::size_t>(cells_ * cells_) + 1, 0);
    std::vector<int> id(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      id[i] = cell(points[i][0]) * cells_ + cell(points[i][1]);
      ++start_[id[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    order_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) order_[fill[id[i]]++] = i;
  }

  // min(distance to the boundary, distance to the nearest point).
  double clearance(double x, double y) const {
    double best = std::min({x, 1.0 - x, y, 1.0 - y});
    const int cx = cell(x), cy = cell(y);
    for (int r = 0; r < cells_; ++r) {
      // Points outside the box of rings < r are at least this far away.
      const double reach = std::min({x - (cx - r + 1) * h_, (cx + r) * h_ - x,
                                     y - (cy - r + 1) * h_, (cy + r) * h_ - y});
      if (r > 0 && best <= reach) break;
      for (int i = std::max(0, cx - r); i <= std::min(cells_ - 1, cx + r); ++i) {
        const bool edge_row = (i == cx - r || i == cx + r);
        for (int j = std::max(0, cy - r); j <= std::min(cells_ - 1, cy + r); ++j) {
          if (!edge_row && j != cy - r && j != cy + r) continue;
          const auto c = static_cast<std::size_t>(i * cells_ + j);
          for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
            const Point& p = points_[order_[k]];
            const double dx = p[0] - x, dy = p[1] - y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best * best) best = std::sqrt(d2);
          }
        }
      }
    }
    return best;
  }

 private:
  int cell(double c) const {
    return std::clamp(static_cast<int>(std::floor(c * cells_)), 0, cells_ - 1);
  }

  std::span<const Point> points_;
  int cells_ = 1;
  double h_ = 1.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

// Angles mapped to [0,1) and sorted.
std::vector<double> sorted_circular_uniforms(std::span<const Point> points) {
  std::vector<double> u(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double t = std::atan2(points[i][1], points[i][0]);
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    double v = t / (2.0 * std::numbers::pi);
    if (v >= 1.0) v -= 1.0;
    u[i] = v;
  }
  std::sort(u.begin(), u.end());
  return u;
}

double rayleigh_t(std::span<const Point> points) {
  Point s{0.0, 0.0, 0.0};
  for (const auto& p : points) {
    for (int c = 0; c < 3; ++c) s[c] += p[c];
  }
  const auto n = static_cast<double>(points.size());
  // T_n = 2n |mean|^2 = 2 |sum|^2 / n
  return 2.0 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / n;
}

}  // namespace

std::string_view to_string(ClassicalTest test) {
  switch (test) {
    case ClassicalTest::DB: return "DB";
    case ClassicalTest::MS: return "MS";
    case ClassicalTest::RaCircle: return "RA_CIRCLE";
    case ClassicalTest::RaSphere: return "RA_SPHERE";
    case ClassicalTest::Kuiper: return "KUIPER";
    case ClassicalTest::Watson: return "WATSON";
    case ClassicalTest::Jupp: return "JUPP";
  }
  return "?";
}

std::optional<ClassicalTest> parse_classical(std::string_view name) {
  constexpr std::pair<std::string_view, ClassicalTest> kNames[] = {
      {"DB", ClassicalTest::DB},           {"db", ClassicalTest::DB},
      {"MS", ClassicalTest::MS},           {"ms", ClassicalTest::MS},
      {"RA_CIRCLE", ClassicalTest::RaCircle}, {"ra-circle", ClassicalTest::RaCircle},
      {"RA_SPHERE", ClassicalTest::RaSphere}, {"ra-sphere", ClassicalTest::RaSphere},
      {"KUIPER", ClassicalTest::Kuiper},   {"kuiper", ClassicalTest::Kuiper},
      {"WATSON", ClassicalTest::Watson},   {"watson", ClassicalTest::Watson},
      {"JUPP", ClassicalTest::Jupp},       {"jupp", ClassicalTest::Jupp},
  };
  for (const auto& [key, test] : kNames) {
    if (key == name) return test;
  }
  return std::nullopt;
}

SpaceKind required_space(ClassicalTest test) {
  switch (test) {
    case ClassicalTest::DB:
    case ClassicalTest::MS:
      return SpaceKind::TorusSquare;
    case ClassicalTest::RaCircle:
    case ClassicalTest::Kuiper:
    case ClassicalTest::Watson:
      return SpaceKind::Circle;
    case ClassicalTest::RaSphere:
    case ClassicalTest::Jupp:
      return SpaceKind::Sphere;
  }
  return SpaceKind::TorusSquare;
}

ClassicalStatistic db_statistic(std::span<const Point> points) {
  require_nonempty(points);
  require_unit_square(points);
  std::vector<double> g0(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const double y = std::min({p[0], 1.0 - p[0], p[1], 1.0 - p[1]}) / 0.5;
    g0[i] = 1.0 - (1.0 - y) * (1.0 - y);
  }
  std::sort(g0.begin(), g0.end());
  const auto n = static_cast<double>(points.size());
  double d = 0.0;
  for (std::size_t j = 0; j < g0.size(); ++j) {
    const double above = static_cast<double>(j + 1) / n - g0[j];
    const double below = g0[j] - static_cast<double>(j) / n;
    d = std::max({d, above, below});
  }
  return {ClassicalTest::DB, std::sqrt(n) * d, std::nullopt, std::nullopt};
}

EmptyDisc largest_empty_disc(std::span<const Point> points) {
  require_unit_square(points);
  if (points.empty()) return {};

  constexpr int kCoarse = 64;
  constexpr std::size_t kSeeds = 16;
  constexpr int kLevels = 6;
  constexpr int kStencil = 9;
  constexpr double kShrink = 4.0;

  const SquareGrid grid(points);
  std::vector<double> coarse(kCoarse * kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    for (int j = 0; j < kCoarse; ++j) {
      coarse[i * kCoarse + j] = grid.clearance((i + 0.5) / kCoarse, (j + 0.5) / kCoarse);
    }
  }
  std::vector<int> order(coarse.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + kSeeds, order.end(),
                    [&](int a, int b) { return coarse[a] > coarse[b] || (coarse[a] == coarse[b] && a < b); });

  EmptyDisc best;
  best.radius = -1.0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const int idx = order[s];
    double cx = (idx / kCoarse + 0.5) / kCoarse;
    double cy = (idx % kCoarse + 0.5) / kCoarse;
    double value = coarse[idx];
    double half = 1.0 / kCoarse;
    for (int level = 0; level < kLevels; ++level) {
      const double step = 2.0 * half / (kStencil - 1);
      double bx = cx, by = cy, bv = value;
      for (int a = 0; a < kStencil; ++a) {
        const double x = std::clamp(cx + (a - kStencil / 2) * step, 0.0, 1.0);
        for (int b = 0; b < kStencil; ++b) {
          const double y = std::clamp(cy + (b - kStencil / 2) * step, 0.0, 1.0);
          const double v = grid.clearance(x, y);
          if (v > bv) {
            bv = v;
            bx = x;
            by = y;
          }
        }
      }
      cx = bx;
      cy = by;
      value = bv;
      half /= kShrink;
    }
    if (value > best.radius) best = {{cx, cy, 0.0}, value};
  }
  return best;
}

ClassicalStatistic ms_statistic(std::span<const Point> points) {
  const EmptyDisc disc = largest_empty_disc(points);
  return {ClassicalTest::MS, std::numbers::pi * disc.radius * disc.radius, disc, std::nullopt};
}

ClassicalStatistic rayleigh_circle(std::span<const Point> points) {
  require_nonempty(points);
  require_members(points, SpaceKind::Circle);
  const auto n = static_cast<double>(points.size());
  const double t = rayleigh_t(points);
  return {ClassicalTest::RaCircle, (1.0 - 1.0 / (2.0 * n) + t / (8.0 * n)) * t, std::nullopt,
          std::nullopt};
}

ClassicalStatistic rayleigh_sphere(std::span<const Point> points) {
  require_nonempty(points);
  require_members(points, SpaceKind::Sphere);
  const auto n = static_cast<double>(points.size());
  const double t = rayleigh_t(points);
  return {ClassicalTest::RaSphere, (1.0 - 1.0 / (2.0 * n) + t / (16.0 * n)) * t,
          std::nullopt, std::nullopt};
}

ClassicalStatistic kuiper(std::span<const Point> points) {
  require_nonempty(points);
  require_members(points, SpaceKind::Circle);
  const auto u = sorted_circular_uniforms(points);
  const auto n = static_cast<double>(u.size());
  double d_plus = -1.0, d_minus = -1.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    d_plus = std::max(d_plus, u[j] - static_cast<double>(j) / n);
    d_minus = std::max(d_minus, static_cast<double>(j + 1) / n - u[j]);
  }
  return {ClassicalTest::Kuiper, std::sqrt(n) * (d_plus + d_minus), std::nullopt, std::nullopt};
}

ClassicalStatistic watson(std::span<const Point> points) {
  require_nonempty(points);
  require_members(points, SpaceKind::Circle);
  const auto u = sorted_circular_uniforms(points);
  const auto n = static_cast<double>(u.size());
  double u_bar = 0.0;
  for (double v : u) u_bar += v;
  u_bar /= n;
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = u[j] - (2.0 * static_cast<double>(j) + 1.0) / (2.0 * n) - u_bar + 0.5;
    sum += r * r;
  }
  return {ClassicalTest::Watson, sum + 1.0 / (12.0 * n), std::nullopt, std::nullopt};
}

double sobolev_score(std::span<const Point> points, int k) {
  if (k < 1) throw ParameterError("sobolev_score: k must be positive");
  const std::size_t n = points.size();
  double off = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = j + 1; l < n; ++l) {
      const auto& a = points[j];
      const auto& b = points[l];
      off += numerics::legendre(k, a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
    }
  }
  const auto nd = static_cast<double>(n);
  return (2.0 * k + 1.0) / nd * (nd + 2.0 * off);
}

ClassicalStatistic jupp(std::span<const Point> points) {
  constexpr int kMaxOrder = 5;
  if (points.size() < 2) throw ParameterError("Jupp's test needs n >= 2");
  require_members(points, SpaceKind::Sphere);

  // One pass over the pairs for all orders; P_k(1) = 1 on the diagonal.
  const std::size_t n = points.size();
  std::array<double, kMaxOrder + 1> off{};
  std::array<double, kMaxOrder + 1> p{};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = j + 1; l < n; ++l) {
      const auto& a = points[j];
      const auto& b = points[l];
      numerics::legendre_all(kMaxOrder, a[0] * b[0] + a[1] * b[1] + a[2] * b[2], p.data());
      for (int k = 1; k <= kMaxOrder; ++k) off[k] += p[k];
    }
  }
  const auto nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  int best_k = 1;
  double best_b = -std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (int k = 1; k <= kMaxOrder; ++k) {
    const double s = (2.0 * k + 1.0) / nd * (nd + 2.0 * off[k]);
    const double b = s - k * (k + 2.0) * log_n;
    if (b > best_b) {
      best_b = b;
      best_k = k;
      best_s = s;
    }
  }
  return {ClassicalTest::Jupp, best_s, std::nullopt, best_k};
}

ClassicalStatistic evaluate(ClassicalTest test, std::span<const Point> points) {
  switch (test) {
    case ClassicalTest::DB: return db_statistic(points);
    case ClassicalTest::MS: return ms_statistic(points);
    case ClassicalTest::RaCircle: return rayleigh_circle(points);
    case ClassicalTest::RaSphere: return rayleigh_sphere(points);
    case ClassicalTest::Kuiper: return kuiper(points);
    case ClassicalTest::Watson: return watson(points);
    case ClassicalTest::Jupp: return jupp(points);
  }
  throw ParameterError("unknown classical test");
}

double asymptotic_critical_value(ClassicalTest test, double level, std::size_t n) {
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("level must lie in (0,1)");
  switch (test) {
    case ClassicalTest::DB:
      return numerics::kolmogorov_quantile(1.0 - level);
    case ClassicalTest::MS: {
      if (n < 2) throw ParameterError("MS limit law needs n >= 2");
      const double ln = std::log(static_cast<double>(n));
      return (numerics::gumbel_quantile(1.0 - level) + ln + std::log(ln)) / static_cast<double>(n);
    }
    case ClassicalTest::RaCircle:
    case ClassicalTest::RaSphere:
    case ClassicalTest::Jupp:
      return numerics::chi_squared_quantile(3.0, 1.0 - level);
    case ClassicalTest::Kuiper:
    case ClassicalTest::Watson:
      throw Unsupported(std::string(to_string(test)) +
                        " has no built-in asymptotic law; use simulated critical values");
  }
  throw ParameterError("unknown classical test");
}

}  // namespace nnfit
