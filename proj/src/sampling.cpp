#include "nnfit/sampling.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nnfit/error.hpp"
#include "nnfit/numerics.hpp"

namespace nnfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

bool is_unit(const Point& v) { return std::abs(std::sqrt(dot(v, v)) - 1.0) <= 1e-9; }

bool in_unit_square(double x, double y) {
  return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
}

// Two unit vectors completing mu to an orthonormal frame.
std::pair<Point, Point> frame(const Point& mu) {
  const Point helper = std::abs(mu[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
  Point e1{helper[1] * mu[2] - helper[2] * mu[1], helper[2] * mu[0] - helper[0] * mu[2],
           helper[0] * mu[1] - helper[1] * mu[0]};
  const double len = std::sqrt(dot(e1, e1));
  for (double& c : e1) c /= len;
  const Point e2{mu[1] * e1[2] - mu[2] * e1[1], mu[2] * e1[0] - mu[0] * e1[2],
                 mu[0] * e1[1] - mu[1] * e1[0]};
  return {e1, e2};
}

Point uniform_point(SpaceKind kind, RngStream& rng) {
  switch (kind) {
    case SpaceKind::TorusSquare: {
      const double x = rng.uniform();
      return {x, rng.uniform(), 0.0};
    }
    case SpaceKind::Circle: {
      const double t = kTwoPi * rng.uniform();
      return {std::cos(t), std::sin(t), 0.0};
    }
    case SpaceKind::Sphere: {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = kTwoPi * rng.uniform();
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      return {s * std::cos(phi), s * std::sin(phi), z};
    }
  }
  return {};
}

// Angle of a von Mises(0, kappa) variate via the Best-Fisher wrapped
// Cauchy envelope.
double von_mises_angle(double kappa, RngStream& rng) {
  if (kappa < 1e-8) return std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  const double s = 0.5 / kappa;
  const double r = s + std::sqrt(1.0 + s * s);
  double w;
  for (;;) {
    const double z = std::cos(std::numbers::pi * rng.uniform());
    w = (1.0 + r * z) / (r + z);
    const double y = kappa * (r - w);
    const double v = rng.uniform_open();
    if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) break;
  }
  const double angle = std::acos(std::clamp(w, -1.0, 1.0));
  return rng.uniform() < 0.5 ? -angle : angle;
}

Point vmf_point(SpaceKind kind, const Point& mu, double kappa, RngStream& rng) {
  if (kind == SpaceKind::Circle) {
    const double t = std::atan2(mu[1], mu[0]) + von_mises_angle(kappa, rng);
    return {std::cos(t), std::sin(t), 0.0};
  }
  // Exact inverse transform for the cosine to mu.
  const double u = rng.uniform();
  double w = 1.0 + std::log1p((1.0 - u) * std::expm1(-2.0 * kappa)) / kappa;
  w = std::clamp(w, -1.0, 1.0);
  const double phi = kTwoPi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  const auto [e1, e2] = frame(mu);
  Point x;
  for (int i = 0; i < 3; ++i) {
    x[i] = w * mu[i] + s * (std::cos(phi) * e1[i] + std::sin(phi) * e2[i]);
  }
  const double len = std::sqrt(dot(x, x));
  for (double& c : x) c /= len;
  return x;
}

double kent_quadratic(const Kent& k, const Point& x) {
  const double a = dot(x, k.tau1);
  const double b = dot(x, k.tau2);
  return a * a - b * b;
}

void validate_vmf(const Space& space, const VonMisesFisher& v) {
  if (space.kind == SpaceKind::TorusSquare) {
    throw Unsupported("VMF is defined on the circle and sphere only");
  }
  if (!(v.kappa > 0.0)) throw ParameterError("VMF: kappa must be positive");
  if (!is_unit(v.mu)) throw ParameterError("VMF: mu must be a unit vector");
  if (space.kind == SpaceKind::Circle && v.mu[2] != 0.0) {
    throw ParameterError("VMF on the circle needs a planar mu");
  }
}

}  // namespace

std::string label(const AlternativeSpec& spec) {
  return std::visit(overloaded{
                        [](const UniformNull&) { return std::string("uniform"); },
                        [](const VonMisesFisher&) { return std::string("MF"); },
                        [](const BimodalVonMisesFisher&) { return std::string("BMF"); },
                        [](const Kent&) { return std::string("Kent"); },
                        [](const Contamination&) { return std::string("CON"); },
                        [](const Clustering&) { return std::string("CLU"); },
                    },
                    spec);
}

void validate(const Space& space, const AlternativeSpec& spec) {
  std::visit(
      overloaded{
          [](const UniformNull&) {},
          [&](const VonMisesFisher& v) { validate_vmf(space, v); },
          [&](const BimodalVonMisesFisher& b) {
            if (space.kind != SpaceKind::Circle) {
              throw Unsupported("BMF is defined on the circle only");
            }
            if (!(b.kappa > 0.0)) throw ParameterError("BMF: kappa must be positive");
          },
          [&](const Kent& k) {
            if (space.kind != SpaceKind::Sphere) {
              throw Unsupported("Kent is defined on the sphere only");
            }
            if (!(k.kappa >= 0.0) || !(k.beta >= 0.0)) {
              throw ParameterError("Kent: kappa and beta must be nonnegative");
            }
            if (!is_unit(k.mu) || !is_unit(k.tau1) || !is_unit(k.tau2) ||
                std::abs(dot(k.mu, k.tau1)) > 1e-9 || std::abs(dot(k.mu, k.tau2)) > 1e-9 ||
                std::abs(dot(k.tau1, k.tau2)) > 1e-9) {
              throw ParameterError("Kent: mu, tau1, tau2 must be orthonormal");
            }
          },
          [&](const Contamination& c) {
            if (space.kind != SpaceKind::TorusSquare) {
              throw Unsupported("CON is defined on the unit square only");
            }
            if (c.eps1 < 0.0 || c.eps2 < 0.0 || !(c.eps1 + c.eps2 < 1.0)) {
              throw ParameterError("CON: need eps1, eps2 >= 0 and eps1 + eps2 < 1");
            }
            if (!(c.sigma1 > 0.0) || !(c.sigma2 > 0.0)) {
              throw ParameterError("CON: sigmas must be positive");
            }
          },
          [&](const Clustering& c) {
            if (space.kind != SpaceKind::TorusSquare) {
              throw Unsupported("CLU is defined on the unit square only");
            }
            if (c.clusters < 1) throw ParameterError("CLU: need at least one cluster");
            if (!(c.radius > 0.0)) throw ParameterError("CLU: radius must be positive");
          },
      },
      spec);
}

SampleSet sample(const Space& space, const AlternativeSpec& spec, std::size_t n,
                 RngStream& rng) {
  validate(space, spec);
  if (n < 2) throw ParameterError("sample: n must be at least 2");
  std::vector<Point> pts;
  pts.reserve(n);
  const SpaceKind kind = space.kind;

  std::visit(
      overloaded{
          [&](const UniformNull&) {
            for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_point(kind, rng));
          },
          [&](const VonMisesFisher& v) {
            for (std::size_t i = 0; i < n; ++i) pts.push_back(vmf_point(kind, v.mu, v.kappa, rng));
          },
          [&](const BimodalVonMisesFisher& b) {
            for (std::size_t i = 0; i < n; ++i) {
              const Point mu = rng.uniform() < 0.5 ? Point{1, 0, 0} : Point{-1, 0, 0};
              pts.push_back(vmf_point(kind, mu, b.kappa, rng));
            }
          },
          [&](const Kent& k) {
            // VMF(kappa) envelope; exp(beta q - beta) <= 1 since q <= 1.
            while (pts.size() < n) {
              const Point x = k.kappa > 0.0 ? vmf_point(kind, k.mu, k.kappa, rng)
                                            : uniform_point(kind, rng);
              const double accept = std::exp(k.beta * (kent_quadratic(k, x) - 1.0));
              if (rng.uniform() < accept) pts.push_back(x);
            }
          },
          [&](const Contamination& c) {
            const double p_uniform = 1.0 - c.eps1 - c.eps2;
            while (pts.size() < n) {
              const double u = rng.uniform();
              double x, y;
              if (u < p_uniform) {
                x = rng.uniform();
                y = rng.uniform();
              } else if (u < p_uniform + c.eps1) {
                x = c.c1[0] + c.sigma1 * rng.normal();
                y = c.c1[1] + c.sigma1 * rng.normal();
              } else {
                x = c.c2[0] + c.sigma2 * rng.normal();
                y = c.c2[1] + c.sigma2 * rng.normal();
              }
              // Conditioning on the square: redraw the whole mixture.
              if (in_unit_square(x, y)) pts.push_back({x, y, 0.0});
            }
          },
          [&](const Clustering& c) {
            std::vector<Point> centers(c.clusters);
            for (auto& ctr : centers) ctr = uniform_point(SpaceKind::TorusSquare, rng);
            const std::size_t base = n / c.clusters;
            const std::size_t extra = n % c.clusters;
            for (std::size_t k = 0; k < c.clusters; ++k) {
              const std::size_t count = base + (k < extra ? 1 : 0);
              for (std::size_t j = 0; j < count; ++j) {
                const double r = c.radius * std::sqrt(rng.uniform());
                const double t = kTwoPi * rng.uniform();
                double x = centers[k][0] + r * std::cos(t);
                double y = centers[k][1] + r * std::sin(t);
                if (!in_unit_square(x, y)) {
                  x = rng.uniform();
                  y = rng.uniform();
                }
                pts.push_back({x, y, 0.0});
              }
            }
          },
      },
      spec);
  return SampleSet(space, std::move(pts));
}

double kent_normalizer(const Kent& k) {
  // Gauss-Legendre in the polar cosine, trapezoid in azimuth.
  static const numerics::QuadratureRule rule = numerics::gauss_legendre(256);
  constexpr int kAzimuth = 512;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = rule.nodes[i];
    const double s = std::sqrt(1.0 - z * z);
    double ring = 0.0;
    for (int j = 0; j < kAzimuth; ++j) {
      const double phi = kTwoPi * j / kAzimuth;
      const Point x{s * std::cos(phi), s * std::sin(phi), z};
      ring += std::exp(k.kappa * dot(k.mu, x) + k.beta * kent_quadratic(k, x));
    }
    total += rule.weights[i] * ring / kAzimuth;
  }
  return 0.5 * total;
}

Density::Density(const Space& space, const AlternativeSpec& spec)
    : space_(space), spec_(spec) {
  validate(space, spec);
  std::visit(overloaded{
                 [](const UniformNull&) {},
                 [&](const VonMisesFisher& v) {
                   const double half = 0.5 * space_.ambient_dim;
                   log_norm_ = (half - 1.0) * std::log(0.5 * v.kappa) - std::lgamma(half) -
                               std::log(boost::math::cyl_bessel_i(half - 1.0, v.kappa));
                 },
                 [&](const BimodalVonMisesFisher& b) {
                   log_norm_ = -std::log(boost::math::cyl_bessel_i(0.0, b.kappa));
                 },
                 [&](const Kent& k) { log_norm_ = -std::log(kent_normalizer(k)); },
                 [](const Contamination&) {
                   throw Unsupported("CON has no tractable density");
                 },
                 [](const Clustering&) {
                   throw Unsupported("CLU is not an i.i.d. model and has no density");
                 },
             },
             spec_);
}

double Density::operator()(const Point& x) const {
  return std::visit(
      overloaded{
          [](const UniformNull&) { return 1.0; },
          [&](const VonMisesFisher& v) {
            return std::exp(log_norm_ + v.kappa * dot(v.mu, x));
          },
          [&](const BimodalVonMisesFisher& b) {
            return 0.5 * (std::exp(log_norm_ + b.kappa * x[0]) +
                          std::exp(log_norm_ - b.kappa * x[0]));
          },
          [&](const Kent& k) {
            return std::exp(log_norm_ + k.kappa * dot(k.mu, x) + k.beta * kent_quadratic(k, x));
          },
          [](const Contamination&) { return 0.0; },
          [](const Clustering&) { return 0.0; },
      },
      spec_);
}

double density(const Space& space, const AlternativeSpec& spec, const Point& x) {
  return Density(space, spec)(x);
}

}  // namespace nnfit
