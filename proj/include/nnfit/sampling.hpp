#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "nnfit/geometry.hpp"
#include "nnfit/rng.hpp"

namespace nnfit {

struct UniformNull {};

// Von Mises-Fisher on the circle (mu in the plane) or the sphere.
struct VonMisesFisher {
  Point mu{1.0, 0.0, 0.0};
  double kappa = 0.5;
};

// Equal-weight mixture of VMF(kappa) around (1,0) and (-1,0) on the circle.
struct BimodalVonMisesFisher {
  double kappa = 1.0;
};

// Kent (FB5) distribution on the sphere; density proportional to
// exp(kappa mu'x + beta x'(tau1 tau1' - tau2 tau2')x).
struct Kent {
  double kappa = 0.25;
  double beta = 2.0;
  Point mu{1.0, 0.0, 0.0};
  Point tau1{0.0, 1.0, 0.0};
  Point tau2{0.0, 0.0, 1.0};
};

// Uniform background plus two isotropic normal sources, conditioned on
// the unit square.
struct Contamination {
  double eps1 = 0.135;
  double eps2 = 0.24;
  Point c1{0.25, 0.25, 0.0};
  Point c2{0.7, 0.7, 0.0};
  double sigma1 = 0.09;
  double sigma2 = 0.12;
};

// Uniform cluster centers with points spread uniformly in small discs.
struct Clustering {
  std::size_t clusters = 10;
  double radius = 0.05;
};

using AlternativeSpec = std::variant<UniformNull, VonMisesFisher,
                                     BimodalVonMisesFisher, Kent,
                                     Contamination, Clustering>;

// Short table label: uniform, MF, BMF, Kent, CON, CLU.
std::string label(const AlternativeSpec& spec);

// Throws ParameterError/Unsupported if spec is malformed or not defined
// on the space.
void validate(const Space& space, const AlternativeSpec& spec);

// n points drawn from spec. Deterministic in the stream's key.
SampleSet sample(const Space& space, const AlternativeSpec& spec,
                 std::size_t n, RngStream& stream);

// Density with respect to the normalized uniform measure on the space.
// The Kent normalizing constant is obtained once by spherical quadrature.
class Density {
 public:
  Density(const Space& space, const AlternativeSpec& spec);
  double operator()(const Point& x) const;

 private:
  Space space_;
  AlternativeSpec spec_;
  double log_norm_ = 0.0;  // log of the normalizing factor
};

// Convenience wrapper; builds a Density per call.
double density(const Space& space, const AlternativeSpec& spec, const Point& x);

// Kent normalizer relative to the uniform measure:
// (1/4pi) * integral of exp(kappa mu'x + beta q(x)) over the sphere.
double kent_normalizer(const Kent& kent);

}  // namespace nnfit
