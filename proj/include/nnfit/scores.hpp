#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nnfit/geometry.hpp"

namespace nnfit {

// Power alpha of the ball volumes and number J of neighbors entering the
// volume score.
struct ScoreParams {
  double alpha;
  int J;
};

// alpha in (0, inf), J >= 1. The test itself additionally requires
// alpha != 1: at alpha = 1 the limit of T/n no longer depends on the
// sampling density.
void validate(const ScoreParams& params, bool allow_alpha_one = false);

struct StatisticResult {
  double T = 0.0;
  double T_over_n = 0.0;
  std::vector<double> per_point_scores;
  std::vector<double> weights;  // f0(X_i)^alpha
};

// Limit of T/n under a density f: gamma_sum * entropy_integral.
struct LimitValue {
  double gamma_sum = 0.0;
  double entropy_integral = 0.0;
  double product = 0.0;
};

// Density of the sampling law relative to the null density, f / f0.
using DensityRatio = std::function<double(const Point&)>;
using PointFunction = std::function<double(const Point&)>;

// sum_{k<=J} (v_m * n * d_k^m)^alpha over the point's ascending neighbor
// distances d_1..d_J.
double rescaled_score(std::span<const double> neighbor_distances, std::size_t n,
                      const ScoreParams& params, const Space& space);
double rescaled_score(std::size_t point_index, const NeighborDistances& neighbors,
                      std::size_t n, const ScoreParams& params, const Space& space);

// T = sum_i score(X_i) * f0(X_i)^alpha.
StatisticResult statistic(const SampleSet& sample, const ScoreParams& params);

// sum_i score(X_i) * h(X_i). Equals statistic().T for h = f0^alpha.
double weighted_measure(const SampleSet& sample, const ScoreParams& params,
                        const PointFunction& h);

// sum_{k=1}^J Gamma(k + alpha) / Gamma(k): the limit of T/n under the null.
double null_limit_mean(const ScoreParams& params);

// Integral of f0^alpha f^{1-alpha} over the space, by fixed quadrature:
// 4096-node trapezoid on the circle, 256 x 512 Gauss-Legendre/trapezoid
// product on the sphere, 256 x 256 Gauss-Legendre on the square.
double alpha_entropy(const Space& space, double alpha, const DensityRatio& ratio);

LimitValue lln_limit(const Space& space, const ScoreParams& params,
                     const DensityRatio& ratio);

// T/n for every (alpha, J) pair from one neighbor table, laid out as
// result[a * Js.size() + j]. Each entry is bit-identical to
// statistic(sample, {alphas[a], Js[j]}).T_over_n.
std::vector<double> normalized_statistics(const NeighborDistances& neighbors,
                                          const Space& space,
                                          std::span<const double> alphas,
                                          std::span<const int> Js);

}  // namespace nnfit
