#include "nnfit/scores.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nnfit/error.hpp"
#include "nnfit/numerics.hpp"

namespace nnfit {

namespace {

// log(v_m * n * d^m); -inf for coincident points.
double log_ball_volume(double d, double n, const Space& space) {
  const double dm = space.intrinsic_dim == 1 ? d : d * d;
  return std::log(space.unit_ball_volume * n * dm);
}

double score_term(double log_volume, double alpha) {
  return std::exp(alpha * log_volume);
}

void check_sample(const SampleSet& sample, const ScoreParams& params) {
  validate(params);
  if (sample.size() <= static_cast<std::size_t>(params.J)) {
    throw ParameterError("statistic needs n > J (n=" + std::to_string(sample.size()) +
                         ", J=" + std::to_string(params.J) + ")");
  }
}

}  // namespace

void validate(const ScoreParams& params, bool allow_alpha_one) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw ParameterError("alpha must be a positive finite number");
  }
  if (!allow_alpha_one && params.alpha == 1.0) {
    throw ParameterError(
        "alpha = 1 is not allowed: the limit of T/n is then the same for every "
        "density, so the test has no power (alpha must differ from 1)");
  }
  if (params.J < 1) throw ParameterError("J must be at least 1");
}

double rescaled_score(std::span<const double> neighbor_distances, std::size_t n,
                      const ScoreParams& params, const Space& space) {
  if (neighbor_distances.size() < static_cast<std::size_t>(params.J)) {
    throw ParameterError("rescaled_score: fewer than J neighbor distances");
  }
  const double nn = static_cast<double>(n);
  double sum = 0.0;
  for (int k = 0; k < params.J; ++k) {
    sum += score_term(log_ball_volume(neighbor_distances[k], nn, space), params.alpha);
  }
  return sum;
}

double rescaled_score(std::size_t point_index, const NeighborDistances& neighbors,
                      std::size_t n, const ScoreParams& params, const Space& space) {
  if (point_index >= neighbors.size()) {
    throw ParameterError("rescaled_score: point index out of range");
  }
  return rescaled_score(neighbors[point_index], n, params, space);
}

StatisticResult statistic(const SampleSet& sample, const ScoreParams& params) {
  check_sample(sample, params);
  const std::size_t n = sample.size();
  const auto neighbors = knn_fast(sample, static_cast<std::size_t>(params.J));
  const double weight = std::pow(sample.space().null_density, params.alpha);

  StatisticResult result;
  result.per_point_scores.resize(n);
  result.weights.assign(n, weight);
  for (std::size_t i = 0; i < n; ++i) {
    result.per_point_scores[i] = rescaled_score(neighbors[i], n, params, sample.space());
    result.T += result.per_point_scores[i] * result.weights[i];
  }
  result.T_over_n = result.T / static_cast<double>(n);
  return result;
}

double weighted_measure(const SampleSet& sample, const ScoreParams& params,
                        const PointFunction& h) {
  check_sample(sample, params);
  const std::size_t n = sample.size();
  const auto neighbors = knn_fast(sample, static_cast<std::size_t>(params.J));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rescaled_score(neighbors[i], n, params, sample.space()) * h(sample[i]);
  }
  return total;
}

double null_limit_mean(const ScoreParams& params) {
  validate(params, /*allow_alpha_one=*/true);
  double sum = 0.0;
  for (int k = 1; k <= params.J; ++k) {
    sum += std::exp(numerics::log_gamma_ratio(k, params.alpha));
  }
  return sum;
}

double alpha_entropy(const Space& space, double alpha, const DensityRatio& ratio) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  const double power = 1.0 - alpha;
  auto integrand = [&](const Point& x) {
    const double r = ratio(x);
    if (!(r >= 0.0)) throw InvalidInput("density ratio must be nonnegative");
    return std::pow(r, power);
  };

  switch (space.kind) {
    case SpaceKind::Circle: {
      constexpr int kNodes = 4096;
      double sum = 0.0;
      for (int i = 0; i < kNodes; ++i) {
        const double t = 2.0 * std::numbers::pi * i / kNodes;
        sum += integrand({std::cos(t), std::sin(t), 0.0});
      }
      return sum / kNodes;
    }
    case SpaceKind::Sphere: {
      static const numerics::QuadratureRule rule = numerics::gauss_legendre(256);
      constexpr int kAzimuth = 512;
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i];
        const double s = std::sqrt(1.0 - z * z);
        double ring = 0.0;
        for (int j = 0; j < kAzimuth; ++j) {
          const double phi = 2.0 * std::numbers::pi * j / kAzimuth;
          ring += integrand({s * std::cos(phi), s * std::sin(phi), z});
        }
        sum += rule.weights[i] * ring / kAzimuth;
      }
      return 0.5 * sum;
    }
    case SpaceKind::TorusSquare: {
      static const numerics::QuadratureRule rule = numerics::gauss_legendre(256);
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = 0.5 * (rule.nodes[i] + 1.0);
        double row = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          row += rule.weights[j] * integrand({x, 0.5 * (rule.nodes[j] + 1.0), 0.0});
        }
        sum += rule.weights[i] * row;
      }
      return 0.25 * sum;
    }
  }
  throw ParameterError("unknown space kind");
}

LimitValue lln_limit(const Space& space, const ScoreParams& params,
                     const DensityRatio& ratio) {
  LimitValue v;
  v.gamma_sum = null_limit_mean(params);
  v.entropy_integral = alpha_entropy(space, params.alpha, ratio);
  v.product = v.gamma_sum * v.entropy_integral;
  return v;
}

std::vector<double> normalized_statistics(const NeighborDistances& neighbors,
                                          const Space& space,
                                          std::span<const double> alphas,
                                          std::span<const int> Js) {
  const std::size_t n = neighbors.size();
  int max_j = 0;
  for (int J : Js) {
    if (J < 1 || static_cast<std::size_t>(J) > neighbors.neighbors()) {
      throw ParameterError("normalized_statistics: J exceeds the neighbor table");
    }
    max_j = std::max(max_j, J);
  }
  for (double a : alphas) validate(ScoreParams{a, 1}, /*allow_alpha_one=*/true);

  const double nn = static_cast<double>(n);
  std::vector<double> weights(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    weights[a] = std::pow(space.null_density, alphas[a]);
  }
  std::vector<double> totals(alphas.size() * Js.size(), 0.0);
  std::vector<double> logs(max_j);
  std::vector<double> partial(max_j + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = neighbors[i];
    for (int k = 0; k < max_j; ++k) logs[k] = log_ball_volume(row[k], nn, space);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      partial[0] = 0.0;
      for (int k = 0; k < max_j; ++k) partial[k + 1] = partial[k] + score_term(logs[k], alphas[a]);
      for (std::size_t j = 0; j < Js.size(); ++j) {
        totals[a * Js.size() + j] += partial[Js[j]] * weights[a];
      }
    }
  }
  for (double& t : totals) t /= nn;
  return totals;
}

}  // namespace nnfit
