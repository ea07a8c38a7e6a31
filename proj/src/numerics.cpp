#include "nnfit/numerics.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "nnfit/error.hpp"

namespace nnfit::numerics {

double legendre(int k, double t) {
  if (k < 0) throw ParameterError("legendre: negative degree");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0) * t * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void legendre_all(int k, double t, double* out) {
  out[0] = 1.0;
  if (k == 0) return;
  out[1] = t;
  for (int j = 1; j < k; ++j) {
    out[j + 1] = ((2.0 * j + 1.0) * t * out[j] - j * out[j - 1]) / (j + 1.0);
  }
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 1; j < n; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 1; j < n; ++j) {
      const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double log_gamma_ratio(int k, double a) {
  return std::lgamma(k + a) - std::lgamma(static_cast<double>(k));
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    // Jacobi theta form, fast for small x.
    const double f = -std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k <= 20; k += 2) sum += std::exp(k * k * f);
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * sum;
}

double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("kolmogorov_quantile: p not in (0,1)");
  auto f = [p](double x) { return kolmogorov_cdf(x) - p; };
  boost::uintmax_t max_iter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      f, 0.05, 5.0, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (lo + hi);
}

double chi_squared_quantile(double dof, double p) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double gumbel_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("gumbel_quantile: p not in (0,1)");
  return -std::log(-std::log(p));
}

}  // namespace nnfit::numerics
