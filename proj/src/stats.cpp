#include "nnfit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "nnfit/error.hpp"
#include "nnfit/numerics.hpp"

namespace nnfit::stats {

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ParameterError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile level outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ParameterError("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

namespace {

// Central moments m2, m3, m4 (denominator n).
struct Moments {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(std::span<const double> xs) {
  const double mu = mean(xs);
  Moments m;
  for (double x : xs) {
    const double d = x - mu;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const auto n = static_cast<double>(xs.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

}  // namespace

double standard_deviation(std::span<const double> xs) {
  if (xs.size() < 2) throw ParameterError("standard deviation needs two values");
  const auto m = central_moments(xs);
  const auto n = static_cast<double>(xs.size());
  return std::sqrt(m.m2 * n / (n - 1.0));
}

double skewness(std::span<const double> xs) {
  const auto m = central_moments(xs);
  return m.m2 > 0.0 ? m.m3 / std::pow(m.m2, 1.5) : 0.0;
}

double excess_kurtosis(std::span<const double> xs) {
  const auto m = central_moments(xs);
  return m.m2 > 0.0 ? m.m4 / (m.m2 * m.m2) - 3.0 : 0.0;
}

AndersonDarling anderson_darling_normal(std::span<const double> xs) {
  if (xs.size() < 8) throw ParameterError("Anderson-Darling needs at least 8 values");
  const double mu = mean(xs);
  const double sd = standard_deviation(xs);
  std::vector<double> z(xs.begin(), xs.end());
  for (double& v : z) v = (v - mu) / sd;
  std::sort(z.begin(), z.end());

  const std::size_t n = z.size();
  const auto nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::clamp(numerics::standard_normal_cdf(z[i]), 1e-300, 1.0);
    const double hi = std::clamp(1.0 - numerics::standard_normal_cdf(z[n - 1 - i]), 1e-300, 1.0);
    sum += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
  }
  AndersonDarling out;
  out.a2 = -nd - sum / nd;
  const double a = out.a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
  out.a2_star = a;
  if (a >= 0.6) {
    out.p_value = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    out.p_value = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    out.p_value = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    out.p_value = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  out.p_value = std::clamp(out.p_value, 0.0, 1.0);
  return out;
}

KolmogorovSmirnov ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("two-sample KS needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KolmogorovSmirnov out;
  out.d = d;
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  out.p_value = std::clamp(1.0 - numerics::kolmogorov_cdf(lambda), 0.0, 1.0);
  return out;
}

}  // namespace nnfit::stats
