#pragma once

#include <span>
#include <vector>

namespace nnfit::stats {

// Order-statistic linear interpolation (Hyndman-Fan type 7) on sorted data.
double quantile_type7(std::span<const double> sorted, double p);

double mean(std::span<const double> xs);
// Sample standard deviation (denominator n - 1).
double standard_deviation(std::span<const double> xs);
double skewness(std::span<const double> xs);
double excess_kurtosis(std::span<const double> xs);

struct AndersonDarling {
  double a2 = 0.0;       // statistic on standardized data
  double a2_star = 0.0;  // small-sample corrected, mean/sd estimated
  double p_value = 0.0;
};

// Normality test with estimated mean and variance (D'Agostino-Stephens
// p-value approximation).
AndersonDarling anderson_darling_normal(std::span<const double> xs);

struct KolmogorovSmirnov {
  double d = 0.0;
  double p_value = 0.0;
};

// Two-sample test with the asymptotic Kolmogorov p-value.
KolmogorovSmirnov ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace nnfit::stats
