#pragma once

#include <vector>

namespace nnfit::numerics {

// Legendre polynomial P_k(t) by the three-term recurrence
// (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}.
double legendre(int k, double t);

// P_0(t), ..., P_k(t) written to out[0..k].
void legendre_all(int k, double t, double* out);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// log(Gamma(k + a) / Gamma(k)) for k >= 1, a > -k.
double log_gamma_ratio(int k, double a);

// Kolmogorov limit distribution P(K <= x), K = sup |Brownian bridge|.
double kolmogorov_cdf(double x);
double kolmogorov_quantile(double p);

double chi_squared_quantile(double dof, double p);
double standard_normal_cdf(double x);

// Quantile of the standard Gumbel law exp(-exp(-x)).
double gumbel_quantile(double p);

}  // namespace nnfit::numerics
