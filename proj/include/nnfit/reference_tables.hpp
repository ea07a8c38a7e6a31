#pragma once

#include <array>
#include <string>
#include <vector>

namespace nnfit::reference {

// Neighbor orders of the quantile and power table columns.
inline constexpr std::array<int, 11> kQuantileJs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15};
inline constexpr std::array<int, 13> kPowerJs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25};

// Lower 5% quantile of n^{-1}T for alpha < 1, upper 95% quantile otherwise.
struct QuantileRow {
  double alpha;
  int n;
  std::array<double, 11> values;
};

// Rejection rates in percent.
struct PowerRow {
  std::string alternative;
  double alpha;
  int n;
  std::array<double, 13> values;
};

struct ClassicalPowerRow {
  std::string alternative;
  int n;
  std::vector<double> values;
};

// Rows in published order.
const std::vector<QuantileRow>& square_quantiles();
const std::vector<QuantileRow>& circle_quantiles();
const std::vector<QuantileRow>& sphere_quantiles();

const std::vector<PowerRow>& square_nn_power();
const std::vector<PowerRow>& circle_nn_power();
const std::vector<PowerRow>& sphere_nn_power();

// Columns: DB, MS on the square; RA_CIRCLE, KUIPER, WATSON on the circle;
// RA_SPHERE, JUPP on the sphere.
const std::vector<ClassicalPowerRow>& square_classical_power();
const std::vector<ClassicalPowerRow>& circle_classical_power();
const std::vector<ClassicalPowerRow>& sphere_classical_power();

}  // namespace nnfit::reference
