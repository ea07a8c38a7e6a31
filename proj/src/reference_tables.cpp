// Published simulation results used as the comparison baseline of the
// table reproduction. Percentages for rejection rates (100 where the
// source marks full power), raw values for quantiles.

#include "nnfit/reference_tables.hpp"

namespace nnfit::reference {

const std::vector<QuantileRow>& square_quantiles() {
  static const std::vector<QuantileRow> rows{
      {0.5, 50, {0.78, 2.02, 3.58, 5.43, 7.52, 9.82, 12.32, 15.01, 17.88, 20.91, 38.24}},
      {0.5, 100, {0.81, 2.07, 3.67, 5.54, 7.66, 9.99, 12.52, 15.23, 18.12, 21.18, 38.67}},
      {0.5, 200, {0.83, 2.12, 3.73, 5.62, 7.76, 10.11, 12.66, 15.40, 18.31, 21.38, 38.97}},
      {1.5, 50, {1.74, 5.59, 12.10, 21.70, 34.70, 51.48, 72.29, 97.46, 127.19, 161.76, 414.95}},
      {1.5, 100, {1.63, 5.33, 11.67, 21.04, 33.80, 50.30, 70.84, 95.67, 125.04, 159.20, 409.94}},
      {1.5, 200, {1.54, 5.14, 11.33, 20.53, 33.11, 49.37, 69.63, 94.19, 123.27, 157.12, 405.75}},
      {2, 50, {2.90, 10.18, 24.03, 46.44, 79.42, 124.97, 185.22, 262.12, 357.71, 473.86, 1435.79}},
      {2, 100, {2.65, 9.62, 23.06, 45.02, 77.52, 122.63, 182.27, 258.48, 353.32, 468.77, 1425.60}},
      {2, 200, {2.47, 9.17, 22.25, 43.72, 75.65, 120.05, 178.89, 254.30, 348.28, 462.78, 1413.86}},
      {3, 50, {11.03, 44.74, 121.28, 266.69, 511.32, 891.65, 1449.73, 2233.59, 3295.24, 4692.49, 19245.32}},
      {3, 100, {9.94, 41.83, 116.04, 258.27, 501.19, 882.49, 1445.57, 2240.49, 3324.52, 4754.26, 19656.36}},
      {3, 200, {8.87, 38.72, 109.44, 246.81, 482.75, 855.10, 1409.72, 2193.28, 3264.21, 4685.00, 19603.93}},
      {4, 50, {54.72, 257.57, 788.16, 1930.49, 4070.50, 7751.35, 13650.51, 22653.06, 35839.35, 54392.65, 291880.50}},
      {4, 100, {50.79, 242.73, 758.58, 1880.32, 4024.20, 7785.46, 13870.01, 23246.64, 37053.41, 56712.60, 311282.60}},
      {4, 200, {45.04, 222.23, 704.17, 1776.53, 3848.90, 7489.95, 13461.61, 22687.94, 36382.98, 55935.54, 312608.60}},
      {5, 50, {312.65, 1734.80, 6015.97, 16205.09, 37517.20, 77431.40, 147116.35, 260944.95, 439900.80, 707981.50, 4871049.50}},
      {5, 100, {306.50, 1698.35, 5908.46, 16242.55, 37930.64, 79553.08, 153602.30, 276095.80, 471859.40, 768763.70, 5476554.00}},
      {5, 200, {281.05, 1570.43, 5554.40, 15449.12, 36579.58, 77266.56, 149773.42, 271403.80, 465433.00, 763477.00, 5557572.00}},
  };
  return rows;
}

const std::vector<QuantileRow>& circle_quantiles() {
  // The alpha = 1.5 block is printed with n labels 50, 200, 100; its values
  // decrease in n like every other block, so they are keyed 50, 100, 200.
  static const std::vector<QuantileRow> rows{
      {0.5, 50, {0.79, 2.03, 3.60, 5.45, 7.54, 9.84, 12.33, 15.01, 17.86, 20.86, 37.98}},
      {0.5, 100, {0.81, 2.08, 3.68, 5.56, 7.68, 10.02, 12.55, 15.27, 18.16, 21.21, 38.66}},
      {0.5, 200, {0.84, 2.12, 3.74, 5.64, 7.77, 10.13, 12.69, 15.42, 18.34, 21.42, 39.01}},
      {1.5, 50, {1.68, 5.38, 11.69, 20.98, 33.58, 49.76, 69.79, 93.90, 122.32, 155.15, 390.82}},
      {1.5, 100, {1.58, 5.21, 11.42, 20.63, 33.18, 49.41, 69.59, 93.96, 122.79, 156.32, 401.12}},
      {1.5, 200, {1.51, 5.06, 11.18, 20.28, 32.72, 48.84, 68.92, 93.23, 122.03, 155.58, 401.79}},
      {2, 50, {2.76, 9.75, 23.12, 44.77, 76.69, 120.49, 178.17, 251.15, 341.35, 450.18, 1319.84}},
      {2, 100, {2.57, 9.36, 22.56, 44.17, 76.19, 120.63, 179.35, 254.37, 347.56, 460.84, 1391.83}},
      {2, 200, {2.41, 9.02, 21.93, 43.20, 74.85, 118.92, 177.36, 252.23, 345.50, 459.05, 1401.71}},
      {3, 50, {10.60, 43.34, 118.42, 261.50, 501.48, 873.17, 1414.22, 2164.48, 3171.86, 4477.84, 17233.30}},
      {3, 100, {9.58, 41.12, 114.99, 257.73, 501.28, 884.43, 1447.28, 2241.43, 3320.23, 4740.78, 19363.40}},
      {3, 200, {8.70, 38.47, 109.41, 247.74, 485.79, 861.66, 1420.44, 2211.10, 3291.23, 4721.69, 19694.42}},
      {4, 50, {52.85, 250.52, 773.08, 1900.67, 4007.25, 7624.74, 13366.61, 21984.31, 34446.25, 51695.70, 254726.46}},
      {4, 100, {49.10, 239.95, 762.58, 1905.83, 4108.24, 7956.09, 14162.64, 23708.80, 37708.27, 57628.95, 309717.34}},
      {4, 200, {44.64, 222.63, 715.20, 1821.47, 3969.98, 7720.87, 13872.85, 23382.36, 37446.71, 57560.69, 318814.82}},
      {5, 50, {298.41, 1675.10, 5838.66, 15867.96, 36735.05, 75663.47, 142943.40, 250659.04, 417322.93, 662873.89, 4100114.35}},
      {5, 100, {297.07, 1704.63, 6065.70, 16774.09, 39537.66, 83076.29, 160282.91, 287664.48, 489264.08, 791912.14, 5477284.59}},
      {5, 200, {278.18, 1595.17, 5727.94, 15994.55, 38089.13, 80827.49, 156752.23, 284457.16, 487537.46, 797292.10, 5757879.69}},
  };
  return rows;
}

const std::vector<QuantileRow>& sphere_quantiles() {
  static const std::vector<QuantileRow> rows{
      {0.5, 50, {0.78, 2.01, 3.58, 5.43, 7.51, 9.82, 12.33, 15.02, 17.88, 20.92, 38.28}},
      {0.5, 100, {0.81, 2.07, 3.67, 5.54, 7.66, 9.99, 12.52, 15.24, 18.13, 21.19, 38.68}},
      {0.5, 200, {0.83, 2.12, 3.73, 5.62, 7.76, 10.11, 12.66, 15.40, 18.31, 21.39, 38.97}},
      {1.5, 50, {1.74, 5.57, 12.07, 21.64, 34.62, 51.35, 72.12, 97.19, 126.83, 161.28, 413.52}},
      {1.5, 100, {1.63, 5.33, 11.66, 21.04, 33.81, 50.29, 70.78, 95.60, 124.97, 159.14, 409.60}},
      {1.5, 200, {1.54, 5.14, 11.34, 20.54, 33.11, 49.37, 69.63, 94.16, 123.21, 157.03, 405.72}},
      {2, 50, {2.89, 10.15, 23.98, 46.38, 79.42, 125.09, 185.38, 262.19, 357.62, 473.44, 1429.69}},
      {2, 100, {2.65, 9.63, 23.07, 45.00, 77.51, 122.55, 182.25, 258.53, 353.50, 469.04, 1425.90}},
      {2, 200, {2.46, 9.18, 22.24, 43.71, 75.61, 119.96, 178.79, 254.13, 348.09, 462.50, 1413.42}},
      {3, 50, {11.05, 44.70, 121.62, 267.35, 514.39, 899.85, 1465.00, 2259.71, 3334.17, 4753.49, 19354.84}},
      {3, 100, {9.88, 41.61, 115.67, 258.08, 501.29, 882.86, 1446.89, 2243.22, 3329.77, 4766.78, 19759.49}},
      {3, 200, {8.89, 38.78, 109.53, 247.04, 483.45, 856.25, 1409.95, 2195.31, 3266.71, 4688.33, 19641.06}},
      {4, 50, {55.17, 257.13, 789.21, 1934.64, 4099.03, 7841.76, 13896.74, 23139.96, 36671.41, 55854.21, 298772.54}},
      {4, 100, {50.44, 241.42, 756.21, 1882.42, 4046.14, 7822.84, 13949.15, 23382.01, 37302.88, 57241.48, 315602.34}},
      {4, 200, {45.06, 221.64, 706.06, 1778.94, 3853.76, 7503.19, 13470.18, 22738.34, 36479.18, 56091.39, 313949.22}},
      {5, 50, {312.86, 1751.03, 6086.85, 16525.35, 38243.32, 79307.62, 151325.83, 270378.36, 456890.66, 738839.85, 5085970.95}},
      {5, 100, {304.65, 1690.91, 5915.53, 16290.68, 38389.23, 80548.51, 155432.36, 279993.35, 478289.61, 780194.53, 5581455.18}},
      {5, 200, {285.05, 1578.28, 5582.39, 15450.00, 36521.11, 77144.17, 149839.80, 272028.17, 466294.26, 763822.88, 5578854.38}},
  };
  return rows;
}

const std::vector<PowerRow>& square_nn_power() {
  static const std::vector<PowerRow> rows{
      {"CON", 0.5, 50, {14, 22, 29, 36, 43, 48, 53, 56, 59, 61, 66, 65, 60}},
      {"CON", 0.5, 100, {19, 27, 36, 45, 53, 60, 66, 71, 76, 79, 90, 93, 94}},
      {"CON", 0.5, 200, {25, 38, 50, 60, 68, 75, 81, 86, 89, 91, 98, 99, 100}},
      {"CLU", 0.5, 50, {100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
      {"CLU", 0.5, 100, {100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
      {"CLU", 0.5, 200, {100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
      {"CON", 2, 50, {11, 11, 9, 6, 4, 3, 2, 2, 1, 1, 0, 0, 1}},
      {"CON", 2, 100, {21, 27, 29, 29, 26, 23, 19, 14, 10, 7, 1, 0, 0}},
      {"CON", 2, 200, {33, 50, 59, 65, 68, 70, 70, 69, 68, 66, 44, 14, 1}},
      {"CLU", 2, 50, {39, 40, 36, 29, 22, 16, 12, 8, 6, 5, 9, 12, 13}},
      {"CLU", 2, 100, {54, 52, 43, 33, 24, 17, 12, 8, 5, 4, 6, 10, 13}},
      {"CLU", 2, 200, {64, 59, 46, 32, 22, 14, 9, 5, 3, 2, 3, 6, 8}},
      {"CON", 5, 50, {13, 18, 19, 20, 20, 19, 17, 15, 14, 12, 10, 11, 13}},
      {"CON", 5, 100, {23, 34, 44, 51, 56, 59, 61, 63, 63, 63, 53, 35, 20}},
      {"CON", 5, 200, {36, 58, 74, 83, 89, 92, 94, 96, 97, 97, 98, 98, 98}},
      {"CLU", 5, 50, {54, 63, 65, 65, 63, 61, 59, 57, 55, 61, 64, 61, 56}},
      {"CLU", 5, 100, {78, 87, 88, 86, 85, 83, 80, 77, 74, 76, 83, 81, 81}},
      {"CLU", 5, 200, {93, 98, 97, 97, 96, 95, 93, 91, 89, 89, 94, 92, 92}},
  };
  return rows;
}

const std::vector<PowerRow>& circle_nn_power() {
  static const std::vector<PowerRow> rows{
      {"MF", 0.5, 50, {8, 9, 10, 12, 13, 15, 16, 18, 19, 21, 32, 42, 50}},
      {"MF", 0.5, 100, {10, 12, 13, 15, 17, 19, 20, 21, 23, 25, 34, 43, 53}},
      {"MF", 0.5, 200, {12, 15, 18, 20, 23, 25, 27, 30, 31, 33, 43, 54, 63}},
      {"BMF", 0.5, 50, {28, 44, 56, 67, 76, 82, 87, 90, 93, 95, 98, 98, 97}},
      {"BMF", 0.5, 100, {37, 56, 71, 80, 87, 92, 95, 97, 98, 99, 100, 100, 100}},
      {"BMF", 0.5, 200, {55, 77, 88, 94, 97, 98, 99, 100, 100, 100, 100, 100, 100}},
      {"MF", 2, 50, {17, 24, 29, 32, 34, 36, 36, 35, 33, 31, 11, 1, 0}},
      {"MF", 2, 100, {22, 33, 42, 48, 53, 57, 60, 63, 64, 66, 67, 64, 50}},
      {"MF", 2, 200, {30, 46, 58, 66, 72, 77, 80, 83, 85, 87, 92, 94, 95}},
      {"BMF", 2, 50, {36, 41, 37, 28, 16, 8, 3, 1, 0, 0, 0, 0, 0}},
      {"BMF", 2, 100, {64, 79, 83, 83, 81, 77, 71, 63, 53, 42, 3, 0, 0}},
      {"BMF", 2, 200, {86, 96, 99, 99, 99, 99, 99, 99, 99, 99, 94, 73, 28}},
      {"MF", 5, 50, {19, 27, 33, 37, 41, 44, 46, 48, 50, 51, 50, 39, 15}},
      {"MF", 5, 100, {24, 36, 46, 52, 59, 63, 67, 70, 72, 75, 82, 85, 86}},
      {"MF", 5, 200, {32, 50, 62, 71, 78, 83, 86, 89, 91, 92, 96, 97, 98}},
      {"BMF", 5, 50, {48, 61, 66, 66, 61, 52, 41, 28, 16, 8, 2, 6, 18}},
      {"BMF", 5, 100, {75, 91, 96, 98, 99, 99, 99, 99, 99, 98, 92, 51, 4}},
      {"BMF", 5, 200, {92, 99, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
  };
  return rows;
}

const std::vector<PowerRow>& sphere_nn_power() {
  static const std::vector<PowerRow> rows{
      {"MF", 0.5, 50, {7, 8, 9, 10, 11, 13, 14, 15, 16, 17, 23, 27, 31}},
      {"MF", 0.5, 100, {8, 9, 10, 11, 12, 13, 15, 16, 17, 18, 25, 32, 39}},
      {"MF", 0.5, 200, {9, 11, 13, 14, 16, 17, 19, 20, 22, 24, 31, 39, 47}},
      {"Kent", 0.5, 50, {66, 87, 95, 98, 99, 99, 100, 100, 100, 100, 100, 100, 100}},
      {"Kent", 0.5, 100, {83, 97, 99, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
      {"Kent", 0.5, 200, {96, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100}},
      {"MF", 2, 50, {10, 12, 13, 13, 13, 13, 12, 11, 10, 8, 3, 2, 1}},
      {"MF", 2, 100, {13, 17, 19, 22, 24, 25, 26, 26, 25, 25, 20, 14, 6}},
      {"MF", 2, 200, {17, 24, 30, 36, 40, 43, 46, 48, 50, 51, 55, 54, 50}},
      {"Kent", 2, 50, {14, 9, 4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
      {"Kent", 2, 100, {41, 42, 36, 27, 18, 10, 5, 2, 0, 0, 0, 0, 0}},
      {"Kent", 2, 200, {77, 87, 88, 86, 83, 78, 71, 62, 51, 41, 4, 0, 0}},
      {"MF", 5, 50, {12, 15, 18, 21, 23, 25, 26, 27, 27, 27, 26, 20, 11}},
      {"MF", 5, 100, {15, 22, 28, 33, 38, 42, 44, 48, 50, 51, 57, 59, 59}},
      {"MF", 5, 200, {19, 31, 41, 50, 57, 63, 67, 71, 74, 76, 84, 87, 90}},
      {"Kent", 5, 50, {29, 35, 34, 30, 25, 18, 12, 7, 4, 2, 2, 8, 29}},
      {"Kent", 5, 100, {63, 79, 86, 88, 88, 87, 86, 83, 80, 76, 40, 1, 0}},
      {"Kent", 5, 200, {91, 99, 100, 100, 100, 100, 100, 100, 100, 100, 100, 97, 96}},
  };
  return rows;
}

const std::vector<ClassicalPowerRow>& square_classical_power() {
  static const std::vector<ClassicalPowerRow> rows{
      {"CON", 50, {31, 6}},
      {"CON", 100, {58, 14}},
      {"CON", 200, {89, 24}},
      {"CLU", 50, {44, 67}},
      {"CLU", 100, {44, 85}},
      {"CLU", 200, {44, 94}},
  };
  return rows;
}

const std::vector<ClassicalPowerRow>& circle_classical_power() {
  static const std::vector<ClassicalPowerRow> rows{
      {"MF", 50, {58, 53, 58}},
      {"MF", 100, {88, 84, 88}},
      {"MF", 200, {100, 99, 100}},
      {"BMF", 50, {6, 63, 61}},
      {"BMF", 100, {6, 97, 99}},
      {"BMF", 200, {6, 100, 100}},
  };
  return rows;
}

const std::vector<ClassicalPowerRow>& sphere_classical_power() {
  static const std::vector<ClassicalPowerRow> rows{
      {"MF", 50, {36, 36}},
      {"MF", 100, {66, 66}},
      {"MF", 200, {94, 94}},
      {"Kent", 50, {10, 99}},
      {"Kent", 100, {13, 100}},
      {"Kent", 200, {22, 100}},
  };
  return rows;
}

}  // namespace nnfit::reference
