#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnfit/classical.hpp"
#include "nnfit/geometry.hpp"
#include "nnfit/sampling.hpp"
#include "nnfit/stats.hpp"

namespace nnfit {

// The nearest-neighbor statistic T_{n,J}^{(alpha)}.
struct NnStatistic {
  double alpha;
  int J;
};

using StatisticId = std::variant<NnStatistic, ClassicalTest>;

// "NN" or the classical test id.
std::string statistic_name(const StatisticId& id);

enum class Direction { Lower, Upper };
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct SimulatedCalibration {
  std::size_t reps = 10000;
  std::uint64_t master_seed = 1;
};
struct AsymptoticCalibration {};
using Calibration = std::variant<SimulatedCalibration, AsymptoticCalibration>;

struct TestSpec {
  StatisticId statistic;
  SpaceKind space;
  std::size_t n;
  double level;
  Direction direction;
  Calibration calibration;
};

// Builds a spec with the rejection direction implied by the statistic:
// lower tail for alpha < 1, upper tail for alpha > 1 and for every
// classical test. Validates the result.
TestSpec make_test_spec(const StatisticId& statistic, SpaceKind space, std::size_t n,
                        double level, Calibration calibration = SimulatedCalibration{});

// Throws ParameterError/ConfigError on any violated invariant (alpha = 1,
// direction inconsistent with alpha, test on the wrong space, n too small).
void validate(const TestSpec& spec);

// n^{-1} T for the NN statistic, the raw value for classical tests.
double normalized_value(const StatisticId& statistic, const SampleSet& sample);

bool in_rejection_region(Direction direction, double value, double critical);

struct RunOptions {
  // Worker count; 0 means NNFIT_THREADS or the hardware concurrency.
  unsigned threads = 0;
};
unsigned resolve_threads(unsigned requested);

// Power replications draw from streams offset by 2^32 so they never share
// a stream with calibration replications.
inline constexpr std::uint64_t kPowerStreamOffset = std::uint64_t{1} << 32;

struct CriticalValueRow {
  SpaceKind space;
  std::string test;  // "NN" or classical id
  double alpha = 0.0;  // NN only
  int J = 0;           // NN only
  std::size_t n = 0;
  double level = 0.05;
  Direction direction = Direction::Upper;
  double quantile = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

// Simulated quantiles keyed by (space, test, alpha, J, n, level, direction).
class CriticalValueTable {
 public:
  // Replaces an existing row with the same key.
  void add(const CriticalValueRow& row);
  const CriticalValueRow* find(const TestSpec& spec) const;
  std::span<const CriticalValueRow> rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  static constexpr const char* kHeader = "space,test,alpha,J,n,level,direction,quantile,reps,seed";
  void write_csv(std::ostream& out) const;
  static CriticalValueTable read_csv(std::istream& in);

 private:
  std::vector<CriticalValueRow> rows_;
};

// 6 significant digits, as used in every CSV this library writes.
std::string format_g6(double v);

// Quantile (type 7) of reps null replications of the normalized statistic,
// at `level` for the lower direction and 1 - level for the upper one.
// Replication r uses RngStream(master_seed, r).
CriticalValueRow simulate_critical_values(const TestSpec& spec, std::size_t reps,
                                          std::uint64_t master_seed,
                                          const RunOptions& options = {});

// Critical value for spec: from the table for simulated calibration, from
// the limit law for asymptotic calibration. ConfigError if missing.
double critical_value(const TestSpec& spec, const CriticalValueTable& table);

struct PowerResult {
  AlternativeSpec alternative;
  TestSpec spec;
  std::size_t reps = 0;
  double rejection_rate = 0.0;
  double ci_half_width = 0.0;  // 1.96 sqrt(p(1-p)/reps)
};

PowerResult estimate_power(const AlternativeSpec& alternative, const TestSpec& spec,
                           const CriticalValueTable& critvals, std::size_t reps,
                           std::uint64_t master_seed, const RunOptions& options = {});

inline constexpr const char* kPowerHeader = "space,test,alpha,J,n,alternative,reps,rate,ci";
void write_power_csv(std::ostream& out, std::span<const PowerResult> results);

struct NormalityReport {
  std::size_t reps = 0;
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  stats::AndersonDarling anderson_darling;
  // False when n is too small for the normal approximation to be asserted.
  bool asymptotic_regime = false;
};

// Distribution of the normalized statistic over reps null replications,
// standardized and checked for normality.
NormalityReport clt_diagnostic(const TestSpec& spec, std::size_t reps,
                               std::uint64_t master_seed, const RunOptions& options = {});

// Batch engine: one sample and one neighbor search per replication feed
// every (alpha, J) cell. Returns values[cell][rep] with cell = a * Js.size()
// + j. Replication r uses RngStream(master_seed, stream_offset + r).
std::vector<std::vector<double>> nn_replicates(SpaceKind space, const AlternativeSpec& alternative,
                                               std::size_t n, std::span<const double> alphas,
                                               std::span<const int> Js, std::size_t reps,
                                               std::uint64_t master_seed,
                                               std::uint64_t stream_offset,
                                               const RunOptions& options = {});

std::vector<double> classical_replicates(ClassicalTest test, const AlternativeSpec& alternative,
                                         std::size_t n, std::size_t reps,
                                         std::uint64_t master_seed, std::uint64_t stream_offset,
                                         const RunOptions& options = {});

}  // namespace nnfit
