#include "nnfit/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nnfit/error.hpp"
#include "nnfit/rng.hpp"
#include "nnfit/scores.hpp"

namespace nnfit {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write
// results by index, so the outcome never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 16;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= count) return;
          const std::size_t end = std::min(count, begin + kChunk);
          for (std::size_t i = begin; i < end; ++i) fn(i);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

bool same_value(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidInput(std::string("malformed ") + what + " '" + s + "'");
  }
  return v;
}

unsigned long long parse_unsigned(const std::string& s, const char* what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidInput(std::string("malformed ") + what + " '" + s + "'");
  }
  return v;
}

CriticalValueRow row_key(const TestSpec& spec) {
  CriticalValueRow row;
  row.space = spec.space;
  row.test = statistic_name(spec.statistic);
  if (const auto* nn = std::get_if<NnStatistic>(&spec.statistic)) {
    row.alpha = nn->alpha;
    row.J = nn->J;
  }
  row.n = spec.n;
  row.level = spec.level;
  row.direction = spec.direction;
  return row;
}

bool same_key(const CriticalValueRow& a, const CriticalValueRow& b) {
  return a.space == b.space && a.test == b.test && same_value(a.alpha, b.alpha) && a.J == b.J &&
         a.n == b.n && same_value(a.level, b.level) && a.direction == b.direction;
}

std::vector<double> replicate_values(const TestSpec& spec, const AlternativeSpec& alternative,
                                     std::size_t reps, std::uint64_t seed,
                                     std::uint64_t offset, const RunOptions& options) {
  if (const auto* nn = std::get_if<NnStatistic>(&spec.statistic)) {
    const double alphas[] = {nn->alpha};
    const int js[] = {nn->J};
    return nn_replicates(spec.space, alternative, spec.n, alphas, js, reps, seed, offset,
                         options)[0];
  }
  return classical_replicates(std::get<ClassicalTest>(spec.statistic), alternative, spec.n,
                              reps, seed, offset, options);
}

}  // namespace

std::string statistic_name(const StatisticId& id) {
  if (const auto* c = std::get_if<ClassicalTest>(&id)) return std::string(to_string(*c));
  return "NN";
}

std::string_view to_string(Direction d) { return d == Direction::Lower ? "lower" : "upper"; }

Direction parse_direction(std::string_view s) {
  if (s == "lower") return Direction::Lower;
  if (s == "upper") return Direction::Upper;
  throw InvalidInput("direction must be 'lower' or 'upper'");
}

TestSpec make_test_spec(const StatisticId& statistic, SpaceKind space, std::size_t n,
                        double level, Calibration calibration) {
  Direction direction = Direction::Upper;
  if (const auto* nn = std::get_if<NnStatistic>(&statistic)) {
    validate(ScoreParams{nn->alpha, nn->J});
    direction = nn->alpha < 1.0 ? Direction::Lower : Direction::Upper;
  }
  TestSpec spec{statistic, space, n, level, direction, calibration};
  validate(spec);
  return spec;
}

void validate(const TestSpec& spec) {
  if (!(spec.level > 0.0 && spec.level < 1.0)) {
    throw ParameterError("level must lie in (0,1)");
  }
  if (spec.n < 2) throw ParameterError("n must be at least 2");
  if (const auto* nn = std::get_if<NnStatistic>(&spec.statistic)) {
    validate(ScoreParams{nn->alpha, nn->J});
    if (spec.n <= static_cast<std::size_t>(nn->J)) {
      throw ParameterError("n must exceed J");
    }
    const Direction expected = nn->alpha < 1.0 ? Direction::Lower : Direction::Upper;
    if (spec.direction != expected) {
      throw ParameterError(nn->alpha < 1.0 ? "alpha < 1 rejects for small values (lower)"
                                           : "alpha > 1 rejects for large values (upper)");
    }
    if (std::holds_alternative<AsymptoticCalibration>(spec.calibration)) {
      throw Unsupported("the NN statistic is calibrated by simulation only");
    }
  } else {
    const auto test = std::get<ClassicalTest>(spec.statistic);
    if (required_space(test) != spec.space) {
      throw ParameterError(std::string(to_string(test)) + " is defined on the " +
                           std::string(to_string(required_space(test))) + " only");
    }
    if (spec.direction != Direction::Upper) {
      throw ParameterError("classical tests reject for large values (upper)");
    }
  }
  if (const auto* sim = std::get_if<SimulatedCalibration>(&spec.calibration)) {
    if (sim->reps < 100) throw ParameterError("simulated calibration needs reps >= 100");
  }
}

double normalized_value(const StatisticId& statistic, const SampleSet& sample) {
  if (const auto* nn = std::get_if<NnStatistic>(&statistic)) {
    return nnfit::statistic(sample, ScoreParams{nn->alpha, nn->J}).T_over_n;
  }
  return evaluate(std::get<ClassicalTest>(statistic), sample.points()).value;
}

bool in_rejection_region(Direction direction, double value, double critical) {
  return direction == Direction::Lower ? value < critical : value > critical;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NNFIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void CriticalValueTable::add(const CriticalValueRow& row) {
  for (auto& existing : rows_) {
    if (same_key(existing, row)) {
      existing = row;
      return;
    }
  }
  rows_.push_back(row);
}

const CriticalValueRow* CriticalValueTable::find(const TestSpec& spec) const {
  const CriticalValueRow key = row_key(spec);
  for (const auto& row : rows_) {
    if (same_key(row, key)) return &row;
  }
  return nullptr;
}

void CriticalValueTable::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (const auto& r : rows_) {
    const bool nn = r.test == "NN";
    out << to_string(r.space) << ',' << r.test << ',' << (nn ? format_g6(r.alpha) : "") << ','
        << (nn ? std::to_string(r.J) : "") << ',' << r.n << ',' << format_g6(r.level) << ','
        << to_string(r.direction) << ',' << format_g6(r.quantile) << ',' << r.reps << ','
        << r.seed << '\n';
  }
}

CriticalValueTable CriticalValueTable::read_csv(std::istream& in) {
  CriticalValueTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == kHeader) continue;
    const auto f = split_csv(line);
    if (f.size() != 10) {
      throw InvalidInput("critical-value line " + std::to_string(line_no) +
                         ": expected 10 fields");
    }
    CriticalValueRow r;
    try {
      r.space = parse_space(f[0]);
    } catch (const ConfigError&) {
      throw InvalidInput("critical-value line " + std::to_string(line_no) + ": unknown space '" +
                         f[0] + "'");
    }
    r.test = f[1];
    if (r.test == "NN") {
      r.alpha = parse_double(f[2], "alpha");
      r.J = static_cast<int>(parse_unsigned(f[3], "J"));
    } else if (!parse_classical(r.test)) {
      throw InvalidInput("critical-value line " + std::to_string(line_no) + ": unknown test '" +
                         r.test + "'");
    }
    r.n = parse_unsigned(f[4], "n");
    r.level = parse_double(f[5], "level");
    r.direction = parse_direction(f[6]);
    r.quantile = parse_double(f[7], "quantile");
    r.reps = parse_unsigned(f[8], "reps");
    r.seed = parse_unsigned(f[9], "seed");
    table.add(r);
  }
  return table;
}

std::vector<std::vector<double>> nn_replicates(SpaceKind space_kind,
                                               const AlternativeSpec& alternative,
                                               std::size_t n, std::span<const double> alphas,
                                               std::span<const int> Js, std::size_t reps,
                                               std::uint64_t master_seed,
                                               std::uint64_t stream_offset,
                                               const RunOptions& options) {
  const Space space = Space::of(space_kind);
  validate(space, alternative);
  int max_j = 0;
  for (int J : Js) max_j = std::max(max_j, J);
  if (max_j < 1 || n <= static_cast<std::size_t>(max_j)) {
    throw ParameterError("nn_replicates: need 1 <= J < n");
  }
  const std::size_t cells = alphas.size() * Js.size();
  std::vector<double> flat(reps * cells);
  parallel_for(reps, resolve_threads(options.threads), [&](std::size_t r) {
    RngStream rng(master_seed, stream_offset + r);
    const SampleSet s = sample(space, alternative, n, rng);
    const auto neighbors = knn_fast(s, static_cast<std::size_t>(max_j));
    const auto values = normalized_statistics(neighbors, space, alphas, Js);
    std::copy(values.begin(), values.end(), flat.begin() + static_cast<std::ptrdiff_t>(r * cells));
  });
  std::vector<std::vector<double>> out(cells, std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t c = 0; c < cells; ++c) out[c][r] = flat[r * cells + c];
  }
  return out;
}

std::vector<double> classical_replicates(ClassicalTest test, const AlternativeSpec& alternative,
                                         std::size_t n, std::size_t reps,
                                         std::uint64_t master_seed, std::uint64_t stream_offset,
                                         const RunOptions& options) {
  const Space space = Space::of(required_space(test));
  validate(space, alternative);
  std::vector<double> out(reps);
  parallel_for(reps, resolve_threads(options.threads), [&](std::size_t r) {
    RngStream rng(master_seed, stream_offset + r);
    const SampleSet s = sample(space, alternative, n, rng);
    out[r] = evaluate(test, s.points()).value;
  });
  return out;
}

CriticalValueRow simulate_critical_values(const TestSpec& spec, std::size_t reps,
                                          std::uint64_t master_seed,
                                          const RunOptions& options) {
  validate(spec);
  if (reps < 100) throw ParameterError("critical values need reps >= 100");
  auto values = replicate_values(spec, UniformNull{}, reps, master_seed, 0, options);
  std::sort(values.begin(), values.end());
  CriticalValueRow row = row_key(spec);
  const double p = spec.direction == Direction::Lower ? spec.level : 1.0 - spec.level;
  row.quantile = stats::quantile_type7(values, p);
  row.reps = reps;
  row.seed = master_seed;
  return row;
}

double critical_value(const TestSpec& spec, const CriticalValueTable& table) {
  if (std::holds_alternative<AsymptoticCalibration>(spec.calibration)) {
    if (const auto* c = std::get_if<ClassicalTest>(&spec.statistic)) {
      return asymptotic_critical_value(*c, spec.level, spec.n);
    }
    throw Unsupported("the NN statistic is calibrated by simulation only");
  }
  const CriticalValueRow* row = table.find(spec);
  if (row == nullptr) {
    throw ConfigError("no critical value for " + statistic_name(spec.statistic) + " on " +
                      std::string(to_string(spec.space)) + " with n=" +
                      std::to_string(spec.n));
  }
  return row->quantile;
}

PowerResult estimate_power(const AlternativeSpec& alternative, const TestSpec& spec,
                           const CriticalValueTable& critvals, std::size_t reps,
                           std::uint64_t master_seed, const RunOptions& options) {
  validate(spec);
  if (reps < 1) throw ParameterError("power needs reps >= 1");
  const double critical = critical_value(spec, critvals);
  const auto values =
      replicate_values(spec, alternative, reps, master_seed, kPowerStreamOffset, options);
  std::size_t rejected = 0;
  for (double v : values) rejected += in_rejection_region(spec.direction, v, critical) ? 1 : 0;
  PowerResult result{alternative, spec, reps, 0.0, 0.0};
  result.rejection_rate = static_cast<double>(rejected) / static_cast<double>(reps);
  const double p = result.rejection_rate;
  result.ci_half_width = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  return result;
}

void write_power_csv(std::ostream& out, std::span<const PowerResult> results) {
  out << kPowerHeader << '\n';
  for (const auto& r : results) {
    const auto* nn = std::get_if<NnStatistic>(&r.spec.statistic);
    out << to_string(r.spec.space) << ',' << statistic_name(r.spec.statistic) << ','
        << (nn ? format_g6(nn->alpha) : "") << ',' << (nn ? std::to_string(nn->J) : "") << ','
        << r.spec.n << ',' << label(r.alternative) << ',' << r.reps << ','
        << format_g6(r.rejection_rate) << ',' << format_g6(r.ci_half_width) << '\n';
  }
}

NormalityReport clt_diagnostic(const TestSpec& spec, std::size_t reps,
                               std::uint64_t master_seed, const RunOptions& options) {
  validate(spec);
  if (reps < 1000) throw ParameterError("clt_diagnostic needs reps >= 1000");
  const auto values = replicate_values(spec, UniformNull{}, reps, master_seed, 0, options);
  NormalityReport report;
  report.reps = reps;
  report.mean = stats::mean(values);
  report.sd = stats::standard_deviation(values);
  report.skewness = stats::skewness(values);
  report.excess_kurtosis = stats::excess_kurtosis(values);
  report.anderson_darling = stats::anderson_darling_normal(values);
  report.asymptotic_regime = spec.n >= 100;
  return report;
}

}  // namespace nnfit
