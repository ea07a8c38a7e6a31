#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "nnfit/error.hpp"
#include "nnfit/mc.hpp"
#include "nnfit/plot.hpp"
#include "nnfit/sampling.hpp"
#include "nnfit/scores.hpp"
#include "nnfit/tables.hpp"

namespace nnfit::cli {

namespace {

struct Options {
  std::string space = "torus-square";
  std::string test = "nn";
  std::optional<double> alpha;
  int J = 1;
  std::optional<std::size_t> n;
  double level = 0.05;
  std::size_t reps = 10000;
  std::size_t crit_reps = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string critvals;
  std::string json;
  bool asymptotic = false;
  bool header = false;
  std::string alt = "uniform";
  std::optional<double> kappa;
  std::optional<double> beta;
  std::vector<double> mu;
  std::string data;
  std::vector<std::string> which;
  std::size_t reps_critical = 10000;
  std::size_t reps_power = 10000;
  double bmf_kappa = 1.0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// key=value lines, '#' comments. Keys are long flag names without dashes.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config") throw ConfigError(path + ": nested config files are not supported");
    args.push_back("--" + key);
    if (value != "true") args.push_back(value);
  }
  return args;
}

// Rows of comma-separated coordinates. Blank lines are skipped.
std::vector<std::vector<double>> read_rows(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read data file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (header && number == 1) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field = trim(field);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v)) {
        throw InvalidInput(path + ": line " + std::to_string(number) + ": non-numeric field '" +
                           field + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput(path + ": line " + std::to_string(number) + ": expected " +
                         std::to_string(rows.front().size()) + " fields, got " +
                         std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Point> to_points(const std::vector<std::vector<double>>& rows, std::size_t dim,
                             const std::string& path) {
  std::vector<Point> points;
  points.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != dim) {
      throw InvalidInput(path + ": expected " + std::to_string(dim) + " columns, got " +
                         std::to_string(row.size()));
    }
    Point p{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < dim; ++i) p[i] = row[i];
    points.push_back(p);
  }
  return points;
}

Point unit_vector(const std::vector<double>& v, std::size_t dim) {
  if (v.size() != dim) {
    throw ConfigError("--mu needs " + std::to_string(dim) + " components");
  }
  Point p{0.0, 0.0, 0.0};
  double norm = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    p[i] = v[i];
    norm += v[i] * v[i];
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw ConfigError("--mu must be nonzero");
  for (double& x : p) x /= norm;
  return p;
}

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

AlternativeSpec make_alternative(const Options& o, const Space& space) {
  const std::string& a = o.alt;
  AlternativeSpec spec;
  if (a == "uniform") {
    spec = UniformNull{};
  } else if (a == "mf" || a == "vmf") {
    VonMisesFisher v;
    if (o.kappa) v.kappa = *o.kappa;
    if (!o.mu.empty()) v.mu = unit_vector(o.mu, space.ambient_dim);
    spec = v;
  } else if (a == "bmf") {
    BimodalVonMisesFisher b;
    if (o.kappa) b.kappa = *o.kappa;
    spec = b;
  } else if (a == "kent") {
    Kent k;
    if (o.kappa) k.kappa = *o.kappa;
    if (o.beta) k.beta = *o.beta;
    if (!o.mu.empty()) {
      k.mu = unit_vector(o.mu, 3);
      const Point helper = std::abs(k.mu[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
      const Point t = cross(k.mu, helper);
      k.tau1 = unit_vector({t[0], t[1], t[2]}, 3);
      k.tau2 = cross(k.mu, k.tau1);
    }
    spec = k;
  } else if (a == "con") {
    spec = Contamination{};
  } else if (a == "clu") {
    spec = Clustering{};
  } else {
    throw ConfigError("unknown alternative '" + a + "' (uniform, mf, bmf, kent, con, clu)");
  }
  validate(space, spec);
  return spec;
}

StatisticId make_statistic(const Options& o) {
  if (o.test == "nn") {
    if (!o.alpha) throw ConfigError("the NN test needs --alpha");
    ScoreParams params{*o.alpha, o.J};
    validate(params);
    return NnStatistic{*o.alpha, o.J};
  }
  const auto classical = parse_classical(o.test);
  if (!classical) throw ConfigError("unknown test '" + o.test + "'");
  return *classical;
}

Calibration make_calibration(const Options& o) {
  if (o.asymptotic) return AsymptoticCalibration{};
  return SimulatedCalibration{o.crit_reps, o.seed};
}

std::size_t require_n(const Options& o) {
  if (!o.n) throw ConfigError("--n is required");
  return *o.n;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("failed writing " + path);
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
  }
}

void append_json(const std::string& path, const nlohmann::json& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open " + path + " for appending");
  out << record.dump() << '\n';
  if (!out) throw Error("failed writing " + path);
}

// Critical value for spec from --critvals, or simulated on the fly.
double resolve_critical(const Options& o, const TestSpec& spec) {
  if (std::holds_alternative<AsymptoticCalibration>(spec.calibration)) {
    return critical_value(spec, CriticalValueTable{});
  }
  CriticalValueTable table;
  if (!o.critvals.empty()) {
    std::ifstream in(o.critvals);
    if (!in) throw ConfigError("cannot read critical values " + o.critvals);
    table = CriticalValueTable::read_csv(in);
  } else {
    table.add(simulate_critical_values(spec, o.crit_reps, o.seed, RunOptions{o.threads}));
  }
  return critical_value(spec, table);
}

int cmd_critvals(const Options& o, std::ostream& out) {
  const auto spec = make_test_spec(make_statistic(o), parse_space(o.space), require_n(o), o.level,
                                   SimulatedCalibration{o.reps, o.seed});
  if (o.reps == 0) throw ConfigError("--reps must be positive");
  const auto row = simulate_critical_values(spec, o.reps, o.seed, RunOptions{o.threads});

  // An existing output file is merged so campaigns can accumulate rows.
  CriticalValueTable table;
  if (!o.out.empty() && std::filesystem::exists(o.out)) {
    std::ifstream in(o.out);
    table = CriticalValueTable::read_csv(in);
  }
  table.add(row);
  std::ostringstream text;
  table.write_csv(text);
  emit(o, text.str(), out);
  return kExitOk;
}

int cmd_test(const Options& o, std::ostream& out) {
  const Space space = Space::of(parse_space(o.space));
  const SampleSet sample(space, to_points(read_rows(o.data, o.header), space.ambient_dim, o.data));
  const auto spec = make_test_spec(make_statistic(o), space.kind, sample.size(), o.level,
                                   make_calibration(o));
  const double critical = resolve_critical(o, spec);

  nlohmann::json record{{"command", "test"},
                        {"space", std::string(to_string(space.kind))},
                        {"test", statistic_name(spec.statistic)},
                        {"n", sample.size()},
                        {"level", o.level},
                        {"direction", std::string(to_string(spec.direction))}};
  double value = 0.0;
  if (const auto* nn = std::get_if<NnStatistic>(&spec.statistic)) {
    const auto result = statistic(sample, {nn->alpha, nn->J});
    value = result.T_over_n;
    out << "statistic: NN alpha=" << format_double(nn->alpha, 6) << " J=" << nn->J << '\n';
    out << "T: " << format_double(result.T, 10) << '\n';
    out << "T/n: " << format_double(result.T_over_n, 10) << '\n';
    record["alpha"] = nn->alpha;
    record["J"] = nn->J;
    record["T"] = result.T;
    record["T_over_n"] = result.T_over_n;
  } else {
    const auto test = std::get<ClassicalTest>(spec.statistic);
    const auto result = evaluate(test, sample.points());
    value = result.value;
    out << "statistic: " << to_string(test) << '\n';
    out << "value: " << format_double(value, 10) << '\n';
    record["value"] = value;
  }
  const bool reject = in_rejection_region(spec.direction, value, critical);
  out << "critical value: " << format_double(critical, 10) << '\n';
  out << "direction: " << to_string(spec.direction) << '\n';
  out << "decision: " << (reject ? "reject" : "accept") << " at level " << format_double(o.level, 6)
      << '\n';
  record["critical"] = critical;
  record["reject"] = reject;
  if (!o.json.empty()) append_json(o.json, record);
  return kExitOk;
}

int cmd_power(const Options& o, std::ostream& out) {
  if (o.reps == 0) throw ConfigError("--reps must be positive");
  const Space space = Space::of(parse_space(o.space));
  const auto alternative = make_alternative(o, space);
  const auto spec = make_test_spec(make_statistic(o), space.kind, require_n(o), o.level,
                                   make_calibration(o));
  CriticalValueTable table;
  if (!o.critvals.empty()) {
    std::ifstream in(o.critvals);
    if (!in) throw ConfigError("cannot read critical values " + o.critvals);
    table = CriticalValueTable::read_csv(in);
  } else if (std::holds_alternative<SimulatedCalibration>(spec.calibration)) {
    table.add(simulate_critical_values(spec, o.crit_reps, o.seed, RunOptions{o.threads}));
  }
  const auto result =
      estimate_power(alternative, spec, table, o.reps, o.seed, RunOptions{o.threads});
  std::ostringstream text;
  const PowerResult results[] = {result};
  write_power_csv(text, results);
  emit(o, text.str(), out);
  if (!o.json.empty()) {
    append_json(o.json, {{"command", "power"},
                         {"space", std::string(to_string(space.kind))},
                         {"test", statistic_name(spec.statistic)},
                         {"n", spec.n},
                         {"alternative", label(alternative)},
                         {"reps", result.reps},
                         {"rate", result.rejection_rate},
                         {"ci", result.ci_half_width}});
  }
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const Space space = Space::of(parse_space(o.space));
  const auto alternative = make_alternative(o, space);
  RngStream stream(o.seed, 0);
  const auto sample_set = sample(space, alternative, require_n(o), stream);
  std::string text;
  if (o.header) text += space.ambient_dim == 2 ? "x,y\n" : "x,y,z\n";
  for (const auto& p : sample_set.points()) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(space.ambient_dim); ++i) {
      if (i > 0) text += ',';
      text += format_double(p[i], 15);
    }
    text += '\n';
  }
  emit(o, text, out);
  return kExitOk;
}

int cmd_plot(const Options& o, std::ostream& out) {
  const auto rows = read_rows(o.data, o.header);
  if (rows.empty()) throw InvalidInput(o.data + ": no points");
  const std::size_t dim = rows.front().size();
  if (dim != 2 && dim != 3) throw InvalidInput(o.data + ": expected 2 or 3 columns");
  emit(o, scatter_svg(to_points(rows, dim, o.data), static_cast<int>(dim)), out);
  return kExitOk;
}

int cmd_tables(const Options& o, std::ostream& out) {
  TableOptions options;
  options.reps_critical = o.reps_critical;
  options.reps_power = o.reps_power;
  options.master_seed = o.seed;
  options.bmf_kappa = o.bmf_kappa;
  options.run.threads = o.threads;
  std::vector<std::string> which;
  for (const auto& w : o.which) {
    std::stringstream ss(w);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (id == "all") {
        for (auto t : table_ids()) which.emplace_back(t);
      } else if (!trim(id).empty()) {
        which.push_back(trim(id));
      }
    }
  }
  const auto written = reproduce_tables(which, options, o.out.empty() ? "tables" : o.out);
  for (const auto& path : written) out << path.string() << '\n';
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--space", o.space, "torus-square, circle or sphere");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker cap (default NNFIT_THREADS or all cores)");
  cmd->add_option("--out", o.out, "output path");
  cmd->add_flag("--header", o.header, "CSV files carry a header line");
}

void add_statistic(CLI::App* cmd, Options& o) {
  cmd->add_option("--test", o.test, "nn or a classical test id");
  cmd->add_option("--alpha", o.alpha, "exponent of the NN statistic");
  cmd->add_option("--J", o.J, "number of neighbors");
  cmd->add_option("--level", o.level, "significance level");
  cmd->add_option("--crit-reps", o.crit_reps, "replications for on-the-fly critical values");
  cmd->add_option("--critvals", o.critvals, "critical value CSV");
  cmd->add_flag("--asymptotic", o.asymptotic, "use the limit law of a classical test");
  cmd->add_option("--json", o.json, "append a JSON record to this file");
}

void add_alternative(CLI::App* cmd, Options& o) {
  cmd->add_option("--alt", o.alt, "uniform, mf, bmf, kent, con or clu");
  cmd->add_option("--kappa", o.kappa, "concentration");
  cmd->add_option("--beta", o.beta, "Kent ovalness");
  cmd->add_option("--mu", o.mu, "mean direction")->delimiter(',');
}

int error_code(const Error& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return kExitData;
  if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const Unsupported*>(&e)) {
    return kExitConfig;
  }
  return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Nearest-neighbor goodness-of-fit tests on the torus-square, circle and sphere", "nnfit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config;

  auto* critvals = app.add_subcommand("critvals", "simulate a critical value row");
  add_common(critvals, o);
  add_statistic(critvals, o);
  critvals->add_option("--n", o.n, "sample size");
  critvals->add_option("--reps", o.reps, "replications");

  auto* test = app.add_subcommand("test", "test a data file for uniformity");
  add_common(test, o);
  add_statistic(test, o);
  test->add_option("data", o.data, "CSV of coordinates")->required();

  auto* power = app.add_subcommand("power", "estimate power against an alternative");
  add_common(power, o);
  add_statistic(power, o);
  add_alternative(power, o);
  power->add_option("--n", o.n, "sample size");
  power->add_option("--reps", o.reps, "power replications");

  auto* sample_cmd = app.add_subcommand("sample", "draw a sample");
  add_common(sample_cmd, o);
  add_alternative(sample_cmd, o);
  sample_cmd->add_option("--n", o.n, "sample size");

  auto* plot = app.add_subcommand("plot", "scatter plot of a point file as SVG");
  add_common(plot, o);
  plot->add_option("data", o.data, "CSV of coordinates")->required();

  auto* tables = app.add_subcommand("tables", "reproduce the published tables");
  add_common(tables, o);
  tables->add_option("--which", o.which, "table ids, comma separated, or all");
  tables->add_option("--reps-critical", o.reps_critical, "null replications");
  tables->add_option("--reps-power", o.reps_power, "power replications");
  tables->add_option("--bmf-kappa", o.bmf_kappa, "concentration of the bimodal circle alternative");

  for (auto* cmd : app.get_subcommands({})) {
    cmd->add_option("--config", config, "key=value file; command-line flags take precedence");
  }

  try {
    std::vector<std::string> argv = args;
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (!path.empty()) {
        auto extra = read_config(path);
        argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (critvals->parsed()) return cmd_critvals(o, out);
    if (test->parsed()) return cmd_test(o, out);
    if (power->parsed()) return cmd_power(o, out);
    if (sample_cmd->parsed()) return cmd_sample(o, out);
    if (plot->parsed()) return cmd_plot(o, out);
    if (tables->parsed()) return cmd_tables(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const int code = error_code(e);
    if (code == kExitConfig && (critvals->parsed() || power->parsed())) {
      err << (critvals->parsed() ? critvals : power)->help();
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace nnfit::cli
