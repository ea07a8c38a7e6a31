#include "nnfit/tables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>

#include "nnfit/error.hpp"
#include "nnfit/reference_tables.hpp"

namespace nnfit {

namespace {

constexpr std::array<std::string_view, 9> kTableIds{
    "appendix-square", "appendix-circle", "appendix-sphere",
    "power-square",    "power-square-classical",
    "power-circle",    "power-circle-classical",
    "power-sphere",    "power-sphere-classical"};

constexpr std::array<std::size_t, 3> kSizes{50, 100, 200};
constexpr std::array<double, 6> kQuantileAlphas{0.5, 1.5, 2.0, 3.0, 4.0, 5.0};
constexpr std::array<double, 3> kPowerAlphas{0.5, 2.0, 5.0};

struct DiffRow {
  std::string table, row, column;
  double reference, reproduced, tolerance;
};

struct Alternative {
  std::string label;
  AlternativeSpec spec;
};

std::vector<Alternative> alternatives(SpaceKind space, double bmf_kappa) {
  switch (space) {
    case SpaceKind::TorusSquare:
      return {{"CON", Contamination{}}, {"CLU", Clustering{}}};
    case SpaceKind::Circle:
      return {{"MF", VonMisesFisher{{1.0, 0.0, 0.0}, 0.5}}, {"BMF", BimodalVonMisesFisher{bmf_kappa}}};
    case SpaceKind::Sphere:
      return {{"MF", VonMisesFisher{{1.0, 0.0, 0.0}, 0.5}}, {"Kent", Kent{}}};
  }
  return {};
}

std::vector<ClassicalTest> classical_tests(SpaceKind space) {
  switch (space) {
    case SpaceKind::TorusSquare: return {ClassicalTest::DB, ClassicalTest::MS};
    case SpaceKind::Circle:
      return {ClassicalTest::RaCircle, ClassicalTest::Kuiper, ClassicalTest::Watson};
    case SpaceKind::Sphere: return {ClassicalTest::RaSphere, ClassicalTest::Jupp};
  }
  return {};
}

double quantile_of(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return stats::quantile_type7(values, p);
}

double rejection_percent(std::span<const double> values, Direction direction, double critical) {
  std::size_t rejected = 0;
  for (double v : values) rejected += in_rejection_region(direction, v, critical) ? 1 : 0;
  return 100.0 * static_cast<double>(rejected) / static_cast<double>(values.size());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

std::string alpha_label(double alpha) { return format_g6(alpha); }

class Reproducer {
 public:
  Reproducer(const TableOptions& options, std::filesystem::path outdir)
      : options_(options), outdir_(std::move(outdir)) {}

  std::filesystem::path run(std::string_view id) {
    if (id == "appendix-square") return appendix(id, SpaceKind::TorusSquare, reference::square_quantiles());
    if (id == "appendix-circle") return appendix(id, SpaceKind::Circle, reference::circle_quantiles());
    if (id == "appendix-sphere") return appendix(id, SpaceKind::Sphere, reference::sphere_quantiles());
    if (id == "power-square") return nn_power(id, SpaceKind::TorusSquare, reference::square_nn_power());
    if (id == "power-circle") return nn_power(id, SpaceKind::Circle, reference::circle_nn_power());
    if (id == "power-sphere") return nn_power(id, SpaceKind::Sphere, reference::sphere_nn_power());
    if (id == "power-square-classical")
      return classical_power(id, SpaceKind::TorusSquare, reference::square_classical_power());
    if (id == "power-circle-classical")
      return classical_power(id, SpaceKind::Circle, reference::circle_classical_power());
    if (id == "power-sphere-classical")
      return classical_power(id, SpaceKind::Sphere, reference::sphere_classical_power());
    throw ConfigError("unknown table '" + std::string(id) + "'");
  }

  std::filesystem::path write_diff() const {
    const auto path = outdir_ / "diff-report.csv";
    auto out = open_output(path);
    out << "table,row,column,reference,reproduced,abs_diff,tolerance,within\n";
    for (const auto& d : diffs_) {
      const double diff = std::abs(d.reproduced - d.reference);
      out << d.table << ',' << d.row << ',' << d.column << ',' << format_g6(d.reference) << ','
          << format_g6(d.reproduced) << ',' << format_g6(diff) << ',' << format_g6(d.tolerance)
          << ',' << (diff <= d.tolerance ? "yes" : "no") << '\n';
    }
    finish(out, path);
    return path;
  }

 private:
  std::filesystem::path appendix(std::string_view id, SpaceKind space,
                                 const std::vector<reference::QuantileRow>& ref) {
    const auto& Js = reference::kQuantileJs;
    std::map<std::pair<double, int>, std::array<double, 11>> reproduced;
    for (std::size_t n : kSizes) {
      const auto values = nn_replicates(space, UniformNull{}, n, kQuantileAlphas, Js,
                                        options_.reps_critical, options_.master_seed, 0,
                                        options_.run);
      for (std::size_t a = 0; a < kQuantileAlphas.size(); ++a) {
        const double alpha = kQuantileAlphas[a];
        const double p = alpha < 1.0 ? 0.05 : 0.95;
        auto& row = reproduced[{alpha, static_cast<int>(n)}];
        for (std::size_t j = 0; j < Js.size(); ++j) {
          row[j] = quantile_of(values[a * Js.size() + j], p);
        }
      }
    }

    const auto path = outdir_ / (std::string(id) + ".csv");
    auto out = open_output(path);
    out << "alpha,n";
    for (int J : Js) out << ",J=" << J;
    out << '\n';
    for (const auto& [key, row] : reproduced) {
      out << alpha_label(key.first) << ',' << key.second;
      for (double v : row) out << ',' << format_g6(v);
      out << '\n';
    }
    finish(out, path);

    for (const auto& r : ref) {
      const auto& row = reproduced.at({r.alpha, r.n});
      const std::string label = "alpha=" + alpha_label(r.alpha) + ";n=" + std::to_string(r.n);
      for (std::size_t j = 0; j < Js.size(); ++j) {
        diffs_.push_back({std::string(id), label, "J=" + std::to_string(Js[j]), r.values[j],
                          row[j], options_.quantile_tolerance * std::abs(r.values[j])});
      }
    }
    return path;
  }

  std::filesystem::path nn_power(std::string_view id, SpaceKind space,
                                 const std::vector<reference::PowerRow>& ref) {
    const auto& Js = reference::kPowerJs;
    const auto alts = alternatives(space, options_.bmf_kappa);
    // (alternative, alpha, n) -> rates
    std::map<std::tuple<std::string, double, int>, std::array<double, 13>> reproduced;
    for (std::size_t n : kSizes) {
      const auto null_values = nn_replicates(space, UniformNull{}, n, kPowerAlphas, Js,
                                             options_.reps_critical, options_.master_seed, 0,
                                             options_.run);
      std::vector<double> critical(null_values.size());
      for (std::size_t a = 0; a < kPowerAlphas.size(); ++a) {
        const double p = kPowerAlphas[a] < 1.0 ? 0.05 : 0.95;
        for (std::size_t j = 0; j < Js.size(); ++j) {
          critical[a * Js.size() + j] = quantile_of(null_values[a * Js.size() + j], p);
        }
      }
      for (const auto& alt : alts) {
        const auto values = nn_replicates(space, alt.spec, n, kPowerAlphas, Js,
                                          options_.reps_power, options_.master_seed,
                                          kPowerStreamOffset, options_.run);
        for (std::size_t a = 0; a < kPowerAlphas.size(); ++a) {
          const Direction direction = kPowerAlphas[a] < 1.0 ? Direction::Lower : Direction::Upper;
          auto& row = reproduced[{alt.label, kPowerAlphas[a], static_cast<int>(n)}];
          for (std::size_t j = 0; j < Js.size(); ++j) {
            const std::size_t cell = a * Js.size() + j;
            row[j] = rejection_percent(values[cell], direction, critical[cell]);
          }
        }
      }
    }

    const auto path = outdir_ / (std::string(id) + ".csv");
    auto out = open_output(path);
    out << "alternative,alpha,n";
    for (int J : Js) out << ",J=" << J;
    out << '\n';
    for (const auto& alt : alts) {
      for (double alpha : kPowerAlphas) {
        for (std::size_t n : kSizes) {
          out << alt.label << ',' << alpha_label(alpha) << ',' << n;
          for (double v : reproduced.at({alt.label, alpha, static_cast<int>(n)})) {
            out << ',' << format_g6(v);
          }
          out << '\n';
        }
      }
    }
    finish(out, path);

    for (const auto& r : ref) {
      const auto& row = reproduced.at({r.alternative, r.alpha, r.n});
      const std::string label =
          r.alternative + ";alpha=" + alpha_label(r.alpha) + ";n=" + std::to_string(r.n);
      for (std::size_t j = 0; j < Js.size(); ++j) {
        diffs_.push_back({std::string(id), label, "J=" + std::to_string(Js[j]), r.values[j],
                          row[j], options_.power_tolerance});
      }
    }
    return path;
  }

  std::filesystem::path classical_power(std::string_view id, SpaceKind space,
                                        const std::vector<reference::ClassicalPowerRow>& ref) {
    const auto tests = classical_tests(space);
    const auto alts = alternatives(space, options_.bmf_kappa);
    std::map<std::pair<std::string, int>, std::vector<double>> reproduced;
    for (std::size_t n : kSizes) {
      for (const auto& alt : alts) reproduced[{alt.label, static_cast<int>(n)}].resize(tests.size());
      for (std::size_t t = 0; t < tests.size(); ++t) {
        const double critical =
            quantile_of(classical_replicates(tests[t], UniformNull{}, n, options_.reps_critical,
                                             options_.master_seed, 0, options_.run),
                        0.95);
        for (const auto& alt : alts) {
          const auto values = classical_replicates(tests[t], alt.spec, n, options_.reps_power,
                                                   options_.master_seed, kPowerStreamOffset,
                                                   options_.run);
          reproduced[{alt.label, static_cast<int>(n)}][t] =
              rejection_percent(values, Direction::Upper, critical);
        }
      }
    }

    const auto path = outdir_ / (std::string(id) + ".csv");
    auto out = open_output(path);
    out << "alternative,n";
    for (auto test : tests) out << ',' << to_string(test);
    out << '\n';
    for (const auto& alt : alts) {
      for (std::size_t n : kSizes) {
        out << alt.label << ',' << n;
        for (double v : reproduced.at({alt.label, static_cast<int>(n)})) out << ',' << format_g6(v);
        out << '\n';
      }
    }
    finish(out, path);

    for (const auto& r : ref) {
      const auto& row = reproduced.at({r.alternative, r.n});
      const std::string label = r.alternative + ";n=" + std::to_string(r.n);
      for (std::size_t t = 0; t < tests.size(); ++t) {
        diffs_.push_back({std::string(id), label, std::string(to_string(tests[t])), r.values[t],
                          row[t], options_.power_tolerance});
      }
    }
    return path;
  }

  TableOptions options_;
  std::filesystem::path outdir_;
  std::vector<DiffRow> diffs_;
};

}  // namespace

std::span<const std::string_view> table_ids() { return kTableIds; }

std::vector<std::filesystem::path> reproduce_tables(std::span<const std::string> which,
                                                    const TableOptions& options,
                                                    const std::filesystem::path& outdir) {
  if (which.empty()) return {};
  for (const auto& id : which) {
    if (std::find(kTableIds.begin(), kTableIds.end(), id) == kTableIds.end()) {
      throw ConfigError("unknown table '" + id + "'");
    }
  }
  if (options.reps_critical < 100 || options.reps_power < 1) {
    throw ConfigError("table reproduction needs reps_critical >= 100 and reps_power >= 1");
  }
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error("cannot create " + outdir.string() + ": " + ec.message());

  Reproducer reproducer(options, outdir);
  std::vector<std::filesystem::path> written;
  for (const auto& id : which) written.push_back(reproducer.run(id));
  written.push_back(reproducer.write_diff());
  return written;
}

}  // namespace nnfit
