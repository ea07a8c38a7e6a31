#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nnfit/error.hpp"
#include "nnfit/reference_tables.hpp"
#include "nnfit/tables.hpp"

using namespace nnfit;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nnfit-tables-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("tables") {

TEST_CASE("reference data shapes") {
  for (const auto* t : {&reference::square_quantiles(), &reference::circle_quantiles(),
                        &reference::sphere_quantiles()}) {
    CHECK(t->size() == 18);
  }
  for (const auto* t : {&reference::square_nn_power(), &reference::circle_nn_power(),
                        &reference::sphere_nn_power()}) {
    CHECK(t->size() == 18);
  }
  CHECK(reference::square_classical_power().front().values.size() == 2);
  CHECK(reference::circle_classical_power().front().values.size() == 3);
  CHECK(reference::sphere_classical_power().size() == 6);
  // Quantiles for alpha > 1 decrease in n at J = 1 in every block.
  for (const auto* t : {&reference::square_quantiles(), &reference::circle_quantiles(),
                        &reference::sphere_quantiles()}) {
    for (std::size_t r = 3; r + 2 < t->size(); r += 3) {
      CHECK((*t)[r].n == 50);
      CHECK((*t)[r + 1].n == 100);
      CHECK((*t)[r].values[0] > (*t)[r + 2].values[0]);
    }
  }
}

TEST_CASE("empty request writes nothing") {
  const auto dir = scratch("empty");
  CHECK(reproduce_tables({}, TableOptions{}, dir).empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("unknown table id") {
  const std::vector<std::string> which{"table-9"};
  CHECK_THROWS_AS(reproduce_tables(which, TableOptions{}, scratch("bad")), ConfigError);
}

TEST_CASE("output directory errors name the path") {
  const auto file = fs::temp_directory_path() / "nnfit-tables-not-a-dir";
  std::ofstream(file) << "x";
  const std::vector<std::string> which{"power-sphere-classical"};
  TableOptions opt;
  opt.reps_critical = 100;
  opt.reps_power = 10;
  try {
    reproduce_tables(which, opt, file / "sub");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("nnfit-tables-not-a-dir") != std::string::npos);
  }
}

TEST_CASE("table files mirror the published layout") {
  const auto dir = scratch("shape");
  const std::vector<std::string> which{"appendix-sphere", "power-circle-classical"};
  TableOptions opt;
  opt.reps_critical = 200;
  opt.reps_power = 50;
  const auto written = reproduce_tables(which, opt, dir);
  REQUIRE(written.size() == 3);

  const auto appendix = lines_of(dir / "appendix-sphere.csv");
  REQUIRE(appendix.size() == 19);
  CHECK(appendix[0] == "alpha,n,J=1,J=2,J=3,J=4,J=5,J=6,J=7,J=8,J=9,J=10,J=15");
  CHECK(appendix[1].rfind("0.5,50,", 0) == 0);
  CHECK(appendix[18].rfind("5,200,", 0) == 0);

  const auto classical = lines_of(dir / "power-circle-classical.csv");
  REQUIRE(classical.size() == 7);
  CHECK(classical[0] == "alternative,n,RA_CIRCLE,KUIPER,WATSON");
  CHECK(classical[1].rfind("MF,50,", 0) == 0);
  CHECK(classical[6].rfind("BMF,200,", 0) == 0);

  const auto diff = lines_of(dir / "diff-report.csv");
  CHECK(diff[0] == "table,row,column,reference,reproduced,abs_diff,tolerance,within");
  CHECK(diff.size() == 1 + 18 * 11 + 6 * 3);
  CHECK(diff[1].rfind("appendix-sphere,alpha=0.5;n=50,J=1,0.78,", 0) == 0);
}

TEST_CASE("circle alpha = 1.5 rows are matched by n") {
  const auto dir = scratch("circle");
  const std::vector<std::string> which{"appendix-circle"};
  TableOptions opt;
  opt.reps_critical = 2000;
  reproduce_tables(which, opt, dir);
  for (const auto& line : lines_of(dir / "diff-report.csv")) {
    if (line.rfind("appendix-circle,alpha=1.5;n=100,J=1,", 0) == 0) {
      CHECK(line.find(",1.58,") != std::string::npos);
    }
    if (line.rfind("appendix-circle,alpha=1.5;n=200,J=1,", 0) == 0) {
      CHECK(line.find(",1.51,") != std::string::npos);
    }
  }
  std::ifstream in(dir / "appendix-circle.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("1.5,100,") < ss.str().find("1.5,200,"));
}

}  // TEST_SUITE
