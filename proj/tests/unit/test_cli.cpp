#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "nnfit/rng.hpp"
#include "nnfit/sampling.hpp"
#include "nnfit/scores.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = nnfit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "nnfit-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<nnfit::Point> read_points(const std::string& path, int dim) {
  std::ifstream in(path);
  std::vector<nnfit::Point> pts;
  for (std::string line; std::getline(in, line);) {
    std::stringstream ss(line);
    nnfit::Point p{0, 0, 0};
    char comma;
    for (int k = 0; k < dim; ++k) {
      ss >> p[k];
      if (k + 1 < dim) ss >> comma;
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("test command on the three-point torus file") {
  const auto data = write("three.csv", "0.1,0.5\n0.2,0.5\n0.9,0.5\n");
  const auto r = run({"test", data, "--alpha", "0.5", "--J", "1", "--crit-reps", "200"});
  CHECK(r.code == 0);
  CHECK(r.out.find("T: 1.22799") != std::string::npos);
  CHECK(r.out.find("direction: lower") != std::string::npos);
  CHECK(r.out.find("decision: ") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  auto r = run({"critvals", "--n", "50", "--J", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--alpha") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);

  r = run({"critvals", "--alpha", "1", "--n", "50"});
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha must differ from 1") != std::string::npos);

  CHECK(run({"power", "--alt", "con", "--alpha", "2", "--J", "25", "--n", "50", "--reps", "0"})
            .code == 2);
  CHECK(run({"critvals", "--alpha", "0.5", "--n", "50", "--reps", "0"}).code == 2);
  CHECK(run({"critvals", "--alpha", "0.5", "--n", "50", "--bogus"}).code == 2);
  CHECK(run({"power", "--alt", "kent", "--alpha", "2", "--n", "50"}).code == 2);
  CHECK(run({"test", write("two.csv", "0.1,0.2\n0.3,0.4\n0.5,0.5\n"), "--test", "jupp"}).code ==
        2);
  CHECK(run({"tables", "--which", "nope", "--out", (scratch() / "t0").string()}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("data errors exit with 3") {
  auto r = run({"test", write("bad.csv", "0.1,0.5\n0.2,abc\n0.3,0.3\n"), "--alpha", "0.5"});
  CHECK(r.code == 3);
  CHECK(r.err.find("line 2") != std::string::npos);

  r = run({"test", write("arity.csv", "0.1,0.5\n0.2,0.5,0.1\n"), "--alpha", "0.5"});
  CHECK(r.code == 3);
  CHECK(r.err.find("line 2") != std::string::npos);

  r = run({"test", write("off.csv", "1,0\n0,1.1\n-1,0\n"), "--space", "circle", "--alpha",
           "0.5"});
  CHECK(r.code == 3);

  CHECK(run({"test", (scratch() / "missing.csv").string(), "--alpha", "0.5"}).code == 3);
  CHECK(run({"plot", write("empty.csv", "")}).code == 3);
}

TEST_CASE("critvals writes and merges rows") {
  const auto out = (scratch() / "cv.csv").string();
  CHECK(run({"critvals", "--alpha", "0.5", "--n", "50", "--reps", "500", "--seed", "7", "--out",
             out})
            .code == 0);
  CHECK(run({"critvals", "--alpha", "2", "--J", "3", "--n", "50", "--reps", "500", "--out",
             out})
            .code == 0);
  const auto text = slurp(out);
  CHECK(text.rfind("space,test,alpha,J,n,level,direction,quantile,reps,seed\n", 0) == 0);
  CHECK(text.find("torus-square,NN,0.5,1,50,0.05,lower,") != std::string::npos);
  CHECK(text.find("torus-square,NN,2,3,50,0.05,upper,") != std::string::npos);

  const auto data = write("u50.csv", [] {
    std::string s;
    for (int i = 0; i < 50; ++i) {
      s += std::to_string((i * 37 % 50) / 50.0 + 0.01) + "," + std::to_string(i / 50.0) + "\n";
    }
    return s;
  }());
  const auto r = run({"test", data, "--alpha", "2", "--J", "3", "--critvals", out});
  CHECK(r.code == 0);
  CHECK(run({"test", data, "--alpha", "2", "--J", "4", "--critvals", out}).code == 2);
}

TEST_CASE("config file with command-line precedence") {
  const auto cfg = write("run.cfg", "# campaign\nalpha = 0.5\nn = 50\nreps = 300\nseed = 4\n");
  const auto a = run({"critvals", "--config", cfg});
  const auto b = run({"critvals", "--config", cfg, "--reps", "200"});
  const auto c = run({"critvals", "--alpha", "0.5", "--n", "50", "--reps", "200", "--seed", "4"});
  CHECK(a.code == 0);
  CHECK(a.out.find(",300,4") != std::string::npos);
  CHECK(b.out == c.out);
  CHECK(run({"critvals", "--config", write("broken.cfg", "alpha\n")}).code == 2);
}

TEST_CASE("sample command") {
  const auto con = (scratch() / "con.csv").string();
  const auto con2 = (scratch() / "con2.csv").string();
  CHECK(run({"sample", "--alt", "con", "--n", "200", "--seed", "5", "--out", con}).code == 0);
  CHECK(run({"sample", "--alt", "con", "--n", "200", "--seed", "5", "--out", con2}).code == 0);
  CHECK(slurp(con) == slurp(con2));
  const auto pts = read_points(con, 2);
  CHECK(pts.size() == 200);
  for (const auto& p : pts) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] <= 1.0);
  }

  const auto mf = run({"sample", "--space", "sphere", "--alt", "mf", "--kappa", "0.5", "--n",
                       "1000", "--seed", "2"});
  CHECK(mf.code == 0);
  const auto path = write("mf.csv", mf.out);
  for (const auto& p : read_points(path, 3)) {
    CHECK(std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0) < 1e-9);
  }
  const auto header = run({"sample", "--space", "circle", "--n", "3", "--header"});
  CHECK(header.out.rfind("x,y\n", 0) == 0);
}

TEST_CASE("sample then test round trip") {
  const auto file = (scratch() / "sphere.csv").string();
  CHECK(run({"sample", "--space", "sphere", "--alt", "kent", "--n", "300", "--seed", "8",
             "--out", file})
            .code == 0);
  nnfit::RngStream rng(8, 0);
  const auto direct = nnfit::sample(nnfit::Space::sphere(), nnfit::Kent{}, 300, rng);
  const double expected = nnfit::statistic(direct, {2.0, 5}).T;
  const nnfit::SampleSet loaded(nnfit::Space::sphere(), read_points(file, 3));
  CHECK(nnfit::statistic(loaded, {2.0, 5}).T == doctest::Approx(expected).epsilon(1e-12));

  const auto json = (scratch() / "log.jsonl").string();
  const auto r = run({"test", file, "--space", "sphere", "--alpha", "2", "--J", "5", "--crit-reps",
                      "500", "--json", json});
  CHECK(r.code == 0);
  CHECK(run({"test", file, "--space", "sphere", "--test", "jupp", "--asymptotic", "--json", json})
            .code == 0);
  const auto log = slurp(json);
  CHECK(std::count(log.begin(), log.end(), '\n') == 2);
  CHECK(log.find("\"test\":\"NN\"") != std::string::npos);
  CHECK(log.find("\"test\":\"JUPP\"") != std::string::npos);
  CHECK(log.find("\"reject\":true") != std::string::npos);
}

TEST_CASE("power command") {
  const auto r = run({"power", "--space", "circle", "--test", "ra-circle", "--alt", "mf",
                      "--kappa", "1", "--n", "50", "--reps", "200", "--crit-reps", "500"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("space,test,alpha,J,n,alternative,reps,rate,ci\n", 0) == 0);
  CHECK(r.out.find("circle,RA_CIRCLE,,,50,MF,200,") != std::string::npos);
}

TEST_CASE("plot command") {
  const auto one = write("one.csv", "0.25,0.75\n");
  const auto svg1 = (scratch() / "one.svg").string();
  CHECK(run({"plot", one, "--out", svg1}).code == 0);
  const auto text = slurp(svg1);
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("r=\"2\"") != std::string::npos);
  CHECK(text.find("r=\"2\"") == text.rfind("r=\"2\""));
  CHECK(text.find(">0.5</text>") != std::string::npos);

  const auto svg2 = (scratch() / "one-again.svg").string();
  run({"plot", one, "--out", svg2});
  CHECK(slurp(svg2) == text);

  const auto sphere = run({"sample", "--space", "sphere", "--n", "20"});
  const auto r = run({"plot", write("s.csv", sphere.out)});
  CHECK(r.code == 0);
  CHECK(r.out.find("z &gt;= 0") != std::string::npos);
}

TEST_CASE("tables command") {
  const auto dir = scratch() / "tables";
  const auto r = run({"tables", "--which", "power-sphere-classical", "--reps-critical", "100",
                      "--reps-power", "20", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "power-sphere-classical.csv"));
  CHECK(fs::exists(dir / "diff-report.csv"));
  const auto none = run({"tables", "--out", (scratch() / "none").string()});
  CHECK(none.code == 0);
  CHECK(none.out.empty());
}

}  // TEST_SUITE
