#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "isindy/csv.hpp"
#include "isindy/report.hpp"

using namespace isindy;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("isindy_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + ISINDY_CLI_PATH + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(dir / "stderr.txt")};
}

std::size_t line_count(const fs::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("simulate writes truth and observations") {
  const auto dir = scratch("simulate");
  const auto r = cli("simulate --system logistic --nvr 0.3 --seed 7 --output-dir \"" + dir.string() + "\"", dir);
  CHECK(r.code == 0);
  CHECK(line_count(dir / "truth.csv") == 602);
  CHECK(line_count(dir / "observations.csv") == 602);
  const auto truth = csv::read_observations(dir / "truth.csv");
  const auto obs = csv::read_observations(dir / "observations.csv");
  CHECK(truth.grid == obs.grid);
  CHECK(truth.values != obs.values);

  const auto again = scratch("simulate_again");
  cli("simulate --system logistic --nvr 0.3 --seed 7 --output-dir \"" + again.string() + "\"", again);
  CHECK(slurp(dir / "observations.csv") == slurp(again / "observations.csv"));
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("noise-free simulate writes no observations") {
  const auto dir = scratch("lorenz");
  const auto r = cli("simulate --system lorenz --output-dir \"" + dir.string() + "\"", dir);
  CHECK(r.code == 0);
  CHECK(line_count(dir / "truth.csv") == 1002);
  CHECK_FALSE(fs::exists(dir / "observations.csv"));
  CHECK(slurp(dir / "truth.csv").rfind("t,x1,x2,x3\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identify prints the canonical logistic model") {
  const auto dir = scratch("identify");
  cli("simulate --system logistic --output-dir \"" + dir.string() + "\"", dir);
  const auto r = cli("identify --input \"" + (dir / "truth.csv").string() + "\" --library poly:3 --lambda 0.1 "
                     "--output-dir \"" + dir.string() + "\"", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("dx1/dt = 1.6000*x1 - 1.0000*x1^2\n") != std::string::npos);
  CHECK(r.out.find("x1(0) = 0.1000\n") != std::string::npos);
  const auto model = report::read_model(dir / "model.json");
  CHECK(model.meta().method == "isindy");
  CHECK(model.xi()(2, 0) == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("the Euler baseline picks up a cubic term on noisy data") {
  const auto dir = scratch("insindy");
  cli("simulate --system logistic --nvr 0.3 --seed 1 --output-dir \"" + dir.string() + "\"", dir);
  const auto r = cli("identify --method insindy --input \"" + (dir / "observations.csv").string() +
                         "\" --output-dir \"" + dir.string() + "\"",
                     dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("*x1^3") != std::string::npos);
  CHECK(r.out.find("(first observation)") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("smooth reports one rho per column and reproduces clean data") {
  const auto dir = scratch("smooth");
  cli("simulate --system lorenz --output-dir \"" + dir.string() + "\"", dir);
  const auto r = cli("smooth --input \"" + (dir / "truth.csv").string() + "\" --output-dir \"" + dir.string() + "\"",
                     dir);
  CHECK(r.code == 0);
  CHECK(line_count(dir / "smoothing.csv") == 4);
  const auto truth = csv::read_observations(dir / "truth.csv");
  const auto smoothed = csv::read_observations(dir / "smoothed.csv");
  REQUIRE(smoothed.values.rows() == truth.values.rows());
  const auto sys_scale = truth.values.cwiseAbs().maxCoeff();
  CHECK(testing::rms(smoothed.values - truth.values) / sys_scale < 1e-4);
  fs::remove_all(dir);
}

TEST_CASE("input errors exit with status 2") {
  const auto dir = scratch("errors");
  {
    std::ofstream(dir / "empty.csv") << "";
    const auto r = cli("identify --input \"" + (dir / "empty.csv").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("TooShort") != std::string::npos);
  }
  {
    std::ofstream(dir / "gap.csv") << "t,x1\n0,1\n0.1,2\n0.2,3\n0.35,4\n0.45,5\n";
    const auto r =
        cli("smooth --input \"" + (dir / "gap.csv").string() + "\" --output-dir \"" + dir.string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("NonUniformGrid") != std::string::npos);
  }
  {
    std::ofstream(dir / "bad.json") << R"({"sytem": "logistic"})";
    CHECK(cli("simulate --config \"" + (dir / "bad.json").string() + "\" --output-dir \"" + dir.string() + "\"",
              dir)
              .code == 2);
  }
  CHECK(cli("simulate --system duffing --output-dir \"" + dir.string() + "\"", dir).code == 2);
  CHECK(cli("identify --input \"" + (dir / "missing.csv").string() + "\"", dir).code == 2);
  CHECK(cli("simulate --bogus 1", dir).code == 2);
  CHECK(cli("", dir).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = scratch("config");
  std::ofstream(dir / "run.json") << R"({"system": "lorenz", "nvr": [0.1], "seeds": [3]})";
  const auto r = cli("simulate --config \"" + (dir / "run.json").string() + "\" --system logistic --output-dir \"" +
                         dir.string() + "\"",
                     dir);
  CHECK(r.code == 0);
  CHECK(line_count(dir / "truth.csv") == 602);
  CHECK(fs::exists(dir / "observations.csv"));
  fs::remove_all(dir);
}

TEST_CASE("benchmark exits 1 when a cell fails and still writes its tables") {
  const auto dir = scratch("benchmark");
  // the combined library is numerically collinear at this small amplitude
  const auto r = cli("benchmark --system sine --library poly:3+trig:2 --ic=-0.2 --method isindy --output-dir \"" +
                         dir.string() + "\"",
                     dir);
  CHECK(r.code == 1);
  CHECK(r.out.find("1 cells, 1 failed") != std::string::npos);
  CHECK(slurp(dir / "table.csv").find("FAIL(RankDeficient)") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("a clean benchmark exits 0 with plots") {
  const auto dir = scratch("benchmark_ok");
  const auto r = cli("benchmark --system logistic --nvr 0,0.1 --seeds 1..2 --output-dir \"" + dir.string() + "\"",
                     dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("12 cells, 0 failed") != std::string::npos);
  CHECK(r.out.find("isindy nvr=0%: support 2/2") != std::string::npos);
  CHECK_FALSE(fs::is_empty(dir / "plots"));
  fs::remove_all(dir);
}
