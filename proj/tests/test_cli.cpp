#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sps/cli.hpp"
#include "sps/report_io.hpp"
#include "support.hpp"

using namespace sps;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sps");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sps_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::vector<std::string> kSmallRun = {"run", "--data", test::fixture_path("synthetic_mnl.csv"), "--g", "0.25",
                                            "--J", "4", "--N", "200", "--seed", "7", "--quiet"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(base.end(), extra);
  return base;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("render matches the golden file") {
    const auto r = cli({"render", test::fixture_path("report_small.json")});
    CHECK(r.code == 0);
    CHECK(r.out == slurp(test::fixture_path("report_small.txt")));
  }

  TEST_CASE("one functional renders four numbers in two bracketed groups") {
    auto doc = read_json_file(test::fixture_path("report_small.json"));
    doc["functionals"] = nlohmann::json::array({doc["functionals"][0]});
    const std::string text = render_report(doc);
    const auto first = text.find('\n') + 1;
    const std::string lines = text.substr(first, text.find("log ML") - first);
    CHECK(lines.find('(') != std::string::npos);
    CHECK(lines.find('[') != std::string::npos);
    int numbers = 0;
    std::istringstream words(lines);
    for (std::string w; words >> w;) {
      const auto b = w.find_first_of("-0123456789");
      if (b != std::string::npos && (b == 0 || w[b - 1] == '(' || w[b - 1] == '[')) ++numbers;
    }
    CHECK(numbers == 4);
  }

  TEST_CASE("undefined RNE renders as n/a") {
    auto doc = read_json_file(test::fixture_path("report_small.json"));
    doc["functionals"][0]["rne"] = nullptr;
    CHECK(render_report(doc).find("rne: n/a") != std::string::npos);
  }

  TEST_CASE("report version mismatch is refused") {
    auto doc = read_json_file(test::fixture_path("report_small.json"));
    doc["version"] = 99;
    CHECK_THROWS(render_report(doc));
  }

  TEST_CASE("run writes a report and reruns are byte-identical") {
    TempDir dir;
    const auto a = cli(with(kSmallRun, {"--out", dir / "a.json"}));
    REQUIRE(a.code == 0);
    const auto b = cli(with(kSmallRun, {"--out", dir / "b.json", "--threads", "3"}));
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(fs::exists(dir / "a.meta.json"));
    const auto doc = read_json_file(dir / "a.json");
    CHECK(doc.contains("functionals"));
    CHECK(doc.contains("log_ml"));
    CHECK(doc.at("functionals").size() == 2);
  }

  TEST_CASE("two-pass writes both reports and the schedule; the schedule replays") {
    TempDir dir;
    const auto r = cli(with(kSmallRun, {"--two-pass", "--out", dir / "r.json"}));
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "r.pass1.json"));
    CHECK(fs::exists(dir / "r.pass2.json"));
    CHECK(fs::exists(dir / "r.schedule.json"));
    const auto replay = cli({"run", "--data", test::fixture_path("synthetic_mnl.csv"), "--g", "0.25", "--J", "4",
                             "--N", "200", "--seed", "8", "--schedule", dir / "r.schedule.json", "--out",
                             dir / "replay.json"});
    CHECK(replay.code == 0);
    CHECK(read_json_file(dir / "replay.json").at("algorithm") == "nonadaptive");
    CHECK(read_json_file(dir / "replay.json").at("schedule") == read_json_file(dir / "r.pass1.json").at("schedule"));
  }

  TEST_CASE("text output") {
    const auto r = cli({"run", "--data", test::fixture_path("synthetic_mnl.csv"), "--g", "0.25", "--J", "4", "--N",
                        "200", "--monitor", "coef:1:2", "--monitor", "mean"});
    CHECK(r.code == 0);
    CHECK(r.out.find("log ML") != std::string::npos);
    CHECK(r.out.find("M iterations") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(cli({"run"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli(with(kSmallRun, {"--registry", "Iris"})).code == 2);
    CHECK(cli(with(kSmallRun, {"--resampling", "systematic"})).code == 2);
    CHECK(cli(with(kSmallRun, {"--two-pass", "--schedule", "x.json"})).code == 2);
    CHECK(cli({"run", "--data", test::fixture_path("synthetic_mnl.csv")}).code == 2);  // no g, no registry
    CHECK(cli(with(kSmallRun, {"--registry", "Cars"})).code == 3);                     // T and k differ
    CHECK(cli({"run", "--data", "/nonexistent.csv", "--g", "1"}).code == 3);
    const auto mixing = cli(with(kSmallRun, {"--k-inter", "0.999", "--k-final", "0.999", "--max-m-steps", "1"}));
    CHECK(mixing.code == 5);
    CHECK(mixing.err.find("mixing") != std::string::npos);
  }

  TEST_CASE("verify subcommand") {
    const auto r = cli({"verify", "--toy", "binomial", "--seed", "3", "--N", "500"});
    CHECK((r.code == 0 || r.code == 1));
    CHECK(r.out.find("quadrature") != std::string::npos);
    CHECK((r.out.find("PASS") != std::string::npos || r.out.find("FAIL") != std::string::npos));
    CHECK(cli({"verify", "--toy", "poisson"}).code == 2);
  }
}
