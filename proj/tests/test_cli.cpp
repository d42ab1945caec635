#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agmon/cli.hpp"

using namespace agmon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "agmon_cli_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("grids are inclusive within half a step") {
  CHECK(cli::parse_grid("0.25:4:0.25").size() == 16);
  CHECK(cli::parse_grid("0:1:0.3").size() == 4);
  const auto g = cli::parse_grid("0:1:0.333333");
  REQUIRE(g.size() == 4);
  CHECK(std::abs(g.back() - 1.0) < 1e-5);
  CHECK(cli::parse_grid("2.5") == std::vector<double>{2.5});
  CHECK_THROWS_AS(cli::parse_grid("1:0:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("0:1"), std::invalid_argument);
  CHECK(cli::parse_list("2,3,4") == std::vector<double>{2, 3, 4});
}

TEST_CASE("verify on the regular tree with the path multiplier exits 0") {
  const Outcome o = run_cli({"verify", "--family", "regular-tree", "--b", "2", "--kL", "1", "--depth", "10",
                             "--multiplier", "path"});
  INFO(o.err);
  REQUIRE(o.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(o.out);
  CHECK(doc["status"] == "PASS");
  CHECK(doc["decay"]["on_path"] == true);
  CHECK(doc["identity"]["pass"] == true);
  CHECK(doc["monotonicity"]["pass"] == true);
}

TEST_CASE("verify exits 1 when the multiplier outruns the decay") {
  const Outcome o = run_cli({"verify", "--family", "regular-tree", "--depth", "10", "--multiplier", "path",
                             "--epsilon", "-0.1", "--vertex-extra", "0.1"});
  CHECK(o.code == cli::kExitFail);
  CHECK(nlohmann::json::parse(o.out)["status"] == "FAIL");
}

TEST_CASE("ladder sweep rows are unimodular and below 1/e") {
  const Outcome o = run_cli({"sweep", "--family", "ladder", "--w", "0.25:4:0.25"});
  INFO(o.err);
  REQUIRE(o.code == cli::kExitOk);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 17);
  CHECK(rows[0][2] == "det_T");
  CHECK(rows[0][4] == "lambda_small");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][2]) - 1.0) <= 1e-12);
    CHECK(std::stod(rows[i][4]) < std::exp(-1.0));
  }
}

TEST_CASE("tree and two-lengths sweeps") {
  const Outcome t = run_cli({"sweep", "--family", "regular-tree", "--b", "2:4:1", "--kL", "0.5:1.5:0.5"});
  CHECK(t.code == cli::kExitOk);
  CHECK(csv_rows(t.out).size() == 10);
  const Outcome m = run_cli({"sweep", "--family", "millipede", "--delta", "0.02:0.1:0.04"});
  CHECK(m.code == cli::kExitOk);
  CHECK(csv_rows(m.out).size() == 4);
  const Outcome l = run_cli({"sweep", "--family", "two-lengths", "--kL1", "0.5:2:0.5", "--kL2", "1"});
  CHECK(l.code == cli::kExitOk);
  CHECK(csv_rows(l.out).size() == 5);
  CHECK(run_cli({"sweep", "--family", "braided"}).code == cli::kExitUsage);
}

TEST_CASE("generate reports a dangling vertex with exit 2") {
  const fs::path spec = scratch_dir() / "broken.json";
  std::ofstream(spec) << R"({"vertices":[{"id":0},{"id":1}],
    "edges":[{"id":0,"tail":0,"head":1,"length":1,"potential":0},
             {"id":5,"tail":1,"head":42,"length":1,"potential":0}],
    "root":0,"energy":-1})";
  const Outcome o = run_cli({"generate", "--spec", spec.string()});
  CHECK(o.code == cli::kExitUsage);
  CHECK(o.err.find("42") != std::string::npos);
  CHECK(o.err.find("offending id 5") != std::string::npos);
}

TEST_CASE("generate round trips its own output") {
  const Outcome a = run_cli({"generate", "--family", "ladder", "--w", "0.5", "--depth", "3"});
  REQUIRE(a.code == 0);
  const fs::path spec = scratch_dir() / "ladder.json";
  std::ofstream(spec) << a.out;
  const Outcome b = run_cli({"generate", "--spec", spec.string()});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("usage errors and help") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"verify", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run_cli({"verify", "--help"}).code == cli::kExitOk);
  for (const char* sub : {"generate", "metric", "solve", "sweep"}) {
    const Outcome o = run_cli({sub, "--help"});
    CHECK(o.code == cli::kExitOk);
    CHECK(o.out.find("--out") != std::string::npos);
  }
  CHECK(run_cli({"solve", "--family", "nope"}).code == cli::kExitUsage);
  CHECK(run_cli({"solve", "--kL", "abc"}).code == cli::kExitUsage);
  CHECK(run_cli({"solve", "--E", "1"}).code == cli::kExitUsage);
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::vector<std::string> args{"verify", "--family", "two-lengths", "--depth", "7"};
  const Outcome a = run_cli(args);
  const Outcome b = run_cli(args);
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}

TEST_CASE("metric and solve CSV shapes") {
  const Outcome m = run_cli({"metric", "--family", "regular-tree", "--b", "2", "--depth", "3"});
  REQUIRE(m.code == 0);
  const auto rows = csv_rows(m.out);
  CHECK(rows[0] == std::vector<std::string>{"vertex_id", "arc_distance", "rho_a"});
  CHECK(rows.size() == 1 + 16);
  const Outcome s = run_cli({"solve", "--family", "regular-tree", "--depth", "2", "--samples", "5"});
  REQUIRE(s.code == 0);
  CHECK(csv_rows(s.out).size() == 1 + 7 * 5);
}

TEST_CASE("relative outputs land in AGMON_OUTPUT_DIR") {
  const fs::path dir = scratch_dir() / "outdir";
  fs::remove_all(dir);
  ::setenv("AGMON_OUTPUT_DIR", dir.c_str(), 1);
  const Outcome o = run_cli({"verify", "--family", "regular-tree", "--depth", "8", "--out", "r/report.json", "--csv",
                             "r/report.csv"});
  ::unsetenv("AGMON_OUTPUT_DIR");
  CHECK(o.code == 0);
  CHECK(fs::exists(dir / "r" / "report.json"));
  CHECK(fs::exists(dir / "r" / "report.csv"));
  CHECK(o.out.empty());
}
