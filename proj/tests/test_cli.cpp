#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "llp/cli.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

std::string temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("llp_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("build writes a tree that passes its own validation") {
  const std::string dir = temp_dir("build");
  const int rc = llp::run_cli({"--topology", llp_test::fixture("arpanet19728.graphml"),
                               "--out", dir, "--lt", "2", "--seed", "7", "build"});
  CHECK(rc == llp::kExitOk);
  REQUIRE(fs::exists(fs::path(dir) / "tree.json"));

  const int rc2 =
      llp::run_cli({"--topology", llp_test::fixture("arpanet19728.graphml"), "--tree",
                    (fs::path(dir) / "tree.json").string(), "validate"});
  CHECK(rc2 == llp::kExitOk);
}

TEST_CASE("validate rejects a corrupted tree with exit code 2") {
  const std::string dir = temp_dir("corrupt");
  REQUIRE(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--out", dir,
                        "--lt", "1", "build"}) == llp::kExitOk);
  const fs::path tree_path = fs::path(dir) / "tree.json";
  auto j = llp::load_json_file(tree_path.string());
  j["nodes"][0]["center"] = 99;  // not a member of anything
  llp::write_json_file(j, tree_path.string());

  const int rc = llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--tree",
                               tree_path.string(), "validate"});
  CHECK(rc == llp::kExitInvariant);
}

TEST_CASE("all runs the full pipeline and emits every table") {
  const std::string dir = temp_dir("all");
  const int rc = llp::run_cli(
      {"--topology", llp_test::fixture("l5.graphml"), "--counties",
       llp_test::fixture("l5_counties.csv"), "--out", dir, "--lt", "1", "--seed", "3",
       "--connections", "300", "--moves", "100", "all"});
  CHECK(rc == llp::kExitOk);
  for (const char* name :
       {"report.json", "inflation.csv", "memory.csv", "update.csv", "cdf.csv"})
    CHECK(fs::exists(fs::path(dir) / name));

  const auto report = llp::load_json_file((fs::path(dir) / "report.json").string());
  CHECK(report["inflation"]["records"].size() == 300);
  CHECK(report["update"]["records"].size() == 100);
  CHECK(report["provenance"]["version"] == llp::kVersionString);
}

TEST_CASE("identical inputs produce byte-identical outputs") {
  const std::string dir_a = temp_dir("det_a");
  const std::string dir_b = temp_dir("det_b");
  const std::vector<std::string> common{
      "--topology",    llp_test::fixture("abilene.graphml"),
      "--counties",    llp_test::fixture("counties_us.csv"),
      "--lt",          "2",
      "--seed",        "11",
      "--connections", "400",
      "--moves",       "150"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", dir_a, "all"});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", dir_b, "all"});
  REQUIRE(llp::run_cli(args_a) == llp::kExitOk);
  REQUIRE(llp::run_cli(args_b) == llp::kExitOk);
  for (const char* name : {"report.json", "inflation.csv", "memory.csv", "update.csv",
                           "cdf.csv"})
    CHECK(slurp(fs::path(dir_a) / name) == slurp(fs::path(dir_b) / name));
}

TEST_CASE("experiments accept a prebuilt tree and json-only output") {
  const std::string dir = temp_dir("reuse");
  REQUIRE(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--out", dir,
                        "--lt", "1", "build"}) == llp::kExitOk);
  const std::string tree = (fs::path(dir) / "tree.json").string();
  const std::string out2 = temp_dir("reuse_out");
  REQUIRE(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--counties",
                        llp_test::fixture("l5_counties.csv"), "--tree", tree, "--out",
                        out2, "--format", "json", "--connections", "60", "--moves",
                        "20", "inflate"}) == llp::kExitOk);
  CHECK(fs::exists(fs::path(out2) / "report.json"));
  CHECK_FALSE(fs::exists(fs::path(out2) / "inflation.csv"));
  const auto report = llp::load_json_file((fs::path(out2) / "report.json").string());
  CHECK(report["provenance"]["heuristics"] == "(loaded tree)");
  CHECK(report["inflation"]["records"].size() == 60);
  CHECK_FALSE(report.contains("memory"));
}

TEST_CASE("input errors exit with code 1") {
  CHECK(llp::run_cli({"--topology", "/no/such/file.graphml", "build"}) ==
        llp::kExitInputError);
  CHECK(llp::run_cli({"build"}) == llp::kExitInputError);  // no topology
  CHECK(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--heuristics",
                      "bogus", "build"}) == llp::kExitInputError);
  // experiments without counties cannot sample a workload
  CHECK(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "inflate"}) ==
        llp::kExitInputError);
}

TEST_CASE("build accepts a custom epsilon policy and emits the metric graph") {
  const std::string dir = temp_dir("policy");
  const std::string policy = dir + "/policy.json";
  {
    std::ofstream out(policy);
    out << R"([{"lo": 1.0, "hi": 2.0, "eps": 0.0}, {"lo": 2.0, "hi": 4.0, "eps": 0.0}])";
  }
  const int rc = llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--out",
                               dir, "--lt", "1", "--epsilon-policy", policy, "build",
                               "--graph-out", dir + "/graph.json"});
  CHECK(rc == llp::kExitOk);
  const auto tree = llp::load_json_file(dir + "/tree.json");
  // eps 0 forces a shortcut for every inflated ordered leaf pair
  CHECK(tree["shortcuts"].size() > 0);
  const auto graph = llp::load_json_file(dir + "/graph.json");
  CHECK(graph["sites"].size() == 5);
  CHECK(graph["latency"].size() == 5);
  CHECK(graph["latency"][0][4].get<double>() == Approx(4.0));

  // malformed policy is an input error
  {
    std::ofstream out(policy);
    out << R"([{"lo": 1.0, "hi": 2.0, "eps": 0.5}, {"lo": 3.0, "hi": 4.0, "eps": 0.6}])";
  }
  CHECK(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--out", dir,
                      "--lt", "1", "--epsilon-policy", policy, "build"}) ==
        llp::kExitInputError);
}

TEST_CASE("events file records one JSON line per operation") {
  const std::string dir = temp_dir("events");
  const std::string events = dir + "/events.jsonl";
  REQUIRE(llp::run_cli({"--topology", llp_test::fixture("l5.graphml"), "--counties",
                        llp_test::fixture("l5_counties.csv"), "--out", dir, "--lt", "1",
                        "--connections", "50", "--moves", "20", "--events", events,
                        "update"}) == llp::kExitOk);
  std::ifstream in(events);
  REQUIRE(in);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(line.front() == '{');
    CHECK(line.find("\"op\"") != std::string::npos);
  }
  CHECK(lines == 50 + 20);  // registrations plus moves
}
