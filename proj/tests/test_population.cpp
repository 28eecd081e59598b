#include <catch2/catch.hpp>

#include <fstream>
#include <string>

#include "llp/population.hpp"
#include "test_support.hpp"

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/llp_pop_") + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("valid rows load, column order follows the header") {
  const auto pop = llp::load_population(write_temp(
      "ok.csv",
      "population,name,latitude,longitude\n"
      "100,\"Alpha, County\",40.0,-74.0\n"
      "200,Beta,41.0,-75.0\n"
      "300,Gamma,42.0,-76.0\n"));
  REQUIRE(pop.counties.size() == 3);
  CHECK(pop.skipped_rows == 0);
  CHECK(pop.counties[0].name == "Alpha, County");
  CHECK(pop.counties[0].population == Approx(100.0));
}

TEST_CASE("negative population and malformed rows are skipped and counted") {
  const auto pop = llp::load_population(write_temp(
      "bad.csv",
      "name,latitude,longitude,population\n"
      "Good,40.0,-74.0,10\n"
      "Negative,40.0,-74.0,-5\n"
      "BadLat,91.0,-74.0,10\n"
      "BadNumber,40.0,-74.0,ten\n"
      "Short,40.0\n"));
  CHECK(pop.counties.size() == 1);
  CHECK(pop.skipped_rows == 4);
}

TEST_CASE("missing headers and empty files are errors") {
  CHECK_THROWS_AS(llp::load_population(write_temp("nohdr.csv", "a,b,c\n1,2,3\n")),
                  llp::InputError);
  CHECK_THROWS_AS(llp::load_population(write_temp(
                      "norows.csv", "name,latitude,longitude,population\nX,99,0,1\n")),
                  llp::InputError);
  CHECK_THROWS_AS(llp::load_population("/nonexistent.csv"), llp::InputError);
}

TEST_CASE("bundled county fixture loads cleanly") {
  const auto pop = llp::load_population(llp_test::fixture("counties_us.csv"));
  CHECK(pop.counties.size() >= 60);
  CHECK(pop.skipped_rows == 0);
}

TEST_CASE("one county gives its full population to its one site") {
  auto g = llp_test::line_graph(1);
  const std::vector<llp::CountyRecord> counties{{"only", 0.0, 0.0, 12345.0}};
  g = llp::assign_weights(std::move(g), counties);
  CHECK(g.site(0).weight == Approx(12345.0));
}

TEST_CASE("equidistant county breaks the tie toward the lower site id") {
  // sites at lon 0.0 and 0.2; county exactly between them at 0.1
  auto g = llp_test::line_graph(3);
  const std::vector<llp::CountyRecord> counties{{"mid", 0.0, 0.1, 500.0}};
  g = llp::assign_weights(std::move(g), counties);
  CHECK(g.site(1).weight == Approx(500.0));
  CHECK(g.site(0).weight < 500.0);  // floor weight
}

TEST_CASE("weights match an exhaustive nearest-site scan") {
  auto g = llp_test::line_graph(3);
  const std::vector<llp::CountyRecord> counties{
      {"c0", 0.0, 0.01, 10.0}, {"c1", 0.0, 0.09, 20.0}, {"c2", 0.0, 0.21, 40.0},
      {"c3", 0.0, 0.39, 80.0}, {"c4", 0.0, 0.41, 160.0},
  };
  g = llp::assign_weights(std::move(g), counties);

  std::vector<double> expect(3, 0.0);
  for (const auto& c : counties) {
    int best = 0;
    double best_d = llp::haversine_km(c.lat, c.lon, g.site(0).lat, g.site(0).lon);
    for (int s = 1; s < 3; ++s) {
      const double d = llp::haversine_km(c.lat, c.lon, g.site(s).lat, g.site(s).lon);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    expect[static_cast<std::size_t>(best)] += c.population;
  }
  for (int s = 0; s < 3; ++s)
    if (expect[static_cast<std::size_t>(s)] > 0.0)
      CHECK(g.site(s).weight == Approx(expect[static_cast<std::size_t>(s)]));
}

TEST_CASE("county-less sites get one percent of the smallest assigned weight") {
  auto g = llp_test::line_graph(5);
  const std::vector<llp::CountyRecord> counties{{"c0", 0.0, 0.0, 1000.0}};
  g = llp::assign_weights(std::move(g), counties);
  CHECK(g.site(0).weight == Approx(1000.0));
  for (int s = 1; s < 5; ++s) CHECK(g.site(s).weight == Approx(10.0));
}

TEST_CASE("assign_weights requires counties") {
  auto g = llp_test::line_graph(2);
  CHECK_THROWS_AS(llp::assign_weights(std::move(g), {}), llp::InputError);
}
