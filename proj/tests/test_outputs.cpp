#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "seatrace/errors.hpp"
#include "seatrace/outputs.hpp"
#include "support.hpp"

using namespace seatrace;

TEST_CASE("sha256 digests") {
  CHECK(outputs::sha256_string("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(outputs::sha256_string("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto path = std::filesystem::temp_directory_path() / "seatrace_sha_test.txt";
  outputs::write_text(path, "abc");
  CHECK(outputs::sha256_file(path) == outputs::sha256_string("abc"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(outputs::sha256_file("/nonexistent/file"), IoError);
}

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(outputs::format_number(0.1) == "0.1");
  CHECK(outputs::format_number(2.0) == "2");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(outputs::format_number(x)) == x);
}

TEST_CASE("counts csv lists non-empty groups and transits") {
  metrics::CountTimeline tl;
  tl.start = 1722470400;
  tl.n_bins = 2;
  tl.moving = Eigen::ArrayXXi::Zero(2, metrics::kGroupCount);
  tl.stationary = Eigen::ArrayXXi::Zero(2, metrics::kGroupCount);
  const int g = metrics::group_index(VesselCategory::Tanker, SizeClass::GE10k);
  tl.moving(1, g) = 3;
  tl.events.push_back({1, "Oresund, north", true, g});
  const auto csv = outputs::counts_csv(tl);
  CHECK(csv.rfind("bin_start_utc,category,size_class,moving,stationary,entries,exits,area\n", 0) == 0);
  CHECK(csv.find("2024-08-01T00:04:00Z,Tanker,GE10k,3,0,0,0,*\n") != std::string::npos);
  CHECK(csv.find("2024-08-01T00:04:00Z,Tanker,GE10k,0,0,1,0,\"Oresund, north\"\n") != std::string::npos);
  CHECK(csv.find("00:00:00Z") == std::string::npos);
}

TEST_CASE("port rings trace cell outlines") {
  geo::GridSpec grid;
  grid.lat_min = 0.0;
  grid.lat_max = 5.0;
  grid.lon_min = 0.0;
  grid.lon_max = 5.0;
  grid.dlat = 1.0;
  grid.dlon = 1.0;
  ports::PortArea p;
  p.id = 1;
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) {
      if (r != 2 || c != 2) p.cells.push_back({r, c});
    }
  }
  const auto rings = outputs::port_rings(p, grid);
  REQUIRE(rings.size() == 2);
  auto signed_area = [](const std::vector<GeoPoint>& ring) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) a += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
    return 0.5 * a;
  };
  CHECK(signed_area(rings[0]) == doctest::Approx(9.0));
  CHECK(signed_area(rings[1]) == doctest::Approx(-1.0));
  CHECK(rings[0].front().lat == rings[0].back().lat);
  CHECK(rings[0].front().lon == rings[0].back().lon);

  const std::vector<ports::PortArea> all{p};
  const auto gj = outputs::ports_geojson(all, grid);
  CHECK(gj["type"] == "FeatureCollection");
  CHECK(gj["features"][0]["geometry"]["type"] == "MultiPolygon");
  CHECK(gj["features"][0]["geometry"]["coordinates"][0].size() == 2);
}

TEST_CASE("journey json lists legs") {
  Journey j;
  j.mmsi = 5;
  j.legs.emplace_back(StationaryPeriod{5, 0, 100, {55, 15}, true});
  j.legs.emplace_back(AbsentPeriod{5, 100, 200, std::string("Skagerrak"), std::nullopt});
  const auto js = outputs::journey_json(j);
  CHECK(js["mmsi"] == 5);
  CHECK(js["legs"].size() == 2);
  CHECK(js["legs"][0]["kind"] == "stationary");
  CHECK(js["legs"][1]["exit_area"] == "Skagerrak");
  CHECK(js["legs"][1]["entry_area"].is_null());
}

TEST_CASE("manifest records inputs, stages and outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "seatrace_manifest_test";
  std::filesystem::create_directories(dir);
  outputs::write_text(dir / "in.txt", "abc");
  outputs::Manifest m({{"a", 1}}, {dir / "in.txt"});
  m.stage("ingest", "ok");
  m.stage("cleanse", "failed", "boom");
  m.output("counts.csv");
  m.write(dir);
  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["version"] == outputs::kVersion);
  CHECK(j["inputs"][0]["sha256"] == outputs::sha256_string("abc"));
  CHECK(j["stages"][1]["status"] == "failed");
  CHECK(j["stages"][1]["message"] == "boom");
  CHECK(j["outputs"][0] == "counts.csv");
  CHECK(j["config_sha256"] == outputs::sha256_string(nlohmann::ordered_json{{"a", 1}}.dump()));
  std::filesystem::remove_all(dir);
}
