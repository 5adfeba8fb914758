#include <doctest.h>

#include "seatrace/config.hpp"
#include "seatrace/errors.hpp"

using namespace seatrace;
using nlohmann::json;

TEST_CASE("defaults") {
  const config::RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.d_tol == 100.0);
  CHECK(c.policy.t0_hours == 6.0);
  CHECK(c.low_case_t0_hours == 1.0);
  CHECK(c.bin_seconds == 240.0);
  CHECK(c.cleanse.max_speed_kn == 50.0);
  CHECK(c.cleanse.max_accel == 1.0);
  const auto g = c.grid();
  CHECK(g.dlat == doctest::Approx(15.0 / 3600.0));
  CHECK(g.dlon == doctest::Approx(30.0 / 3600.0));
  CHECK(c.cases.size() == 3);
}

TEST_CASE("UTC times") {
  CHECK(config::parse_time("2024-08-01T00:00:00Z") == 1722470400);
  CHECK(config::parse_time("2024-08-01") == 1722470400);
  CHECK(config::parse_time("2024-02-29T12:30:15Z") == 1709209815);
  CHECK(config::parse_time(json(42)) == 42);
  CHECK_THROWS_AS(config::parse_time("2023-02-29T00:00:00Z"), ConfigError);
  CHECK_THROWS_AS(config::parse_time("yesterday"), ConfigError);
  CHECK_THROWS_AS(config::parse_time(json(1.5)), ConfigError);
  CHECK(config::format_time(1709209815) == "2024-02-29T12:30:15Z");
  CHECK(config::format_time(-1) == "1969-12-31T23:59:59Z");
}

TEST_CASE("nested and dotted keys") {
  const auto c = config::from_json(json::parse(R"({
    "input": "a.jsonl",
    "roi": {"lat_min": 55, "lat_max": 59},
    "grid.dlat_arcsec": 60,
    "journey": {"t0_hours": 3},
    "metrics": {"stationary_window_days": 2},
    "start": "2024-08-01",
    "cases": "df,hi"
  })"));
  CHECK(c.input == "a.jsonl");
  CHECK(c.lat_min == 55.0);
  CHECK(c.lat_max == 59.0);
  CHECK(c.grid_dlat_arcsec == 60.0);
  CHECK(c.policy.t0_hours == 3.0);
  REQUIRE(c.stationary_window_days);
  CHECK(*c.stationary_window_days == 2.0);
  CHECK(c.start == 1722470400);
  CHECK(c.cases == std::vector<journey::Case>{journey::Case::Df, journey::Case::Hi});
}

TEST_CASE("bad configurations") {
  CHECK_THROWS_AS(config::from_json(json::parse(R"({"roi": {"lat_mim": 1}})")), ConfigError);
  CHECK_THROWS_AS(config::from_json(json::parse(R"({"trajectory": {"d_tol": "wide"}})")), ConfigError);
  CHECK_THROWS_AS(config::from_json(json::parse("[1, 2]")), ConfigError);
  CHECK_THROWS_AS(config::from_json(json::parse(R"({"cases": "medium"})")), Error);
  CHECK_THROWS_AS(config::load("/nonexistent/config.json"), IoError);

  config::RunConfig c;
  c.lat_min = 60.0;
  c.lat_max = 55.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.d_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.uncertainty.delta_dark = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.start = 100;
  c.end = 100;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("effective configuration round trips") {
  config::RunConfig c;
  c.input = "x.jsonl";
  c.tonnage = "t.csv";
  c.start = 1722470400;
  c.end = 1722470400 + 86400;
  c.d_tol = 250.0;
  c.stationary_window_days = 1.0;
  c.uncertainty.delta_aisb_category[5] = 0.4;
  c.cases = {journey::Case::Hi};
  const auto j = config::to_json(c);
  const auto back = config::from_json(json::parse(j.dump()));
  CHECK(config::to_json(back) == j);
  CHECK(back.d_tol == 250.0);
  CHECK(back.end == c.end);
  CHECK(back.uncertainty.delta_aisb_category[5] == 0.4);
}

TEST_CASE("case policies and the stationary window") {
  const config::RunConfig c;
  CHECK(c.policy_for(journey::Case::Low).t0_hours == 1.0);
  CHECK(c.policy_for(journey::Case::Low).area_variant == ingest::AreaVariant::Large);
  CHECK(c.policy_for(journey::Case::Hi).area_variant == ingest::AreaVariant::Small);
  CHECK(c.policy_for(journey::Case::Hi).t0_hours == 6.0);
  CHECK(c.policy_for(journey::Case::Df).area_variant == ingest::AreaVariant::Default);
  CHECK(c.window_days(30.0) == 21.0);
  CHECK(c.window_days(10.0) == 10.0);
  config::RunConfig w;
  w.stationary_window_days = 5.0;
  CHECK(w.window_days(7.0) == 5.0);
  CHECK_THROWS_AS(w.window_days(4.0), ConfigError);
  CHECK(config::parse_cases("all").size() == 3);
}
