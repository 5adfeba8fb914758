#include <doctest.h>

#include <sstream>

#include "seatrace/errors.hpp"
#include "seatrace/ingest.hpp"
#include "support.hpp"

using namespace seatrace;

TEST_CASE("position and static lines parse") {
  const auto p = ingest::parse_record(R"({"kind":"pos","mmsi":219000001,"t":1722470400,"lat":55.5,"lon":12.25,"sog":11.5})");
  REQUIRE(p);
  CHECK(p->kind == RecordKind::PositionReport);
  CHECK(p->mmsi == 219000001u);
  CHECK(p->sog == 11.5);
  const auto s = ingest::parse_record(R"({"kind":"static","mmsi":5,"t":10,"lat":55.5,"lon":12.25,"type":70,"dest":"KIEL"})");
  REQUIRE(s);
  CHECK(s->kind == RecordKind::StaticReport);
  CHECK(s->vessel_type == 70);
  CHECK(s->destination == "KIEL");
}

TEST_CASE("malformed lines are rejected") {
  CHECK_FALSE(ingest::parse_record("not json"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"x","mmsi":1,"t":1,"lat":0,"lon":0})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"pos","mmsi":1,"t":1,"lat":95,"lon":0})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"pos","mmsi":1,"t":1.5,"lat":0,"lon":0})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"pos","mmsi":1000000000,"t":1,"lat":0,"lon":0})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"pos","mmsi":1,"t":1,"lat":0,"lon":0,"sog":-1})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"static","mmsi":1,"t":1,"lat":0,"lon":0,"type":120})"));
  CHECK_FALSE(ingest::parse_record(R"({"kind":"pos","mmsi":1,"t":1,"lat":0})"));
}

TEST_CASE("format and parse round trip") {
  const auto r = testing::stat(7, 99, 54.123456789, 10.987654321, 52, "GDANSK");
  const auto back = ingest::parse_record(ingest::format_record(r));
  REQUIRE(back);
  CHECK(*back == r);
}

TEST_CASE("stream reading counts skipped lines and gaps") {
  std::istringstream in(
      R"({"kind":"pos","mmsi":1,"t":0,"lat":55,"lon":12})" "\n"
      "\n"
      "garbage\n"
      R"({"kind":"pos","mmsi":1,"t":500,"lat":55,"lon":12})" "\n"
      R"({"kind":"pos","mmsi":2,"t":450,"lat":55,"lon":12})" "\n");
  const auto res = ingest::read_records(in);
  CHECK(res.records.size() == 3);
  CHECK(res.stats.lines == 4);
  CHECK(res.stats.skipped == 1);
  CHECK(res.stats.gaps_over_400s == 1);
  CHECK(res.stats.max_gap == 500);
}

TEST_CASE("mostly malformed input fails loudly") {
  std::istringstream in("a\nb\n" R"({"kind":"pos","mmsi":1,"t":0,"lat":55,"lon":12})" "\n");
  CHECK_THROWS_AS(ingest::read_records(in), FormatError);
}

TEST_CASE("missing record file is an IoError") {
  CHECK_THROWS_AS(ingest::read_records(std::filesystem::path("/nonexistent/records.jsonl")), IoError);
}

TEST_CASE("transit areas and variants") {
  const auto df = ingest::baltic_transit_areas();
  CHECK(df.size() == 11);
  CHECK(ingest::in_transit_area({57.5, 9.04}, df) == std::string(ingest::kSkagerrak));
  CHECK_FALSE(ingest::in_transit_area({57.5, 9.07}, df));
  const auto large = ingest::baltic_transit_areas(ingest::AreaVariant::Large);
  CHECK(ingest::in_transit_area({57.5, 9.07}, large) == std::string(ingest::kSkagerrak));
  const auto small = ingest::baltic_transit_areas(ingest::AreaVariant::Small);
  CHECK_FALSE(ingest::in_transit_area({57.5, 9.04}, small));
  CHECK(ingest::in_transit_area({57.70, 11.95}, df) == std::string("Vänern Lake"));
  CHECK(ingest::in_transit_area({54.367, 10.1445}, small) == std::string(ingest::kKielCanal));
  CHECK(ingest::parse_area_variant("large") == ingest::AreaVariant::Large);
  CHECK_THROWS(ingest::parse_area_variant("huge"));
}

TEST_CASE("roi filter drops outside and on-land records") {
  ingest::RoiSpec roi;
  AsciiGrid e;
  e.values = Eigen::ArrayXXd::Zero(1, 2);
  e.values(0, 1) = 50.0;
  e.xll = 10.0;
  e.yll = 54.0;
  e.dx = e.dy = 1.0;
  roi.land_mask = std::make_shared<const geo::LandMask>(e, 2.0);
  const std::vector<AisRecord> recs{testing::pos(1, 0, 54.5, 10.5), testing::pos(1, 1, 54.5, 11.5),
                                    testing::pos(1, 2, 52.0, 10.5), testing::pos(1, 3, 60.0, 20.0)};
  const auto out = ingest::filter_roi(recs, roi);
  CHECK(out.records.size() == 2);
  CHECK(out.outside_roi == 1);
  CHECK(out.on_land == 1);
  CHECK(out.no_mask_coverage == 1);
  CHECK(out.buckets[0] == ingest::TimeZoneBucket::UtcPlus1);
  CHECK(out.buckets[1] == ingest::TimeZoneBucket::UtcPlus2);
}

TEST_CASE("time window is half open") {
  const std::vector<AisRecord> recs{testing::pos(1, 9, 55, 12), testing::pos(1, 10, 55, 12),
                                    testing::pos(1, 19, 55, 12), testing::pos(1, 20, 55, 12)};
  CHECK(ingest::filter_time_window(recs, 10, 20).size() == 2);
}
