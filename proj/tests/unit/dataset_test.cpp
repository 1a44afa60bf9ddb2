// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "srcdep/dataset.hpp"
#include "test_util.hpp"

using namespace srcdep;

namespace {

std::map<std::pair<std::string, std::string>, std::string> as_map(
    const Dataset& d) {
  std::map<std::pair<std::string, std::string>, std::string> out;
  for (const auto& o : d.observations()) {
    out[{o.source.str(), o.item.str()}] = o.value.str();
  }
  return out;
}

}  // namespace

TEST_CASE("affiliation table loads as a 25-row snapshot") {
  const Dataset d = testutil::table("table1.csv");
  CHECK(d.mode() == Mode::kSnapshot);
  CHECK(d.size() == 25);
  CHECK(d.sources().size() == 5);
  CHECK(d.items().size() == 5);
}

TEST_CASE("header-only input gives an empty dataset") {
  const Dataset d = parse_observations("source,item,value\n", Format::kCsv);
  CHECK(d.empty());
  CHECK(d.mode() == Mode::kSnapshot);
}

TEST_CASE("timestamped table loads as temporal with 24 observations") {
  const Dataset d = testutil::table("table3.csv");
  CHECK(d.mode() == Mode::kTemporal);
  CHECK(d.size() == 24);
}

TEST_CASE("values are trimmed, collapsed and lower-cased") {
  CHECK(normalize_value("  UW ") == Value("uw"));
  CHECK(normalize_value("uw") == Value("uw"));
  CHECK(normalize_value("AT&T") == Value("at&t"));
  CHECK(normalize_value("Univ.   of\tWashington") ==
        Value("univ. of washington"));
  CHECK_THROWS_AS(normalize_value("   "), InputError);
  for (const char* raw : {" A  b ", "X", "yahoo!", "  MSR"}) {
    const Value once = normalize_value(raw);
    CHECK(normalize_value(once.str()) == once);
  }
}

TEST_CASE("malformed inputs are rejected") {
  SUBCASE("duplicate snapshot key") {
    CHECK_THROWS_AS(parse_observations("source,item,value\na,x,1\na,x,2\n",
                                       Format::kCsv),
                    InputError);
  }
  SUBCASE("duplicate temporal key") {
    CHECK_THROWS_AS(
        parse_observations("source,item,time,value\na,x,1,u\na,x,1,v\n",
                           Format::kCsv),
        InputError);
  }
  SUBCASE("probability outside [0,1]") {
    CHECK_THROWS_AS(
        parse_observations("source,item,value,prob\na,x,u,1.5\n", Format::kCsv),
        InputError);
  }
  SUBCASE("mixed timed and untimed rows") {
    CHECK_THROWS_AS(
        parse_observations("source,item,time,value\na,x,1,u\na,y,,v\n",
                           Format::kCsv),
        InputError);
  }
  SUBCASE("mode hint conflicts with the data") {
    CHECK_THROWS_AS(parse_observations("source,item,value\na,x,u\n",
                                       Format::kCsv, Mode::kTemporal),
                    InputError);
  }
  SUBCASE("missing column") {
    CHECK_THROWS_AS(parse_observations("source,value\na,u\n", Format::kCsv),
                    InputError);
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_observations("[{\"source\": ", Format::kJson),
                    InputError);
  }
}

TEST_CASE("JSON and CSV inputs agree") {
  const Dataset csv = parse_observations(
      "source,item,value\nS1,Dong,AT&T\nS2,Dong, Google \n", Format::kCsv);
  const Dataset json = parse_observations(
      R"([{"source":"S1","item":"Dong","value":"AT&T"},
          {"source":"S2","item":"Dong","value":" Google "}])",
      Format::kJson);
  CHECK(as_map(csv) == as_map(json));
}

TEST_CASE("parse, serialize, parse is the identity") {
  std::mt19937 rng(11);
  for (int round = 0; round < 20; ++round) {
    std::vector<Observation> obs;
    const bool timed = round % 2 == 1;
    for (int s = 0; s < 4; ++s) {
      for (int i = 0; i < 5; ++i) {
        if (rng() % 3 == 0) continue;
        const int entries = timed ? 1 + static_cast<int>(rng() % 3) : 1;
        for (int e = 0; e < entries; ++e) {
          Observation o{SourceId("s" + std::to_string(s)),
                        ItemId("item " + std::to_string(i)),
                        Value("v" + std::to_string(rng() % 4)),
                        std::nullopt, 1.0};
          if (timed) o.time = 10 * e + static_cast<Timestamp>(rng() % 5);
          if (rng() % 4 == 0) o.prob = 0.25 * static_cast<double>(rng() % 4);
          obs.push_back(o);
        }
      }
    }
    const Dataset d = Dataset::from_observations(obs);
    for (Format f : {Format::kCsv, Format::kJson}) {
      const Dataset back = parse_observations(serialize_observations(d, f), f);
      CHECK(std::equal(d.observations().begin(), d.observations().end(),
                       back.observations().begin(), back.observations().end()));
    }
  }
}

TEST_CASE("snapshot at a time takes each pair's latest value") {
  const Dataset d = testutil::table("table3.csv");
  SUBCASE("2004") {
    const auto m = as_map(snapshot_at(d, 2004));
    CHECK(m.at({"S1", "Suciu"}) == "uw");
    CHECK(m.at({"S1", "Halevy"}) == "uw");
    CHECK(m.at({"S1", "Dalvi"}) == "uw");
    CHECK(m.at({"S1", "Dong"}) == "uw");
    CHECK(m.count({"S1", "Balazinska"}) == 0);
    int s3 = 0;
    for (const auto& [k, _] : m) s3 += k.first == "S3";
    CHECK(s3 == 4);
  }
  SUBCASE("2007 equals the latest snapshot") {
    const auto m = as_map(snapshot_at(d, 2007));
    CHECK(m.at({"S1", "Suciu"}) == "uw");
    CHECK(m.at({"S1", "Halevy"}) == "google");
    CHECK(m.at({"S1", "Balazinska"}) == "uw");
    CHECK(m.at({"S1", "Dalvi"}) == "yahoo!");
    CHECK(m.at({"S1", "Dong"}) == "at&t");
    CHECK(m == as_map(latest_snapshot(d)));
  }
  SUBCASE("before every timestamp") {
    CHECK(snapshot_at(d, 1990).empty());
  }
  SUBCASE("later history never changes an earlier snapshot") {
    std::vector<Observation> obs(d.observations().begin(),
                                 d.observations().end());
    obs.push_back({SourceId("S2"), ItemId("Dong"), Value("msr"), 2010, 1.0});
    obs.push_back({SourceId("S9"), ItemId("Suciu"), Value("uw"), 2005, 1.0});
    const Dataset more = Dataset::from_observations(obs);
    CHECK(as_map(snapshot_at(d, 2004)) == as_map(snapshot_at(more, 2004)));
  }
  SUBCASE("snapshot input is rejected") {
    CHECK_THROWS_AS(snapshot_at(testutil::table("table1.csv"), 1), InputError);
  }
}

TEST_CASE("indexes match the observation collection") {
  const Dataset d = testutil::table("table1.csv");
  std::size_t by_source = 0, by_item = 0;
  for (const auto& s : d.sources()) by_source += d.by_source(s).size();
  for (const auto& i : d.items()) by_item += d.by_item(i).size();
  CHECK(by_source == d.size());
  CHECK(by_item == d.size());
  CHECK(d.by_source(SourceId("nobody")).empty());
  const std::vector<SourceId> keep{SourceId("S1"), SourceId("S3")};
  CHECK(d.restrict_sources(keep).size() == 10);
}
