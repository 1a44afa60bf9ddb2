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

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "srcdep/dependence.hpp"
#include "test_util.hpp"

using namespace srcdep;

namespace {

using Ratings = std::map<std::string, std::string>;  // item -> rating

// Expected agreement from the two empirical marginals, computed directly
// from string counts.
double expected_agreement(const Ratings& x, const Ratings& y) {
  std::map<std::string, double> mx, my;
  int n = 0;
  for (const auto& [item, v] : x) {
    if (!y.count(item)) continue;
    mx[v] += 1.0;
    my[y.at(item)] += 1.0;
    ++n;
  }
  double e = 0.0;
  for (const auto& [v, c] : mx) {
    if (my.count(v)) e += c * my[v] / (static_cast<double>(n) * n);
  }
  return e;
}

// Likelihood ratio that `y` contradicts `x`: per item, y copies x's rating
// with probability 0 under flipping and otherwise draws from its marginal
// renormalized over the other ratings.
double contrarian_ratio(const Ratings& x, const Ratings& y, double f) {
  std::map<std::string, double> my;
  int n = 0;
  for (const auto& [item, v] : y) {
    if (x.count(item)) {
      my[v] += 1.0;
      ++n;
    }
  }
  for (auto& [v, c] : my) c /= n;
  double ratio = 1.0;
  for (const auto& [item, vx] : x) {
    if (!y.count(item)) continue;
    const std::string& vy = y.at(item);
    const double p_ind = my[vy];
    const double p_flip = vx == vy ? 0.0 : my[vy] / (1.0 - my[vx]);
    ratio *= (f * p_flip + (1.0 - f) * p_ind) / p_ind;
  }
  return ratio;
}

Dataset from_raters(const std::map<std::string, Ratings>& raters) {
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  for (const auto& [r, ratings] : raters) {
    for (const auto& [item, v] : ratings) rows.emplace_back(r, item, v);
  }
  return testutil::snapshot(rows);
}

const DependenceVerdict& find_pair(const std::vector<DependenceVerdict>& all,
                                   const char* a, const char* b) {
  for (const auto& v : all) {
    if ((v.first == SourceId(a) && v.second == SourceId(b)) ||
        (v.first == SourceId(b) && v.second == SourceId(a))) {
      return v;
    }
  }
  FAIL("pair not found");
  return all.front();
}

}  // namespace

TEST_CASE("film ratings: the opposed pair scores highest") {
  const Dataset d = testutil::table("table2.csv");
  const DependenceConfig cfg;
  const auto all = detect_dissimilarity(d, cfg);
  REQUIRE(all.size() == 6);
  const DependenceVerdict& top = all.front();
  CHECK(top.first == SourceId("R1"));
  CHECK(top.second == SourceId("R4"));
  CHECK(top.agreement.expected == doctest::Approx(4.0 / 9.0));
  CHECK(top.agreement.observed == 0.0);
  CHECK(top.flagged(cfg.tau));
  // The ranking is by expected minus observed agreement.
  for (std::size_t k = 1; k < all.size(); ++k) {
    CHECK(all[k - 1].agreement.expected - all[k - 1].agreement.observed >=
          all[k].agreement.expected - all[k].agreement.observed);
  }
}

TEST_CASE("agreement statistics and posterior match direct computation") {
  std::mt19937_64 rng(8);
  const char* scale[] = {"good", "neutral", "bad"};
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, Ratings> raters;
    for (const char* r : {"a", "b"}) {
      for (int i = 0; i < 12; ++i) {
        if (rng() % 4 == 0) continue;
        raters[r]["m" + std::to_string(i)] = scale[rng() % 3];
      }
    }
    const Dataset d = from_raters(raters);
    DependenceConfig cfg;
    cfg.min_overlap = 1;
    const DependenceVerdict v =
        dissimilarity_score(d, SourceId("a"), SourceId("b"), cfg);
    if (v.agreement.overlap == 0) continue;
    CHECK(v.agreement.expected ==
          doctest::Approx(expected_agreement(raters["a"], raters["b"])));
    const double r2 = contrarian_ratio(raters["a"], raters["b"], cfg.flip_rate);
    const double r1 = contrarian_ratio(raters["b"], raters["a"], cfg.flip_rate);
    const double bf = 0.5 * (r1 + r2);
    const double ref = cfg.alpha * bf / (cfg.alpha * bf + 1.0 - cfg.alpha);
    CHECK(v.posterior == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("identical raters are never flagged") {
  const Ratings same{{"a", "good"}, {"b", "bad"}, {"c", "good"}, {"d", "neutral"}};
  const Dataset d = from_raters({{"x", same}, {"y", same}});
  const DependenceVerdict v = dissimilarity_score(d, SourceId("x"), SourceId("y"));
  CHECK(v.agreement.expected - v.agreement.observed <= 0.0);
  CHECK_FALSE(v.flagged(DependenceConfig{}.tau));
  // A rater compared with itself.
  const DependenceVerdict self = dissimilarity_score(d, SourceId("x"), SourceId("x"));
  CHECK(self.agreement.expected - self.agreement.observed <= 0.0);
  CHECK_FALSE(self.flagged(DependenceConfig{}.tau));
}

TEST_CASE("independent raters are rarely flagged") {
  std::mt19937_64 rng(21);
  const char* scale[] = {"good", "neutral", "bad"};
  const DependenceConfig cfg;
  int flagged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, Ratings> raters;
    for (const char* r : {"a", "b"}) {
      for (int i = 0; i < 30; ++i) raters[r]["m" + std::to_string(i)] = scale[rng() % 3];
    }
    flagged += dissimilarity_score(from_raters(raters), SourceId("a"), SourceId("b"), cfg)
                   .flagged(cfg.tau);
  }
  CHECK(flagged < 5);
}

TEST_CASE("too little overlap keeps the prior") {
  const Dataset d = from_raters({{"x", {{"a", "good"}, {"b", "bad"}}},
                                 {"y", {{"a", "bad"}, {"b", "good"}}}});
  const DependenceConfig cfg;
  const DependenceVerdict v = dissimilarity_score(d, SourceId("x"), SourceId("y"), cfg);
  CHECK(v.insufficient);
  CHECK(v.posterior == cfg.alpha);
  CHECK_FALSE(v.flagged(cfg.tau));
  CHECK_THROWS_AS(dissimilarity_score(d, SourceId("x"), SourceId("nobody")), InputError);
}

TEST_CASE("debiased consensus") {
  const Dataset d = testutil::table("table2.csv");
  const DependenceConfig cfg;
  const auto verdicts = detect_dissimilarity(d, cfg);

  SUBCASE("discounting the contrarian moves the disputed film toward bad") {
    const auto& top = find_pair(verdicts, "R1", "R4");
    CHECK(contrarian_of(top) == SourceId("R4"));
    const auto consensus = debiased_aggregate(d, verdicts, cfg);
    for (const auto& item : consensus) {
      if (item.item != ItemId("The Matrix")) continue;
      auto p = [](const std::vector<std::pair<Value, double>>& dist, const char* v) {
        for (const auto& [value, q] : dist) {
          if (value == Value(v)) return q;
        }
        return 0.0;
      };
      CHECK(p(item.naive, "bad") == doctest::Approx(0.5));
      CHECK(p(item.debiased, "bad") > 0.5);
      CHECK(item.shift > 0.0);
    }
  }
  SUBCASE("without verdicts the consensus is the naive distribution") {
    for (const auto& item : debiased_aggregate(d, {}, cfg)) {
      CHECK(item.shift == 0.0);
      for (std::size_t k = 0; k < item.naive.size(); ++k) {
        CHECK(item.naive[k].second == item.debiased[k].second);
      }
    }
  }
}
