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

// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 4 7        run only criteria 4 and 7
//
// Exit status is 0 when every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "srcdep/cli.hpp"
#include "srcdep/dependence.hpp"
#include "srcdep/evaluation.hpp"
#include "srcdep/fusion.hpp"
#include "srcdep/simgen.hpp"
#include "srcdep/temporal.hpp"
#include "test_util.hpp"

using namespace srcdep;

namespace {

// Tolerances and thresholds, fixed before any run.
constexpr double kExampleSeconds = 1.0;     // criteria 1-5
constexpr double kSuiteSeconds = 60.0;      // criterion 10
constexpr double kOracleTolerance = 1e-9;   // criterion 6
constexpr int kOracleInstances = 200;
constexpr int kSweepSeeds = 20;             // criteria 7 and 8
constexpr int kSeparationRequired = 18;     // of 20
constexpr double kAucThreshold = 0.95;
constexpr int kAucRequired = 18;            // of 20
constexpr int kDominanceRequired = 36;      // of 40, fixpoint >= naive
constexpr int kDeterminismRepeats = 3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::map<ItemId, Value> claims_of(const Dataset& d, const char* source) {
  std::map<ItemId, Value> out;
  for (std::size_t k : d.by_source(SourceId(source))) {
    out[d.observations()[k].item] = d.observations()[k].value;
  }
  return out;
}

const DependenceVerdict* find(const std::vector<DependenceVerdict>& v,
                              const char* a, const char* b) {
  for (const auto& x : v) {
    if ((x.first == SourceId(a) && x.second == SourceId(b)) ||
        (x.first == SourceId(b) && x.second == SourceId(a))) {
      return &x;
    }
  }
  return nullptr;
}

// --- 1 -------------------------------------------------------------------

Outcome naive_voting_example() {
  const auto start = Clock::now();
  const Dataset all = testutil::table("table1.csv");
  const auto key = claims_of(all, "S1");
  const std::vector<SourceId> first3{SourceId("S1"), SourceId("S2"), SourceId("S3")};
  const TruthAssignment three = naive_vote(all.restrict_sources(first3));
  const TruthAssignment five = naive_vote(all);

  int correct3 = 0;
  bool dong_tied = false;
  for (const auto& t : three.items()) {
    if (t.item == ItemId("Dong")) {
      dong_tied = t.tied;
    } else if (!t.tied && t.chosen == key.at(t.item)) {
      ++correct3;
    }
  }
  std::set<std::string> wrong5;
  for (const auto& t : five.items()) {
    if (t.tied || t.chosen != key.at(t.item)) wrong5.insert(t.item.str());
  }
  const double secs = seconds_since(start);
  const bool wrong_ok = wrong5 == std::set<std::string>{"Halevy", "Dalvi", "Dong"};
  Outcome o;
  o.pass = correct3 == 4 && dong_tied && wrong_ok && secs < kExampleSeconds;
  o.detail = "S1-S3: " + std::to_string(correct3) + " correct, Dong tied=" +
             (dong_tied ? "yes" : "no") + "; S1-S5 wrong on " +
             std::to_string(wrong5.size()) + " items" + (wrong_ok ? " (Halevy, Dalvi, Dong)" : "") +
             "; " + fmt(secs, 2) + "s";
  return o;
}

// --- 2 -------------------------------------------------------------------

Outcome snapshot_dependence_example() {
  const auto start = Clock::now();
  const Dataset d = testutil::table("table1.csv");
  const FusionConfig cfg;
  const FusionResult r = fuse_fixpoint(d, cfg);
  const std::set<std::string> copiers{"S3", "S4", "S5"}, honest{"S1", "S2"};
  double min_copier = 1.0, max_honest = 0.0;
  std::set<std::pair<std::string, std::string>> flagged;
  for (const auto& v : r.verdicts) {
    const std::string a = v.first.str(), b = v.second.str();
    if (copiers.count(a) && copiers.count(b)) min_copier = std::min(min_copier, v.posterior);
    if (honest.count(a) && honest.count(b)) max_honest = std::max(max_honest, v.posterior);
    if (v.flagged(cfg.dependence.tau)) flagged.insert({a, b});
  }
  const std::set<std::pair<std::string, std::string>> expected{
      {"S3", "S4"}, {"S3", "S5"}, {"S4", "S5"}};
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = min_copier > max_honest && flagged == expected && secs < kExampleSeconds;
  o.detail = "min posterior among {S3,S4,S5} " + fmt(min_copier) + " vs max among {S1,S2} " +
             fmt(max_honest) + "; flagged " + std::to_string(flagged.size()) + " pairs" +
             (flagged == expected ? " (exactly the copier triangle)" : "") + "; " +
             fmt(secs, 2) + "s";
  return o;
}

// --- 3 -------------------------------------------------------------------

Outcome fixpoint_example() {
  const auto start = Clock::now();
  const Dataset d = testutil::table("table1.csv");
  const FusionConfig cfg;
  const FusionResult r = fuse_fixpoint(d, cfg);
  const auto key = claims_of(d, "S1");
  int agree = 0;
  std::string dong;
  for (const auto& t : r.truth.items()) {
    if (!t.tied && t.chosen == key.at(t.item)) ++agree;
    if (t.item == ItemId("Dong")) dong = t.tied ? "(tied)" : t.chosen.str();
  }
  const oracle::JointResult joint = oracle::table1_joint(
      oracle::table1_claims(), cfg.dependence.copy_rate, cfg.n_floor);
  const std::string oracle_dong = joint.map_assignment.at("Dong");
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = agree >= 4 && dong == "at&t" && oracle_dong == "at&t" && secs < kExampleSeconds;
  o.detail = std::to_string(agree) + "/5 items match S1; Dong = " + dong +
             "; oracle MAP over " + std::to_string(joint.assignments) +
             " assignments gives Dong = " + oracle_dong + " (marginal " +
             fmt(joint.marginal.at("Dong").at("at&t")) + "); " + fmt(secs, 2) + "s";
  return o;
}

// --- 4 -------------------------------------------------------------------

Outcome dissimilarity_example() {
  const auto start = Clock::now();
  const Dataset d = testutil::table("table2.csv");
  const DependenceConfig cfg;
  const auto verdicts = detect_dissimilarity(d, cfg);
  std::vector<std::string> zero_agreement;
  for (const auto& v : verdicts) {
    if (v.agreement.overlap == 3 && v.agreement.observed == 0.0) {
      zero_agreement.push_back("(" + v.first.str() + "," + v.second.str() + ")");
    }
  }
  const bool top = !verdicts.empty() && verdicts.front().first == SourceId("R1") &&
                   verdicts.front().second == SourceId("R4");
  double naive_bad = 0.0, debiased_bad = 0.0;
  for (const auto& c : debiased_aggregate(d, verdicts, cfg)) {
    if (c.item != ItemId("The Matrix")) continue;
    for (const auto& [v, p] : c.naive) naive_bad += v == Value("bad") ? p : 0.0;
    for (const auto& [v, p] : c.debiased) debiased_bad += v == Value("bad") ? p : 0.0;
  }
  const bool unique = zero_agreement.size() == 1 && zero_agreement[0] == "(R1,R4)";
  const bool shift = debiased_bad > naive_bad;
  const double secs = seconds_since(start);
  std::string pairs;
  for (const auto& p : zero_agreement) pairs += (pairs.empty() ? "" : " ") + p;
  Outcome o;
  o.pass = unique && top && shift && secs < kExampleSeconds;
  o.detail = "pairs with O=0 at overlap 3: " + pairs + (unique ? "" : " (not unique)") +
             "; top pair (R1,R4)=" + (top ? "yes" : "no") + "; The Matrix p(bad) " +
             fmt(naive_bad) + " -> " + fmt(debiased_bad) + "; " + fmt(secs, 2) + "s";
  return o;
}

// --- 5 -------------------------------------------------------------------

Outcome temporal_example() {
  const auto start = Clock::now();
  const TemporalAnalyzer an(testutil::table("table3.csv"), TemporalConfig{});
  const TemporalVerdict v13 = an.verdict(SourceId("S1"), SourceId("S3"));
  const TemporalVerdict v12 = an.verdict(SourceId("S1"), SourceId("S2"));
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = v13.classification == TemporalClass::kLazyCopier && v13.direction > 0.0 &&
           v12.classification == TemporalClass::kIndependent && secs < kExampleSeconds;
  o.detail = "(S1,S3) " + std::string(to_string(v13.classification)) + " direction " +
             fmt(v13.direction) + " (S3 depends on S1 when > 0); (S1,S2) " +
             std::string(to_string(v12.classification)) + "; " + fmt(secs, 2) + "s";
  return o;
}

// --- 6 -------------------------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  double worst_item = 0.0, worst_pair = 0.0;
  int items_checked = 0, pairs_checked = 0;
  FusionConfig fc;
  for (int inst = 0; inst < kOracleInstances; ++inst) {
    const int ns = 1 + static_cast<int>(rng() % 5);
    const int ni = 1 + static_cast<int>(rng() % 6);
    std::vector<SourceProfile> prof;
    for (int s = 0; s < ns; ++s) {
      prof.push_back({SourceId("s" + std::to_string(s)), unit(rng), 0, false});
    }
    std::vector<std::tuple<std::string, std::string, std::string>> rows;
    for (int i = 0; i < ni; ++i) {
      const int values = 1 + static_cast<int>(rng() % 4);
      for (int s = 0; s < ns; ++s) {
        if (ns > 1 && rng() % 5 == 0) continue;
        rows.emplace_back("s" + std::to_string(s), "i" + std::to_string(i),
                          "v" + std::to_string(rng() % values));
      }
    }
    if (rows.empty()) continue;
    const Dataset d = testutil::snapshot(rows);
    const SourceAccuracy acc(prof);

    // Truth posteriors, item by item.
    for (const auto& item : d.items()) {
      std::vector<ItemClaim> claims;
      std::map<std::string, int> slot;
      for (std::size_t k : d.by_item(item)) {
        const auto& o = d.observations()[k];
        claims.push_back({o.source, o.value});
        slot.emplace(o.value.str(), 0);
      }
      int next = 0;
      for (auto& [v, idx] : slot) idx = next++;
      const int n = std::max({next - 1, fc.n_floor, 1});
      std::vector<oracle::Vote> votes;
      for (const auto& c : claims) {
        votes.push_back({acc.accuracy(c.source), slot.at(c.value.str())});
      }
      const auto post = bayes_item_posterior(claims, acc, n);
      const auto ref = oracle::item_posterior(next, votes, n);
      for (std::size_t k = 0; k < ref.size(); ++k) {
        worst_item = std::max(worst_item, std::abs(post[k].second - ref[k]));
      }
      ++items_checked;
    }

    // Dependence posteriors for every pair against the naive-vote truth.
    const TruthAssignment truth = naive_vote(d);
    DependenceConfig dc;
    dc.min_overlap = 1;
    dc.alpha = unit(rng);
    dc.copy_rate = unit(rng);
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int a = 0; a < ns; ++a) {
      for (int b = a + 1; b < ns; ++b) {
        const PairEvidence e = pair_evidence(d, truth, prof[a].source, prof[b].source);
        if (e.overlap() == 0) continue;
        const double p = dependence_posterior(e, prof[a].accuracy, prof[b].accuracy, n, dc);
        const double ref = oracle::pair_posterior(e.kt, e.kf, e.kd, prof[a].accuracy,
                                                  prof[b].accuracy, n, dc.copy_rate, dc.alpha);
        worst_pair = std::max(worst_pair, std::abs(p - ref));
        ++pairs_checked;
      }
    }
  }
  Outcome o;
  o.pass = worst_item <= kOracleTolerance && worst_pair <= kOracleTolerance;
  o.detail = std::to_string(kOracleInstances) + " instances: " + std::to_string(items_checked) +
             " item posteriors (max error " + fmt(worst_item, 3) + "), " +
             std::to_string(pairs_checked) + " pair posteriors (max error " +
             fmt(worst_pair, 3) + "), tolerance " + fmt(kOracleTolerance, 1);
  return o;
}

// --- 7 and 8 -------------------------------------------------------------

Scenario sweep_scenario(const char* file, std::uint64_t seed) {
  ScenarioSpec spec = load_scenario(testutil::data_path(file));
  spec.seed = seed;
  return generate_scenario(spec);
}

Outcome separation_sweep() {
  const FusionConfig cfg;
  int separated = 0, auc_ok = 0;
  double worst_auc = 1.0;
  for (int seed = 1; seed <= kSweepSeeds; ++seed) {
    const Scenario sc = sweep_scenario("separation.json", static_cast<std::uint64_t>(seed));
    const FusionResult r = fuse_fixpoint(sc.dataset, cfg);
    const DependenceEval e =
        evaluate_dependence(scored_pairs(r.verdicts, cfg.dependence.tau), sc.planted,
                            DependenceKind::kSimilarity);
    separated += e.separated;
    const double auc = e.auc.value_or(0.0);
    auc_ok += auc >= kAucThreshold;
    worst_auc = std::min(worst_auc, auc);
  }
  Outcome o;
  o.pass = separated >= kSeparationRequired && auc_ok >= kAucRequired;
  o.detail = "copier pairs above every independent pair in " + std::to_string(separated) +
             "/" + std::to_string(kSweepSeeds) + " seeds (need " +
             std::to_string(kSeparationRequired) + "); AUC >= " + fmt(kAucThreshold, 2) +
             " in " + std::to_string(auc_ok) + "/" + std::to_string(kSweepSeeds) +
             " (need " + std::to_string(kAucRequired) + "), worst AUC " + fmt(worst_auc);
  return o;
}

Outcome fusion_dominance() {
  const FusionConfig cfg;
  int at_least = 0, strictly = 0, runs = 0;
  double naive_sum = 0.0, fix_sum = 0.0;
  for (const char* file : {"separation.json", "contrarian.json"}) {
    for (int seed = 1; seed <= kSweepSeeds; ++seed) {
      const Scenario sc = sweep_scenario(file, static_cast<std::uint64_t>(seed));
      const double naive = evaluate_fusion(naive_vote(sc.dataset), sc.planted).accuracy;
      const double fixed =
          evaluate_fusion(fuse_fixpoint(sc.dataset, cfg).truth, sc.planted).accuracy;
      at_least += fixed >= naive;
      strictly += fixed > naive;
      naive_sum += naive;
      fix_sum += fixed;
      ++runs;
    }
  }
  Outcome o;
  o.pass = at_least >= kDominanceRequired && 2 * strictly > runs;
  o.detail = "fixpoint >= naive in " + std::to_string(at_least) + "/" +
             std::to_string(runs) + " (need " + std::to_string(kDominanceRequired) +
             "); strictly greater in " + std::to_string(strictly) + "/" +
             std::to_string(runs) + " (need a majority); mean accuracy naive " +
             fmt(naive_sum / runs) + ", fixpoint " + fmt(fix_sum / runs);
  return o;
}

// --- 9 -------------------------------------------------------------------

std::string run_cli_capture(std::vector<std::string> args, int* code) {
  args.insert(args.begin(), "srcdep");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  *code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"fuse", testutil::data_path("table1.csv")},
      {"detect", testutil::data_path("table1.csv")},
      {"rank", testutil::data_path("table1.csv")},
      {"detect-dissim", testutil::data_path("table2.csv")},
      {"detect-temporal", testutil::data_path("table3.csv")},
      {"simulate", testutil::data_path("separation.json"), "--seed", "7", "--eval"},
      {"simulate", testutil::data_path("contrarian.json"), "--seed", "11", "--eval"},
      {"simulate", testutil::data_path("temporal.json"), "--seed", "3", "--eval"},
      {"simulate", testutil::data_path("ratings.json"), "--seed", "2", "--eval"},
  };
  int identical = 0, failures = 0;
  for (const auto& cmd : commands) {
    int code = 0;
    const std::string reference = run_cli_capture(cmd, &code);
    bool same = code == kExitOk;
    for (const char* threads : {"1", "2", "4"}) {
      for (int rep = 0; rep < kDeterminismRepeats; ++rep) {
        auto args = cmd;
        args.insert(args.end(), {"--threads", threads});
        int c = 0;
        same = same && run_cli_capture(args, &c) == reference && c == code;
      }
    }
    identical += same;
    failures += !same;
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(identical) + "/" + std::to_string(commands.size()) +
             " commands byte-identical over " + std::to_string(kDeterminismRepeats) +
             " repetitions at 1, 2 and 4 threads";
  return o;
}

// --- 10 ------------------------------------------------------------------

Outcome suite_time(const std::vector<std::function<Outcome()>>& others) {
  const auto start = Clock::now();
  int unit_status = 0;
#ifdef SRCDEP_UNIT_TESTS
  unit_status = std::system(SRCDEP_UNIT_TESTS " --minimal > /dev/null 2>&1");
#endif
  const double unit_secs = seconds_since(start);
  for (const auto& f : others) f();
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = unit_status == 0 && secs < kSuiteSeconds;
  o.detail = "unit tests (" + std::string(unit_status == 0 ? "passing" : "FAILING") + ") " +
             fmt(unit_secs, 3) + "s + acceptance criteria 1-9 = " + fmt(secs, 3) +
             "s (limit " + fmt(kSuiteSeconds, 3) + "s)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"naive voting on the affiliation table", naive_voting_example},
      {"snapshot dependence on the affiliation table", snapshot_dependence_example},
      {"fixpoint fusion on the affiliation table", fixpoint_example},
      {"dissimilarity on the film ratings", dissimilarity_example},
      {"temporal verdicts on the timestamped table", temporal_example},
      {"oracle equivalence", oracle_equivalence},
      {"copier separation sweep", separation_sweep},
      {"fusion dominance sweep", fusion_dominance},
      {"CLI determinism", determinism},
      {"full suite time", nullptr},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) {
    const int c = std::atoi(argv[k]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[k]);
      return 2;
    }
    selected.insert(c);
  }
  bool all_pass = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    if (criteria[k].second) {
      o = criteria[k].second();
    } else {
      std::vector<std::function<Outcome()>> rest;
      for (std::size_t j = 0; j + 1 < criteria.size(); ++j) rest.push_back(criteria[j].second);
      o = suite_time(rest);
    }
    all_pass = all_pass && o.pass;
    std::printf("[%s] criterion %2d: %s: %s\n", o.pass ? "PASS" : "FAIL", id,
                criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
