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

#include "srcdep/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace srcdep {
namespace {

Report tool_json() {
  return {{"name", std::string(kToolName)},
          {"version", std::string(kToolVersion)}};
}

Report base(std::string_view kind, Report config) {
  Report r;
  r["kind"] = std::string(kind);
  r["tool"] = tool_json();
  r["config"] = std::move(config);
  return r;
}

Report pair_json(const SourceId& a, const SourceId& b) {
  return Report::array({a.str(), b.str()});
}

Report optional_number(const std::optional<double>& v) {
  return v ? Report(*v) : Report(nullptr);
}

void round_numbers(Report& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      j = nullptr;
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    j = std::strtod(buf, nullptr);
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string num(const Report& j, int digits = 4) {
  if (j.is_number()) return fixed(j.get<double>(), digits);
  if (j.is_null()) return "-";
  return j.dump();
}

}  // namespace

Report config_json(const DependenceConfig& c) {
  return {{"alpha", c.alpha},
          {"copy_rate", c.copy_rate},
          {"tau", c.tau},
          {"min_overlap", c.min_overlap},
          {"flip_rate", c.flip_rate}};
}

Report config_json(const FusionConfig& c) {
  return {{"initial_accuracy", c.initial_accuracy},
          {"accuracy_lo", c.accuracy_lo},
          {"accuracy_hi", c.accuracy_hi},
          {"n_floor", c.n_floor},
          {"n_override", c.n_override ? Report(*c.n_override) : Report(nullptr)},
          {"max_iterations", c.max_iterations},
          {"tolerance", c.tolerance},
          {"tie_break", "smallest_value"},
          {"dependence", config_json(c.dependence)}};
}

Report config_json(const TemporalConfig& c) {
  return {{"delta", c.delta == kUnboundedDelta ? Report("inf") : Report(c.delta)},
          {"fusion", config_json(c.fusion)},
          {"precedence_rate", c.precedence_rate},
          {"late_independent_prior", c.late_independent_prior},
          {"rare_factor", c.rare_factor},
          {"outdated_dependent_rate", c.outdated_dependent_rate},
          {"outdated_independent_rate", c.outdated_independent_rate},
          {"channel_weights",
           {{"snapshot", c.snapshot_weight},
            {"precedence", c.precedence_weight},
            {"outdated", c.outdated_weight}}},
          {"min_direction", c.min_direction}};
}

Report truth_json(const TruthAssignment& truth) {
  Report items = Report::object();
  for (const auto& t : truth.items()) {
    Report post = Report::object();
    for (const auto& [v, p] : t.posterior) post[v.str()] = p;
    items[t.item.str()] = {
        {"chosen", t.chosen.str()}, {"tied", t.tied}, {"posterior", post}};
  }
  return items;
}

Report fusion_report(const TruthAssignment& naive, const FusionResult& fused,
                     const FusionConfig& config) {
  Report r = base("fusion", config_json(config));
  r["naive"] = {{"items", truth_json(naive)}};
  Report sources = Report::object();
  for (const auto& p : fused.accuracy.profiles()) {
    sources[p.source.str()] = {{"accuracy", p.accuracy},
                               {"coverage", p.coverage},
                               {"prior_only", p.prior_only}};
  }
  r["fixpoint"] = {{"items", truth_json(fused.truth)},
                   {"sources", sources},
                   {"iterations", fused.iterations},
                   {"converged", fused.converged}};
  return r;
}

Report dependence_report(std::span<const DependenceVerdict> verdicts,
                         const FusionResult& fused, const FusionConfig& config) {
  std::vector<const DependenceVerdict*> order;
  for (const auto& v : verdicts) order.push_back(&v);
  std::stable_sort(order.begin(), order.end(),
                   [](const DependenceVerdict* a, const DependenceVerdict* b) {
                     if (a->posterior != b->posterior) {
                       return a->posterior > b->posterior;
                     }
                     return std::tie(a->first, a->second) <
                            std::tie(b->first, b->second);
                   });
  Report pairs = Report::array();
  for (const auto* v : order) {
    pairs.push_back({{"pair", pair_json(v->first, v->second)},
                     {"kind", std::string(to_string(v->kind))},
                     {"posterior", v->posterior},
                     {"log_bayes_factor", v->log_bayes_factor},
                     {"direction", v->direction},
                     {"evidence",
                      {{"kt", v->evidence.kt},
                       {"kf", v->evidence.kf},
                       {"kd", v->evidence.kd},
                       {"overlap", v->evidence.overlap()}}},
                     {"insufficient", v->insufficient},
                     {"flagged", v->flagged(config.dependence.tau)}});
  }
  Report r = base("dependence", config_json(config));
  r["pairs"] = std::move(pairs);
  r["fixpoint"] = {{"iterations", fused.iterations},
                   {"converged", fused.converged}};
  return r;
}

Report temporal_report(std::span<const TemporalVerdict> verdicts,
                       const TemporalConfig& config) {
  std::vector<const TemporalVerdict*> order;
  for (const auto& v : verdicts) order.push_back(&v);
  std::stable_sort(order.begin(), order.end(),
                   [](const TemporalVerdict* a, const TemporalVerdict* b) {
                     if (a->posterior != b->posterior) {
                       return a->posterior > b->posterior;
                     }
                     return std::tie(a->first, a->second) <
                            std::tie(b->first, b->second);
                   });
  Report pairs = Report::array();
  for (const auto* v : order) {
    pairs.push_back(
        {{"pair", pair_json(v->first, v->second)},
         {"posterior", v->posterior},
         {"direction", v->direction},
         {"classification", std::string(to_string(v->classification))},
         {"lag", optional_number(v->lag)},
         {"insufficient", v->insufficient},
         {"flagged",
          !v->insufficient && v->posterior >= config.fusion.dependence.tau},
         {"channels",
          {{"snapshot", v->channels.snapshot},
           {"precedence", v->channels.precedence},
           {"outdated", v->channels.outdated}}},
         {"updates",
          {{"matched", v->updates.matched},
           {"first_precedes", v->updates.first_precedes},
           {"second_precedes", v->updates.second_precedes},
           {"rare", v->updates.rare}}},
         {"outdated",
          {{"first_to_second", v->first_to_second.count},
           {"second_to_first", v->second_to_first.count}}}});
  }
  Report r = base("temporal", config_json(config));
  r["pairs"] = std::move(pairs);
  return r;
}

Report dissimilarity_report(std::span<const DependenceVerdict> verdicts,
                            std::span<const ConsensusItem> consensus,
                            const DependenceConfig& config) {
  Report pairs = Report::array();
  for (const auto& v : verdicts) {
    pairs.push_back(
        {{"pair", pair_json(v.first, v.second)},
         {"kind", std::string(to_string(v.kind))},
         {"posterior", v.posterior},
         {"log_bayes_factor", v.log_bayes_factor},
         {"direction", v.direction},
         {"score", v.agreement.expected - v.agreement.observed},
         {"evidence",
          {{"overlap", v.agreement.overlap},
           {"expected", v.agreement.expected},
           {"observed", v.agreement.observed}}},
         {"contrarian", contrarian_of(v).str()},
         {"insufficient", v.insufficient},
         {"flagged", v.flagged(config.tau)}});
  }
  Report items = Report::object();
  for (const auto& c : consensus) {
    Report naive = Report::object(), debiased = Report::object();
    for (const auto& [v, p] : c.naive) naive[v.str()] = p;
    for (const auto& [v, p] : c.debiased) debiased[v.str()] = p;
    items[c.item.str()] = {
        {"naive", naive}, {"debiased", debiased}, {"shift", c.shift}};
  }
  Report r = base("dissimilarity", config_json(config));
  r["pairs"] = std::move(pairs);
  r["consensus"] = std::move(items);
  return r;
}

Report ranking_report(std::span<const RankedSource> ranked,
                      const FusionResult& fused, const FusionConfig& config,
                      std::size_t k) {
  Report cfg = config_json(config);
  cfg["k"] = k;
  Report order = Report::array();
  for (const auto& r : ranked) {
    const SourceProfile* p = fused.accuracy.find(r.source);
    order.push_back({{"source", r.source.str()},
                     {"marginal_score", r.marginal_score},
                     {"accuracy", p ? p->accuracy : 0.0},
                     {"coverage", p ? p->coverage : 0}});
  }
  Report r = base("ranking", std::move(cfg));
  r["ranking"] = std::move(order);
  return r;
}

Report dependence_eval_json(const DependenceEval& e) {
  return {{"positives", e.positives},
          {"negatives", e.negatives},
          {"related", e.related},
          {"flagged", e.flagged},
          {"true_positives", e.true_positives},
          {"precision", e.precision},
          {"recall", e.recall},
          {"zero_flagged", e.zero_flagged},
          {"auc", optional_number(e.auc)},
          {"direction_accuracy", optional_number(e.direction_accuracy)},
          {"direction_evaluated", e.direction_evaluated},
          {"min_positive", optional_number(e.min_positive)},
          {"max_negative", optional_number(e.max_negative)},
          {"separated", e.separated}};
}

Report fusion_eval_json(const FusionEval& e) {
  return {{"items", e.items}, {"correct", e.correct}, {"accuracy", e.accuracy}};
}

Report consensus_eval_json(const ConsensusEval& e) {
  return {{"naive_distance", e.naive_distance},
          {"debiased_distance", e.debiased_distance}};
}

std::string spec_hash_hex(const ScenarioSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(spec_hash(spec)));
  return buf;
}

std::string canonical_json(const Report& report) {
  Report copy = report;
  round_numbers(copy);
  return copy.dump(2) + "\n";
}

std::string text_summary(const Report& r) {
  std::ostringstream out;
  const std::string kind = r.value("kind", "");
  out << kToolName << " " << kToolVersion << " " << kind << " report\n";
  if (kind == "fusion") {
    const auto& naive = r["naive"]["items"];
    const auto& fix = r["fixpoint"]["items"];
    out << "item: naive -> fixpoint (* = tied)\n";
    for (const auto& [item, t] : fix.items()) {
      auto mark = [](const Report& x) {
        return x["chosen"].get<std::string>() +
               (x["tied"].get<bool>() ? "*" : "");
      };
      out << "  " << item << ": "
          << (naive.contains(item) ? mark(naive[item]) : std::string("-"))
          << " -> " << mark(t) << "  p=" << num(t["posterior"][t["chosen"].get<std::string>()])
          << "\n";
    }
    out << "sources:\n";
    for (const auto& [s, p] : r["fixpoint"]["sources"].items()) {
      out << "  " << s << ": accuracy " << num(p["accuracy"]) << ", coverage "
          << p["coverage"].get<std::size_t>()
          << (p["prior_only"].get<bool>() ? " (prior only)" : "") << "\n";
    }
    out << "fixpoint: " << r["fixpoint"]["iterations"].get<int>()
        << " iterations, "
        << (r["fixpoint"]["converged"].get<bool>() ? "converged" : "NOT converged")
        << "\n";
  } else if (kind == "dependence" || kind == "temporal" ||
             kind == "dissimilarity") {
    for (const auto& p : r["pairs"]) {
      out << "  (" << p["pair"][0].get<std::string>() << ", "
          << p["pair"][1].get<std::string>() << ") posterior "
          << num(p["posterior"]) << " direction " << num(p["direction"]);
      if (kind == "dependence") {
        const auto& e = p["evidence"];
        out << " kt/kf/kd " << e["kt"].get<int>() << "/" << e["kf"].get<int>()
            << "/" << e["kd"].get<int>();
        if (p["flagged"].get<bool>()) out << " FLAGGED";
      } else if (kind == "temporal") {
        out << " " << p["classification"].get<std::string>() << " lag "
            << num(p["lag"], 1);
      } else {
        out << " score " << num(p["score"]) << " contrarian "
            << p["contrarian"].get<std::string>();
        if (p["flagged"].get<bool>()) out << " FLAGGED";
      }
      if (p["insufficient"].get<bool>()) out << " (insufficient)";
      out << "\n";
    }
    if (kind == "dissimilarity") {
      out << "consensus shift (total variation):\n";
      for (const auto& [item, c] : r["consensus"].items()) {
        out << "  " << item << ": " << num(c["shift"]) << "\n";
      }
    }
  } else if (kind == "ranking") {
    int pos = 1;
    for (const auto& e : r["ranking"]) {
      out << "  " << pos++ << ". " << e["source"].get<std::string>()
          << " (marginal " << num(e["marginal_score"]) << ")\n";
    }
  } else {
    Report copy = r;
    copy.erase("config");
    round_numbers(copy);
    out << copy.dump(2) << "\n";
  }
  return out.str();
}

void emit_report(const Report& report, const std::string& path,
                 ReportFormat format, std::ostream& console) {
  const std::string body = format == ReportFormat::kJson
                               ? canonical_json(report)
                               : text_summary(report);
  if (path.empty() || path == "-") {
    console << body;
    console.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write report to " + path);
  out << body;
  if (!out) throw InputError("failed writing report to " + path);
}

}  // namespace srcdep
