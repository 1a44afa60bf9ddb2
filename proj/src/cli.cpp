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

#include "srcdep/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "srcdep/dependence.hpp"
#include "srcdep/evaluation.hpp"
#include "srcdep/fusion.hpp"
#include "srcdep/simgen.hpp"

namespace srcdep {
namespace {

const FusionConfig& fusion_of(const RunConfig& c) { return c.temporal.fusion; }

Dataset load_input(const RunConfig& c) {
  if (c.inputs.size() != 1) {
    throw InputError(c.subcommand + " takes exactly one input file");
  }
  return load_observations(c.inputs.front(), c.mode);
}

// Fusion-style subcommands work on one snapshot; temporal input is reduced
// to its latest state.
Dataset snapshot_input(const RunConfig& c) {
  Dataset d = load_input(c);
  return d.mode() == Mode::kTemporal ? latest_snapshot(d) : d;
}

int finish(const Report& report, const RunConfig& c, bool converged,
           int iterations, std::ostream& out, std::ostream& err) {
  emit_report(report, c.out, c.format, out);
  if (converged) return kExitOk;
  err << "warning: fixpoint did not converge after " << iterations
      << " iterations\n";
  return c.strict ? kExitNotConverged : kExitOk;
}

int run_fuse(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dataset d = snapshot_input(c);
  const FusionResult fused = fuse_fixpoint(d, fusion_of(c), c.threads);
  return finish(fusion_report(naive_vote(d), fused, fusion_of(c)), c,
                fused.converged, fused.iterations, out, err);
}

int run_detect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dataset d = snapshot_input(c);
  const FusionResult fused = fuse_fixpoint(d, fusion_of(c), c.threads);
  return finish(dependence_report(fused.verdicts, fused, fusion_of(c)), c,
                fused.converged, fused.iterations, out, err);
}

int run_rank(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dataset d = snapshot_input(c);
  const FusionResult fused = fuse_fixpoint(d, fusion_of(c), c.threads);
  const std::size_t k = c.k ? c.k : d.sources().size();
  const auto ranked = rank_sources(fused.accuracy, fused.verdicts, k);
  return finish(ranking_report(ranked, fused, fusion_of(c), k), c,
                fused.converged, fused.iterations, out, err);
}

int run_detect_temporal(const RunConfig& c, std::ostream& out,
                        std::ostream& err) {
  const Dataset d = load_input(c);
  if (d.mode() != Mode::kTemporal) {
    throw InputError("detect-temporal needs timestamped observations");
  }
  const TemporalAnalyzer analyzer(d, c.temporal, c.threads);
  const auto verdicts = analyzer.all_pairs(c.threads);
  const FusionResult& fused = analyzer.snapshot_fusion();
  return finish(temporal_report(verdicts, c.temporal), c, fused.converged,
                fused.iterations, out, err);
}

int run_detect_dissim(const RunConfig& c, std::ostream& out) {
  const Dataset d = snapshot_input(c);
  const DependenceConfig& dep = fusion_of(c).dependence;
  const auto verdicts = detect_dissimilarity(d, dep, c.threads);
  const auto consensus = debiased_aggregate(d, verdicts, dep);
  emit_report(dissimilarity_report(verdicts, consensus, dep), c.out, c.format,
              out);
  return kExitOk;
}

ScenarioSpec load_seeded_scenario(const std::string& path,
                                  const RunConfig& c) {
  if (!c.seed) throw InputError("--seed is required");
  ScenarioSpec spec = load_scenario(path);
  spec.seed = *c.seed;
  return spec;
}

Report scenario_block(const ScenarioSpec& spec) {
  Report r;
  r["spec_hash"] = spec_hash_hex(spec);
  r["seed"] = spec.seed;
  return r;
}

Report edges_json(const PlantedTruth& planted) {
  Report edges = Report::array();
  for (const auto& e : planted.edges) {
    edges.push_back({{"dependent", e.dependent.str()},
                     {"target", e.target.str()},
                     {"kind", std::string(to_string(e.kind))},
                     {"rate", e.rate},
                     {"lag", e.lag}});
  }
  return edges;
}

bool has_kind(const PlantedTruth& planted, DependenceKind kind) {
  for (const auto& e : planted.edges) {
    if (e.kind == kind) return true;
  }
  return false;
}

int run_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.inputs.size() != 1) {
    throw InputError("simulate takes exactly one scenario file");
  }
  const ScenarioSpec spec = load_seeded_scenario(c.inputs.front(), c);
  const Scenario sc = generate_scenario(spec);

  Report config = config_json(c.temporal);
  config["scenario"] = Report::parse(scenario_to_json(spec));
  Report r;
  r["kind"] = "simulation";
  r["tool"] = {{"name", std::string(kToolName)},
               {"version", std::string(kToolVersion)}};
  r["config"] = std::move(config);
  r.update(scenario_block(spec));
  r["dataset"] = {{"mode", std::string(to_string(sc.dataset.mode()))},
                  {"sources", sc.dataset.sources().size()},
                  {"items", sc.dataset.items().size()},
                  {"observations", sc.dataset.size()}};
  r["planted"] = {{"edges", edges_json(sc.planted)}};

  if (!c.dataset_out.empty()) {
    std::ofstream f(c.dataset_out, std::ios::binary);
    if (!f) throw InputError("cannot write dataset to " + c.dataset_out);
    f << serialize_observations(sc.dataset, format_from_path(c.dataset_out));
  }

  bool converged = true;
  int iterations = 0;
  if (c.evaluate) {
    const FusionConfig& fc = fusion_of(c);
    const double tau = fc.dependence.tau;
    const Dataset snap = sc.dataset.mode() == Mode::kTemporal
                             ? latest_snapshot(sc.dataset)
                             : sc.dataset;
    const FusionResult fused = fuse_fixpoint(snap, fc, c.threads);
    converged = fused.converged;
    iterations = fused.iterations;
    Report ev;
    ev["fusion"] = {
        {"naive", fusion_eval_json(evaluate_fusion(naive_vote(snap), sc.planted))},
        {"fixpoint", fusion_eval_json(evaluate_fusion(fused.truth, sc.planted))},
        {"iterations", fused.iterations},
        {"converged", fused.converged}};
    const auto sim = scored_pairs(fused.verdicts, tau);
    ev["similarity"] = dependence_eval_json(
        evaluate_dependence(sim, sc.planted, DependenceKind::kSimilarity));
    if (sc.dataset.mode() == Mode::kTemporal) {
      const TemporalAnalyzer analyzer(sc.dataset, c.temporal, c.threads);
      const auto tv = analyzer.all_pairs(c.threads);
      const auto tp = scored_pairs(tv, tau);
      ev["temporal"] = dependence_eval_json(
          evaluate_dependence(tp, sc.planted, DependenceKind::kSimilarity));
    }
    if (has_kind(sc.planted, DependenceKind::kDissimilarity)) {
      const auto dv = detect_dissimilarity(snap, fc.dependence, c.threads);
      std::vector<ScoredPair> dp;
      for (const auto& v : dv) {
        dp.push_back({v.first, v.second, v.posterior, v.direction,
                      v.flagged(tau)});
      }
      ev["dissimilarity"] = dependence_eval_json(
          evaluate_dependence(dp, sc.planted, DependenceKind::kDissimilarity));
      ev["consensus"] = consensus_eval_json(evaluate_consensus(
          debiased_aggregate(snap, dv, fc.dependence), sc.planted));
    }
    r["evaluation"] = std::move(ev);
  }
  return finish(r, c, converged, iterations, out, err);
}

Report read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read report " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Report r = Report::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (r.is_discarded() || !r.is_object() || !r.contains("kind")) {
    throw InputError("not a report: " + path);
  }
  return r;
}

TruthAssignment truth_from_json(const Report& items) {
  std::vector<ItemTruth> out;
  for (const auto& [item, t] : items.items()) {
    ItemTruth it;
    it.item = ItemId(item);
    it.chosen = Value(t.at("chosen").get<std::string>());
    it.tied = t.at("tied").get<bool>();
    for (const auto& [v, p] : t.at("posterior").items()) {
      it.posterior.emplace_back(Value(v), p.is_number() ? p.get<double>() : 0.0);
    }
    out.push_back(std::move(it));
  }
  return TruthAssignment(std::move(out));
}

std::vector<ScoredPair> pairs_from_json(const Report& pairs) {
  std::vector<ScoredPair> out;
  for (const auto& p : pairs) {
    auto number = [&](const char* key) {
      const auto& x = p.at(key);
      return x.is_number() ? x.get<double>() : 0.0;
    };
    out.push_back({SourceId(p.at("pair").at(0).get<std::string>()),
                   SourceId(p.at("pair").at(1).get<std::string>()),
                   number("posterior"), number("direction"),
                   p.at("flagged").get<bool>()});
  }
  return out;
}

std::vector<ConsensusItem> consensus_from_json(const Report& items) {
  std::vector<ConsensusItem> out;
  for (const auto& [item, c] : items.items()) {
    ConsensusItem ci;
    ci.item = ItemId(item);
    for (const auto& [v, p] : c.at("naive").items()) {
      ci.naive.emplace_back(Value(v), p.get<double>());
    }
    for (const auto& [v, p] : c.at("debiased").items()) {
      ci.debiased.emplace_back(Value(v), p.get<double>());
    }
    ci.shift = c.at("shift").get<double>();
    out.push_back(std::move(ci));
  }
  return out;
}

Report evaluate_report(const Report& r, const PlantedTruth& planted) {
  const std::string kind = r.at("kind").get<std::string>();
  Report e;
  e["kind"] = kind;
  if (kind == "fusion") {
    e["naive"] = fusion_eval_json(
        evaluate_fusion(truth_from_json(r.at("naive").at("items")), planted));
    e["fixpoint"] = fusion_eval_json(
        evaluate_fusion(truth_from_json(r.at("fixpoint").at("items")), planted));
  } else if (kind == "dependence" || kind == "temporal") {
    const auto pairs = pairs_from_json(r.at("pairs"));
    e["similarity"] = dependence_eval_json(
        evaluate_dependence(pairs, planted, DependenceKind::kSimilarity));
  } else if (kind == "dissimilarity") {
    const auto pairs = pairs_from_json(r.at("pairs"));
    e["dissimilarity"] = dependence_eval_json(
        evaluate_dependence(pairs, planted, DependenceKind::kDissimilarity));
    e["consensus"] = consensus_eval_json(
        evaluate_consensus(consensus_from_json(r.at("consensus")), planted));
  } else {
    throw InputError("cannot evaluate a '" + kind + "' report");
  }
  return e;
}

int run_eval(const RunConfig& c, std::ostream& out) {
  if (c.scenario.empty()) throw InputError("--scenario is required");
  if (c.inputs.empty()) throw InputError("eval needs at least one report");
  const ScenarioSpec spec = load_seeded_scenario(c.scenario, c);
  const Scenario sc = generate_scenario(spec);
  Report reports = Report::array();
  for (const auto& path : c.inputs) {
    try {
      reports.push_back(evaluate_report(read_report(path), sc.planted));
    } catch (const Report::exception& e) {
      throw InputError("malformed report " + path + ": " + e.what());
    }
  }
  Report config;
  config["scenario"] = Report::parse(scenario_to_json(spec));
  Report r;
  r["kind"] = "evaluation";
  r["tool"] = {{"name", std::string(kToolName)},
               {"version", std::string(kToolVersion)}};
  r["config"] = std::move(config);
  r.update(scenario_block(spec));
  r["reports"] = std::move(reports);
  emit_report(r, c.out, c.format, out);
  return kExitOk;
}

Timestamp parse_delta(const std::string& text) {
  if (text == "inf") return kUnboundedDelta;
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v < 0) {
    throw ConfigError("--delta must be a non-negative integer or 'inf'");
  }
  return static_cast<Timestamp>(v);
}

}  // namespace

int run_pipeline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.temporal.validate();
    if (c.threads == 0) throw ConfigError("--threads must be at least 1");
    const std::string& s = c.subcommand;
    if (s == "fuse") return run_fuse(c, out, err);
    if (s == "detect") return run_detect(c, out, err);
    if (s == "detect-temporal") return run_detect_temporal(c, out, err);
    if (s == "detect-dissim") return run_detect_dissim(c, out);
    if (s == "rank") return run_rank(c, out, err);
    if (s == "simulate") return run_simulate(c, out, err);
    if (s == "eval") return run_eval(c, out);
    throw ConfigError("unknown subcommand '" + s + "'");
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Report::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Source dependence analysis for conflicting data sources",
               "srcdep"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kToolVersion));

  RunConfig c;
  FusionConfig& fc = c.temporal.fusion;
  DependenceConfig& dc = fc.dependence;
  std::string mode, format = "json", delta;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "Input mode")
        ->check(CLI::IsMember({"snapshot", "temporal"}));
    sub->add_option("--alpha", dc.alpha, "Prior probability of dependence");
    sub->add_option("--copy-rate", dc.copy_rate, "Per-item copy probability");
    sub->add_option("--tau", dc.tau, "Detection threshold");
    sub->add_option("--min-overlap", dc.min_overlap, "Minimum shared items");
    sub->add_option("--flip-rate", dc.flip_rate,
                    "Per-item contrarian flip probability");
    sub->add_option("--n-floor", fc.n_floor, "Floor on false values per item");
    sub->add_option("--max-iterations", fc.max_iterations,
                    "Fixpoint iteration cap");
    sub->add_option("--delta", delta, "Update matching window, or 'inf'");
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_flag("--strict", c.strict, "Exit 2 when the fixpoint stalls");
    sub->add_option("--out", c.out, "Report path (default stdout)");
    sub->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--threads", c.threads, "Worker threads");
  };

  struct Spec {
    const char* name;
    const char* help;
    const char* input_help;
  };
  const Spec specs[] = {
      {"fuse", "Naive and fixpoint truth discovery", "Observation file"},
      {"detect", "Snapshot copy detection", "Observation file"},
      {"detect-temporal", "Copy detection from update histories",
       "Timestamped observation file"},
      {"detect-dissim", "Contrarian rater detection", "Rating file"},
      {"rank", "Greedy source ranking", "Observation file"},
      {"simulate", "Generate a synthetic scenario", "Scenario JSON"},
      {"eval", "Score existing reports against a scenario", "Report files"},
  };
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    sub->add_option("inputs", c.inputs, s.input_help)->required();
    const std::string name = s.name;
    if (name == "rank") {
      sub->add_option("--k", c.k, "Number of sources to pick (default all)");
    } else if (name == "simulate") {
      sub->add_flag("--eval", c.evaluate, "Score detectors on the scenario");
      sub->add_option("--dataset-out", c.dataset_out,
                      "Write the generated observations");
    } else if (name == "eval") {
      sub->add_option("--scenario", c.scenario, "Scenario JSON")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  if (!mode.empty()) {
    c.mode = mode == "temporal" ? Mode::kTemporal : Mode::kSnapshot;
  }
  c.format = format == "text" ? ReportFormat::kText : ReportFormat::kJson;
  if (!delta.empty()) {
    try {
      c.temporal.delta = parse_delta(delta);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return kExitInputError;
    }
  }
  return run_pipeline(c, out, err);
}

}  // namespace srcdep
