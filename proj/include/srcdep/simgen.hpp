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

// Seeded synthetic scenarios with planted truth and planted dependence.
//
// Every source draws from its own random stream derived from the master
// seed and the source id, so adding or removing a source leaves the
// observations of every other source unchanged.

#ifndef SRCDEP_SIMGEN_HPP_
#define SRCDEP_SIMGEN_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srcdep/dataset.hpp"
#include "srcdep/fusion_types.hpp"
#include "srcdep/temporal.hpp"

namespace srcdep {

enum class SourceRole { kIndependent, kCopier, kContrarian, kSlowProvider };
std::string_view to_string(SourceRole role);

struct SourceSpec {
  SourceId id;
  SourceRole role = SourceRole::kIndependent;
  double accuracy = 0.8;  // used for every value not copied or flipped
  double coverage = 1.0;  // fraction of items provided
  std::optional<SourceId> target;  // copier / contrarian
  double copy_rate = 0.8;  // per item: copy the target's value(s)
  Timestamp lag = 0;       // copier / contrarian delay behind the target
  double flip_rate = 0.9;  // per item: contradict the target
  Timestamp delay = 0;     // slow provider delay behind the truth
};

struct ScenarioSpec {
  int items = 100;
  int domain_size = 10;  // values per item, the true one included
  bool temporal = false;
  Timestamp horizon = 10;  // temporal: observations live in [0, horizon]
  double change_rate = 0.2;  // temporal: per item and step
  double subsample_rate = 0.0;  // temporal: drop intermediate updates
  std::uint64_t seed = 0;
  std::vector<SourceSpec> sources;

  // Throws ConfigError on a bad field, a duplicate id, a missing target or
  // a cycle in the influence graph.
  void validate() const;
};

ScenarioSpec parse_scenario(std::string_view json_text);
ScenarioSpec load_scenario(const std::string& path);
// Canonical JSON (sorted keys, every field present).
std::string scenario_to_json(const ScenarioSpec& spec);
// FNV-1a of the canonical JSON with the seed zeroed, so one spec keeps its
// hash across seeds.
std::uint64_t spec_hash(const ScenarioSpec& spec);

struct PlantedEdge {
  SourceId dependent;
  SourceId target;
  DependenceKind kind = DependenceKind::kSimilarity;
  double rate = 0.0;
  Timestamp lag = 0;
};

struct PlantedTruth {
  // Per item, the true value over time; a single entry at time 0 in
  // snapshot mode.
  std::map<ItemId, std::vector<TraceEntry>> timeline;
  std::vector<PlantedEdge> edges;

  // The last true value of every item.
  std::map<ItemId, Value> final_values() const;
  // True when the sources are joined by a planted edge of `kind` in either
  // direction.
  bool has_edge(const SourceId& a, const SourceId& b, DependenceKind kind) const;
  // True when the sources are connected through planted edges of any kind
  // (directly or through other sources).
  bool connected(const SourceId& a, const SourceId& b) const;
  // The dependent side of a direct edge between a and b, if any.
  std::optional<SourceId> dependent_of(const SourceId& a,
                                       const SourceId& b) const;
};

struct Scenario {
  Dataset dataset;
  PlantedTruth planted;
};

Scenario generate_scenario(const ScenarioSpec& spec);

}  // namespace srcdep

#endif  // SRCDEP_SIMGEN_HPP_
