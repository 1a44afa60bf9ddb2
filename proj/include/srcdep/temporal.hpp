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

// Dependence over update histories.
//
// Three evidence channels are combined as a sum of log Bayes factors on top
// of the prior log-odds:
//   snapshot    fixpoint similarity verdict on the latest snapshot;
//   precedence  who performs matched updates first, plus rare lagged matches;
//   outdated    one source holding values the other has since overwritten.

#ifndef SRCDEP_TEMPORAL_HPP_
#define SRCDEP_TEMPORAL_HPP_

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "srcdep/dataset.hpp"
#include "srcdep/fusion.hpp"

namespace srcdep {

struct TraceEntry {
  Timestamp time = 0;
  Value value;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// Value history of one (source, item): strictly increasing times, and
// consecutive entries always differ in value. Each value holds until the
// next entry.
struct UpdateTrace {
  SourceId source;
  ItemId item;
  std::vector<TraceEntry> entries;
};

// One trace per (source, item), sorted by (source, item). Re-publishing the
// current value is collapsed into the earlier entry. Throws InputError for a
// snapshot dataset.
std::vector<UpdateTrace> build_traces(const Dataset& temporal);

// The traces of one source, as a sub-range of build_traces().
std::span<const UpdateTrace> traces_of(std::span<const UpdateTrace> all,
                                       const SourceId& source);

inline constexpr Timestamp kUnboundedDelta =
    std::numeric_limits<Timestamp>::max();

struct MatchedUpdate {
  ItemId item;
  Value value;
  Timestamp first_time = 0;
  Timestamp second_time = 0;
  bool rare = false;
};

struct UpdateStats {
  int matched = 0;
  int first_precedes = 0;   // first_time < second_time
  int second_precedes = 0;  // second_time < first_time
  int rare = 0;             // matches no third source performs within delta
  int rare_lagged = 0;      // rare and not simultaneous
  std::vector<MatchedUpdate> matches;  // sorted by (item, first_time)
};

// Matches updates of the two sources one-to-one: same item, same new value,
// |time difference| <= delta, closest pairs first. `others` may hold traces
// of any sources; those of the two compared sources are ignored when
// deciding rarity.
UpdateStats shared_update_stats(std::span<const UpdateTrace> first,
                                std::span<const UpdateTrace> second,
                                Timestamp delta,
                                std::span<const UpdateTrace> others = {});

struct OutdatedScore {
  // Shared items where the second source's latest value is one the first
  // published at t and overwrote at t', with t < (second's time) < t'.
  int count = 0;
  // Shared items on which the first source overwrote at least one value.
  int eligible = 0;
  int shared = 0;
  double score = 0.0;  // count / shared, 0 without shared items
};

OutdatedScore outdated_copy_score(std::span<const UpdateTrace> first,
                                  std::span<const UpdateTrace> second);

enum class TemporalClass { kIndependent, kCopier, kLazyCopier, kAmbiguous };
std::string_view to_string(TemporalClass c);

struct TemporalConfig {
  Timestamp delta = 1;
  FusionConfig fusion;
  // Probability that the original performs a matched update first, under
  // dependence.
  double precedence_rate = 0.9;
  // Under independence, the probability that one of the two sources is
  // systematically late (each with precedence_rate); otherwise every
  // matched order is a fair coin. Keeps a merely slow source from
  // accumulating copy evidence against everyone it trails.
  double late_independent_prior = 2.0 / 3.0;
  // Bayes factor applied per rare matched update that is not simultaneous.
  double rare_factor = 2.0;
  // Rate of outdated matches per eligible item under dependence and
  // independence.
  double outdated_dependent_rate = 0.4;
  double outdated_independent_rate = 0.1;
  double snapshot_weight = 1.0;
  double precedence_weight = 1.0;
  double outdated_weight = 1.0;
  // Verdicts above tau with |direction| below this are Ambiguous.
  double min_direction = 0.2;

  void validate() const;
};

struct TemporalChannels {
  double snapshot = 0.0;
  double precedence = 0.0;
  double outdated = 0.0;
};

struct TemporalVerdict {
  SourceId first;
  SourceId second;
  double posterior = 0.0;
  double direction = 0.0;  // positive: second depends on first
  std::optional<double> lag;
  TemporalClass classification = TemporalClass::kAmbiguous;
  TemporalChannels channels;
  UpdateStats updates;
  OutdatedScore first_to_second;  // second holds first's overwritten values
  OutdatedScore second_to_first;
  bool insufficient = false;
};

// Precomputes traces and the latest-snapshot fixpoint once, then scores
// pairs. Immutable after construction.
class TemporalAnalyzer {
 public:
  TemporalAnalyzer(const Dataset& temporal, const TemporalConfig& config,
                   unsigned threads = 1);

  TemporalVerdict verdict(const SourceId& s1, const SourceId& s2) const;
  // Every pair in id order.
  std::vector<TemporalVerdict> all_pairs(unsigned threads = 1) const;

  const std::vector<UpdateTrace>& traces() const { return traces_; }
  const FusionResult& snapshot_fusion() const { return snapshot_; }
  const std::vector<SourceId>& sources() const { return sources_; }

 private:
  TemporalConfig config_;
  std::vector<SourceId> sources_;
  std::vector<UpdateTrace> traces_;
  FusionResult snapshot_;
};

TemporalVerdict temporal_verdict(const SourceId& s1, const SourceId& s2,
                                 const Dataset& temporal,
                                 const TemporalConfig& config = {});

}  // namespace srcdep

#endif  // SRCDEP_TEMPORAL_HPP_
