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

// Metrics against a planted scenario.

#ifndef SRCDEP_EVALUATION_HPP_
#define SRCDEP_EVALUATION_HPP_

#include <optional>
#include <span>
#include <vector>

#include "srcdep/dependence.hpp"
#include "srcdep/simgen.hpp"
#include "srcdep/temporal.hpp"

namespace srcdep {

// The parts of a pair verdict the metrics need.
struct ScoredPair {
  SourceId first;
  SourceId second;
  double posterior = 0.0;
  double direction = 0.0;
  bool flagged = false;
};

std::vector<ScoredPair> scored_pairs(std::span<const DependenceVerdict> v,
                                     double tau);
std::vector<ScoredPair> scored_pairs(std::span<const TemporalVerdict> v,
                                     double tau);

struct DependenceEval {
  // Positives: pairs with a direct planted edge of the evaluated kind.
  // Negatives: pairs not connected through any planted edge. Pairs that are
  // connected only indirectly (e.g. two copiers of one target) are counted
  // in `related` and left out of every metric.
  int positives = 0;
  int negatives = 0;
  int related = 0;
  int flagged = 0;
  int true_positives = 0;
  double precision = 1.0;
  double recall = 0.0;
  bool zero_flagged = false;  // precision undefined, reported as 1
  std::optional<double> auc;  // needs at least one positive and one negative
  // Among flagged positives with a nonzero direction: fraction whose sign
  // points at the planted dependent.
  std::optional<double> direction_accuracy;
  int direction_evaluated = 0;
  std::optional<double> min_positive;
  std::optional<double> max_negative;
  // Every positive scores above every negative.
  bool separated = false;
};

DependenceEval evaluate_dependence(std::span<const ScoredPair> pairs,
                                   const PlantedTruth& planted,
                                   DependenceKind kind);

struct FusionEval {
  int items = 0;    // planted items
  int correct = 0;  // chosen == planted final value and not tied
  double accuracy = 0.0;
};

// Items absent from `truth` and tied items count as wrong.
FusionEval evaluate_fusion(const TruthAssignment& truth,
                           const PlantedTruth& planted);

struct ConsensusEval {
  // Mean over items of 1 - p(planted value).
  double naive_distance = 0.0;
  double debiased_distance = 0.0;
};

ConsensusEval evaluate_consensus(std::span<const ConsensusItem> consensus,
                                 const PlantedTruth& planted);

}  // namespace srcdep

#endif  // SRCDEP_EVALUATION_HPP_
