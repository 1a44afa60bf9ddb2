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

// Truth discovery over a snapshot dataset.
//
// Generative model: an independent source with accuracy A reports the true
// value with probability A and otherwise one of n false values uniformly at
// random. Copied claims are discounted by shrinking their exponent in the
// per-item likelihood product.

#ifndef SRCDEP_FUSION_HPP_
#define SRCDEP_FUSION_HPP_

#include <span>
#include <utility>
#include <vector>

#include "srcdep/dataset.hpp"
#include "srcdep/fusion_types.hpp"

namespace srcdep {

// Plurality vote per item, weighted by observation prob. Ties are broken
// towards the lexicographically smallest value and reported via `tied`.
TruthAssignment naive_vote(const Dataset& snapshot);

// Fraction of each source's countable items whose value equals the chosen
// truth, weighted by prob and clamped to [lo, hi]. Tied items and items
// missing from `truth` are not countable. A source with nothing countable
// gets the initial accuracy and prior_only = true.
SourceAccuracy source_accuracy(const Dataset& snapshot,
                               const TruthAssignment& truth,
                               const FusionConfig& config = {});

// One claim on one item, with its independence weight in [0, 1].
struct ItemClaim {
  SourceId source;
  Value value;
  double prob = 1.0;
  double weight = 1.0;
};

// Posterior over the observed candidate values of one item:
//   score(v) = prod_{S says v} A_S^w * prod_{S says u != v} ((1-A_S)/n)^w
// with w = weight * prob, normalized over the candidates. Sorted by value.
// Throws InputError for an empty claim set and ConfigError for n < 1, a
// weight outside [0, 1] or a source without an accuracy.
std::vector<std::pair<Value, double>> bayes_item_posterior(
    std::span<const ItemClaim> claims, const SourceAccuracy& accuracy,
    double n_false);

struct FusionResult {
  TruthAssignment truth;
  SourceAccuracy accuracy;
  // One similarity verdict per source pair, in (first, second) id order.
  std::vector<DependenceVerdict> verdicts;
  ClaimWeights weights;
  int iterations = 0;
  bool converged = false;
};

// Alternates dependence detection, truth estimation and accuracy estimation
// until the chosen values are stable and no accuracy moves by more than
// config.tolerance, or config.max_iterations rounds have run.
//
// Each round first scores every pair against a reference truth re-fused
// without that pair's own claims (falling back to the full truth on items
// nobody else covers), turns flagged pairs into discounted claim weights,
// then fuses with those weights and re-estimates accuracies. The result is
// identical for every `threads` value.
FusionResult fuse_fixpoint(const Dataset& snapshot,
                           const FusionConfig& config = {},
                           unsigned threads = 1);

}  // namespace srcdep

#endif  // SRCDEP_FUSION_HPP_
