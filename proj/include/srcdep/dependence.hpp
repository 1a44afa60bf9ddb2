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

// Pairwise dependence between sources.
//
// Similarity (copying) is scored with a two-hypothesis model per shared
// item. Independent sources agree on the truth with probability A1*A2, on
// one false value with (1-A1)(1-A2)/n, and differ otherwise. A dependent
// pair copies with probability c (the shared value is true with probability
// max(A1, A2)) and otherwise behaves independently. Sharing a false value
// is therefore far stronger evidence than sharing a true one.
//
// Dissimilarity (contrarian raters) compares observed agreement with the
// agreement expected from the two raters' marginals, and scores a model in
// which one rater picks a different value than the other with probability f.

#ifndef SRCDEP_DEPENDENCE_HPP_
#define SRCDEP_DEPENDENCE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "srcdep/dataset.hpp"
#include "srcdep/fusion_types.hpp"

namespace srcdep {

// Counts over items both sources provide, against truth.chosen. Items that
// are tied or missing from `truth` are skipped.
PairEvidence pair_evidence(const Dataset& snapshot,
                           const TruthAssignment& truth, const SourceId& s1,
                           const SourceId& s2);

// log( L_dep / L_ind ) for the evidence; 0 for empty evidence.
double dependence_log_bayes_factor(const PairEvidence& evidence,
                                   double accuracy1, double accuracy2,
                                   double n_false,
                                   const DependenceConfig& config);

// alpha*L_dep / (alpha*L_dep + (1-alpha)*L_ind). With overlap below
// min_overlap returns alpha exactly and sets *insufficient.
double dependence_posterior(const PairEvidence& evidence, double accuracy1,
                            double accuracy2, double n_false,
                            const DependenceConfig& config,
                            bool* insufficient = nullptr);

// Accuracy of one source on the items it shares with the other versus the
// items only it provides.
struct PropertySplit {
  SourceId source;
  double shared_accuracy = 0.0;
  double private_accuracy = 0.0;
  int shared_items = 0;
  int private_items = 0;
  double divergence() const {
    return shared_accuracy > private_accuracy
               ? shared_accuracy - private_accuracy
               : private_accuracy - shared_accuracy;
  }
};

struct DirectionResult {
  PropertySplit first;
  PropertySplit second;
  // divergence(second) - divergence(first): positive when `second` behaves
  // differently on the shared part, i.e. looks like the copier.
  double direction = 0.0;
  bool insufficient = false;
};

DirectionResult copier_direction(const Dataset& snapshot,
                                 const TruthAssignment& truth,
                                 const SourceId& s1, const SourceId& s2,
                                 const DependenceConfig& config = {});

// Vote discounting for copied values. Per item and value, providers are
// ordered by descending accuracy then id; the first keeps weight 1 and each
// later provider S gets prod over earlier providers T with a flagged
// similarity verdict of (1 - c * posterior(S, T)). Every claim of the
// dataset appears in the result.
ClaimWeights discounted_weights(const Dataset& snapshot,
                                std::span<const DependenceVerdict> verdicts,
                                const SourceAccuracy& accuracy,
                                const DependenceConfig& config = {});

// Dissimilarity verdict for raters r1, r2 over the items both rated.
// agreement.observed is the fraction of equal ratings, agreement.expected
// sum_v p1(v) p2(v) from the marginals over the overlap. Flagged only when
// the posterior reaches tau and expected - observed > 0.
DependenceVerdict dissimilarity_score(const Dataset& ratings,
                                      const SourceId& r1, const SourceId& r2,
                                      const DependenceConfig& config = {});

// Every rater pair, sorted by descending score (expected - observed), then
// by pair ids.
std::vector<DependenceVerdict> detect_dissimilarity(
    const Dataset& ratings, const DependenceConfig& config = {},
    unsigned threads = 1);

// The rater treated as contrarian in a dissimilarity verdict: the second of
// the pair unless the direction clearly points at the first.
const SourceId& contrarian_of(const DependenceVerdict& verdict);

struct ConsensusItem {
  ItemId item;
  std::vector<std::pair<Value, double>> debiased;  // sorted by value
  std::vector<std::pair<Value, double>> naive;
  double shift = 0.0;  // total variation distance between the two
};

// Weighted per-item rating distribution. A flagged contrarian's rating on
// an item where it disagrees with its target counts (1 - posterior).
std::vector<ConsensusItem> debiased_aggregate(
    const Dataset& ratings, std::span<const DependenceVerdict> verdicts,
    const DependenceConfig& config = {});

struct RankedSource {
  SourceId source;
  double marginal_score = 0.0;
};

// Greedy top-k: repeatedly take the source maximizing
// accuracy * coverage * prod_{picked P} (1 - posterior(S, P)), ties by id.
// Throws ConfigError for k == 0.
std::vector<RankedSource> rank_sources(
    const SourceAccuracy& profiles,
    std::span<const DependenceVerdict> verdicts, std::size_t k);

}  // namespace srcdep

#endif  // SRCDEP_DEPENDENCE_HPP_
