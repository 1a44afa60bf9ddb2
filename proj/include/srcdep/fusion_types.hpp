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

// Value types shared by truth discovery and dependence detection.

#ifndef SRCDEP_FUSION_TYPES_HPP_
#define SRCDEP_FUSION_TYPES_HPP_

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "srcdep/types.hpp"

namespace srcdep {

// Posteriors within this distance of the maximum count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct ItemTruth {
  ItemId item;
  Value chosen;
  // Sorted by value; sums to 1.
  std::vector<std::pair<Value, double>> posterior;
  bool tied = false;

  double probability(const Value& v) const;
};

// Per-item fused values, sorted by item.
class TruthAssignment {
 public:
  TruthAssignment() = default;
  explicit TruthAssignment(std::vector<ItemTruth> items);

  // Point-mass truth, e.g. a known answer key.
  static TruthAssignment from_values(const std::map<ItemId, Value>& values);

  const ItemTruth* find(const ItemId& item) const;
  std::span<const ItemTruth> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

 private:
  std::vector<ItemTruth> items_;
};

struct SourceProfile {
  SourceId source;
  double accuracy = 0.0;
  std::size_t coverage = 0;  // items provided
  bool prior_only = false;   // no countable item; accuracy is the prior
};

class SourceAccuracy {
 public:
  SourceAccuracy() = default;
  explicit SourceAccuracy(std::vector<SourceProfile> profiles);

  const SourceProfile* find(const SourceId& source) const;
  // Throws ConfigError for an unknown source.
  double accuracy(const SourceId& source) const;
  std::span<const SourceProfile> profiles() const noexcept { return profiles_; }

 private:
  std::vector<SourceProfile> profiles_;
};

struct DependenceConfig {
  double alpha = 0.2;      // prior probability that a pair is dependent
  double copy_rate = 0.8;  // per-item copy probability c
  double tau = 0.5;        // detection threshold
  int min_overlap = 3;     // m
  double flip_rate = 0.9;  // contrarian flip probability f

  // Throws ConfigError when a field is outside its domain.
  void validate() const;
};

struct FusionConfig {
  double initial_accuracy = 0.8;
  double accuracy_lo = 0.01;
  double accuracy_hi = 0.99;
  // Per-item false-value count n = max(#distinct - 1, n_floor, 1) unless
  // n_override is set.
  int n_floor = 2;
  std::optional<double> n_override;
  int max_iterations = 100;
  double tolerance = 1e-6;
  DependenceConfig dependence;

  void validate() const;
  double clamp(double accuracy) const;
};

// Shared-item counts for a pair, classified against a reference truth.
struct PairEvidence {
  SourceId first;
  SourceId second;
  int kt = 0;  // same value, equal to the truth
  int kf = 0;  // same value, not the truth
  int kd = 0;  // different values
  int overlap() const noexcept { return kt + kf + kd; }
};

// Observed vs expected agreement of two raters (opinion data).
struct AgreementStats {
  int overlap = 0;
  double expected = 0.0;
  double observed = 0.0;
};

enum class DependenceKind { kSimilarity, kDissimilarity };
std::string_view to_string(DependenceKind kind);

struct DependenceVerdict {
  SourceId first;
  SourceId second;
  DependenceKind kind = DependenceKind::kSimilarity;
  double posterior = 0.0;
  // log P(data | dependent) - log P(data | independent); 0 when
  // insufficient. Stays finite where the posterior rounds to 0 or 1.
  double log_bayes_factor = 0.0;
  // In [-1, 1]; positive means `second` depends on `first`.
  double direction = 0.0;
  // Too little overlap: posterior is the prior and never counts as flagged.
  bool insufficient = false;
  PairEvidence evidence;    // similarity verdicts
  AgreementStats agreement;  // dissimilarity verdicts

  // Dissimilarity additionally requires agreement below expectation.
  bool flagged(double tau) const {
    if (insufficient || posterior < tau) return false;
    return kind == DependenceKind::kSimilarity ||
           agreement.expected > agreement.observed;
  }
};

// Effective vote weight of each (source, item) claim.
using ClaimWeights = std::map<std::pair<SourceId, ItemId>, double>;

}  // namespace srcdep

#endif  // SRCDEP_FUSION_TYPES_HPP_
