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

#include "srcdep/evaluation.hpp"

#include <algorithm>

namespace srcdep {

std::vector<ScoredPair> scored_pairs(std::span<const DependenceVerdict> v,
                                     double tau) {
  std::vector<ScoredPair> out;
  out.reserve(v.size());
  for (const auto& d : v) {
    out.push_back({d.first, d.second, d.posterior, d.direction, d.flagged(tau)});
  }
  return out;
}

std::vector<ScoredPair> scored_pairs(std::span<const TemporalVerdict> v,
                                     double tau) {
  std::vector<ScoredPair> out;
  out.reserve(v.size());
  for (const auto& d : v) {
    out.push_back({d.first, d.second, d.posterior, d.direction,
                   !d.insufficient && d.posterior >= tau});
  }
  return out;
}

DependenceEval evaluate_dependence(std::span<const ScoredPair> pairs,
                                   const PlantedTruth& planted,
                                   DependenceKind kind) {
  DependenceEval e;
  std::vector<double> pos, neg;
  int direction_correct = 0;
  for (const auto& p : pairs) {
    const bool positive = planted.has_edge(p.first, p.second, kind);
    if (!positive && planted.connected(p.first, p.second)) {
      ++e.related;
      continue;
    }
    if (p.flagged) ++e.flagged;
    if (positive) {
      pos.push_back(p.posterior);
      if (p.flagged) {
        ++e.true_positives;
        if (p.direction != 0.0) {
          ++e.direction_evaluated;
          const auto dependent = planted.dependent_of(p.first, p.second);
          const bool says_second = p.direction > 0.0;
          if (dependent && (*dependent == p.second) == says_second) {
            ++direction_correct;
          }
        }
      }
    } else {
      neg.push_back(p.posterior);
    }
  }
  e.positives = static_cast<int>(pos.size());
  e.negatives = static_cast<int>(neg.size());
  e.zero_flagged = e.flagged == 0;
  e.precision = e.zero_flagged ? 1.0
                               : static_cast<double>(e.true_positives) / e.flagged;
  e.recall = pos.empty() ? 0.0
                         : static_cast<double>(e.true_positives) / pos.size();
  if (e.direction_evaluated > 0) {
    e.direction_accuracy =
        static_cast<double>(direction_correct) / e.direction_evaluated;
  }
  if (!pos.empty()) e.min_positive = *std::min_element(pos.begin(), pos.end());
  if (!neg.empty()) e.max_negative = *std::max_element(neg.begin(), neg.end());
  if (!pos.empty() && !neg.empty()) {
    // Area under the ROC curve of the threshold sweep, as the probability
    // that a positive outscores a negative (ties count half).
    std::sort(neg.begin(), neg.end());
    double wins = 0.0;
    for (double p : pos) {
      const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
      const auto hi = std::upper_bound(neg.begin(), neg.end(), p);
      wins += static_cast<double>(lo - neg.begin()) + 0.5 * (hi - lo);
    }
    e.auc = wins / (static_cast<double>(pos.size()) * neg.size());
    e.separated = *e.min_positive > *e.max_negative;
  } else {
    e.separated = !pos.empty();
  }
  return e;
}

FusionEval evaluate_fusion(const TruthAssignment& truth,
                           const PlantedTruth& planted) {
  FusionEval e;
  for (const auto& [item, value] : planted.final_values()) {
    ++e.items;
    const ItemTruth* t = truth.find(item);
    if (t != nullptr && !t->tied && t->chosen == value) ++e.correct;
  }
  e.accuracy = e.items ? static_cast<double>(e.correct) / e.items : 0.0;
  return e;
}

ConsensusEval evaluate_consensus(std::span<const ConsensusItem> consensus,
                                 const PlantedTruth& planted) {
  ConsensusEval e;
  const auto truth = planted.final_values();
  int n = 0;
  for (const auto& c : consensus) {
    auto it = truth.find(c.item);
    if (it == truth.end()) continue;
    auto prob = [&](const std::vector<std::pair<Value, double>>& dist) {
      for (const auto& [v, p] : dist) {
        if (v == it->second) return p;
      }
      return 0.0;
    };
    e.naive_distance += 1.0 - prob(c.naive);
    e.debiased_distance += 1.0 - prob(c.debiased);
    ++n;
  }
  if (n > 0) {
    e.naive_distance /= n;
    e.debiased_distance /= n;
  }
  return e;
}

}  // namespace srcdep
