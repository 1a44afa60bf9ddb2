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

// Index-based kernels shared by the fusion, dependence and temporal code.
// Not installed; everything here works on a SnapshotView.

#ifndef SRCDEP_SRC_DENSE_HPP_
#define SRCDEP_SRC_DENSE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "srcdep/fusion_types.hpp"
#include "srcdep/snapshot_view.hpp"

namespace srcdep::internal {

inline constexpr std::int32_t kNoValue = -1;

struct DenseTruth {
  std::vector<std::int32_t> chosen;  // value slot per item, kNoValue if none
  std::vector<char> tied;
  std::vector<std::vector<double>> posterior;  // per item, per value slot

  bool countable(std::size_t i) const {
    return chosen[i] != kNoValue && !tied[i];
  }
};

// Per item, parallel to view.claims(i).
using DenseWeights = std::vector<std::vector<double>>;

DenseWeights unit_weights(const SnapshotView& view);

// False-value count n per item.
std::vector<double> false_value_counts(const SnapshotView& view,
                                       const FusionConfig& config);

// Unnormalized log score of every value slot of item i.
void item_log_scores(const SnapshotView& view, std::size_t i,
                     std::span<const double> accuracy,
                     const DenseWeights& weights, double n,
                     std::vector<double>& out);

// Normalizes log scores over the slots with eligible[v] set (all slots when
// `eligible` is empty) and picks the smallest-index maximum.
void choose_from_scores(std::span<const double> log_scores,
                        std::span<const char> eligible, std::int32_t& chosen,
                        char& tied, std::vector<double>& posterior);

DenseTruth dense_fuse(const SnapshotView& view,
                      std::span<const double> accuracy,
                      const DenseWeights& weights,
                      std::span<const double> n_false, unsigned threads);

// Clamped prob-weighted accuracy per source; prior_only[s] set when the
// source has no countable item.
std::vector<double> dense_accuracy(const SnapshotView& view,
                                   const DenseTruth& truth,
                                   const FusionConfig& config,
                                   std::vector<char>* prior_only = nullptr);

DenseTruth to_dense(const SnapshotView& view, const TruthAssignment& truth);
TruthAssignment from_dense(const SnapshotView& view, const DenseTruth& truth);

// Shared-item counts of sources a and b against the reference truth.
struct DenseEvidence {
  int kt = 0;
  int kf = 0;
  int kd = 0;
  double n_sum = 0.0;  // sum of per-item n over counted items
};

// `reference(i)` returns the reference value slot for item i or kNoValue to
// skip the item.
template <typename Ref>
DenseEvidence dense_pair_evidence(const SnapshotView& view, std::size_t a,
                                  std::size_t b, std::span<const double> n,
                                  Ref&& reference) {
  DenseEvidence ev;
  auto ca = view.source_claims(a);
  auto cb = view.source_claims(b);
  std::size_t x = 0, y = 0;
  while (x < ca.size() && y < cb.size()) {
    if (ca[x].item < cb[y].item) {
      ++x;
    } else if (cb[y].item < ca[x].item) {
      ++y;
    } else {
      const std::size_t i = ca[x].item;
      const std::int32_t ref = reference(i);
      if (ref != kNoValue) {
        if (ca[x].value != cb[y].value) {
          ++ev.kd;
        } else if (static_cast<std::int32_t>(ca[x].value) == ref) {
          ++ev.kt;
        } else {
          ++ev.kf;
        }
        if (!n.empty()) ev.n_sum += n[i];
      }
      ++x;
      ++y;
    }
  }
  return ev;
}

// Posterior matrix (symmetric, row-major S x S) and flag matrix for the
// weight discounting step.
struct PairMatrix {
  std::size_t size = 0;
  std::vector<double> posterior;
  std::vector<char> flagged;

  double at(std::size_t a, std::size_t b) const {
    return posterior[a * size + b];
  }
  bool is_flagged(std::size_t a, std::size_t b) const {
    return flagged[a * size + b] != 0;
  }
};

DenseWeights dense_discounted_weights(const SnapshotView& view,
                                      const PairMatrix& pairs,
                                      std::span<const double> accuracy,
                                      double copy_rate);

// Property split of source a against b (accuracy on shared vs private
// countable items).
struct DenseSplit {
  double shared_correct = 0.0;
  double shared_mass = 0.0;
  double private_correct = 0.0;
  double private_mass = 0.0;
  int shared_items = 0;
  int private_items = 0;

  double shared_accuracy() const {
    return shared_mass > 0.0 ? shared_correct / shared_mass : 0.0;
  }
  double private_accuracy() const {
    return private_mass > 0.0 ? private_correct / private_mass : 0.0;
  }
};

DenseSplit dense_split(const SnapshotView& view, const DenseTruth& truth,
                       std::size_t a, std::size_t b);

}  // namespace srcdep::internal

#endif  // SRCDEP_SRC_DENSE_HPP_
