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

#include "srcdep/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dense.hpp"
#include "srcdep/snapshot_view.hpp"

namespace srcdep {

std::string_view to_string(DependenceKind kind) {
  return kind == DependenceKind::kSimilarity ? "similarity" : "dissimilarity";
}

PairEvidence pair_evidence(const Dataset& snapshot,
                           const TruthAssignment& truth, const SourceId& s1,
                           const SourceId& s2) {
  PairEvidence out{s1, s2, 0, 0, 0};
  const SnapshotView view(snapshot);
  const auto a = view.source_index(s1);
  const auto b = view.source_index(s2);
  if (!a || !b || *a == *b) return out;
  const auto t = internal::to_dense(view, truth);
  const auto ev = internal::dense_pair_evidence(
      view, *a, *b, {}, [&](std::size_t i) {
        return t.countable(i) ? t.chosen[i] : internal::kNoValue;
      });
  out.kt = ev.kt;
  out.kf = ev.kf;
  out.kd = ev.kd;
  return out;
}

double dependence_log_bayes_factor(const PairEvidence& evidence,
                                   double accuracy1, double accuracy2,
                                   double n_false,
                                   const DependenceConfig& config) {
  config.validate();
  if (!(accuracy1 > 0.0 && accuracy1 < 1.0 && accuracy2 > 0.0 &&
        accuracy2 < 1.0)) {
    throw ConfigError("accuracies must be in (0,1)");
  }
  if (!(n_false >= 1.0)) throw ConfigError("false-value count must be >= 1");
  const double c = config.copy_rate;
  const double amax = std::max(accuracy1, accuracy2);
  const double pt = accuracy1 * accuracy2;
  const double pf = (1.0 - accuracy1) * (1.0 - accuracy2) / n_false;
  const double pd = 1.0 - pt - pf;
  const double dt = c * amax + (1.0 - c) * pt;
  const double df = c * (1.0 - amax) + (1.0 - c) * pf;
  const double dd = (1.0 - c) * pd;

  // A count of zero contributes nothing, even when the dependent
  // likelihood of that outcome is zero (c = 1 and kd = 0).
  double log_bf = 0.0;
  if (evidence.kt > 0) log_bf += evidence.kt * std::log(dt / pt);
  if (evidence.kf > 0) log_bf += evidence.kf * std::log(df / pf);
  if (evidence.kd > 0) log_bf += evidence.kd * std::log(dd / pd);
  return log_bf;
}

double dependence_posterior(const PairEvidence& evidence, double accuracy1,
                            double accuracy2, double n_false,
                            const DependenceConfig& config,
                            bool* insufficient) {
  const double log_bf = dependence_log_bayes_factor(evidence, accuracy1,
                                                    accuracy2, n_false, config);
  const bool short_overlap = evidence.overlap() < config.min_overlap;
  if (insufficient) *insufficient = short_overlap;
  if (short_overlap) return config.alpha;
  const double x =
      std::log(config.alpha) - std::log1p(-config.alpha) + log_bf;
  return 1.0 / (1.0 + std::exp(-x));
}

namespace internal {

DenseSplit dense_split(const SnapshotView& view, const DenseTruth& truth,
                       std::size_t a, std::size_t b) {
  DenseSplit out;
  for (const auto& c : view.source_claims(a)) {
    if (!truth.countable(c.item)) continue;
    const bool correct =
        static_cast<std::int32_t>(c.value) == truth.chosen[c.item];
    if (view.find(b, c.item)) {
      ++out.shared_items;
      out.shared_mass += c.prob;
      if (correct) out.shared_correct += c.prob;
    } else {
      ++out.private_items;
      out.private_mass += c.prob;
      if (correct) out.private_correct += c.prob;
    }
  }
  return out;
}

DenseWeights dense_discounted_weights(const SnapshotView& view,
                                      const PairMatrix& pairs,
                                      std::span<const double> accuracy,
                                      double copy_rate) {
  DenseWeights w = unit_weights(view);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    const auto claims = view.claims(i);
    order.resize(claims.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (claims[x].value != claims[y].value) {
        return claims[x].value < claims[y].value;
      }
      const double ax = accuracy[claims[x].source];
      const double ay = accuracy[claims[y].source];
      if (ax != ay) return ax > ay;
      return claims[x].source < claims[y].source;
    });
    std::size_t start = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (claims[order[k]].value != claims[order[start]].value) start = k;
      const std::size_t s = claims[order[k]].source;
      double weight = 1.0;
      for (std::size_t j = start; j < k; ++j) {
        const std::size_t t = claims[order[j]].source;
        if (pairs.is_flagged(s, t)) weight *= 1.0 - copy_rate * pairs.at(s, t);
      }
      w[i][order[k]] = weight;
    }
  }
  return w;
}

}  // namespace internal

DirectionResult copier_direction(const Dataset& snapshot,
                                 const TruthAssignment& truth,
                                 const SourceId& s1, const SourceId& s2,
                                 const DependenceConfig& config) {
  config.validate();
  DirectionResult out;
  out.first.source = s1;
  out.second.source = s2;
  out.insufficient = true;
  const SnapshotView view(snapshot);
  const auto a = view.source_index(s1);
  const auto b = view.source_index(s2);
  if (!a || !b || *a == *b) return out;
  const auto t = internal::to_dense(view, truth);
  auto fill = [](const internal::DenseSplit& d, PropertySplit& p) {
    p.shared_accuracy = d.shared_accuracy();
    p.private_accuracy = d.private_accuracy();
    p.shared_items = d.shared_items;
    p.private_items = d.private_items;
  };
  fill(internal::dense_split(view, t, *a, *b), out.first);
  fill(internal::dense_split(view, t, *b, *a), out.second);
  const int m = config.min_overlap;
  out.insufficient = out.first.shared_items < m ||
                     out.first.private_items < m ||
                     out.second.private_items < m;
  if (!out.insufficient) {
    out.direction = out.second.divergence() - out.first.divergence();
  }
  return out;
}

ClaimWeights discounted_weights(const Dataset& snapshot,
                                std::span<const DependenceVerdict> verdicts,
                                const SourceAccuracy& accuracy,
                                const DependenceConfig& config) {
  config.validate();
  const SnapshotView view(snapshot);
  const std::size_t ns = view.num_sources();
  internal::PairMatrix m;
  m.size = ns;
  m.posterior.assign(ns * ns, 0.0);
  m.flagged.assign(ns * ns, 0);
  for (const auto& v : verdicts) {
    if (v.kind != DependenceKind::kSimilarity) continue;
    const auto a = view.source_index(v.first);
    const auto b = view.source_index(v.second);
    if (!a || !b || *a == *b) continue;
    m.posterior[*a * ns + *b] = m.posterior[*b * ns + *a] = v.posterior;
    const char f = v.flagged(config.tau) ? 1 : 0;
    m.flagged[*a * ns + *b] = m.flagged[*b * ns + *a] = f;
  }
  std::vector<double> acc(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    acc[s] = accuracy.accuracy(view.source_id(s));
  }
  const auto w =
      internal::dense_discounted_weights(view, m, acc, config.copy_rate);
  ClaimWeights out;
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    const auto claims = view.claims(i);
    for (std::size_t k = 0; k < claims.size(); ++k) {
      out[{view.source_id(claims[k].source), view.item_id(i)}] = w[i][k];
    }
  }
  return out;
}

}  // namespace srcdep
