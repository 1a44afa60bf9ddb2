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

#include "srcdep/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dense.hpp"
#include "srcdep/dependence.hpp"
#include "srcdep/parallel.hpp"
#include "srcdep/snapshot_view.hpp"

namespace srcdep {

double ItemTruth::probability(const Value& v) const {
  auto it = std::lower_bound(
      posterior.begin(), posterior.end(), v,
      [](const auto& entry, const Value& key) { return entry.first < key; });
  return (it != posterior.end() && it->first == v) ? it->second : 0.0;
}

TruthAssignment::TruthAssignment(std::vector<ItemTruth> items)
    : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end(),
            [](const ItemTruth& a, const ItemTruth& b) { return a.item < b.item; });
  for (std::size_t k = 1; k < items_.size(); ++k) {
    if (items_[k - 1].item == items_[k].item) {
      throw ConfigError("duplicate item in truth assignment: " +
                        items_[k].item.str());
    }
  }
}

TruthAssignment TruthAssignment::from_values(
    const std::map<ItemId, Value>& values) {
  std::vector<ItemTruth> items;
  items.reserve(values.size());
  for (const auto& [item, value] : values) {
    items.push_back({item, value, {{value, 1.0}}, false});
  }
  return TruthAssignment(std::move(items));
}

const ItemTruth* TruthAssignment::find(const ItemId& item) const {
  auto it = std::lower_bound(
      items_.begin(), items_.end(), item,
      [](const ItemTruth& t, const ItemId& key) { return t.item < key; });
  return (it != items_.end() && it->item == item) ? &*it : nullptr;
}

SourceAccuracy::SourceAccuracy(std::vector<SourceProfile> profiles)
    : profiles_(std::move(profiles)) {
  std::sort(profiles_.begin(), profiles_.end(),
            [](const SourceProfile& a, const SourceProfile& b) {
              return a.source < b.source;
            });
}

const SourceProfile* SourceAccuracy::find(const SourceId& source) const {
  auto it = std::lower_bound(
      profiles_.begin(), profiles_.end(), source,
      [](const SourceProfile& p, const SourceId& key) { return p.source < key; });
  return (it != profiles_.end() && it->source == source) ? &*it : nullptr;
}

double SourceAccuracy::accuracy(const SourceId& source) const {
  const SourceProfile* p = find(source);
  if (p == nullptr) throw ConfigError("no accuracy for source " + source.str());
  return p->accuracy;
}

void DependenceConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
  if (!(copy_rate > 0.0 && copy_rate <= 1.0)) {
    throw ConfigError("copy rate must be in (0,1]");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must be in (0,1)");
  if (min_overlap < 1) throw ConfigError("min overlap must be >= 1");
  if (!(flip_rate > 0.0 && flip_rate <= 1.0)) {
    throw ConfigError("flip rate must be in (0,1]");
  }
}

void FusionConfig::validate() const {
  if (!(accuracy_lo > 0.0 && accuracy_lo < accuracy_hi && accuracy_hi < 1.0)) {
    throw ConfigError("accuracy clamp must satisfy 0 < lo < hi < 1");
  }
  if (!(initial_accuracy > accuracy_lo && initial_accuracy < accuracy_hi)) {
    throw ConfigError("initial accuracy must lie strictly inside the clamp");
  }
  if (n_floor < 0) throw ConfigError("n floor must be >= 0");
  if (n_override && !(*n_override >= 1.0)) {
    throw ConfigError("false-value count override must be >= 1");
  }
  if (max_iterations < 1) throw ConfigError("max iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  dependence.validate();
}

double FusionConfig::clamp(double accuracy) const {
  return std::clamp(accuracy, accuracy_lo, accuracy_hi);
}

namespace internal {

DenseWeights unit_weights(const SnapshotView& view) {
  DenseWeights w(view.num_items());
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    w[i].assign(view.claims(i).size(), 1.0);
  }
  return w;
}

std::vector<double> false_value_counts(const SnapshotView& view,
                                       const FusionConfig& config) {
  std::vector<double> n(view.num_items());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (config.n_override) {
      n[i] = *config.n_override;
    } else {
      const int distinct = static_cast<int>(view.values(i).size());
      n[i] = std::max({distinct - 1, config.n_floor, 1});
    }
  }
  return n;
}

void item_log_scores(const SnapshotView& view, std::size_t i,
                     std::span<const double> accuracy,
                     const DenseWeights& weights, double n,
                     std::vector<double>& out) {
  const auto claims = view.claims(i);
  const double log_n = std::log(n);
  double base = 0.0;
  out.assign(view.values(i).size(), 0.0);
  for (std::size_t k = 0; k < claims.size(); ++k) {
    const double a = accuracy[claims[k].source];
    const double w = weights[i][k] * claims[k].prob;
    if (w == 0.0) continue;
    const double wrong = std::log1p(-a) - log_n;
    base += w * wrong;
    out[claims[k].value] += w * (std::log(a) - wrong);
  }
  for (double& s : out) s += base;
}

void choose_from_scores(std::span<const double> log_scores,
                        std::span<const char> eligible, std::int32_t& chosen,
                        char& tied, std::vector<double>& posterior) {
  const std::size_t m = log_scores.size();
  auto ok = [&](std::size_t v) { return eligible.empty() || eligible[v]; };
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < m; ++v) {
    if (ok(v)) top = std::max(top, log_scores[v]);
  }
  posterior.assign(m, 0.0);
  chosen = kNoValue;
  tied = 0;
  if (top == -std::numeric_limits<double>::infinity()) return;
  double z = 0.0;
  for (std::size_t v = 0; v < m; ++v) {
    if (!ok(v)) continue;
    posterior[v] = std::exp(log_scores[v] - top);
    z += posterior[v];
  }
  double best = 0.0;
  for (std::size_t v = 0; v < m; ++v) {
    posterior[v] /= z;
    best = std::max(best, posterior[v]);
  }
  int at_top = 0;
  for (std::size_t v = 0; v < m; ++v) {
    if (!ok(v) || best - posterior[v] > kTieTolerance) continue;
    if (at_top++ == 0) chosen = static_cast<std::int32_t>(v);
  }
  tied = at_top > 1;
}

DenseTruth dense_fuse(const SnapshotView& view,
                      std::span<const double> accuracy,
                      const DenseWeights& weights,
                      std::span<const double> n_false, unsigned threads) {
  DenseTruth t;
  const std::size_t items = view.num_items();
  t.chosen.assign(items, kNoValue);
  t.tied.assign(items, 0);
  t.posterior.resize(items);
  parallel_for(items, threads, [&](std::size_t i) {
    std::vector<double> scores;
    item_log_scores(view, i, accuracy, weights, n_false[i], scores);
    choose_from_scores(scores, {}, t.chosen[i], t.tied[i], t.posterior[i]);
  });
  return t;
}

std::vector<double> dense_accuracy(const SnapshotView& view,
                                   const DenseTruth& truth,
                                   const FusionConfig& config,
                                   std::vector<char>* prior_only) {
  std::vector<double> acc(view.num_sources());
  if (prior_only) prior_only->assign(view.num_sources(), 0);
  for (std::size_t s = 0; s < view.num_sources(); ++s) {
    double correct = 0.0, mass = 0.0;
    for (const auto& c : view.source_claims(s)) {
      if (!truth.countable(c.item)) continue;
      mass += c.prob;
      if (static_cast<std::int32_t>(c.value) == truth.chosen[c.item]) {
        correct += c.prob;
      }
    }
    if (mass > 0.0) {
      acc[s] = config.clamp(correct / mass);
    } else {
      acc[s] = config.initial_accuracy;
      if (prior_only) (*prior_only)[s] = 1;
    }
  }
  return acc;
}

DenseTruth to_dense(const SnapshotView& view, const TruthAssignment& truth) {
  DenseTruth t;
  const std::size_t items = view.num_items();
  t.chosen.assign(items, kNoValue);
  t.tied.assign(items, 0);
  t.posterior.resize(items);
  for (std::size_t i = 0; i < items; ++i) {
    t.posterior[i].assign(view.values(i).size(), 0.0);
    const ItemTruth* it = truth.find(view.item_id(i));
    if (it == nullptr) continue;
    t.tied[i] = it->tied;
    if (auto v = view.value_index(i, it->chosen)) {
      t.chosen[i] = static_cast<std::int32_t>(*v);
    } else {
      // The reference value is one nobody provided: every claim is false.
      t.chosen[i] = static_cast<std::int32_t>(view.values(i).size());
    }
    for (const auto& [value, p] : it->posterior) {
      if (auto v = view.value_index(i, value)) t.posterior[i][*v] = p;
    }
  }
  return t;
}

TruthAssignment from_dense(const SnapshotView& view, const DenseTruth& truth) {
  std::vector<ItemTruth> items;
  items.reserve(view.num_items());
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    if (truth.chosen[i] == kNoValue) continue;
    ItemTruth t;
    t.item = view.item_id(i);
    t.chosen = view.values(i)[truth.chosen[i]];
    t.tied = truth.tied[i];
    const auto vals = view.values(i);
    for (std::size_t v = 0; v < vals.size(); ++v) {
      t.posterior.emplace_back(vals[v], truth.posterior[i][v]);
    }
    items.push_back(std::move(t));
  }
  return TruthAssignment(std::move(items));
}

}  // namespace internal

using internal::DenseTruth;
using internal::DenseWeights;
using internal::kNoValue;

TruthAssignment naive_vote(const Dataset& snapshot) {
  const SnapshotView view(snapshot);
  DenseTruth t;
  t.chosen.assign(view.num_items(), kNoValue);
  t.tied.assign(view.num_items(), 0);
  t.posterior.resize(view.num_items());
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    std::vector<double> votes(view.values(i).size(), 0.0);
    double total = 0.0;
    for (const auto& c : view.claims(i)) {
      votes[c.value] += c.prob;
      total += c.prob;
    }
    // Log scores of vote shares; zero-mass values get -inf and lose.
    std::vector<double> scores(votes.size());
    for (std::size_t v = 0; v < votes.size(); ++v) {
      scores[v] = total > 0.0 ? std::log(votes[v]) : 0.0;
    }
    internal::choose_from_scores(scores, {}, t.chosen[i], t.tied[i],
                                 t.posterior[i]);
  }
  return internal::from_dense(view, t);
}

SourceAccuracy source_accuracy(const Dataset& snapshot,
                               const TruthAssignment& truth,
                               const FusionConfig& config) {
  config.validate();
  const SnapshotView view(snapshot);
  const DenseTruth t = internal::to_dense(view, truth);
  std::vector<char> prior_only;
  const auto acc = internal::dense_accuracy(view, t, config, &prior_only);
  std::vector<SourceProfile> profiles;
  for (std::size_t s = 0; s < view.num_sources(); ++s) {
    profiles.push_back({view.source_id(s), acc[s],
                        view.source_claims(s).size(), prior_only[s] != 0});
  }
  return SourceAccuracy(std::move(profiles));
}

std::vector<std::pair<Value, double>> bayes_item_posterior(
    std::span<const ItemClaim> claims, const SourceAccuracy& accuracy,
    double n_false) {
  if (claims.empty()) throw InputError("no observations for item");
  if (!(n_false >= 1.0)) throw ConfigError("false-value count must be >= 1");
  std::vector<Value> values;
  for (const auto& c : claims) {
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
      throw ConfigError("claim weight must be in [0,1]");
    }
    if (!(c.prob >= 0.0 && c.prob <= 1.0)) {
      throw ConfigError("claim probability must be in [0,1]");
    }
    values.push_back(c.value);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  const double log_n = std::log(n_false);
  std::vector<double> scores(values.size(), 0.0);
  for (const auto& c : claims) {
    const double a = accuracy.accuracy(c.source);
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError("accuracy of " + c.source.str() + " must be in (0,1)");
    }
    const double w = c.weight * c.prob;
    if (w == 0.0) continue;
    for (std::size_t v = 0; v < values.size(); ++v) {
      scores[v] += w * (values[v] == c.value ? std::log(a)
                                             : std::log1p(-a) - log_n);
    }
  }
  std::int32_t chosen;
  char tied;
  std::vector<double> post;
  internal::choose_from_scores(scores, {}, chosen, tied, post);
  std::vector<std::pair<Value, double>> out;
  for (std::size_t v = 0; v < values.size(); ++v) {
    out.emplace_back(values[v], post[v]);
  }
  return out;
}

namespace {

// Reference truth for pair (a, b) on item i: the item re-fused from the
// full log scores minus the pair's own contributions, restricted to values
// some other source provides. Items nobody else covers use the full truth.
struct LeavePairOut {
  const SnapshotView& view;
  const std::vector<std::vector<double>>& full_scores;
  const DenseTruth& full_truth;
  std::span<const double> accuracy;
  const DenseWeights& weights;
  std::span<const double> n;
  std::size_t a, b;
  std::vector<double> scores;
  std::vector<char> eligible;
  std::vector<double> post;

  std::int32_t operator()(std::size_t i) {
    const auto claims = view.claims(i);
    scores = full_scores[i];
    eligible.assign(scores.size(), 0);
    bool others = false;
    const double log_n = std::log(n[i]);
    for (std::size_t k = 0; k < claims.size(); ++k) {
      const auto& c = claims[k];
      if (c.source != a && c.source != b) {
        eligible[c.value] = 1;
        others = true;
        continue;
      }
      const double w = weights[i][k] * c.prob;
      if (w == 0.0) continue;
      const double acc = accuracy[c.source];
      const double wrong = std::log1p(-acc) - log_n;
      for (std::size_t v = 0; v < scores.size(); ++v) {
        scores[v] -= w * (v == c.value ? std::log(acc) : wrong);
      }
    }
    if (!others) {
      return full_truth.countable(i) ? full_truth.chosen[i] : kNoValue;
    }
    std::int32_t chosen;
    char tied;
    internal::choose_from_scores(scores, eligible, chosen, tied, post);
    return tied ? kNoValue : chosen;
  }
};

}  // namespace

FusionResult fuse_fixpoint(const Dataset& snapshot, const FusionConfig& config,
                           unsigned threads) {
  config.validate();
  const SnapshotView view(snapshot);
  const std::size_t ns = view.num_sources();
  const std::size_t ni = view.num_items();
  const DependenceConfig& dep = config.dependence;
  const auto n = internal::false_value_counts(view, config);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t b = a + 1; b < ns; ++b) pairs.emplace_back(a, b);
  }

  std::vector<double> acc(ns, config.initial_accuracy);
  std::vector<char> prior_only(ns, 0);
  DenseWeights weights = internal::unit_weights(view);
  DenseTruth truth;
  std::vector<std::int32_t> previous;
  std::vector<DependenceVerdict> verdicts(pairs.size());
  internal::PairMatrix matrix;
  matrix.size = ns;

  FusionResult result;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    result.iterations = iter;

    // Dependence against leave-pair-out references built from the current
    // accuracies and weights.
    std::vector<std::vector<double>> full_scores(ni);
    DenseTruth full;
    full.chosen.assign(ni, kNoValue);
    full.tied.assign(ni, 0);
    full.posterior.resize(ni);
    parallel_for(ni, threads, [&](std::size_t i) {
      internal::item_log_scores(view, i, acc, weights, n[i], full_scores[i]);
      internal::choose_from_scores(full_scores[i], {}, full.chosen[i],
                                   full.tied[i], full.posterior[i]);
    });

    matrix.posterior.assign(ns * ns, 0.0);
    matrix.flagged.assign(ns * ns, 0);
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
      const auto [a, b] = pairs[p];
      LeavePairOut ref{view, full_scores, full, acc, weights, n, a, b,
                       {},   {},          {}};
      const auto ev = internal::dense_pair_evidence(view, a, b, n, ref);
      PairEvidence evidence{view.source_id(a), view.source_id(b), ev.kt, ev.kf,
                            ev.kd};
      const int counted = evidence.overlap();
      const double pair_n = counted > 0 ? ev.n_sum / counted : 1.0;
      bool insufficient = false;
      const double post = dependence_posterior(evidence, acc[a], acc[b],
                                               pair_n, dep, &insufficient);
      DependenceVerdict& v = verdicts[p];
      v.first = view.source_id(a);
      v.second = view.source_id(b);
      v.kind = DependenceKind::kSimilarity;
      v.posterior = post;
      v.log_bayes_factor =
          insufficient ? 0.0
                       : dependence_log_bayes_factor(evidence, acc[a], acc[b],
                                                     pair_n, dep);
      v.insufficient = insufficient;
      v.evidence = evidence;
      const char flag = v.flagged(dep.tau) ? 1 : 0;
      matrix.posterior[a * ns + b] = matrix.posterior[b * ns + a] = post;
      matrix.flagged[a * ns + b] = matrix.flagged[b * ns + a] = flag;
    });
    weights = internal::dense_discounted_weights(view, matrix, acc,
                                                 dep.copy_rate);

    truth = internal::dense_fuse(view, acc, weights, n, threads);
    auto next = internal::dense_accuracy(view, truth, config, &prior_only);
    double delta = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      delta = std::max(delta, std::abs(next[s] - acc[s]));
    }
    acc = std::move(next);

    if (iter > 1 && truth.chosen == previous && delta < config.tolerance) {
      result.converged = true;
      break;
    }
    previous = truth.chosen;
  }

  // Direction from the property split against the final truth.
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, b] = pairs[p];
    const auto sa = internal::dense_split(view, truth, a, b);
    const auto sb = internal::dense_split(view, truth, b, a);
    const int m = dep.min_overlap;
    if (sa.shared_items >= m && sa.private_items >= m && sb.private_items >= m) {
      auto div = [](const internal::DenseSplit& s) {
        return std::abs(s.shared_accuracy() - s.private_accuracy());
      };
      verdicts[p].direction = div(sb) - div(sa);
    }
  }

  result.truth = internal::from_dense(view, truth);
  std::vector<SourceProfile> profiles;
  for (std::size_t s = 0; s < ns; ++s) {
    profiles.push_back({view.source_id(s), acc[s],
                        view.source_claims(s).size(), prior_only[s] != 0});
  }
  result.accuracy = SourceAccuracy(std::move(profiles));
  result.verdicts = std::move(verdicts);
  for (std::size_t i = 0; i < ni; ++i) {
    const auto claims = view.claims(i);
    for (std::size_t k = 0; k < claims.size(); ++k) {
      result.weights[{view.source_id(claims[k].source), view.item_id(i)}] =
          weights[i][k];
    }
  }
  return result;
}

}  // namespace srcdep
