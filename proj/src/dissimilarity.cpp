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

#include <algorithm>
#include <cmath>
#include <map>

#include "srcdep/dependence.hpp"
#include "srcdep/parallel.hpp"
#include "srcdep/snapshot_view.hpp"

namespace srcdep {
namespace {

// Directions closer to zero than this are treated as symmetric.
constexpr double kSymmetricDirection = 1e-9;

// log of prod over the overlap of the likelihood ratio "y is contrarian to
// x" versus independence, where py is y's marginal over the overlap.
double contrarian_log_ratio(std::span<const std::uint32_t> x,
                            std::span<const std::uint32_t> y,
                            const std::vector<double>& py, double f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == y[k]) {
      sum += std::log1p(-f);  // -inf when f = 1
    } else {
      sum += std::log(f / (1.0 - py[x[k]]) + (1.0 - f));
    }
  }
  return sum;
}

double log_mean_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -INFINITY) return hi;
  return hi + std::log(0.5 * (std::exp(a - hi) + std::exp(b - hi)));
}

DependenceVerdict score_pair(const SnapshotView& view, std::size_t a,
                             std::size_t b, const DependenceConfig& config) {
  DependenceVerdict v;
  v.first = view.source_id(a);
  v.second = view.source_id(b);
  v.kind = DependenceKind::kDissimilarity;

  std::vector<std::uint32_t> xa, xb;
  for (const auto& c : view.source_claims(a)) {
    if (auto pos = view.find(b, c.item)) {
      xa.push_back(c.value);
      xb.push_back(view.source_claims(b)[*pos].value);
    }
  }
  const std::size_t overlap = xa.size();
  v.agreement.overlap = static_cast<int>(overlap);
  v.evidence.first = v.first;
  v.evidence.second = v.second;
  if (overlap == 0) {
    v.posterior = config.alpha;
    v.insufficient = true;
    return v;
  }

  // Marginals over the overlap, indexed by value slot of each item. Values
  // are compared across items by string, so pool them per distinct string.
  std::map<Value, std::uint32_t> pool;
  std::vector<std::uint32_t> pa(overlap), pb(overlap);
  {
    std::size_t k = 0;
    for (const auto& c : view.source_claims(a)) {
      auto pos = view.find(b, c.item);
      if (!pos) continue;
      const auto& other = view.source_claims(b)[*pos];
      const Value& va = view.values(c.item)[c.value];
      const Value& vb = view.values(c.item)[other.value];
      pa[k] = pool.try_emplace(va, static_cast<std::uint32_t>(pool.size()))
                  .first->second;
      pb[k] = pool.try_emplace(vb, static_cast<std::uint32_t>(pool.size()))
                  .first->second;
      ++k;
    }
  }
  std::vector<double> ma(pool.size(), 0.0), mb(pool.size(), 0.0);
  int agree = 0;
  for (std::size_t k = 0; k < overlap; ++k) {
    ma[pa[k]] += 1.0 / overlap;
    mb[pb[k]] += 1.0 / overlap;
    agree += pa[k] == pb[k];
  }
  double expected = 0.0;
  for (std::size_t u = 0; u < pool.size(); ++u) expected += ma[u] * mb[u];
  v.agreement.expected = expected;
  v.agreement.observed = static_cast<double>(agree) / overlap;
  v.evidence.kt = agree;
  v.evidence.kd = static_cast<int>(overlap) - agree;

  const double f = config.flip_rate;
  const double log_second = contrarian_log_ratio(pa, pb, mb, f);
  const double log_first = contrarian_log_ratio(pb, pa, ma, f);
  v.direction = (log_second == log_first)
                    ? 0.0
                    : std::tanh(0.5 * (log_second - log_first));
  if (static_cast<int>(overlap) < config.min_overlap) {
    v.posterior = config.alpha;
    v.insufficient = true;
    return v;
  }
  const double log_bf = log_mean_exp(log_second, log_first);
  v.log_bayes_factor = log_bf;
  const double x =
      std::log(config.alpha) - std::log1p(-config.alpha) + log_bf;
  v.posterior = 1.0 / (1.0 + std::exp(-x));
  return v;
}

}  // namespace

DependenceVerdict dissimilarity_score(const Dataset& ratings,
                                      const SourceId& r1, const SourceId& r2,
                                      const DependenceConfig& config) {
  config.validate();
  const SnapshotView view(ratings);
  const auto a = view.source_index(r1);
  const auto b = view.source_index(r2);
  if (!a || !b) {
    throw InputError("unknown rater in pair (" + r1.str() + ", " + r2.str() +
                     ")");
  }
  return score_pair(view, *a, *b, config);
}

std::vector<DependenceVerdict> detect_dissimilarity(
    const Dataset& ratings, const DependenceConfig& config, unsigned threads) {
  config.validate();
  const SnapshotView view(ratings);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < view.num_sources(); ++a) {
    for (std::size_t b = a + 1; b < view.num_sources(); ++b) {
      pairs.emplace_back(a, b);
    }
  }
  std::vector<DependenceVerdict> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    out[p] = score_pair(view, pairs[p].first, pairs[p].second, config);
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const DependenceVerdict& x, const DependenceVerdict& y) {
                     const double sx = x.agreement.expected - x.agreement.observed;
                     const double sy = y.agreement.expected - y.agreement.observed;
                     return sx > sy;
                   });
  return out;
}

const SourceId& contrarian_of(const DependenceVerdict& verdict) {
  return verdict.direction < -kSymmetricDirection ? verdict.first
                                                  : verdict.second;
}

std::vector<ConsensusItem> debiased_aggregate(
    const Dataset& ratings, std::span<const DependenceVerdict> verdicts,
    const DependenceConfig& config) {
  config.validate();
  const SnapshotView view(ratings);
  const std::size_t ns = view.num_sources();
  // Per (item, source) multiplicative weight.
  std::vector<std::vector<double>> weight(view.num_items(),
                                          std::vector<double>(ns, 1.0));
  for (const auto& v : verdicts) {
    if (v.kind != DependenceKind::kDissimilarity || !v.flagged(config.tau)) {
      continue;
    }
    const SourceId& contrarian = contrarian_of(v);
    const SourceId& target = (&contrarian == &v.first) ? v.second : v.first;
    const auto c = view.source_index(contrarian);
    const auto t = view.source_index(target);
    if (!c || !t) continue;
    for (const auto& claim : view.source_claims(*c)) {
      auto pos = view.find(*t, claim.item);
      if (!pos) continue;
      if (view.source_claims(*t)[*pos].value != claim.value) {
        weight[claim.item][*c] *= 1.0 - v.posterior;
      }
    }
  }

  std::vector<ConsensusItem> out;
  out.reserve(view.num_items());
  for (std::size_t i = 0; i < view.num_items(); ++i) {
    const auto vals = view.values(i);
    std::vector<double> naive(vals.size(), 0.0), debiased(vals.size(), 0.0);
    double zn = 0.0, zd = 0.0;
    for (const auto& c : view.claims(i)) {
      naive[c.value] += c.prob;
      zn += c.prob;
      const double w = c.prob * weight[i][c.source];
      debiased[c.value] += w;
      zd += w;
    }
    ConsensusItem item;
    item.item = view.item_id(i);
    double shift = 0.0;
    for (std::size_t v = 0; v < vals.size(); ++v) {
      const double pn = zn > 0.0 ? naive[v] / zn : 1.0 / vals.size();
      const double pd = zd > 0.0 ? debiased[v] / zd : 1.0 / vals.size();
      item.naive.emplace_back(vals[v], pn);
      item.debiased.emplace_back(vals[v], pd);
      shift += std::abs(pd - pn);
    }
    item.shift = 0.5 * shift;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace srcdep
