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

#include "srcdep/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "srcdep/parallel.hpp"

namespace srcdep {

std::string_view to_string(TemporalClass c) {
  switch (c) {
    case TemporalClass::kIndependent:
      return "independent";
    case TemporalClass::kCopier:
      return "copier";
    case TemporalClass::kLazyCopier:
      return "lazy_copier";
    case TemporalClass::kAmbiguous:
      return "ambiguous";
  }
  return "ambiguous";
}

std::vector<UpdateTrace> build_traces(const Dataset& temporal) {
  if (temporal.mode() != Mode::kTemporal) {
    throw InputError("update traces need a temporal dataset");
  }
  std::vector<UpdateTrace> out;
  for (const auto& o : temporal.observations()) {
    if (out.empty() || out.back().source != o.source ||
        out.back().item != o.item) {
      out.push_back({o.source, o.item, {}});
    }
    auto& entries = out.back().entries;
    if (!entries.empty() && entries.back().time == *o.time) {
      throw InputError("duplicate update time for (" + o.source.str() + ", " +
                       o.item.str() + ")");
    }
    if (entries.empty() || entries.back().value != o.value) {
      entries.push_back({*o.time, o.value});
    }
  }
  return out;
}

std::span<const UpdateTrace> traces_of(std::span<const UpdateTrace> all,
                                       const SourceId& source) {
  auto lo = std::lower_bound(
      all.begin(), all.end(), source,
      [](const UpdateTrace& t, const SourceId& s) { return t.source < s; });
  auto hi = std::upper_bound(
      lo, all.end(), source,
      [](const SourceId& s, const UpdateTrace& t) { return s < t.source; });
  return all.subspan(static_cast<std::size_t>(lo - all.begin()),
                     static_cast<std::size_t>(hi - lo));
}

namespace {

// |a - b| <= delta without overflow for any delta.
bool within(Timestamp a, Timestamp b, Timestamp delta) {
  const Timestamp lo = std::min(a, b), hi = std::max(a, b);
  return static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) <=
         static_cast<std::uint64_t>(delta);
}

const UpdateTrace* find_trace(std::span<const UpdateTrace> traces,
                              const ItemId& item) {
  auto it = std::lower_bound(
      traces.begin(), traces.end(), item,
      [](const UpdateTrace& t, const ItemId& i) { return t.item < i; });
  return (it != traces.end() && it->item == item) ? &*it : nullptr;
}

// Matching in a fixed argument order; the public function canonicalizes.
UpdateStats match_updates(std::span<const UpdateTrace> first,
                          std::span<const UpdateTrace> second,
                          Timestamp delta,
                          std::span<const UpdateTrace> others) {
  UpdateStats out;
  const SourceId* s1 = first.empty() ? nullptr : &first.front().source;
  const SourceId* s2 = second.empty() ? nullptr : &second.front().source;
  for (const auto& t1 : first) {
    const UpdateTrace* t2 = find_trace(second, t1.item);
    if (t2 == nullptr) continue;
    struct Candidate {
      std::uint64_t gap;
      Timestamp lo, hi;
      std::size_t x, y;
    };
    std::vector<Candidate> cand;
    for (std::size_t x = 0; x < t1.entries.size(); ++x) {
      for (std::size_t y = 0; y < t2->entries.size(); ++y) {
        const auto& e1 = t1.entries[x];
        const auto& e2 = t2->entries[y];
        if (e1.value != e2.value || !within(e1.time, e2.time, delta)) continue;
        const Timestamp lo = std::min(e1.time, e2.time);
        const Timestamp hi = std::max(e1.time, e2.time);
        cand.push_back({static_cast<std::uint64_t>(hi) -
                            static_cast<std::uint64_t>(lo),
                        lo, hi, x, y});
      }
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.gap, a.lo, a.hi, a.x, a.y) <
             std::tie(b.gap, b.lo, b.hi, b.x, b.y);
    });
    std::vector<char> used1(t1.entries.size(), 0), used2(t2->entries.size(), 0);
    for (const auto& c : cand) {
      if (used1[c.x] || used2[c.y]) continue;
      used1[c.x] = used2[c.y] = 1;
      const auto& e1 = t1.entries[c.x];
      const auto& e2 = t2->entries[c.y];
      bool rare = true;
      for (const auto& t3 : others) {
        if (t3.item != t1.item || (s1 && t3.source == *s1) ||
            (s2 && t3.source == *s2)) {
          continue;
        }
        for (const auto& e3 : t3.entries) {
          if (e3.value != e1.value) continue;
          if ((e3.time >= c.lo || within(e3.time, c.lo, delta)) &&
              (e3.time <= c.hi || within(e3.time, c.hi, delta))) {
            rare = false;
            break;
          }
        }
        if (!rare) break;
      }
      out.matches.push_back({t1.item, e1.value, e1.time, e2.time, rare});
    }
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const MatchedUpdate& a, const MatchedUpdate& b) {
              return std::tie(a.item, a.first_time, a.second_time) <
                     std::tie(b.item, b.first_time, b.second_time);
            });
  for (const auto& m : out.matches) {
    ++out.matched;
    if (m.first_time < m.second_time) ++out.first_precedes;
    if (m.second_time < m.first_time) ++out.second_precedes;
    if (m.rare) {
      ++out.rare;
      if (m.first_time != m.second_time) ++out.rare_lagged;
    }
  }
  return out;
}

}  // namespace

UpdateStats shared_update_stats(std::span<const UpdateTrace> first,
                                std::span<const UpdateTrace> second,
                                Timestamp delta,
                                std::span<const UpdateTrace> others) {
  if (delta < 0) throw ConfigError("delta must be >= 0");
  const bool swap = !first.empty() && !second.empty() &&
                    second.front().source < first.front().source;
  if (!swap) return match_updates(first, second, delta, others);
  UpdateStats s = match_updates(second, first, delta, others);
  std::swap(s.first_precedes, s.second_precedes);
  for (auto& m : s.matches) std::swap(m.first_time, m.second_time);
  std::sort(s.matches.begin(), s.matches.end(),
            [](const MatchedUpdate& a, const MatchedUpdate& b) {
              return std::tie(a.item, a.first_time, a.second_time) <
                     std::tie(b.item, b.first_time, b.second_time);
            });
  return s;
}

OutdatedScore outdated_copy_score(std::span<const UpdateTrace> first,
                                  std::span<const UpdateTrace> second) {
  OutdatedScore out;
  for (const auto& t1 : first) {
    const UpdateTrace* t2 = find_trace(second, t1.item);
    if (t2 == nullptr || t2->entries.empty() || t1.entries.empty()) continue;
    ++out.shared;
    if (t1.entries.size() < 2) continue;
    ++out.eligible;
    const TraceEntry& latest = t2->entries.back();
    for (std::size_t k = 0; k + 1 < t1.entries.size(); ++k) {
      if (t1.entries[k].value == latest.value &&
          t1.entries[k].time < latest.time &&
          latest.time < t1.entries[k + 1].time) {
        ++out.count;
        break;
      }
    }
  }
  if (out.shared > 0) out.score = static_cast<double>(out.count) / out.shared;
  return out;
}

void TemporalConfig::validate() const {
  if (delta < 0) throw ConfigError("delta must be >= 0");
  fusion.validate();
  if (!(precedence_rate > 0.5 && precedence_rate < 1.0)) {
    throw ConfigError("precedence rate must be in (0.5,1)");
  }
  if (!(late_independent_prior >= 0.0 && late_independent_prior < 1.0)) {
    throw ConfigError("late independent prior must be in [0,1)");
  }
  if (!(rare_factor >= 1.0)) throw ConfigError("rare factor must be >= 1");
  if (!(outdated_independent_rate > 0.0 &&
        outdated_independent_rate < outdated_dependent_rate &&
        outdated_dependent_rate < 1.0)) {
    throw ConfigError("outdated rates must satisfy 0 < independent < dependent < 1");
  }
  if (!(snapshot_weight >= 0.0 && precedence_weight >= 0.0 &&
        outdated_weight >= 0.0)) {
    throw ConfigError("channel weights must be >= 0");
  }
  if (!(min_direction >= 0.0 && min_direction <= 1.0)) {
    throw ConfigError("min direction must be in [0,1]");
  }
}

namespace {

double log_add(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

// Dependent: either source is the original and leads with rate q.
// Independent: with probability `late` one source trails with rate q,
// otherwise each order is a fair coin.
double precedence_log_bf(int a, int b, double q, double late) {
  const double lq = std::log(q), lr = std::log1p(-q);
  const double either = std::log(0.5) + log_add(a * lq + b * lr, b * lq + a * lr);
  const double fair = (a + b) * std::log(0.5);
  const double ind =
      late > 0.0 ? log_add(std::log1p(-late) + fair, std::log(late) + either)
                 : fair;
  return either - ind;
}

double outdated_log_bf(const OutdatedScore& o, double dep, double ind) {
  return o.count * std::log(dep / ind) +
         (o.eligible - o.count) * std::log((1.0 - dep) / (1.0 - ind));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace

TemporalAnalyzer::TemporalAnalyzer(const Dataset& temporal,
                                   const TemporalConfig& config,
                                   unsigned threads)
    : config_(config), sources_(temporal.sources()),
      traces_(build_traces(temporal)) {
  config_.validate();
  snapshot_ = fuse_fixpoint(latest_snapshot(temporal), config_.fusion, threads);
}

TemporalVerdict TemporalAnalyzer::verdict(const SourceId& s1,
                                          const SourceId& s2) const {
  if (!std::binary_search(sources_.begin(), sources_.end(), s1) ||
      !std::binary_search(sources_.begin(), sources_.end(), s2)) {
    throw InputError("unknown source in pair (" + s1.str() + ", " + s2.str() +
                     ")");
  }
  const DependenceConfig& dep = config_.fusion.dependence;
  TemporalVerdict v;
  v.first = s1;
  v.second = s2;
  const auto t1 = traces_of(traces_, s1);
  const auto t2 = traces_of(traces_, s2);
  v.updates = shared_update_stats(t1, t2, config_.delta, traces_);
  v.first_to_second = outdated_copy_score(t1, t2);
  v.second_to_first = outdated_copy_score(t2, t1);

  bool snapshot_insufficient = true;
  for (const auto& sv : snapshot_.verdicts) {
    if ((sv.first == s1 && sv.second == s2) ||
        (sv.first == s2 && sv.second == s1)) {
      snapshot_insufficient = sv.insufficient;
      if (!sv.insufficient) {
        v.channels.snapshot = sv.log_bayes_factor;
      }
      break;
    }
  }

  int lagged = 0;
  std::vector<double> gaps;
  for (const auto& m : v.updates.matches) {
    if (m.first_time == m.second_time) continue;
    ++lagged;
    gaps.push_back(std::abs(static_cast<double>(m.first_time) -
                            static_cast<double>(m.second_time)));
  }
  if (lagged > 0) {
    v.channels.precedence =
        precedence_log_bf(v.updates.first_precedes, v.updates.second_precedes,
                          config_.precedence_rate,
                          config_.late_independent_prior) +
        v.updates.rare_lagged * std::log(config_.rare_factor);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t h = gaps.size() / 2;
    v.lag = gaps.size() % 2 ? gaps[h] : 0.5 * (gaps[h - 1] + gaps[h]);
  }
  const double r_dep = config_.outdated_dependent_rate;
  const double r_ind = config_.outdated_independent_rate;
  if (v.first_to_second.eligible + v.second_to_first.eligible > 0) {
    v.channels.outdated =
        std::log(0.5) +
        log_add(outdated_log_bf(v.first_to_second, r_dep, r_ind),
                outdated_log_bf(v.second_to_first, r_dep, r_ind));
  }

  const double x = logit(dep.alpha) +
                   config_.snapshot_weight * v.channels.snapshot +
                   config_.precedence_weight * v.channels.precedence +
                   config_.outdated_weight * v.channels.outdated;
  v.posterior = 1.0 / (1.0 + std::exp(-x));

  const int p1 = v.updates.first_precedes, p2 = v.updates.second_precedes;
  const int o12 = v.first_to_second.count, o21 = v.second_to_first.count;
  v.direction = 0.5 * (p1 - p2) / std::max(1, p1 + p2) +
                0.5 * (o12 - o21) / std::max(1, o12 + o21);

  v.insufficient = snapshot_insufficient && lagged == 0 &&
                   v.first_to_second.eligible + v.second_to_first.eligible == 0;
  if (v.insufficient) {
    v.classification = TemporalClass::kAmbiguous;
  } else if (v.posterior < dep.tau) {
    v.classification = TemporalClass::kIndependent;
  } else if (std::abs(v.direction) < config_.min_direction) {
    v.classification = TemporalClass::kAmbiguous;
  } else {
    // Outdated matches held by the follower are what separate a copier from
    // an independent source that merely publishes late.
    const int follower_outdated = v.direction > 0 ? o12 : o21;
    if (follower_outdated == 0 && v.channels.snapshot <= 0.0) {
      v.classification = TemporalClass::kIndependent;
    } else if (v.lag && *v.lag > 0 && follower_outdated > 0) {
      v.classification = TemporalClass::kLazyCopier;
    } else {
      v.classification = TemporalClass::kCopier;
    }
  }
  return v;
}

std::vector<TemporalVerdict> TemporalAnalyzer::all_pairs(
    unsigned threads) const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < sources_.size(); ++a) {
    for (std::size_t b = a + 1; b < sources_.size(); ++b) pairs.emplace_back(a, b);
  }
  std::vector<TemporalVerdict> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    out[p] = verdict(sources_[pairs[p].first], sources_[pairs[p].second]);
  });
  return out;
}

TemporalVerdict temporal_verdict(const SourceId& s1, const SourceId& s2,
                                 const Dataset& temporal,
                                 const TemporalConfig& config) {
  return TemporalAnalyzer(temporal, config).verdict(s1, s2);
}

}  // namespace srcdep
