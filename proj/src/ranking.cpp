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

#include <map>
#include <utility>

#include "srcdep/dependence.hpp"

namespace srcdep {

std::vector<RankedSource> rank_sources(
    const SourceAccuracy& profiles,
    std::span<const DependenceVerdict> verdicts, std::size_t k) {
  if (k == 0) throw ConfigError("k must be >= 1");

  // Only similarity verdicts with enough evidence discount a candidate.
  std::map<std::pair<SourceId, SourceId>, double> posterior;
  for (const auto& v : verdicts) {
    if (v.kind != DependenceKind::kSimilarity || v.insufficient) continue;
    posterior[{v.first, v.second}] = v.posterior;
    posterior[{v.second, v.first}] = v.posterior;
  }

  const auto all = profiles.profiles();
  std::vector<double> gain(all.size());
  for (std::size_t s = 0; s < all.size(); ++s) {
    gain[s] = all[s].accuracy * static_cast<double>(all[s].coverage);
  }
  std::vector<bool> taken(all.size(), false);
  std::vector<RankedSource> out;
  while (out.size() < k && out.size() < all.size()) {
    // Profiles are sorted by id, so a strict comparison keeps the smallest
    // id among equal gains.
    std::size_t best = all.size();
    for (std::size_t s = 0; s < all.size(); ++s) {
      if (!taken[s] && (best == all.size() || gain[s] > gain[best])) best = s;
    }
    taken[best] = true;
    out.push_back({all[best].source, gain[best]});
    for (std::size_t s = 0; s < all.size(); ++s) {
      if (taken[s]) continue;
      auto it = posterior.find({all[s].source, all[best].source});
      if (it != posterior.end()) gain[s] *= 1.0 - it->second;
    }
  }
  return out;
}

}  // namespace srcdep
