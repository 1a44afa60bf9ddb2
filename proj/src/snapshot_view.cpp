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

#include "srcdep/snapshot_view.hpp"

#include <algorithm>

namespace srcdep {

SnapshotView::SnapshotView(const Dataset& snapshot)
    : sources_(snapshot.sources()), items_(snapshot.items()) {
  if (snapshot.mode() != Mode::kSnapshot) {
    throw InputError("expected a snapshot dataset; take a snapshot first");
  }
  values_.resize(items_.size());
  claims_.resize(items_.size());
  source_claims_.resize(sources_.size());

  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& vals = values_[i];
    for (std::size_t pos : snapshot.by_item(items_[i])) {
      vals.push_back(snapshot.observations()[pos].value);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  }
  // Observations are sorted by (source, item), so both claim lists come out
  // ordered without a further sort.
  for (const auto& o : snapshot.observations()) {
    const auto s = static_cast<std::uint32_t>(*source_index(o.source));
    const auto i = static_cast<std::uint32_t>(*item_index(o.item));
    const auto v = *value_index(i, o.value);
    claims_[i].push_back({s, v, o.prob});
    source_claims_[s].push_back({i, v, o.prob});
  }
}

std::optional<std::size_t> SnapshotView::source_index(
    const SourceId& id) const {
  auto it = std::lower_bound(sources_.begin(), sources_.end(), id);
  if (it == sources_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - sources_.begin());
}

std::optional<std::size_t> SnapshotView::item_index(const ItemId& id) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), id);
  if (it == items_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - items_.begin());
}

std::optional<std::uint32_t> SnapshotView::value_index(std::size_t i,
                                                       const Value& v) const {
  const auto& vals = values_[i];
  auto it = std::lower_bound(vals.begin(), vals.end(), v);
  if (it == vals.end() || *it != v) return std::nullopt;
  return static_cast<std::uint32_t>(it - vals.begin());
}

std::optional<std::size_t> SnapshotView::find(std::size_t s,
                                              std::size_t i) const {
  const auto& sc = source_claims_[s];
  auto it = std::lower_bound(
      sc.begin(), sc.end(), i,
      [](const SourceClaim& c, std::size_t item) { return c.item < item; });
  if (it == sc.end() || it->item != i) return std::nullopt;
  return static_cast<std::size_t>(it - sc.begin());
}

}  // namespace srcdep
