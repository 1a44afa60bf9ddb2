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

#ifndef SRCDEP_SNAPSHOT_VIEW_HPP_
#define SRCDEP_SNAPSHOT_VIEW_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srcdep/dataset.hpp"

namespace srcdep {

// Dense integer view of a snapshot dataset. Sources, items and the distinct
// values of each item are numbered in sorted order, so every computation
// over a view is deterministic.
class SnapshotView {
 public:
  // A claim as seen from an item: which source, which value slot.
  struct Claim {
    std::uint32_t source;
    std::uint32_t value;
    double prob;
  };
  // A claim as seen from a source.
  struct SourceClaim {
    std::uint32_t item;
    std::uint32_t value;
    double prob;
  };

  // Throws InputError for a temporal dataset.
  explicit SnapshotView(const Dataset& snapshot);

  std::size_t num_sources() const noexcept { return sources_.size(); }
  std::size_t num_items() const noexcept { return items_.size(); }

  const SourceId& source_id(std::size_t s) const { return sources_[s]; }
  const ItemId& item_id(std::size_t i) const { return items_[i]; }
  std::optional<std::size_t> source_index(const SourceId& id) const;
  std::optional<std::size_t> item_index(const ItemId& id) const;

  // Sorted distinct values of item i.
  std::span<const Value> values(std::size_t i) const { return values_[i]; }
  std::optional<std::uint32_t> value_index(std::size_t i, const Value& v) const;

  // Claims on item i, ordered by source index.
  std::span<const Claim> claims(std::size_t i) const { return claims_[i]; }
  // Claims of source s, ordered by item index.
  std::span<const SourceClaim> source_claims(std::size_t s) const {
    return source_claims_[s];
  }
  // Position of (s, i) in source_claims(s), if s covers i.
  std::optional<std::size_t> find(std::size_t s, std::size_t i) const;

 private:
  std::vector<SourceId> sources_;
  std::vector<ItemId> items_;
  std::vector<std::vector<Value>> values_;
  std::vector<std::vector<Claim>> claims_;
  std::vector<std::vector<SourceClaim>> source_claims_;
};

}  // namespace srcdep

#endif  // SRCDEP_SNAPSHOT_VIEW_HPP_
