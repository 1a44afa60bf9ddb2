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

#ifndef SRCDEP_DATASET_HPP_
#define SRCDEP_DATASET_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srcdep/types.hpp"

namespace srcdep {

// One claim: `source` says `item` has `value` (at `time`, with confidence
// `prob`).
struct Observation {
  SourceId source;
  ItemId item;
  Value value;
  std::optional<Timestamp> time;
  double prob = 1.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

enum class Mode { kSnapshot, kTemporal };

std::string_view to_string(Mode mode);

// Immutable collection of observations with per-source and per-item indexes.
//
// Observations are stored sorted by (source, item, time). In snapshot mode
// every (source, item) occurs at most once; in temporal mode every
// (source, item, time).
class Dataset {
 public:
  Dataset() = default;

  // Validates and indexes. Throws InputError on an invalid probability, an
  // empty identifier, mixed timed/untimed rows, a duplicate key, or a
  // conflict with `mode_hint`. With no rows the mode is the hint, else
  // snapshot.
  static Dataset from_observations(std::vector<Observation> observations,
                                   std::optional<Mode> mode_hint = {});

  Mode mode() const noexcept { return mode_; }
  bool empty() const noexcept { return observations_.empty(); }
  std::size_t size() const noexcept { return observations_.size(); }
  std::span<const Observation> observations() const noexcept {
    return observations_;
  }

  // Sorted, distinct.
  const std::vector<SourceId>& sources() const noexcept { return sources_; }
  const std::vector<ItemId>& items() const noexcept { return items_; }

  // Positions into observations(); empty span for unknown keys.
  std::span<const std::size_t> by_source(const SourceId& source) const;
  std::span<const std::size_t> by_item(const ItemId& item) const;

  // Sub-dataset restricted to the given sources (unknown ids are ignored).
  Dataset restrict_sources(std::span<const SourceId> keep) const;

 private:
  std::vector<Observation> observations_;
  Mode mode_ = Mode::kSnapshot;
  std::vector<SourceId> sources_;
  std::vector<ItemId> items_;
  std::map<SourceId, std::vector<std::size_t>> source_index_;
  std::map<ItemId, std::vector<std::size_t>> item_index_;
};

// Trim, collapse internal whitespace runs to one space, lower-case ASCII.
// Throws InputError when nothing is left.
Value normalize_value(std::string_view raw);

enum class Format { kCsv, kJson };

// Format from a file extension (".json" -> JSON, anything else CSV).
Format format_from_path(std::string_view path);

// CSV: header naming `source,item,value` plus optional `time` and `prob`
// columns (any order). JSON: array of objects with the same keys. Mode is
// temporal iff a time column is present and populated on every row.
Dataset parse_observations(std::istream& in, Format format,
                           std::optional<Mode> mode_hint = {});
Dataset parse_observations(std::string_view text, Format format,
                           std::optional<Mode> mode_hint = {});
Dataset load_observations(const std::string& path,
                          std::optional<Mode> mode_hint = {});

// Deterministic: rows ordered by (source, item, time). The prob column is
// written only when some observation has prob != 1.
std::string serialize_observations(const Dataset& dataset, Format format);

// For each (source, item), the value with the greatest time <= t. Pairs
// whose first time is after t are absent. Requires a temporal dataset.
Dataset snapshot_at(const Dataset& dataset, Timestamp t);

// snapshot_at(dataset, latest time in dataset); empty for an empty dataset.
Dataset latest_snapshot(const Dataset& dataset);

}  // namespace srcdep

#endif  // SRCDEP_DATASET_HPP_
