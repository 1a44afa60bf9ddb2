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

#include "srcdep/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace srcdep {
namespace {

using Json = nlohmann::json;

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

auto row_key(const Observation& o) {
  return std::tie(o.source, o.item, o.time);
}

// One CSV record; handles double-quoted fields with "" escapes. Returns false
// at end of input. `line` is advanced past every physical line consumed.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                     std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool field_quoted = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_quoted && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
    } else if (c == ',') {
      fields.push_back(field_quoted ? field : trim(field));
      field.clear();
      field_quoted = false;
    } else if (c == '\n') {
      ++line;
      fields.push_back(field_quoted ? field : trim(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field", line + 1);
  if (!any) return false;
  ++line;
  fields.push_back(field_quoted ? field : trim(field));
  return true;
}

Timestamp parse_time(const std::string& s, std::size_t line) {
  Timestamp t = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("time '" + s + "' is not an integer", line);
  }
  return t;
}

double parse_prob(const std::string& s, std::size_t line) {
  double p = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), p);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("prob '" + s + "' is not a number", line);
  }
  return p;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void check_row(const Observation& o, std::size_t line) {
  if (o.source.empty()) throw InputError("empty source", line);
  if (o.item.empty()) throw InputError("empty item", line);
  if (!(o.prob >= 0.0 && o.prob <= 1.0)) {
    throw InputError("prob " + format_double(o.prob) + " outside [0,1]", line);
  }
}

// Shared by both parsers: rows with 1-based line numbers for diagnostics.
struct Row {
  Observation obs;
  std::size_t line;
};

Dataset finish(std::vector<Row> rows, std::optional<Mode> hint) {
  std::size_t timed = 0;
  for (const auto& r : rows) timed += r.obs.time.has_value();
  if (timed != 0 && timed != rows.size()) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& r) {
      return r.obs.time.has_value() != rows.front().obs.time.has_value();
    });
    throw InputError("mixed mode: some rows have a time and some do not",
                     it->line);
  }
  std::map<std::tuple<SourceId, ItemId, std::optional<Timestamp>>, std::size_t>
      seen;
  for (const auto& r : rows) {
    auto [it, inserted] =
        seen.emplace(std::make_tuple(r.obs.source, r.obs.item, r.obs.time),
                     r.line);
    if (!inserted) {
      throw InputError("duplicate key (" + r.obs.source.str() + ", " +
                           r.obs.item.str() + ") first seen on line " +
                           std::to_string(it->second),
                       r.line);
    }
  }
  std::vector<Observation> obs;
  obs.reserve(rows.size());
  for (auto& r : rows) obs.push_back(std::move(r.obs));
  return Dataset::from_observations(std::move(obs), hint);
}

Dataset parse_csv(std::istream& in, std::optional<Mode> hint) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_csv_record(in, fields, line)) {
    throw InputError("missing CSV header", 1);
  }
  int col_source = -1, col_item = -1, col_value = -1, col_time = -1,
      col_prob = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::string name = trim(fields[i]);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    int* slot = name == "source" ? &col_source
                : name == "item" ? &col_item
                : name == "value" ? &col_value
                : name == "time" ? &col_time
                : name == "prob" ? &col_prob
                                 : nullptr;
    if (slot == nullptr) throw InputError("unknown column '" + name + "'", 1);
    if (*slot != -1) throw InputError("duplicate column '" + name + "'", 1);
    *slot = static_cast<int>(i);
  }
  if (col_source < 0 || col_item < 0 || col_value < 0) {
    throw InputError("header must name source, item and value", 1);
  }
  const std::size_t header_cols = fields.size();

  std::vector<Row> rows;
  while (true) {
    std::size_t start = line + 1;
    if (!read_csv_record(in, fields, line)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header_cols) {
      throw InputError("expected " + std::to_string(header_cols) +
                           " fields, got " + std::to_string(fields.size()),
                       start);
    }
    Observation o;
    o.source = SourceId(trim(fields[col_source]));
    o.item = ItemId(trim(fields[col_item]));
    try {
      o.value = normalize_value(fields[col_value]);
    } catch (const InputError& e) {
      throw InputError(e.what(), start);
    }
    if (col_time >= 0 && !trim(fields[col_time]).empty()) {
      o.time = parse_time(trim(fields[col_time]), start);
    }
    if (col_prob >= 0 && !trim(fields[col_prob]).empty()) {
      o.prob = parse_prob(trim(fields[col_prob]), start);
    }
    check_row(o, start);
    rows.push_back({std::move(o), start});
  }
  return finish(std::move(rows), hint);
}

Dataset parse_json(std::istream& in, std::optional<Mode> hint) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InputError("JSON input must be an array");
  std::vector<Row> rows;
  std::size_t index = 0;
  for (const auto& rec : doc) {
    ++index;  // reported as the record number
    if (!rec.is_object()) throw InputError("record is not an object", index);
    auto get_string = [&](const char* key) -> std::string {
      auto it = rec.find(key);
      if (it == rec.end() || !it->is_string()) {
        throw InputError(std::string("missing string field '") + key + "'",
                         index);
      }
      return it->get<std::string>();
    };
    Observation o;
    o.source = SourceId(trim(get_string("source")));
    o.item = ItemId(trim(get_string("item")));
    try {
      o.value = normalize_value(get_string("value"));
    } catch (const InputError& e) {
      throw InputError(e.what(), index);
    }
    if (auto it = rec.find("time"); it != rec.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw InputError("time is not an integer", index);
      }
      o.time = it->get<Timestamp>();
    }
    if (auto it = rec.find("prob"); it != rec.end() && !it->is_null()) {
      if (!it->is_number()) throw InputError("prob is not a number", index);
      o.prob = it->get<double>();
    }
    for (const auto& [key, _] : rec.items()) {
      if (key != "source" && key != "item" && key != "value" &&
          key != "time" && key != "prob") {
        throw InputError("unknown field '" + key + "'", index);
      }
    }
    check_row(o, index);
    rows.push_back({std::move(o), index});
  }
  return finish(std::move(rows), hint);
}

bool needs_quotes(const std::string& s) {
  if (s.empty()) return false;
  if (std::isspace(static_cast<unsigned char>(s.front())) ||
      std::isspace(static_cast<unsigned char>(s.back()))) {
    return true;
  }
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::kTemporal ? "temporal" : "snapshot";
}

Dataset Dataset::from_observations(std::vector<Observation> observations,
                                   std::optional<Mode> mode_hint) {
  Dataset d;
  std::size_t timed = 0;
  for (const auto& o : observations) {
    check_row(o, 0);
    if (o.value.empty()) throw InputError("empty value");
    timed += o.time.has_value();
  }
  if (timed != 0 && timed != observations.size()) {
    throw InputError("mixed mode: some rows have a time and some do not");
  }
  Mode inferred = timed > 0 ? Mode::kTemporal : Mode::kSnapshot;
  if (observations.empty() && mode_hint) inferred = *mode_hint;
  if (mode_hint && *mode_hint != inferred) {
    throw InputError("conflicting mode: data is " +
                     std::string(to_string(inferred)) + " but " +
                     std::string(to_string(*mode_hint)) + " was requested");
  }
  d.mode_ = inferred;

  std::sort(observations.begin(), observations.end(),
            [](const Observation& a, const Observation& b) {
              return row_key(a) < row_key(b);
            });
  for (std::size_t i = 1; i < observations.size(); ++i) {
    if (row_key(observations[i - 1]) == row_key(observations[i])) {
      throw InputError("duplicate key (" + observations[i].source.str() +
                       ", " + observations[i].item.str() + ")");
    }
  }
  d.observations_ = std::move(observations);
  for (std::size_t i = 0; i < d.observations_.size(); ++i) {
    d.source_index_[d.observations_[i].source].push_back(i);
    d.item_index_[d.observations_[i].item].push_back(i);
  }
  for (const auto& [s, _] : d.source_index_) d.sources_.push_back(s);
  for (const auto& [item, _] : d.item_index_) d.items_.push_back(item);
  return d;
}

std::span<const std::size_t> Dataset::by_source(const SourceId& source) const {
  auto it = source_index_.find(source);
  if (it == source_index_.end()) return {};
  return it->second;
}

std::span<const std::size_t> Dataset::by_item(const ItemId& item) const {
  auto it = item_index_.find(item);
  if (it == item_index_.end()) return {};
  return it->second;
}

Dataset Dataset::restrict_sources(std::span<const SourceId> keep) const {
  std::set<SourceId> wanted(keep.begin(), keep.end());
  std::vector<Observation> obs;
  for (const auto& o : observations_) {
    if (wanted.count(o.source)) obs.push_back(o);
  }
  return from_observations(std::move(obs), mode_);
}

Value normalize_value(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  if (out.empty()) throw InputError("value is empty after normalization");
  return Value(std::move(out));
}

Format format_from_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot != std::string_view::npos) {
    std::string ext(path.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "json") return Format::kJson;
  }
  return Format::kCsv;
}

Dataset parse_observations(std::istream& in, Format format,
                           std::optional<Mode> mode_hint) {
  return format == Format::kJson ? parse_json(in, mode_hint)
                                 : parse_csv(in, mode_hint);
}

Dataset parse_observations(std::string_view text, Format format,
                           std::optional<Mode> mode_hint) {
  std::istringstream in{std::string(text)};
  return parse_observations(in, format, mode_hint);
}

Dataset load_observations(const std::string& path,
                          std::optional<Mode> mode_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_observations(in, format_from_path(path), mode_hint);
}

std::string serialize_observations(const Dataset& dataset, Format format) {
  const bool temporal = dataset.mode() == Mode::kTemporal;
  const bool with_prob =
      std::any_of(dataset.observations().begin(), dataset.observations().end(),
                  [](const Observation& o) { return o.prob != 1.0; });
  if (format == Format::kJson) {
    Json arr = Json::array();
    for (const auto& o : dataset.observations()) {
      Json rec = {{"source", o.source.str()},
                  {"item", o.item.str()},
                  {"value", o.value.str()}};
      if (o.time) rec["time"] = *o.time;
      if (with_prob) rec["prob"] = o.prob;
      arr.push_back(std::move(rec));
    }
    return arr.dump(2) + "\n";
  }
  std::string out = "source,item,value";
  if (temporal) out += ",time";
  if (with_prob) out += ",prob";
  out += "\n";
  for (const auto& o : dataset.observations()) {
    out += csv_field(o.source.str()) + "," + csv_field(o.item.str()) + "," +
           csv_field(o.value.str());
    if (temporal) out += "," + std::to_string(*o.time);
    if (with_prob) out += "," + format_double(o.prob);
    out += "\n";
  }
  return out;
}

Dataset snapshot_at(const Dataset& dataset, Timestamp t) {
  if (dataset.mode() != Mode::kTemporal) {
    throw InputError("snapshot_at requires a temporal dataset");
  }
  std::vector<Observation> out;
  const auto obs = dataset.observations();
  // Sorted by (source, item, time): the last row of each run with time <= t.
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const bool run_end = i + 1 == obs.size() ||
                         obs[i + 1].source != obs[i].source ||
                         obs[i + 1].item != obs[i].item ||
                         *obs[i + 1].time > t;
    if (*obs[i].time <= t && run_end) {
      Observation o = obs[i];
      o.time.reset();
      out.push_back(std::move(o));
    }
  }
  return Dataset::from_observations(std::move(out), Mode::kSnapshot);
}

Dataset latest_snapshot(const Dataset& dataset) {
  if (dataset.empty()) return Dataset::from_observations({}, Mode::kSnapshot);
  Timestamp latest = *dataset.observations().front().time;
  for (const auto& o : dataset.observations()) latest = std::max(latest, *o.time);
  return snapshot_at(dataset, latest);
}

}  // namespace srcdep
