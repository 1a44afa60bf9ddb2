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

#include "srcdep/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace srcdep {
namespace {

using Json = nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Random stream with hand-rolled draws: the standard distributions are
// implementation-defined, mt19937_64 itself is not.
class Stream {
 public:
  Stream(std::uint64_t master, std::string_view name)
      : engine_(splitmix(master ^ splitmix(fnv1a(name)))) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }
  // Uniform over [0, n) without `skip`.
  int other_than(int skip, int n) {
    const int r = static_cast<int>(below(static_cast<std::uint64_t>(n - 1)));
    return r >= skip ? r + 1 : r;
  }

 private:
  std::mt19937_64 engine_;
};

std::optional<SourceRole> role_from(std::string_view s) {
  if (s == "independent") return SourceRole::kIndependent;
  if (s == "copier") return SourceRole::kCopier;
  if (s == "contrarian") return SourceRole::kContrarian;
  if (s == "slow_provider") return SourceRole::kSlowProvider;
  return std::nullopt;
}

template <typename T>
void read_field(const Json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw InputError(std::string("scenario field '") + key +
                     "' has the wrong type");
  }
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> keys,
                    std::string_view where) {
  for (const auto& [k, _] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* known) { return k == known; })) {
      throw InputError("unknown " + std::string(where) + " field '" + k + "'");
    }
  }
}

Json spec_json(const ScenarioSpec& spec) {
  Json sources = Json::array();
  for (const auto& s : spec.sources) {
    Json j;
    j["id"] = s.id.str();
    j["role"] = std::string(to_string(s.role));
    j["accuracy"] = s.accuracy;
    j["coverage"] = s.coverage;
    j["target"] = s.target ? Json(s.target->str()) : Json(nullptr);
    j["copy_rate"] = s.copy_rate;
    j["lag"] = s.lag;
    j["flip_rate"] = s.flip_rate;
    j["delay"] = s.delay;
    sources.push_back(std::move(j));
  }
  Json j;
  j["items"] = spec.items;
  j["domain_size"] = spec.domain_size;
  j["temporal"] = spec.temporal;
  j["horizon"] = spec.horizon;
  j["change_rate"] = spec.change_rate;
  j["subsample_rate"] = spec.subsample_rate;
  j["seed"] = spec.seed;
  j["sources"] = std::move(sources);
  return j;
}

std::string value_name(int v) { return "v" + std::to_string(v); }

std::string item_name(int i, int total) {
  const int width = std::max(1, static_cast<int>(std::to_string(total).size()));
  std::string n = std::to_string(i + 1);
  return "i" + std::string(static_cast<std::size_t>(width) - n.size(), '0') + n;
}

// Sorted sample of round(fraction * n) indices out of [0, n).
std::vector<int> sample_items(Stream& rng, int n, double fraction) {
  const int k = static_cast<int>(std::lround(fraction * n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < k; ++j) {
    const int pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(idx[j], idx[pick]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Entries (time, value slot) of one source on one item.
using Track = std::vector<std::pair<Timestamp, int>>;

}  // namespace

std::string_view to_string(SourceRole role) {
  switch (role) {
    case SourceRole::kIndependent:
      return "independent";
    case SourceRole::kCopier:
      return "copier";
    case SourceRole::kContrarian:
      return "contrarian";
    case SourceRole::kSlowProvider:
      return "slow_provider";
  }
  return "independent";
}

void ScenarioSpec::validate() const {
  if (items < 0) throw ConfigError("items must be >= 0");
  if (domain_size < 2) throw ConfigError("domain size must be >= 2");
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(change_rate)) throw ConfigError("change rate must be in [0,1]");
  if (!unit(subsample_rate)) throw ConfigError("subsample rate must be in [0,1]");
  std::map<SourceId, const SourceSpec*> by_id;
  for (const auto& s : sources) {
    if (s.id.empty()) throw ConfigError("source id must not be empty");
    if (!by_id.emplace(s.id, &s).second) {
      throw ConfigError("duplicate source id " + s.id.str());
    }
    if (!(s.accuracy > 0.0 && s.accuracy < 1.0)) {
      throw ConfigError("accuracy of " + s.id.str() + " must be in (0,1)");
    }
    if (!unit(s.coverage) || !unit(s.copy_rate) || !unit(s.flip_rate)) {
      throw ConfigError("rates of " + s.id.str() + " must be in [0,1]");
    }
    if (s.lag < 0 || s.delay < 0) {
      throw ConfigError("lag and delay of " + s.id.str() + " must be >= 0");
    }
  }
  for (const auto& s : sources) {
    const bool needs = s.role == SourceRole::kCopier ||
                       s.role == SourceRole::kContrarian;
    if (needs && !s.target) {
      throw ConfigError(s.id.str() + " needs a target");
    }
    if (s.target && !by_id.count(*s.target)) {
      throw ConfigError("target " + s.target->str() + " of " + s.id.str() +
                        " does not exist");
    }
  }
  // Follow target links; a walk longer than the roster means a cycle.
  for (const auto& s : sources) {
    const SourceSpec* cur = &s;
    std::size_t steps = 0;
    while (cur->target && (cur->role == SourceRole::kCopier ||
                           cur->role == SourceRole::kContrarian)) {
      cur = by_id.at(*cur->target);
      if (++steps > sources.size()) {
        throw ConfigError("influence cycle through " + s.id.str());
      }
    }
  }
}

ScenarioSpec parse_scenario(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  reject_unknown(j,
                 {"items", "domain_size", "temporal", "horizon", "change_rate",
                  "subsample_rate", "seed", "sources"},
                 "scenario");
  ScenarioSpec spec;
  read_field(j, "items", spec.items);
  read_field(j, "domain_size", spec.domain_size);
  read_field(j, "temporal", spec.temporal);
  read_field(j, "horizon", spec.horizon);
  read_field(j, "change_rate", spec.change_rate);
  read_field(j, "subsample_rate", spec.subsample_rate);
  read_field(j, "seed", spec.seed);
  if (auto it = j.find("sources"); it != j.end()) {
    if (!it->is_array()) throw InputError("scenario sources must be an array");
    for (const auto& s : *it) {
      if (!s.is_object()) throw InputError("scenario source must be an object");
      reject_unknown(s,
                     {"id", "role", "accuracy", "coverage", "target",
                      "copy_rate", "lag", "flip_rate", "delay"},
                     "source");
      SourceSpec src;
      std::string id, role = "independent", target;
      read_field(s, "id", id);
      read_field(s, "role", role);
      read_field(s, "target", target);
      src.id = SourceId(id);
      auto r = role_from(role);
      if (!r) throw InputError("unknown source role '" + role + "'");
      src.role = *r;
      if (!target.empty()) src.target = SourceId(target);
      read_field(s, "accuracy", src.accuracy);
      read_field(s, "coverage", src.coverage);
      read_field(s, "copy_rate", src.copy_rate);
      read_field(s, "lag", src.lag);
      read_field(s, "flip_rate", src.flip_rate);
      read_field(s, "delay", src.delay);
      spec.sources.push_back(std::move(src));
    }
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  return spec_json(spec).dump();
}

std::uint64_t spec_hash(const ScenarioSpec& spec) {
  ScenarioSpec copy = spec;
  copy.seed = 0;
  return fnv1a(scenario_to_json(copy));
}

std::map<ItemId, Value> PlantedTruth::final_values() const {
  std::map<ItemId, Value> out;
  for (const auto& [item, entries] : timeline) {
    if (!entries.empty()) out.emplace(item, entries.back().value);
  }
  return out;
}

bool PlantedTruth::has_edge(const SourceId& a, const SourceId& b,
                            DependenceKind kind) const {
  return std::any_of(edges.begin(), edges.end(), [&](const PlantedEdge& e) {
    return e.kind == kind && ((e.dependent == a && e.target == b) ||
                              (e.dependent == b && e.target == a));
  });
}

bool PlantedTruth::connected(const SourceId& a, const SourceId& b) const {
  if (a == b) return true;
  std::set<SourceId> seen{a};
  std::vector<SourceId> frontier{a};
  while (!frontier.empty()) {
    const SourceId cur = frontier.back();
    frontier.pop_back();
    for (const auto& e : edges) {
      const SourceId* next = nullptr;
      if (e.dependent == cur) next = &e.target;
      if (e.target == cur) next = &e.dependent;
      if (next == nullptr || !seen.insert(*next).second) continue;
      if (*next == b) return true;
      frontier.push_back(*next);
    }
  }
  return false;
}

std::optional<SourceId> PlantedTruth::dependent_of(const SourceId& a,
                                                   const SourceId& b) const {
  for (const auto& e : edges) {
    if ((e.dependent == a && e.target == b) ||
        (e.dependent == b && e.target == a)) {
      return e.dependent;
    }
  }
  return std::nullopt;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const int n_items = spec.items;
  const int domain = spec.domain_size;
  const Timestamp horizon = spec.temporal ? spec.horizon : 0;

  // Truth: one value per item at time 0, then changes at integer steps.
  std::vector<Track> truth(static_cast<std::size_t>(n_items));
  {
    Stream rng(spec.seed, "\x01truth");
    for (int i = 0; i < n_items; ++i) {
      truth[i].emplace_back(0, static_cast<int>(rng.below(domain)));
      for (Timestamp t = 1; t <= horizon; ++t) {
        if (rng.bernoulli(spec.change_rate)) {
          truth[i].emplace_back(t, rng.other_than(truth[i].back().second, domain));
        }
      }
    }
  }

  // Targets before dependents.
  std::map<SourceId, std::size_t> index;
  for (std::size_t s = 0; s < spec.sources.size(); ++s) {
    index[spec.sources[s].id] = s;
  }
  std::vector<std::size_t> order;
  std::vector<char> done(spec.sources.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t s) {
    if (done[s]) return;
    done[s] = 1;
    const auto& src = spec.sources[s];
    if (src.target) visit(index.at(*src.target));
    order.push_back(s);
  };
  for (std::size_t s = 0; s < spec.sources.size(); ++s) visit(s);

  // tracks[s][i]: empty when source s does not provide item i.
  std::vector<std::vector<Track>> tracks(
      spec.sources.size(), std::vector<Track>(static_cast<std::size_t>(n_items)));
  PlantedTruth planted;

  for (std::size_t s : order) {
    const SourceSpec& src = spec.sources[s];
    Stream rng(spec.seed, src.id.str());
    auto draw = [&](int true_value) {
      return rng.bernoulli(src.accuracy) ? true_value
                                         : rng.other_than(true_value, domain);
    };
    // Independent behavior on item i, shifted by `shift` time units.
    auto independent = [&](int i, Timestamp shift) {
      Track out;
      for (const auto& [t, v] : truth[i]) {
        if (t + shift > horizon) break;
        out.emplace_back(t + shift, draw(v));
      }
      return out;
    };
    const Track* target_tracks = nullptr;
    if (src.target) target_tracks = tracks[index.at(*src.target)].data();

    for (int i : sample_items(rng, n_items, src.coverage)) {
      Track& out = tracks[s][i];
      const Track* tt = target_tracks ? &target_tracks[i] : nullptr;
      const bool target_has = tt && !tt->empty();
      switch (src.role) {
        case SourceRole::kIndependent:
          out = independent(i, 0);
          break;
        case SourceRole::kSlowProvider:
          out = independent(i, src.delay);
          break;
        case SourceRole::kCopier: {
          const bool copy = target_has && rng.bernoulli(src.copy_rate);
          if (!copy) {
            out = independent(i, 0);
            break;
          }
          for (const auto& [t, v] : *tt) {
            if (t + src.lag <= horizon) out.emplace_back(t + src.lag, v);
          }
          break;
        }
        case SourceRole::kContrarian: {
          const bool flip = target_has && rng.bernoulli(src.flip_rate);
          if (!flip) {
            out = independent(i, 0);
            break;
          }
          for (const auto& [t, v] : *tt) {
            if (t + src.lag <= horizon) {
              out.emplace_back(t + src.lag, rng.other_than(v, domain));
            }
          }
          break;
        }
      }
      if (spec.temporal && spec.subsample_rate > 0.0 && out.size() > 2) {
        Track kept{out.front()};
        for (std::size_t k = 1; k + 1 < out.size(); ++k) {
          if (!rng.bernoulli(spec.subsample_rate)) kept.push_back(out[k]);
        }
        kept.push_back(out.back());
        out = std::move(kept);
      }
    }
    if (src.target && (src.role == SourceRole::kCopier ||
                       src.role == SourceRole::kContrarian)) {
      const bool copier = src.role == SourceRole::kCopier;
      planted.edges.push_back(
          {src.id, *src.target,
           copier ? DependenceKind::kSimilarity : DependenceKind::kDissimilarity,
           copier ? src.copy_rate : src.flip_rate, src.lag});
    }
  }
  std::sort(planted.edges.begin(), planted.edges.end(),
            [](const PlantedEdge& a, const PlantedEdge& b) {
              return std::tie(a.dependent, a.target) <
                     std::tie(b.dependent, b.target);
            });

  std::vector<Observation> obs;
  for (std::size_t s = 0; s < spec.sources.size(); ++s) {
    for (int i = 0; i < n_items; ++i) {
      const ItemId item(item_name(i, n_items));
      const Track& tr = tracks[s][i];
      if (spec.temporal) {
        for (const auto& [t, v] : tr) {
          obs.push_back({spec.sources[s].id, item, Value(value_name(v)), t, 1.0});
        }
      } else if (!tr.empty()) {
        obs.push_back({spec.sources[s].id, item, Value(value_name(tr.back().second)),
                       std::nullopt, 1.0});
      }
    }
  }
  for (int i = 0; i < n_items; ++i) {
    auto& entries = planted.timeline[ItemId(item_name(i, n_items))];
    for (const auto& [t, v] : truth[i]) entries.push_back({t, Value(value_name(v))});
  }
  Scenario out;
  out.dataset = Dataset::from_observations(
      std::move(obs), spec.temporal ? Mode::kTemporal : Mode::kSnapshot);
  out.planted = std::move(planted);
  return out;
}

}  // namespace srcdep
