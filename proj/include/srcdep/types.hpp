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

#ifndef SRCDEP_TYPES_HPP_
#define SRCDEP_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace srcdep {

// Opaque string identifier; the tag keeps sources, items and values apart.
template <typename Tag>
class StrongString {
 public:
  StrongString() = default;
  explicit StrongString(std::string v) : value_(std::move(v)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const StrongString&) const = default;
  bool operator==(const StrongString&) const = default;

  friend std::ostream& operator<<(std::ostream& os, const StrongString& s) {
    return os << s.value_;
  }

 private:
  std::string value_;
};

struct SourceTag {};
struct ItemTag {};
struct ValueTag {};

using SourceId = StrongString<SourceTag>;
using ItemId = StrongString<ItemTag>;
using Value = StrongString<ValueTag>;

// Integer time: epoch seconds, years or ordinals, never calendar-aware.
using Timestamp = std::int64_t;

// Malformed or inconsistent input. line() is 1-based for text inputs, 0 when
// the error is not tied to a line.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Configuration outside its documented domain.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace srcdep

template <typename Tag>
struct std::hash<srcdep::StrongString<Tag>> {
  std::size_t operator()(const srcdep::StrongString<Tag>& s) const noexcept {
    return std::hash<std::string>{}(s.str());
  }
};

#endif  // SRCDEP_TYPES_HPP_
