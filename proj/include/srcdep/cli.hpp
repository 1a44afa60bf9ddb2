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

#ifndef SRCDEP_CLI_HPP_
#define SRCDEP_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srcdep/dataset.hpp"
#include "srcdep/report.hpp"
#include "srcdep/temporal.hpp"

namespace srcdep {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunConfig {
  // fuse | detect | detect-temporal | detect-dissim | rank | simulate | eval
  std::string subcommand;
  std::vector<std::string> inputs;
  std::optional<Mode> mode;
  TemporalConfig temporal;  // temporal.fusion holds the fusion settings
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string out;  // empty: stdout
  ReportFormat format = ReportFormat::kJson;
  unsigned threads = 1;
  std::size_t k = 0;  // rank; 0 means every source
  bool evaluate = false;           // simulate --eval
  std::string dataset_out;         // simulate --dataset-out
  std::string scenario;            // eval --scenario
};

// Runs one configured subcommand. Errors go to `err` as one line and map to
// kExitInputError; a fixpoint that hits the iteration cap returns
// kExitNotConverged under `strict` (the report is still written).
int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and runs it.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace srcdep

#endif  // SRCDEP_CLI_HPP_
