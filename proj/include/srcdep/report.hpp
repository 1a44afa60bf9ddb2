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

// Report documents and their canonical serialization.
//
// Every report is a JSON object with a "kind" tag, a "tool" block naming
// the version and the full effective configuration under "config".

#ifndef SRCDEP_REPORT_HPP_
#define SRCDEP_REPORT_HPP_

#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "srcdep/dependence.hpp"
#include "srcdep/evaluation.hpp"
#include "srcdep/fusion.hpp"
#include "srcdep/simgen.hpp"
#include "srcdep/temporal.hpp"

namespace srcdep {

inline constexpr std::string_view kToolName = "srcdep";
inline constexpr std::string_view kToolVersion = "0.1.0";

using Report = nlohmann::json;

Report config_json(const DependenceConfig& config);
Report config_json(const FusionConfig& config);
Report config_json(const TemporalConfig& config);

Report truth_json(const TruthAssignment& truth);

// Naive and fixpoint truth side by side.
Report fusion_report(const TruthAssignment& naive, const FusionResult& fused,
                     const FusionConfig& config);

// Similarity verdicts sorted by descending posterior, then pair ids.
Report dependence_report(std::span<const DependenceVerdict> verdicts,
                         const FusionResult& fused, const FusionConfig& config);

Report temporal_report(std::span<const TemporalVerdict> verdicts,
                       const TemporalConfig& config);

Report dissimilarity_report(std::span<const DependenceVerdict> verdicts,
                            std::span<const ConsensusItem> consensus,
                            const DependenceConfig& config);

Report ranking_report(std::span<const RankedSource> ranked,
                      const FusionResult& fused, const FusionConfig& config,
                      std::size_t k);

Report dependence_eval_json(const DependenceEval& e);
Report fusion_eval_json(const FusionEval& e);
Report consensus_eval_json(const ConsensusEval& e);

// Hex string of spec_hash().
std::string spec_hash_hex(const ScenarioSpec& spec);

// Rounds every floating-point number to 9 significant digits; object keys
// are already sorted. Same report, same bytes.
std::string canonical_json(const Report& report);

// Human-readable summary, dispatched on the "kind" tag.
std::string text_summary(const Report& report);

enum class ReportFormat { kJson, kText };

// Writes to `path`, or to `console` when the path is empty or "-". Throws
// InputError when the file cannot be written.
void emit_report(const Report& report, const std::string& path,
                 ReportFormat format, std::ostream& console = std::cout);

}  // namespace srcdep

#endif  // SRCDEP_REPORT_HPP_
