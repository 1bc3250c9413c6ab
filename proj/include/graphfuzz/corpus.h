// Copyright 2026 The Graphfuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef GRAPHFUZZ_CORPUS_H_
#define GRAPHFUZZ_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/oracles.h"
#include "json.hpp"

namespace graphfuzz {

// Everything needed to re-run one case besides the graph itself.
struct ReplaySettings {
  ConstraintLevel level = ConstraintLevel::kConstrained;
  uint64_t input_seed = 0;
  int num_inputs = 3;
  int random_pipelines = 2;
  bool run_mutants = true;
  FaultSet faults;

  // Adapters are not part of the settings; callers attach them.
  CaseConfig ToCaseConfig() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<ReplaySettings> FromJson(const nlohmann::json& j);
};

// A corpus entry: <stem>.graph holds the canonical graph text and
// <stem>.json the sidecar with seeds, settings and the recorded verdict.
struct CaseRecord {
  ComputationalGraph graph;
  int64_t iteration = -1;
  uint64_t gen_seed = 0;
  ReplaySettings settings;
  FuzzVerdict verdict;

  nlohmann::json SidecarJson() const;
};

absl::Status SaveCase(const std::string& dir, const std::string& stem,
                      const CaseRecord& record);
// Accepts the .graph path, the .json path, or the common stem.
absl::StatusOr<CaseRecord> LoadCase(const std::string& path);

// Runs the case again from its graph and settings.
FuzzVerdict ReplayCase(const ComputationalGraph& g,
                       const ReplaySettings& settings,
                       const std::vector<ExternalBackend*>& adapters = {});

// Same outcome and oracle, both traced or both untraced, and traces at
// least `threshold` similar.
bool SameVerdictClass(const FuzzVerdict& reference, const FuzzVerdict& replay,
                      double threshold = 0.90);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_CORPUS_H_
