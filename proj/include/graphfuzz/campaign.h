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


#ifndef GRAPHFUZZ_CAMPAIGN_H_
#define GRAPHFUZZ_CAMPAIGN_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/oracles.h"
#include "graphfuzz/relaxation.h"
#include "json.hpp"

namespace graphfuzz {

// Configuration of one fuzzing campaign. Every field has a JSON key of the
// same name; see README.md for the schema.
struct CampaignConfig {
  int iterations = 1000;
  // Stops early once this many seconds have passed; 0 disables the budget.
  // A budget makes the set of executed cases depend on timing.
  double time_budget_s = 0;
  int node_num_min = 5;
  int node_num_max = 40;
  ShapePolicy shapes;
  NodeKindWeights weights;
  double p0 = 0.6;
  double alpha = 0.01;
  DedupConfig dedup;
  int num_inputs = 3;
  int random_pipelines = 2;
  bool run_mutants = true;
  int parallelism = 1;
  std::string corpus_dir;  // empty disables persistence
  std::string report_path;
  std::vector<std::string> adapters;  // shell commands
  uint64_t master_seed = 0;
  FaultSet faults;

  // Fails with InvalidArgument("ConfigError: ...").
  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  // Unknown keys are config errors; missing keys keep their defaults.
  static absl::StatusOr<CampaignConfig> FromJson(const nlohmann::json& j);
};

absl::StatusOr<CampaignConfig> LoadCampaignConfig(const std::string& path);

// Seeds of iteration `i`; fixed by the master seed alone.
uint64_t GenerationSeed(uint64_t master_seed, int64_t i);
uint64_t InputSeed(uint64_t master_seed, int64_t i);

struct CampaignReport {
  nlohmann::json config;
  int64_t iterations_run = 0;
  // Level ("0"/"1") -> outcome name -> count.
  std::map<std::string, std::map<std::string, int64_t>> outcomes;
  // Oracle name -> failing verdicts attributed to it.
  std::map<std::string, int64_t> failures_by_oracle;
  int64_t failures = 0;
  int64_t new_bugs = 0;
  int64_t p_updates = 0;
  int64_t adapter_errors = 0;
  double final_p = 0;
  // p after every update, starting with p0.
  std::vector<double> p_trajectory;
  std::vector<BugRecord> bugs;
  // With exactly one seeded bug injected: its name -> iteration of the
  // first failure reported by the oracle the bug is designed for.
  std::map<std::string, int64_t> first_detection;

  nlohmann::json ToJson() const;
  int ExitCode() const { return new_bugs == 0 ? 0 : 1; }
};

// Runs the fuzz loop: select level, generate, run the oracles, dedup and
// persist new bugs. Writes <corpus>/case_<iter>.{graph,json},
// <corpus>/bugs.jsonl and the report when the paths are set.
absl::StatusOr<CampaignReport> RunCampaign(const CampaignConfig& cfg);

struct SweepPoint {
  double p0 = 0;
  double alpha = 0;
  CampaignReport report;
};

// One sub-campaign per (p0, alpha) pair; point k uses master seed
// DeriveSeed(cfg.master_seed, k) and corpus <corpus_dir>/point_<k>.
absl::StatusOr<std::vector<SweepPoint>> RunSweep(
    const CampaignConfig& cfg, const std::vector<double>& p0_grid,
    const std::vector<double>& alpha_grid);
std::string SweepCsv(const std::vector<SweepPoint>& points);
nlohmann::json SweepJson(const std::vector<SweepPoint>& points);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_CAMPAIGN_H_
