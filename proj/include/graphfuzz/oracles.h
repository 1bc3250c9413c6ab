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

#ifndef GRAPHFUZZ_ORACLES_H_
#define GRAPHFUZZ_ORACLES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/backends.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/ir.h"
#include "graphfuzz/passes.h"
#include "json.hpp"

namespace graphfuzz {

enum class Outcome : uint8_t { kPass, kCrash, kInconsistency, kExpectedRejection };
enum class OracleId : uint8_t { kNone, kO1, kO2, kO3 };

absl::string_view OutcomeName(Outcome o);
absl::string_view OracleName(OracleId o);

// One oracle's finding about one subject (a compile stage, a pipeline, a
// mutant, a backend or an adapter).
struct Fragment {
  OracleId oracle = OracleId::kNone;
  Outcome outcome = Outcome::kPass;
  std::string subject;
  // Error text when the finding comes with a diagnostic; absent for pure
  // value mismatches and for aborts without a message.
  std::optional<std::string> trace;
  std::string detail;
  int input_index = -1;

  nlohmann::json ToJson() const;
};

struct FuzzVerdict {
  Outcome outcome = Outcome::kPass;
  OracleId oracle = OracleId::kNone;
  ConstraintLevel level = ConstraintLevel::kConstrained;
  std::optional<std::string> trace;
  std::string graph_ref;
  uint64_t input_seed = 0;
  // Every fragment found, in oracle order; the first one decides the verdict.
  std::vector<Fragment> details;

  bool IsFailure() const {
    return outcome == Outcome::kCrash || outcome == Outcome::kInconsistency;
  }
  nlohmann::json ToJson() const;
};

// An execution target outside the process, such as a real compiler behind
// the adapter protocol. Run returns nullopt when the target declines the
// module.
class ExternalBackend {
 public:
  virtual ~ExternalBackend() = default;
  virtual std::string name() const = 0;
  virtual absl::StatusOr<std::optional<Value>> Run(const IrModule& typed,
                                                   const Inputs& inputs) = 0;
};

struct CaseConfig {
  int num_inputs = 3;
  // Pipelines checked by O2. Empty means O2 only checks mutants.
  std::vector<Pipeline> pipelines;
  bool run_mutants = true;
  bool enable_o2 = true;
  bool enable_o3 = true;
  // Seeded defects; they apply to type inference, every pipeline and the
  // backends.
  FaultSet faults;
  std::vector<ExternalBackend*> adapters;
};

// The default pipeline plus `random_pipelines` random ones drawn from seed.
std::vector<Pipeline> CasePipelines(uint64_t seed, int random_pipelines = 2);

// O1. `status` is the failure of lowering, type inference or running the
// original module. At level 0 structured diagnostics are expected
// rejections and only aborts are crashes; at level 1 every failure is a
// crash.
Fragment Oracle1Crash(const absl::Status& status, ConstraintLevel level,
                      absl::string_view stage);

// O2. Compares each pipeline's output module and each rewrite mutant with
// the reference results of the original on the tree backend.
std::vector<Fragment> Oracle2OptMutation(const IrModule& typed,
                                         const std::vector<Inputs>& inputs,
                                         const std::vector<Value>& reference,
                                         const CaseConfig& cfg, uint64_t seed);

// O3. Compares the graph and vm backends and every adapter with the
// reference results.
std::vector<Fragment> Oracle3CrossBackend(const IrModule& typed,
                                          const std::vector<Inputs>& inputs,
                                          const std::vector<Value>& reference,
                                          const CaseConfig& cfg);

// Lowers, type-checks and runs one graph through O1, O2 and O3. Pure in its
// arguments, so the same graph and seed always give the same verdict.
FuzzVerdict RunCase(const ComputationalGraph& g, const NodeInfoTable& t,
                    ConstraintLevel level, const CaseConfig& cfg,
                    uint64_t input_seed);

// Reference inputs of a case: input k is drawn from DeriveSeed(seed, k).
absl::StatusOr<std::vector<Inputs>> CaseInputs(const GlobalFunction& main,
                                               uint64_t input_seed,
                                               int num_inputs);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_ORACLES_H_
