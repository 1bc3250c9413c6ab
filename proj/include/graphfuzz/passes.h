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

#ifndef GRAPHFUZZ_PASSES_H_
#define GRAPHFUZZ_PASSES_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/ir.h"
#include "graphfuzz/rng.h"

namespace graphfuzz {

enum class PassId : uint8_t {
  kInline,
  kCanonicalize,
  kSimplifyExpr,
  kFoldConstant,
  kEliminateCommonSubexpr,
  kDeadCodeElimination,
  kToANormalForm,
};
inline constexpr int kNumPasses = 7;

// All passes, in the order of the default pipeline.
const std::array<PassId, kNumPasses>& AllPasses();
absl::string_view PassName(PassId id);
absl::StatusOr<PassId> ParsePassName(absl::string_view name);

// The passes expect a module annotated by InferTypes and return an
// unannotated one. `faults` switches on seeded defects.
IrModule Inline(const IrModule& m, const FaultSet& faults = {});
IrModule Canonicalize(const IrModule& m);
IrModule SimplifyExpr(const IrModule& m);
IrModule FoldConstant(const IrModule& m, const FaultSet& faults = {});
IrModule EliminateCommonSubexpr(const IrModule& m, const FaultSet& faults = {});
IrModule DeadCodeElimination(const IrModule& m, const FaultSet& faults = {});
IrModule ToANormalForm(const IrModule& m);

IrModule ApplyPass(PassId id, const IrModule& m, const FaultSet& faults = {});

// Callees larger than this many expression nodes are not inlined.
inline constexpr int kInlineThreshold = 32;

struct Pipeline {
  std::string name;
  std::vector<PassId> passes;
  FaultSet faults;
};

// Every pass once, in AllPasses() order.
Pipeline DefaultPipeline();
// A random nonempty subset of the passes in random order.
Pipeline RandomPipeline(Rng& rng);
// Returns `p` with the named seeded defect switched on. Fails with NotFound
// "UnknownBug: <name>" for names outside the catalog.
absl::StatusOr<Pipeline> InjectBug(Pipeline p, absl::string_view bug);

// Runs the passes in order, re-inferring types after each one. The result
// is annotated.
absl::StatusOr<IrModule> RunPipeline(const IrModule& typed, const Pipeline& p);

// True when every argument of every Prim, Call, Tuple and TupleGet is a
// variable, constant or global reference.
bool IsANormalForm(const IrModule& m);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_PASSES_H_
