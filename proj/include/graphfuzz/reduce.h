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


#ifndef GRAPHFUZZ_REDUCE_H_
#define GRAPHFUZZ_REDUCE_H_

#include "absl/status/statusor.h"
#include "graphfuzz/corpus.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/oracles.h"
#include "graphfuzz/passes.h"

namespace graphfuzz {

// Size of the largest insertion-order prefix of `g` that lowers,
// type-checks, runs through `pipeline`, and executes (original and
// optimized, on one input drawn from `input_seed`) without error. Prefixes
// are tried from the longest down.
int CountActiveNodes(const ComputationalGraph& g, const NodeInfoTable& t,
                     const Pipeline& pipeline, uint64_t input_seed = 0);

struct ShrinkResult {
  ComputationalGraph graph;
  FuzzVerdict verdict;
  int removals = 0;
  int attempts = 0;
};

// Greedy delta debugging. Repeatedly removes a single node together with
// its transitive consumers while the replay keeps the verdict class of
// `target` (see SameVerdictClass), until no single removal does. Fails with
// FailedPrecondition("NotReproducible: ...") when `g` itself does not
// replay `target`.
absl::StatusOr<ShrinkResult> Shrink(const ComputationalGraph& g,
                                    const ReplaySettings& settings,
                                    const FuzzVerdict& target,
                                    double threshold = 0.90);

// True when no single-node removal of `g` keeps the verdict class.
bool IsOneMinimal(const ComputationalGraph& g, const ReplaySettings& settings,
                  const FuzzVerdict& target, double threshold = 0.90);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_REDUCE_H_
