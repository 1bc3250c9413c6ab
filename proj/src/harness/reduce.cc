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


#include "graphfuzz/reduce.h"

#include <set>

#include "graphfuzz/backends.h"
#include "graphfuzz/lowering.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

bool PrefixIsActive(const ComputationalGraph& g, const NodeInfoTable& t, int n,
                    const Pipeline& pipeline, uint64_t input_seed) {
  ComputationalGraph prefix = Prefix(g, n);
  NodeInfoTable infos;
  for (int i = 0; i < n; ++i) infos.Append(t.infos()[i]);
  absl::StatusOr<IrModule> lowered = Lower(prefix, infos);
  if (!lowered.ok()) return false;
  absl::StatusOr<IrModule> typed = InferTypes(*lowered, pipeline.faults);
  if (!typed.ok()) return false;
  absl::StatusOr<IrModule> optimized = RunPipeline(*typed, pipeline);
  if (!optimized.ok()) return false;
  absl::StatusOr<Inputs> inputs = RandomInputs(*typed->main(), input_seed);
  if (!inputs.ok()) return false;
  return RunBackend(*typed, *inputs, Backend::kTree, pipeline.faults).ok() &&
         RunBackend(*optimized, *inputs, Backend::kTree, pipeline.faults).ok();
}

}  // namespace

int CountActiveNodes(const ComputationalGraph& g, const NodeInfoTable& t,
                     const Pipeline& pipeline, uint64_t input_seed) {
  for (int n = g.size(); n > 0; --n) {
    try {
      if (PrefixIsActive(g, t, n, pipeline, input_seed)) return n;
    } catch (const std::exception&) {
      // An escaped exception is a failure of this prefix.
    }
  }
  return 0;
}

absl::StatusOr<ShrinkResult> Shrink(const ComputationalGraph& g,
                                    const ReplaySettings& settings,
                                    const FuzzVerdict& target,
                                    double threshold) {
  ShrinkResult result;
  result.graph = g;
  result.verdict = ReplayCase(g, settings);
  ++result.attempts;
  if (!target.IsFailure() ||
      !SameVerdictClass(target, result.verdict, threshold)) {
    return absl::FailedPreconditionError(
        "NotReproducible: the graph no longer replays the verdict");
  }
  bool progress = true;
  while (progress) {
    progress = false;
    // Later nodes have fewer dependents, so trying them first keeps each
    // step small.
    for (int id = result.graph.size() - 1; id >= 0; --id) {
      if (id >= result.graph.size()) continue;
      ComputationalGraph candidate = RemoveNodes(result.graph, {NodeId{id}});
      FuzzVerdict v = ReplayCase(candidate, settings);
      ++result.attempts;
      if (!SameVerdictClass(target, v, threshold)) continue;
      result.graph = std::move(candidate);
      result.verdict = std::move(v);
      ++result.removals;
      progress = true;
    }
  }
  return result;
}

bool IsOneMinimal(const ComputationalGraph& g, const ReplaySettings& settings,
                  const FuzzVerdict& target, double threshold) {
  for (int id = 0; id < g.size(); ++id) {
    FuzzVerdict v = ReplayCase(RemoveNodes(g, {NodeId{id}}), settings);
    if (SameVerdictClass(target, v, threshold)) return false;
  }
  return true;
}

}  // namespace graphfuzz
