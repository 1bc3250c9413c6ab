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

#ifndef GRAPHFUZZ_GENERATOR_H_
#define GRAPHFUZZ_GENERATOR_H_

#include <cstdint>
#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/rng.h"

namespace graphfuzz {

// Level 1 obeys dtype, shape, and admissibility constraints; level 0
// ignores them while still producing structurally well-formed nodes.
enum class ConstraintLevel : uint8_t { kUnconstrained = 0, kConstrained = 1 };

inline int LevelNumber(ConstraintLevel l) { return static_cast<int>(l); }

struct ShapePolicy {
  int max_rank = 4;
  int64_t max_extent = 8;
};

struct NodeKindWeights {
  double variable = 25;
  double constant = 20;
  double op = 40;
  double function = 10;
  double call = 5;
};

struct GenConfig {
  int node_num = 10;
  ConstraintLevel level = ConstraintLevel::kConstrained;
  uint64_t rng_seed = 0;
  ShapePolicy shapes;
  NodeKindWeights weights;

  absl::Status Validate() const;
};

struct GeneratedGraph {
  ComputationalGraph graph;
  NodeInfoTable infos;
};

// Grows a graph node by node; a pure function of `cfg`.
absl::StatusOr<GeneratedGraph> Generate(const GenConfig& cfg);

// Single insertion steps. Each appends exactly one node and its info on
// success and leaves the graph untouched on failure.
NodeId InsertVariable(GeneratedGraph& gg, const ShapePolicy& shapes, Rng& rng);
NodeId InsertConstant(GeneratedGraph& gg, const ShapePolicy& shapes, Rng& rng);
// FailedPrecondition("Infeasible: ...") when no operand choice exists. With
// `forced_op` the operator is fixed instead of drawn.
absl::StatusOr<NodeId> InsertOperator(GeneratedGraph& gg, ConstraintLevel level,
                                      Rng& rng,
                                      std::optional<OpCode> forced_op = {});
absl::StatusOr<NodeId> InsertFunction(GeneratedGraph& gg, Rng& rng);
absl::StatusOr<NodeId> InsertCall(GeneratedGraph& gg, Rng& rng);

Shape RandomShape(const ShapePolicy& policy, Rng& rng);
// Integers uniform in [-8, 8] (unsigned [0, 16]), floats uniform over the
// 1/16 grid in [-4, 4], bools uniform.
TensorValue RandomValue(DType dtype, const Shape& shape, Rng& rng);
TensorValue RandomValue(DType dtype, const Shape& shape, uint64_t seed);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_GENERATOR_H_
