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

#ifndef GRAPHFUZZ_LOWERING_H_
#define GRAPHFUZZ_LOWERING_H_

#include <string>

#include "absl/status/statusor.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/ir.h"

namespace graphfuzz {

// Builds a MiniIR module from a computational graph.
//
// Variables become parameters %v<id> of @main, in id order. Every other value
// node is bound by a let named %n<id>, also in id order, and @main returns
// the sink nodes: value nodes that are neither an operator parent nor an
// argument of a call. A single sink is returned as is, several as a tuple.
//
// Function node k becomes the global @f<k>. Its parameters %p<id> are the
// function's inputs and the variables of its body; its body binds the
// body's constants and operators and returns the outputs. A call node
// becomes @f<k>(...) applied to the current values of those parameter
// nodes, projected with .i when the function has several outputs.
//
// Structurally malformed graphs, and function parameters whose type cannot
// be inferred, yield a LoweringError diagnostic.
absl::StatusOr<IrModule> Lower(const ComputationalGraph& g,
                               const NodeInfoTable& t);

std::string ValueName(const ComputationalGraph& g, NodeId id);
std::string FunctionName(NodeId id);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_LOWERING_H_
