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

#ifndef GRAPHFUZZ_GRAPH_H_
#define GRAPHFUZZ_GRAPH_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/opset.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/tensor.h"

namespace graphfuzz {

// Position of a node in insertion order.
struct NodeId {
  int32_t value = -1;

  friend auto operator<=>(NodeId, NodeId) = default;
};

struct VariableNode {
  TensorType type;
};

struct ConstantNode {
  TensorValue value;
};

struct OperatorNode {
  OpCode op;
  std::vector<NodeId> parents;
};

// A subgraph collapsed into a callable unit. The body is a set of existing
// graph nodes; `inputs` are the outside nodes feeding it and `outputs` the
// body nodes with no consumer inside it. Body variables become implicit
// parameters when lowered.
struct FunctionNode {
  std::vector<NodeId> body;  // sorted
  std::vector<NodeId> inputs;
  std::vector<NodeId> outputs;
};

// Invokes `func` and yields exactly one of its outputs.
struct CallNode {
  NodeId func;
  NodeId output;
};

using Node = std::variant<VariableNode, ConstantNode, OperatorNode,
                          FunctionNode, CallNode>;

enum class NodeKind : uint8_t { kVariable, kConstant, kOperator, kFunction, kCall };

inline NodeKind KindOf(const Node& node) {
  return static_cast<NodeKind>(node.index());
}
absl::string_view NodeKindName(NodeKind kind);

// Append-only DAG; node k exists iff k < size().
class ComputationalGraph {
 public:
  NodeId Append(Node node);

  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const Node& node(NodeId id) const { return nodes_[id.value]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool Contains(NodeId id) const { return id.value >= 0 && id.value < size(); }
  NodeKind kind(NodeId id) const { return KindOf(node(id)); }
  // Variables, constants, operators, and calls produce tensors.
  bool IsValue(NodeId id) const { return kind(id) != NodeKind::kFunction; }

  // Function call arguments: inputs and body variables, ascending.
  std::vector<NodeId> FunctionParams(NodeId func) const;
  // Ids of the nodes that directly use `id` (operator parents, call
  // arguments, function body/input membership).
  std::vector<std::vector<NodeId>> Consumers() const;

  friend bool operator==(const ComputationalGraph& a,
                         const ComputationalGraph& b);

 private:
  std::vector<Node> nodes_;
};

// Per-node metadata mirroring the node information table.
struct NodeInfo {
  NodeKind kind = NodeKind::kVariable;
  // Variable, constant, operator, and call nodes. Empty when inference
  // failed, which only happens for unconstrained graphs.
  std::optional<TensorType> type;
  std::vector<NodeId> parents;  // operator
  std::vector<std::optional<TensorType>> input_types;   // function
  std::vector<std::optional<TensorType>> output_types;  // function
  NodeId func;    // call
  NodeId output;  // call

  friend bool operator==(const NodeInfo& a, const NodeInfo& b) = default;
};

// NodeId -> NodeInfo, kept in lockstep with its graph.
class NodeInfoTable {
 public:
  void Append(NodeInfo info) { infos_.push_back(std::move(info)); }
  int size() const { return static_cast<int>(infos_.size()); }
  const NodeInfo& at(NodeId id) const { return infos_[id.value]; }
  const std::vector<NodeInfo>& infos() const { return infos_; }

  friend bool operator==(const NodeInfoTable& a,
                         const NodeInfoTable& b) = default;

 private:
  std::vector<NodeInfo> infos_;
};

enum class ViolationKind : uint8_t {
  kDtypeMismatch,
  kShapeMismatch,
  kOperatorDtypeInadmissible,
  kMalformedFunction,
  kMalformedCall,
  kMalformedOperator,
};
absl::string_view ViolationKindName(ViolationKind kind);

struct ConstraintViolation {
  NodeId node;
  ViolationKind kind;
  std::string detail;
};

// Checks one operator application against the integrity constraints.
std::optional<ConstraintViolation> CheckOperator(
    NodeId node, OpCode op, const std::vector<std::optional<TensorType>>& args);

// Infers the information record for a node about to be appended. Operator
// failures are reported as InvalidArgument("<ViolationKind>: detail").
absl::StatusOr<NodeInfo> InferInfo(const ComputationalGraph& g,
                                   const NodeInfoTable& t, const Node& node);

// Builds the table by inferring every node in order; nodes whose inference
// fails get an empty type.
NodeInfoTable BuildInfoTable(const ComputationalGraph& g);

// Empty iff every integrity constraint holds. Sorted by node id.
std::vector<ConstraintViolation> ValidateGraph(const ComputationalGraph& g,
                                               const NodeInfoTable& t);

struct SubgraphSelection {
  std::vector<NodeId> body;
  std::vector<NodeId> inputs;
  std::vector<NodeId> outputs;
};

// Inputs and outputs implied by a body set.
SubgraphSelection CompleteSubgraph(const ComputationalGraph& g,
                                   std::vector<NodeId> body);
bool IsConnectedBody(const ComputationalGraph& g,
                     const std::vector<NodeId>& body);
// Randomly picks a connected body of variables, constants, and operators.
// NotFound("NoEligibleSubgraph") when the graph has no such node.
absl::StatusOr<SubgraphSelection> ExtractSubgraph(const ComputationalGraph& g,
                                                  Rng& rng);

// Line-oriented canonical form, one node per line:
//   0 variable int32 (2,3)
//   1 constant float32 (2) [0.5,1.25]
//   2 operator add 0 1
//   3 function body=[0,1,2] inputs=[] outputs=[2]
//   4 call 3 2
std::string SerializeGraph(const ComputationalGraph& g);
absl::StatusOr<ComputationalGraph> ParseGraph(absl::string_view text);
// FNV-1a over the canonical form.
uint64_t GraphHash(const ComputationalGraph& g);

// `ids` plus every node that transitively depends on one of them.
std::set<NodeId> DependentClosure(const ComputationalGraph& g,
                                  const std::set<NodeId>& ids);
// Drops `ids` and their dependents and renumbers the survivors densely.
ComputationalGraph RemoveNodes(const ComputationalGraph& g,
                               const std::set<NodeId>& ids);
// The first `n` nodes; always well formed since references point backwards.
ComputationalGraph Prefix(const ComputationalGraph& g, int n);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_GRAPH_H_
