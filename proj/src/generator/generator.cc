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

#include "graphfuzz/generator.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace graphfuzz {
namespace {

absl::Status Infeasible(absl::string_view what) {
  return absl::FailedPreconditionError(absl::StrCat("Infeasible: ", what));
}

// Value nodes usable as operands at level 1.
std::vector<NodeId> TypedValues(const GeneratedGraph& gg) {
  std::vector<NodeId> out;
  for (int i = 0; i < gg.graph.size(); ++i) {
    NodeId id{i};
    if (gg.graph.IsValue(id) && gg.infos.at(id).type.has_value()) {
      out.push_back(id);
    }
  }
  return out;
}

std::vector<NodeId> AllValues(const GeneratedGraph& gg) {
  std::vector<NodeId> out;
  for (int i = 0; i < gg.graph.size(); ++i) {
    if (gg.graph.IsValue(NodeId{i})) out.push_back(NodeId{i});
  }
  return out;
}

bool HasFunction(const GeneratedGraph& gg) {
  for (int i = 0; i < gg.graph.size(); ++i) {
    if (gg.graph.kind(NodeId{i}) == NodeKind::kFunction) return true;
  }
  return false;
}

bool HasBodyCandidate(const GeneratedGraph& gg) {
  for (int i = 0; i < gg.graph.size(); ++i) {
    NodeKind k = gg.graph.kind(NodeId{i});
    if (k != NodeKind::kFunction && k != NodeKind::kCall) return true;
  }
  return false;
}

NodeId AppendWithInfo(GeneratedGraph& gg, Node node) {
  // Inference failures only occur for unconstrained insertions; the node is
  // still recorded, with an empty type.
  absl::StatusOr<NodeInfo> info = InferInfo(gg.graph, gg.infos, node);
  NodeInfo record;
  if (info.ok()) {
    record = *std::move(info);
  } else {
    record.kind = KindOf(node);
    if (const auto* op = std::get_if<OperatorNode>(&node)) {
      record.parents = op->parents;
    }
  }
  gg.infos.Append(std::move(record));
  return gg.graph.Append(std::move(node));
}

}  // namespace

absl::Status GenConfig::Validate() const {
  if (node_num < 1) {
    return absl::InvalidArgumentError("node_num must be at least 1");
  }
  const double ws[] = {weights.variable, weights.constant, weights.op,
                       weights.function, weights.call};
  double total = 0;
  for (double w : ws) {
    if (w < 0) return absl::InvalidArgumentError("negative node-kind weight");
    total += w;
  }
  if (total <= 0) return absl::InvalidArgumentError("all node-kind weights are zero");
  if (weights.variable <= 0 && weights.constant <= 0) {
    return absl::InvalidArgumentError(
        "an empty graph needs a variable or constant weight above zero");
  }
  if (shapes.max_rank < 0 || shapes.max_rank > 4 || shapes.max_extent < 1 ||
      shapes.max_extent > 8) {
    return absl::InvalidArgumentError("shape policy outside rank<=4, extent<=8");
  }
  return absl::OkStatus();
}

Shape RandomShape(const ShapePolicy& policy, Rng& rng) {
  const int rank = static_cast<int>(rng.Uniform(0, policy.max_rank));
  std::vector<int64_t> dims(rank);
  for (int64_t& d : dims) {
    // Extent 1 half of the time keeps broadcasting partners common.
    d = rng.Bernoulli(0.5) ? 1 : rng.Uniform(1, policy.max_extent);
  }
  return Shape(std::move(dims));
}

TensorValue RandomValue(DType dtype, const Shape& shape, Rng& rng) {
  TensorValue t(dtype, shape);
  const int64_t n = shape.Volume();
  for (int64_t i = 0; i < n; ++i) {
    switch (ClassOf(dtype)) {
      case DTypeClass::kSignedInt:
        t.mutable_ints()[i] = rng.Uniform(-8, 8);
        break;
      case DTypeClass::kUnsignedInt:
        t.mutable_ints()[i] = rng.Uniform(0, 16);
        break;
      case DTypeClass::kFloat:
        t.mutable_floats()[i] = static_cast<double>(rng.Uniform(-64, 64)) / 16.0;
        break;
      case DTypeClass::kBool:
        t.mutable_ints()[i] = rng.Uniform(0, 1);
        break;
    }
  }
  return t;
}

TensorValue RandomValue(DType dtype, const Shape& shape, uint64_t seed) {
  Rng rng(seed);
  return RandomValue(dtype, shape, rng);
}

NodeId InsertVariable(GeneratedGraph& gg, const ShapePolicy& shapes, Rng& rng) {
  const DType dtype = kAllDTypes[rng.Below(kAllDTypes.size())];
  Shape shape = RandomShape(shapes, rng);
  return AppendWithInfo(gg, VariableNode{TensorType{dtype, std::move(shape)}});
}

NodeId InsertConstant(GeneratedGraph& gg, const ShapePolicy& shapes, Rng& rng) {
  const DType dtype = kAllDTypes[rng.Below(kAllDTypes.size())];
  Shape shape = RandomShape(shapes, rng);
  return AppendWithInfo(gg, ConstantNode{RandomValue(dtype, shape, rng)});
}

absl::StatusOr<NodeId> InsertOperator(GeneratedGraph& gg, ConstraintLevel level,
                                      Rng& rng, std::optional<OpCode> forced_op) {
  const auto& registry = Registry();
  if (level == ConstraintLevel::kUnconstrained) {
    const std::vector<NodeId> values = AllValues(gg);
    if (values.empty()) return Infeasible("no value node to use as operand");
    const OpCode op =
        forced_op ? *forced_op : registry[rng.Below(registry.size())].code;
    OperatorNode node{op, {}};
    for (int i = 0; i < SpecOf(op).arity; ++i) node.parents.push_back(rng.Pick(values));
    return AppendWithInfo(gg, std::move(node));
  }

  const std::vector<NodeId> typed = TypedValues(gg);
  auto admissible_for = [&](OpCode op) {
    std::vector<NodeId> out;
    for (NodeId id : typed) {
      if (Admits(op, gg.infos.at(id).type->dtype)) out.push_back(id);
    }
    return out;
  };

  OpCode op;
  std::vector<NodeId> first_choices;
  if (forced_op) {
    op = *forced_op;
    first_choices = admissible_for(op);
  } else {
    std::vector<OpCode> feasible;
    for (const OperatorSpec& spec : registry) {
      if (!admissible_for(spec.code).empty()) feasible.push_back(spec.code);
    }
    if (feasible.empty()) return Infeasible("no operator has an admissible operand");
    op = rng.Pick(feasible);
    first_choices = admissible_for(op);
  }
  if (first_choices.empty()) {
    return Infeasible(absl::StrCat("no operand admissible for ", OpName(op)));
  }

  OperatorNode node{op, {rng.Pick(first_choices)}};
  if (SpecOf(op).arity == 2) {
    const TensorType& lhs = *gg.infos.at(node.parents[0]).type;
    std::vector<NodeId> partners;
    for (NodeId id : first_choices) {
      const TensorType& rhs = *gg.infos.at(id).type;
      if (id != node.parents[0] && rhs.dtype == lhs.dtype &&
          BroadcastShapes(lhs.shape, rhs.shape).ok()) {
        partners.push_back(id);
      }
    }
    // Reusing the first operand is always valid.
    node.parents.push_back(partners.empty() ? node.parents[0]
                                            : rng.Pick(partners));
  }
  return AppendWithInfo(gg, std::move(node));
}

absl::StatusOr<NodeId> InsertFunction(GeneratedGraph& gg, Rng& rng) {
  absl::StatusOr<SubgraphSelection> sel = ExtractSubgraph(gg.graph, rng);
  if (!sel.ok()) return Infeasible(sel.status().message());
  return AppendWithInfo(
      gg, FunctionNode{sel->body, sel->inputs, sel->outputs});
}

absl::StatusOr<NodeId> InsertCall(GeneratedGraph& gg, Rng& rng) {
  std::vector<NodeId> funcs;
  for (int i = 0; i < gg.graph.size(); ++i) {
    if (gg.graph.kind(NodeId{i}) == NodeKind::kFunction) funcs.push_back(NodeId{i});
  }
  if (funcs.empty()) return Infeasible("no function node to call");
  const NodeId func = rng.Pick(funcs);
  const auto& fn = std::get<FunctionNode>(gg.graph.node(func));
  const NodeId output = rng.Pick(fn.outputs);
  return AppendWithInfo(gg, CallNode{func, output});
}

absl::StatusOr<GeneratedGraph> Generate(const GenConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  Rng rng(cfg.rng_seed);
  GeneratedGraph gg;
  while (gg.graph.size() < cfg.node_num) {
    const bool has_values = !AllValues(gg).empty();
    const bool has_typed = !TypedValues(gg).empty();
    const bool op_feasible =
        cfg.level == ConstraintLevel::kUnconstrained ? has_values : has_typed;
    std::vector<double> weights = {
        cfg.weights.variable,
        cfg.weights.constant,
        op_feasible ? cfg.weights.op : 0.0,
        HasBodyCandidate(gg) ? cfg.weights.function : 0.0,
        HasFunction(gg) ? cfg.weights.call : 0.0,
    };
    absl::StatusOr<NodeId> inserted;
    switch (rng.Weighted(weights)) {
      case 0:
        inserted = InsertVariable(gg, cfg.shapes, rng);
        break;
      case 1:
        inserted = InsertConstant(gg, cfg.shapes, rng);
        break;
      case 2:
        inserted = InsertOperator(gg, cfg.level, rng);
        break;
      case 3:
        inserted = InsertFunction(gg, rng);
        break;
      default:
        inserted = InsertCall(gg, rng);
        break;
    }
    if (!inserted.ok()) {
      return absl::InternalError(absl::StrCat(
          "feasible node kind failed to insert: ", inserted.status().message()));
    }
  }
  return gg;
}

}  // namespace graphfuzz
