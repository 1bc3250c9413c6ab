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

#include "graphfuzz/graph.h"

#include <algorithm>
#include <map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace graphfuzz {
namespace {

std::string IdList(const std::vector<NodeId>& ids) {
  return absl::StrCat(
      "[",
      absl::StrJoin(ids, ",",
                    [](std::string* out, NodeId id) {
                      absl::StrAppend(out, id.value);
                    }),
      "]");
}

ConstraintViolation Violation(NodeId node, ViolationKind kind,
                              std::string detail) {
  return ConstraintViolation{node, kind, std::move(detail)};
}

bool IsBodyEligible(NodeKind k) {
  return k == NodeKind::kVariable || k == NodeKind::kConstant ||
         k == NodeKind::kOperator;
}

using InferOutcome = std::variant<NodeInfo, ConstraintViolation>;

// Infers the info of `node` as if it sat at position `self`.
InferOutcome InferAt(const ComputationalGraph& g, const NodeInfoTable& t,
                     const Node& node, NodeId self) {
  auto before = [&](NodeId id) {
    return id.value >= 0 && id.value < self.value && id.value < g.size();
  };
  NodeInfo info;
  info.kind = KindOf(node);
  switch (info.kind) {
    case NodeKind::kVariable:
      info.type = std::get<VariableNode>(node).type;
      return info;
    case NodeKind::kConstant:
      info.type = std::get<ConstantNode>(node).value.type();
      return info;
    case NodeKind::kOperator: {
      const auto& op = std::get<OperatorNode>(node);
      std::vector<std::optional<TensorType>> args;
      for (NodeId p : op.parents) {
        if (!before(p) || !g.IsValue(p)) {
          return Violation(self, ViolationKind::kMalformedOperator,
                           absl::StrCat("parent ", p.value,
                                        " is not an earlier value node"));
        }
        args.push_back(t.at(p).type);
      }
      if (auto v = CheckOperator(self, op.op, args)) return *v;
      info.parents = op.parents;
      const TensorType& first = *args[0];
      Shape shape = first.shape;
      if (args.size() == 2) shape = *BroadcastShapes(shape, args[1]->shape);
      info.type = TensorType{ResultDType(op.op, first.dtype), std::move(shape)};
      return info;
    }
    case NodeKind::kFunction: {
      const auto& fn = std::get<FunctionNode>(node);
      if (fn.body.empty()) {
        return Violation(self, ViolationKind::kMalformedFunction, "empty body");
      }
      for (NodeId b : fn.body) {
        if (!before(b) || !IsBodyEligible(g.kind(b))) {
          return Violation(
              self, ViolationKind::kMalformedFunction,
              absl::StrCat("body member ", b.value,
                           " is not an earlier variable/constant/operator"));
        }
      }
      if (!std::is_sorted(fn.body.begin(), fn.body.end()) ||
          std::adjacent_find(fn.body.begin(), fn.body.end()) != fn.body.end()) {
        return Violation(self, ViolationKind::kMalformedFunction,
                         "body is not a sorted set");
      }
      SubgraphSelection expect = CompleteSubgraph(g, fn.body);
      if (expect.inputs != fn.inputs) {
        return Violation(self, ViolationKind::kMalformedFunction,
                         absl::StrCat("inputs ", IdList(fn.inputs),
                                      " differ from body boundary ",
                                      IdList(expect.inputs)));
      }
      if (expect.outputs != fn.outputs) {
        return Violation(self, ViolationKind::kMalformedFunction,
                         absl::StrCat("outputs ", IdList(fn.outputs),
                                      " differ from body sinks ",
                                      IdList(expect.outputs)));
      }
      for (NodeId in : fn.inputs) info.input_types.push_back(t.at(in).type);
      for (NodeId out : fn.outputs) info.output_types.push_back(t.at(out).type);
      return info;
    }
    case NodeKind::kCall: {
      const auto& call = std::get<CallNode>(node);
      if (!before(call.func) || g.kind(call.func) != NodeKind::kFunction) {
        return Violation(self, ViolationKind::kMalformedCall,
                         absl::StrCat("node ", call.func.value,
                                      " is not an earlier function"));
      }
      const auto& fn = std::get<FunctionNode>(g.node(call.func));
      if (std::find(fn.outputs.begin(), fn.outputs.end(), call.output) ==
          fn.outputs.end()) {
        return Violation(self, ViolationKind::kMalformedCall,
                         absl::StrCat("node ", call.output.value,
                                      " is not an output of function ",
                                      call.func.value));
      }
      info.func = call.func;
      info.output = call.output;
      info.type = t.at(call.output).type;
      return info;
    }
  }
  return info;
}

}  // namespace

absl::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kVariable:
      return "variable";
    case NodeKind::kConstant:
      return "constant";
    case NodeKind::kOperator:
      return "operator";
    case NodeKind::kFunction:
      return "function";
    case NodeKind::kCall:
      return "call";
  }
  return "?";
}

absl::string_view ViolationKindName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDtypeMismatch:
      return "DtypeMismatch";
    case ViolationKind::kShapeMismatch:
      return "ShapeMismatch";
    case ViolationKind::kOperatorDtypeInadmissible:
      return "OperatorDtypeInadmissible";
    case ViolationKind::kMalformedFunction:
      return "MalformedFunction";
    case ViolationKind::kMalformedCall:
      return "MalformedCall";
    case ViolationKind::kMalformedOperator:
      return "MalformedOperator";
  }
  return "?";
}

NodeId ComputationalGraph::Append(Node node) {
  nodes_.push_back(std::move(node));
  return NodeId{size() - 1};
}

std::vector<NodeId> ComputationalGraph::FunctionParams(NodeId func) const {
  const auto& fn = std::get<FunctionNode>(node(func));
  std::vector<NodeId> params = fn.inputs;
  for (NodeId b : fn.body) {
    if (kind(b) == NodeKind::kVariable) params.push_back(b);
  }
  std::sort(params.begin(), params.end());
  return params;
}

std::vector<std::vector<NodeId>> ComputationalGraph::Consumers() const {
  std::vector<std::vector<NodeId>> out(nodes_.size());
  for (int i = 0; i < size(); ++i) {
    const NodeId self{i};
    const Node& n = nodes_[i];
    if (const auto* op = std::get_if<OperatorNode>(&n)) {
      for (NodeId p : op->parents) {
        if (Contains(p)) out[p.value].push_back(self);
      }
    } else if (const auto* fn = std::get_if<FunctionNode>(&n)) {
      for (NodeId b : fn->body) {
        if (Contains(b)) out[b.value].push_back(self);
      }
      for (NodeId in : fn->inputs) {
        if (Contains(in)) out[in.value].push_back(self);
      }
    } else if (const auto* call = std::get_if<CallNode>(&n)) {
      if (Contains(call->func)) out[call->func.value].push_back(self);
    }
  }
  for (auto& list : out) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

bool operator==(const ComputationalGraph& a, const ComputationalGraph& b) {
  return SerializeGraph(a) == SerializeGraph(b);
}

std::optional<ConstraintViolation> CheckOperator(
    NodeId node, OpCode op, const std::vector<std::optional<TensorType>>& args) {
  const OperatorSpec& spec = SpecOf(op);
  if (static_cast<int>(args.size()) != spec.arity) {
    return Violation(node, ViolationKind::kMalformedOperator,
                     absl::StrCat(spec.name, " expects ", spec.arity,
                                  " operands, got ", args.size()));
  }
  for (const auto& a : args) {
    if (!a.has_value()) {
      return Violation(node, ViolationKind::kMalformedOperator,
                       absl::StrCat(spec.name, " operand has no known type"));
    }
  }
  const DType d = args[0]->dtype;
  if (args.size() == 2 && args[1]->dtype != d) {
    return Violation(node, ViolationKind::kDtypeMismatch,
                     absl::StrCat(spec.name, " operands ", DTypeName(d), " and ",
                                  DTypeName(args[1]->dtype)));
  }
  if (!spec.Admits(d)) {
    return Violation(node, ViolationKind::kOperatorDtypeInadmissible,
                     absl::StrCat(spec.name, " does not accept ", DTypeName(d)));
  }
  if (args.size() == 2) {
    auto shape = BroadcastShapes(args[0]->shape, args[1]->shape);
    if (!shape.ok()) {
      return Violation(node, ViolationKind::kShapeMismatch,
                       absl::StrCat(spec.name, " operands ",
                                    args[0]->shape.ToString(), " and ",
                                    args[1]->shape.ToString()));
    }
  }
  return std::nullopt;
}

absl::StatusOr<NodeInfo> InferInfo(const ComputationalGraph& g,
                                   const NodeInfoTable& t, const Node& node) {
  InferOutcome outcome = InferAt(g, t, node, NodeId{g.size()});
  if (auto* v = std::get_if<ConstraintViolation>(&outcome)) {
    return absl::InvalidArgumentError(
        absl::StrCat(ViolationKindName(v->kind), ": ", v->detail));
  }
  return std::get<NodeInfo>(std::move(outcome));
}

NodeInfoTable BuildInfoTable(const ComputationalGraph& g) {
  NodeInfoTable t;
  for (int i = 0; i < g.size(); ++i) {
    const Node& node = g.node(NodeId{i});
    InferOutcome outcome = InferAt(g, t, node, NodeId{i});
    if (auto* info = std::get_if<NodeInfo>(&outcome)) {
      t.Append(std::move(*info));
      continue;
    }
    // Record the structure that is known and leave the type empty.
    NodeInfo info;
    info.kind = KindOf(node);
    if (const auto* op = std::get_if<OperatorNode>(&node)) {
      info.parents = op->parents;
    } else if (const auto* fn = std::get_if<FunctionNode>(&node)) {
      for (NodeId in : fn->inputs) {
        info.input_types.push_back(g.Contains(in) && in.value < i
                                       ? t.at(in).type
                                       : std::nullopt);
      }
      for (NodeId out : fn->outputs) {
        info.output_types.push_back(g.Contains(out) && out.value < i
                                        ? t.at(out).type
                                        : std::nullopt);
      }
    } else if (const auto* call = std::get_if<CallNode>(&node)) {
      info.func = call->func;
      info.output = call->output;
    }
    t.Append(std::move(info));
  }
  return t;
}

std::vector<ConstraintViolation> ValidateGraph(const ComputationalGraph& g,
                                               const NodeInfoTable& t) {
  std::vector<ConstraintViolation> out;
  for (int i = 0; i < g.size(); ++i) {
    const Node& node = g.node(NodeId{i});
    if (const auto* op = std::get_if<OperatorNode>(&node)) {
      // An operand without a type already carries its own violation.
      bool cascade = false;
      for (NodeId p : op->parents) {
        if (p.value >= 0 && p.value < i && !t.at(p).type.has_value()) {
          cascade = true;
        }
      }
      if (cascade) continue;
    }
    InferOutcome outcome = InferAt(g, t, node, NodeId{i});
    if (auto* v = std::get_if<ConstraintViolation>(&outcome)) {
      out.push_back(std::move(*v));
    }
  }
  return out;
}

SubgraphSelection CompleteSubgraph(const ComputationalGraph& g,
                                   std::vector<NodeId> body) {
  std::sort(body.begin(), body.end());
  body.erase(std::unique(body.begin(), body.end()), body.end());
  std::set<NodeId> members(body.begin(), body.end());
  std::set<NodeId> inputs;
  std::set<NodeId> consumed;
  for (NodeId b : body) {
    if (const auto* op = std::get_if<OperatorNode>(&g.node(b))) {
      for (NodeId p : op->parents) {
        if (members.count(p)) {
          consumed.insert(p);
        } else {
          inputs.insert(p);
        }
      }
    }
  }
  SubgraphSelection sel;
  sel.body = body;
  sel.inputs.assign(inputs.begin(), inputs.end());
  for (NodeId b : body) {
    if (!consumed.count(b)) sel.outputs.push_back(b);
  }
  return sel;
}

bool IsConnectedBody(const ComputationalGraph& g,
                     const std::vector<NodeId>& body) {
  if (body.empty()) return false;
  std::set<NodeId> members(body.begin(), body.end());
  std::map<NodeId, std::vector<NodeId>> adj;
  for (NodeId b : body) {
    if (const auto* op = std::get_if<OperatorNode>(&g.node(b))) {
      for (NodeId p : op->parents) {
        if (members.count(p) && p != b) {
          adj[b].push_back(p);
          adj[p].push_back(b);
        }
      }
    }
  }
  std::set<NodeId> seen{body[0]};
  std::vector<NodeId> stack{body[0]};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (NodeId m : adj[n]) {
      if (seen.insert(m).second) stack.push_back(m);
    }
  }
  return seen.size() == members.size();
}

absl::StatusOr<SubgraphSelection> ExtractSubgraph(const ComputationalGraph& g,
                                                  Rng& rng) {
  constexpr int kMaxBody = 5;
  std::vector<NodeId> eligible;
  for (int i = 0; i < g.size(); ++i) {
    if (IsBodyEligible(g.kind(NodeId{i}))) eligible.push_back(NodeId{i});
  }
  if (eligible.empty()) {
    return absl::NotFoundError("NoEligibleSubgraph: graph has no variable, "
                               "constant, or operator node");
  }
  const auto consumers = g.Consumers();
  const int target = static_cast<int>(
      rng.Uniform(1, std::min<int64_t>(kMaxBody, eligible.size())));
  std::set<NodeId> body{rng.Pick(eligible)};
  while (static_cast<int>(body.size()) < target) {
    std::set<NodeId> frontier;
    for (NodeId b : body) {
      if (const auto* op = std::get_if<OperatorNode>(&g.node(b))) {
        for (NodeId p : op->parents) {
          if (IsBodyEligible(g.kind(p)) && !body.count(p)) frontier.insert(p);
        }
      }
      for (NodeId c : consumers[b.value]) {
        if (g.kind(c) == NodeKind::kOperator && !body.count(c)) {
          frontier.insert(c);
        }
      }
    }
    if (frontier.empty()) break;
    std::vector<NodeId> choices(frontier.begin(), frontier.end());
    body.insert(rng.Pick(choices));
  }
  return CompleteSubgraph(g, std::vector<NodeId>(body.begin(), body.end()));
}

std::string SerializeGraph(const ComputationalGraph& g) {
  std::string out;
  for (int i = 0; i < g.size(); ++i) {
    const Node& n = g.node(NodeId{i});
    absl::StrAppend(&out, i, " ", NodeKindName(KindOf(n)));
    if (const auto* v = std::get_if<VariableNode>(&n)) {
      absl::StrAppend(&out, " ", DTypeName(v->type.dtype), " ",
                      v->type.shape.ToString());
    } else if (const auto* c = std::get_if<ConstantNode>(&n)) {
      absl::StrAppend(&out, " ", DTypeName(c->value.dtype()), " ",
                      c->value.shape().ToString(), " ", c->value.DataString());
    } else if (const auto* op = std::get_if<OperatorNode>(&n)) {
      absl::StrAppend(&out, " ", OpName(op->op));
      for (NodeId p : op->parents) absl::StrAppend(&out, " ", p.value);
    } else if (const auto* fn = std::get_if<FunctionNode>(&n)) {
      absl::StrAppend(&out, " body=", IdList(fn->body),
                      " inputs=", IdList(fn->inputs),
                      " outputs=", IdList(fn->outputs));
    } else if (const auto* call = std::get_if<CallNode>(&n)) {
      absl::StrAppend(&out, " ", call->func.value, " ", call->output.value);
    }
    out += "\n";
  }
  return out;
}

namespace {

absl::StatusOr<NodeId> ParseId(absl::string_view s) {
  int32_t v;
  if (!absl::SimpleAtoi(s, &v) || v < 0) {
    return absl::InvalidArgumentError(absl::StrCat("bad node id '", s, "'"));
  }
  return NodeId{v};
}

absl::StatusOr<std::vector<NodeId>> ParseIdList(absl::string_view field,
                                                absl::string_view key) {
  if (!absl::ConsumePrefix(&field, key) || !absl::ConsumePrefix(&field, "=[") ||
      !absl::ConsumeSuffix(&field, "]")) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", key, "=[...], got '", field, "'"));
  }
  std::vector<NodeId> ids;
  if (field.empty()) return ids;
  for (absl::string_view part : absl::StrSplit(field, ',')) {
    auto id = ParseId(part);
    if (!id.ok()) return id.status();
    ids.push_back(*id);
  }
  return ids;
}

absl::StatusOr<Node> ParseNodeLine(const std::vector<absl::string_view>& f) {
  const absl::string_view kind = f[1];
  if (kind == "variable" || kind == "constant") {
    if (f.size() != (kind == "variable" ? 4u : 5u)) {
      return absl::InvalidArgumentError(absl::StrCat("bad ", kind, " line"));
    }
    auto dtype = ParseDType(f[2]);
    if (!dtype) {
      return absl::InvalidArgumentError(absl::StrCat("bad dtype '", f[2], "'"));
    }
    auto shape = ParseShape(f[3]);
    if (!shape.ok()) return shape.status();
    if (kind == "variable") return VariableNode{TensorType{*dtype, *shape}};
    auto value = ParseTensorData(*dtype, *shape, f[4]);
    if (!value.ok()) return value.status();
    return ConstantNode{*std::move(value)};
  }
  if (kind == "operator") {
    if (f.size() < 3) return absl::InvalidArgumentError("bad operator line");
    auto spec = LookupOperator(f[2]);
    if (!spec.ok()) return spec.status();
    OperatorNode op{(*spec)->code, {}};
    for (size_t i = 3; i < f.size(); ++i) {
      auto id = ParseId(f[i]);
      if (!id.ok()) return id.status();
      op.parents.push_back(*id);
    }
    return op;
  }
  if (kind == "function") {
    if (f.size() != 5) return absl::InvalidArgumentError("bad function line");
    FunctionNode fn;
    auto body = ParseIdList(f[2], "body");
    if (!body.ok()) return body.status();
    auto inputs = ParseIdList(f[3], "inputs");
    if (!inputs.ok()) return inputs.status();
    auto outputs = ParseIdList(f[4], "outputs");
    if (!outputs.ok()) return outputs.status();
    return FunctionNode{*body, *inputs, *outputs};
  }
  if (kind == "call") {
    if (f.size() != 4) return absl::InvalidArgumentError("bad call line");
    auto func = ParseId(f[2]);
    if (!func.ok()) return func.status();
    auto output = ParseId(f[3]);
    if (!output.ok()) return output.status();
    return CallNode{*func, *output};
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown node kind '", kind, "'"));
}

std::vector<NodeId> ReferencedIds(const Node& n) {
  std::vector<NodeId> out;
  if (const auto* op = std::get_if<OperatorNode>(&n)) {
    out = op->parents;
  } else if (const auto* fn = std::get_if<FunctionNode>(&n)) {
    out = fn->body;
    out.insert(out.end(), fn->inputs.begin(), fn->inputs.end());
    out.insert(out.end(), fn->outputs.begin(), fn->outputs.end());
  } else if (const auto* call = std::get_if<CallNode>(&n)) {
    out = {call->func, call->output};
  }
  return out;
}

}  // namespace

absl::StatusOr<ComputationalGraph> ParseGraph(absl::string_view text) {
  ComputationalGraph g;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<absl::string_view> fields =
        absl::StrSplit(line, ' ', absl::SkipEmpty());
    if (fields.size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": too few fields"));
    }
    auto id = ParseId(fields[0]);
    if (!id.ok() || id->value != g.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected node id ", g.size()));
    }
    auto node = ParseNodeLine(fields);
    if (!node.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", node.status().message()));
    }
    for (NodeId ref : ReferencedIds(*node)) {
      if (ref.value < 0 || ref.value >= g.size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_no, ": reference to node ", ref.value,
            " which does not precede it"));
      }
    }
    g.Append(*std::move(node));
  }
  return g;
}

uint64_t GraphHash(const ComputationalGraph& g) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : SerializeGraph(g)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::set<NodeId> DependentClosure(const ComputationalGraph& g,
                                  const std::set<NodeId>& ids) {
  const auto consumers = g.Consumers();
  std::set<NodeId> out;
  std::vector<NodeId> stack(ids.begin(), ids.end());
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (!g.Contains(n) || !out.insert(n).second) continue;
    for (NodeId c : consumers[n.value]) stack.push_back(c);
  }
  return out;
}

ComputationalGraph RemoveNodes(const ComputationalGraph& g,
                               const std::set<NodeId>& ids) {
  const std::set<NodeId> removed = DependentClosure(g, ids);
  std::vector<int32_t> remap(g.size(), -1);
  int32_t next = 0;
  for (int i = 0; i < g.size(); ++i) {
    if (!removed.count(NodeId{i})) remap[i] = next++;
  }
  auto map_id = [&](NodeId id) { return NodeId{remap[id.value]}; };
  auto map_ids = [&](const std::vector<NodeId>& v) {
    std::vector<NodeId> out;
    for (NodeId id : v) out.push_back(map_id(id));
    return out;
  };
  ComputationalGraph out;
  for (int i = 0; i < g.size(); ++i) {
    if (remap[i] < 0) continue;
    Node n = g.node(NodeId{i});
    if (auto* op = std::get_if<OperatorNode>(&n)) {
      op->parents = map_ids(op->parents);
    } else if (auto* fn = std::get_if<FunctionNode>(&n)) {
      fn->body = map_ids(fn->body);
      fn->inputs = map_ids(fn->inputs);
      fn->outputs = map_ids(fn->outputs);
    } else if (auto* call = std::get_if<CallNode>(&n)) {
      call->func = map_id(call->func);
      call->output = map_id(call->output);
    }
    out.Append(std::move(n));
  }
  return out;
}

ComputationalGraph Prefix(const ComputationalGraph& g, int n) {
  ComputationalGraph out;
  for (int i = 0; i < n && i < g.size(); ++i) out.Append(g.node(NodeId{i}));
  return out;
}

}  // namespace graphfuzz
