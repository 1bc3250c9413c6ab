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

#include "graphfuzz/lowering.h"

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {
namespace {

absl::Status LoweringError(NodeId id, absl::string_view msg) {
  return Diagnostic("LoweringError", absl::StrCat("node ", id.value), msg);
}

ExprPtr ReturnOf(const std::vector<ExprPtr>& values) {
  if (values.size() == 1) return values[0];
  return MakeTuple(values);
}

// Wraps `tail` in the given let bindings, innermost last.
ExprPtr WrapLets(std::vector<std::pair<std::string, ExprPtr>> binds,
                 ExprPtr tail) {
  for (auto it = binds.rbegin(); it != binds.rend(); ++it) {
    tail = MakeLet(std::move(it->first), std::move(it->second), std::move(tail));
  }
  return tail;
}

class Lowerer {
 public:
  Lowerer(const ComputationalGraph& g, const NodeInfoTable& t) : g_(g), t_(t) {}

  absl::StatusOr<IrModule> Run() {
    IrModule m;
    for (int i = 0; i < g_.size(); ++i) {
      const NodeId id{i};
      if (g_.kind(id) == NodeKind::kFunction) {
        GF_ASSIGN_OR_RETURN(GlobalFunction f, LowerFunction(id));
        m.functions.push_back(std::move(f));
      }
    }
    GF_ASSIGN_OR_RETURN(GlobalFunction main, LowerMain());
    m.functions.push_back(std::move(main));
    return m;
  }

 private:
  absl::StatusOr<ExprPtr> Ref(NodeId from, NodeId id,
                              const std::map<NodeId, std::string>* local) {
    if (!g_.Contains(id) || id >= from) {
      return LoweringError(from, absl::StrCat("reference to node ", id.value,
                                              " is not a prior node"));
    }
    if (!g_.IsValue(id)) {
      return LoweringError(from, absl::StrCat("node ", id.value,
                                              " is a function, not a value"));
    }
    if (local) {
      auto it = local->find(id);
      if (it == local->end()) {
        return LoweringError(from, absl::StrCat("node ", id.value,
                                                " is not visible in the body"));
      }
      return MakeVar(it->second);
    }
    return MakeVar(ValueName(g_, id));
  }

  absl::StatusOr<ExprPtr> LowerOperator(
      NodeId id, const OperatorNode& op,
      const std::map<NodeId, std::string>* local) {
    std::vector<ExprPtr> args;
    for (NodeId p : op.parents) {
      GF_ASSIGN_OR_RETURN(ExprPtr a, Ref(id, p, local));
      args.push_back(std::move(a));
    }
    return MakePrim(op.op, std::move(args));
  }

  absl::StatusOr<GlobalFunction> LowerFunction(NodeId id) {
    const auto& fn = std::get<FunctionNode>(g_.node(id));
    if (fn.outputs.empty() || fn.body.empty()) {
      return LoweringError(id, "function has an empty body or no outputs");
    }
    GlobalFunction f;
    f.name = FunctionName(id);
    std::map<NodeId, std::string> local;
    for (NodeId p : g_.FunctionParams(id)) {
      if (!g_.Contains(p) || !g_.IsValue(p) || p >= id) {
        return LoweringError(id, absl::StrCat("bad function parameter node ",
                                              p.value));
      }
      const std::optional<TensorType>& type = t_.at(p).type;
      if (!type) {
        return LoweringError(id, absl::StrCat("parameter node ", p.value,
                                              " has no inferable type"));
      }
      std::string name = absl::StrCat("p", p.value);
      local[p] = name;
      f.params.push_back({std::move(name), TensorTy(*type)});
    }
    std::vector<std::pair<std::string, ExprPtr>> binds;
    for (NodeId b : fn.body) {
      if (!g_.Contains(b) || b >= id) {
        return LoweringError(id, absl::StrCat("bad body node ", b.value));
      }
      const Node& n = g_.node(b);
      if (const auto* c = std::get_if<ConstantNode>(&n)) {
        binds.emplace_back(ValueName(g_, b), MakeConst(c->value));
      } else if (const auto* op = std::get_if<OperatorNode>(&n)) {
        GF_ASSIGN_OR_RETURN(ExprPtr e, LowerOperator(b, *op, &local));
        binds.emplace_back(ValueName(g_, b), std::move(e));
      } else if (g_.kind(b) != NodeKind::kVariable) {
        return LoweringError(id, absl::StrCat("body node ", b.value, " is a ",
                                              NodeKindName(g_.kind(b))));
      }
      if (g_.kind(b) != NodeKind::kVariable) local[b] = ValueName(g_, b);
    }
    std::vector<ExprPtr> outs;
    for (NodeId o : fn.outputs) {
      auto it = local.find(o);
      if (it == local.end() ||
          !std::binary_search(fn.body.begin(), fn.body.end(), o)) {
        return LoweringError(id, absl::StrCat("output node ", o.value,
                                              " is not in the body"));
      }
      outs.push_back(MakeVar(it->second));
    }
    f.body = WrapLets(std::move(binds), ReturnOf(outs));
    return f;
  }

  absl::StatusOr<ExprPtr> LowerCall(NodeId id, const CallNode& call) {
    if (!g_.Contains(call.func) || call.func >= id ||
        g_.kind(call.func) != NodeKind::kFunction) {
      return LoweringError(id, "call target is not a function node");
    }
    const auto& fn = std::get<FunctionNode>(g_.node(call.func));
    auto pos = std::find(fn.outputs.begin(), fn.outputs.end(), call.output);
    if (pos == fn.outputs.end()) {
      return LoweringError(id, absl::StrCat("node ", call.output.value,
                                            " is not an output of node ",
                                            call.func.value));
    }
    std::vector<ExprPtr> args;
    for (NodeId p : g_.FunctionParams(call.func)) {
      GF_ASSIGN_OR_RETURN(ExprPtr a, Ref(id, p, nullptr));
      args.push_back(std::move(a));
    }
    ExprPtr e = MakeCall(MakeFuncRef(FunctionName(call.func)), std::move(args));
    if (fn.outputs.size() > 1) {
      e = MakeTupleGet(std::move(e),
                       static_cast<int>(pos - fn.outputs.begin()));
    }
    return e;
  }

  absl::StatusOr<GlobalFunction> LowerMain() {
    GlobalFunction main;
    main.name = std::string(kMainName);
    std::vector<bool> consumed(g_.size(), false);
    std::vector<std::pair<std::string, ExprPtr>> binds;
    for (int i = 0; i < g_.size(); ++i) {
      const NodeId id{i};
      const Node& n = g_.node(id);
      if (const auto* v = std::get_if<VariableNode>(&n)) {
        main.params.push_back({ValueName(g_, id), TensorTy(v->type)});
      } else if (const auto* c = std::get_if<ConstantNode>(&n)) {
        binds.emplace_back(ValueName(g_, id), MakeConst(c->value));
      } else if (const auto* op = std::get_if<OperatorNode>(&n)) {
        GF_ASSIGN_OR_RETURN(ExprPtr e, LowerOperator(id, *op, nullptr));
        binds.emplace_back(ValueName(g_, id), std::move(e));
        for (NodeId p : op->parents) consumed[p.value] = true;
      } else if (const auto* call = std::get_if<CallNode>(&n)) {
        GF_ASSIGN_OR_RETURN(ExprPtr e, LowerCall(id, *call));
        binds.emplace_back(ValueName(g_, id), std::move(e));
        for (NodeId p : g_.FunctionParams(call->func)) consumed[p.value] = true;
      }
    }
    std::vector<ExprPtr> sinks;
    for (int i = 0; i < g_.size(); ++i) {
      const NodeId id{i};
      if (g_.IsValue(id) && !consumed[i]) sinks.push_back(MakeVar(ValueName(g_, id)));
    }
    main.body = WrapLets(std::move(binds), ReturnOf(sinks));
    return main;
  }

  const ComputationalGraph& g_;
  const NodeInfoTable& t_;
};

}  // namespace

std::string ValueName(const ComputationalGraph& g, NodeId id) {
  return absl::StrCat(g.kind(id) == NodeKind::kVariable ? "v" : "n", id.value);
}

std::string FunctionName(NodeId id) { return absl::StrCat("f", id.value); }

absl::StatusOr<IrModule> Lower(const ComputationalGraph& g,
                               const NodeInfoTable& t) {
  if (t.size() != g.size()) {
    return Diagnostic("LoweringError", "graph",
                      "node information table is out of step with the graph");
  }
  return Lowerer(g, t).Run();
}

}  // namespace graphfuzz
