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

#include "graphfuzz/backends.h"

#include <exception>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {

Value Value::Tuple(std::vector<Value> fields) {
  Value v;
  v.tensor_ = nullptr;
  v.fields_ = std::move(fields);
  return v;
}

std::string Value::ToString() const {
  if (is_tensor()) {
    return absl::StrCat(tensor_->type().ToString(), tensor_->DataString());
  }
  return absl::StrCat(
      "(",
      absl::StrJoin(fields_, ", ",
                    [](std::string* out, const Value& v) {
                      absl::StrAppend(out, v.ToString());
                    }),
      fields_.size() == 1 ? ",)" : ")");
}

bool ValuesAgree(const Value& a, const Value& b, double rel_tol) {
  if (a.is_tensor() != b.is_tensor()) return false;
  if (a.is_tensor()) return TensorsAgree(a.tensor(), b.tensor(), rel_tol);
  if (a.fields().size() != b.fields().size()) return false;
  for (size_t i = 0; i < a.fields().size(); ++i) {
    if (!ValuesAgree(a.fields()[i], b.fields()[i], rel_tol)) return false;
  }
  return true;
}

absl::StatusOr<Inputs> RandomInputs(const GlobalFunction& main, uint64_t seed) {
  Inputs inputs;
  for (size_t i = 0; i < main.params.size(); ++i) {
    const Param& p = main.params[i];
    if (!p.type || p.type->kind != IrType::Kind::kTensor) {
      return Diagnostic("RuntimeError", "@main",
                        absl::StrCat("parameter %", p.name,
                                     " is not a tensor"));
    }
    inputs[p.name] = RandomValue(p.type->tensor.dtype, p.type->tensor.shape,
                                 DeriveSeed(seed, i));
  }
  return inputs;
}

std::string InputsToString(const Inputs& inputs) {
  return absl::StrJoin(inputs, ", ", [](std::string* out, const auto& kv) {
    absl::StrAppend(out, "%", kv.first, "=", kv.second.DataString());
  });
}

absl::string_view BackendName(Backend b) {
  switch (b) {
    case Backend::kTree:
      return "tree";
    case Backend::kGraph:
      return "graph";
    case Backend::kVm:
      return "vm";
  }
  return "?";
}

namespace {

absl::Status RuntimeError(absl::string_view path, absl::string_view msg) {
  return Diagnostic("RuntimeError", path, msg);
}

// Runtime value shared by the tree and vm backends.
struct RtValue;
using RtPtr = std::shared_ptr<const RtValue>;

struct RtValue {
  enum class Kind : uint8_t { kTensor, kTuple, kGlobal, kClosure };
  Kind kind = Kind::kTensor;
  std::shared_ptr<const TensorValue> tensor;
  std::vector<RtPtr> fields;  // tuple fields, or captured values (vm)
  std::string global;
  const Expr* closure = nullptr;                       // tree
  std::vector<std::pair<std::string, RtPtr>> captured;  // tree
  int code = -1;                                        // vm
};

RtPtr TensorRt(std::shared_ptr<const TensorValue> t) {
  auto v = std::make_shared<RtValue>();
  v->tensor = std::move(t);
  return v;
}

RtPtr TupleRt(std::vector<RtPtr> fields) {
  auto v = std::make_shared<RtValue>();
  v->kind = RtValue::Kind::kTuple;
  v->fields = std::move(fields);
  return v;
}

absl::StatusOr<Value> ToValue(const RtPtr& v) {
  switch (v->kind) {
    case RtValue::Kind::kTensor:
      return Value(*v->tensor);
    case RtValue::Kind::kTuple: {
      std::vector<Value> fields;
      for (const RtPtr& f : v->fields) {
        GF_ASSIGN_OR_RETURN(Value fv, ToValue(f));
        fields.push_back(std::move(fv));
      }
      return Value::Tuple(std::move(fields));
    }
    default:
      return RuntimeError("@main", "result is a function, not data");
  }
}

absl::StatusOr<RtPtr> ApplyPrim(OpCode op, const std::vector<RtPtr>& args,
                                absl::string_view path) {
  std::vector<TensorValue> operands;
  operands.reserve(args.size());
  for (const RtPtr& a : args) {
    if (a->kind != RtValue::Kind::kTensor) {
      return RuntimeError(path, absl::StrCat(OpName(op), " operand is not a tensor"));
    }
    operands.push_back(*a->tensor);
  }
  absl::StatusOr<TensorValue> r = EvalElementwise(op, operands);
  if (!r.ok()) return RuntimeError(path, r.status().message());
  return TensorRt(std::make_shared<const TensorValue>(*std::move(r)));
}

absl::StatusOr<RtPtr> Project(const RtPtr& t, int index,
                              absl::string_view path) {
  if (t->kind != RtValue::Kind::kTuple || index < 0 ||
      index >= static_cast<int>(t->fields.size())) {
    return RuntimeError(path, absl::StrCat("bad projection .", index));
  }
  return t->fields[index];
}

absl::Status CheckInputs(const GlobalFunction& main, const Inputs& inputs) {
  for (const Param& p : main.params) {
    auto it = inputs.find(p.name);
    if (it == inputs.end()) {
      return RuntimeError("@main", absl::StrCat("missing input %", p.name));
    }
    if (p.type && p.type->kind == IrType::Kind::kTensor &&
        !(it->second.type() == p.type->tensor)) {
      return RuntimeError("@main",
                          absl::StrCat("input %", p.name, " has type ",
                                       it->second.type().ToString()));
    }
  }
  return absl::OkStatus();
}

// ------------------------------------------------------------------ tree

class TreeInterpreter {
 public:
  explicit TreeInterpreter(const IrModule& m) : module_(m) {}

  absl::StatusOr<RtPtr> CallGlobal(const std::string& name,
                                   const std::vector<RtPtr>& args) {
    const GlobalFunction* f = module_.Find(name);
    if (!f) return RuntimeError("@" + name, "no such global");
    if (f->params.size() != args.size()) {
      return RuntimeError("@" + name, "argument count mismatch");
    }
    if (++depth_ > kMaxDepth) return RuntimeError("@" + name, "call depth exceeded");
    ScopedMap<RtPtr> env;
    for (size_t i = 0; i < args.size(); ++i) env.Push(f->params[i].name, args[i]);
    absl::StatusOr<RtPtr> r = Eval(f->body, env);
    --depth_;
    return r;
  }

 private:
  static constexpr int kMaxDepth = 10000;

  absl::StatusOr<RtPtr> Eval(const ExprPtr& root, ScopedMap<RtPtr>& env) {
    // Let chains are walked iteratively to keep recursion shallow.
    std::vector<const std::string*> bound;
    ExprPtr e = root;
    absl::Status status;
    while (e->kind == ExprKind::kLet) {
      absl::StatusOr<RtPtr> v = Eval(e->lhs, env);
      if (!v.ok()) {
        status = v.status();
        break;
      }
      env.Push(e->name, *std::move(v));
      bound.push_back(&e->name);
      e = e->body;
    }
    absl::StatusOr<RtPtr> result =
        status.ok() ? EvalNode(e, env) : absl::StatusOr<RtPtr>(status);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) env.Pop(**it);
    return result;
  }

  absl::StatusOr<RtPtr> EvalNode(const ExprPtr& e, ScopedMap<RtPtr>& env) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const RtPtr* v = env.Find(e->name);
        if (!v) return RuntimeError("%" + e->name, "unbound variable");
        return *v;
      }
      case ExprKind::kConst:
        return TensorRt(e->value);
      case ExprKind::kPrim: {
        std::vector<RtPtr> args;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(RtPtr v, Eval(a, env));
          args.push_back(std::move(v));
        }
        return ApplyPrim(e->op, args, OpName(e->op));
      }
      case ExprKind::kFuncRef: {
        if (!module_.Find(e->name)) return RuntimeError("@" + e->name, "no such global");
        auto v = std::make_shared<RtValue>();
        v->kind = RtValue::Kind::kGlobal;
        v->global = e->name;
        return RtPtr(v);
      }
      case ExprKind::kClosure: {
        auto v = std::make_shared<RtValue>();
        v->kind = RtValue::Kind::kClosure;
        v->closure = e.get();
        for (const std::string& name : FreeVars(e)) {
          const RtPtr* c = env.Find(name);
          if (!c) return RuntimeError("%" + name, "unbound variable");
          v->captured.emplace_back(name, *c);
        }
        return RtPtr(v);
      }
      case ExprKind::kCall: {
        GF_ASSIGN_OR_RETURN(RtPtr callee, Eval(e->lhs, env));
        std::vector<RtPtr> args;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(RtPtr v, Eval(a, env));
          args.push_back(std::move(v));
        }
        return Apply(callee, args);
      }
      case ExprKind::kTuple: {
        std::vector<RtPtr> fields;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(RtPtr v, Eval(a, env));
          fields.push_back(std::move(v));
        }
        return TupleRt(std::move(fields));
      }
      case ExprKind::kTupleGet: {
        GF_ASSIGN_OR_RETURN(RtPtr t, Eval(e->lhs, env));
        return Project(t, e->index, "tuple_get");
      }
      case ExprKind::kLet:
        return Eval(e, env);
    }
    return RuntimeError("tree", "unknown expression");
  }

  absl::StatusOr<RtPtr> Apply(const RtPtr& callee,
                              const std::vector<RtPtr>& args) {
    if (callee->kind == RtValue::Kind::kGlobal) {
      return CallGlobal(callee->global, args);
    }
    if (callee->kind != RtValue::Kind::kClosure) {
      return RuntimeError("call", "callee is not a function");
    }
    const Expr& c = *callee->closure;
    if (c.params.size() != args.size()) {
      return RuntimeError("call", "argument count mismatch");
    }
    if (++depth_ > kMaxDepth) return RuntimeError("call", "call depth exceeded");
    ScopedMap<RtPtr> env;
    for (const auto& [name, v] : callee->captured) env.Push(name, v);
    for (size_t i = 0; i < args.size(); ++i) env.Push(c.params[i].name, args[i]);
    absl::StatusOr<RtPtr> r = Eval(c.body, env);
    --depth_;
    return r;
  }

  const IrModule& module_;
  int depth_ = 0;
};

// ----------------------------------------------------------------- graph

// Symbolic value produced while flattening: a tape slot, a tuple of
// symbolic values, or a function.
struct Sym;
using SymPtr = std::shared_ptr<const Sym>;
struct Sym {
  enum class Kind : uint8_t { kSlot, kTuple, kGlobal, kClosure };
  Kind kind = Kind::kSlot;
  int slot = -1;
  std::vector<SymPtr> fields;
  std::string global;
  const Expr* closure = nullptr;
  std::vector<std::pair<std::string, SymPtr>> captured;
};

struct TapeInstr {
  enum class Kind : uint8_t { kInput, kConst, kPrim };
  Kind kind = Kind::kConst;
  std::shared_ptr<const TensorValue> value;
  OpCode op = OpCode::kAdd;
  std::vector<int> args;
};

class GraphExecutor {
 public:
  explicit GraphExecutor(const IrModule& m) : module_(m) {}

  absl::StatusOr<Value> Run(const Inputs& inputs) {
    const GlobalFunction* main = module_.main();
    ScopedMap<SymPtr> env;
    for (const Param& p : main->params) {
      TapeInstr in;
      in.kind = TapeInstr::Kind::kInput;
      in.value = std::make_shared<const TensorValue>(inputs.at(p.name));
      env.Push(p.name, Emit(std::move(in)));
    }
    GF_ASSIGN_OR_RETURN(SymPtr out, Flatten(main->body, env));
    std::vector<std::shared_ptr<const TensorValue>> slots(tape_.size());
    for (size_t i = 0; i < tape_.size(); ++i) {
      const TapeInstr& t = tape_[i];
      if (t.kind != TapeInstr::Kind::kPrim) {
        slots[i] = t.value;
        continue;
      }
      std::vector<TensorValue> operands;
      for (int a : t.args) operands.push_back(*slots[a]);
      absl::StatusOr<TensorValue> r = EvalElementwise(t.op, operands);
      if (!r.ok()) return RuntimeError(OpName(t.op), r.status().message());
      slots[i] = std::make_shared<const TensorValue>(*std::move(r));
    }
    return Materialize(out, slots);
  }

 private:
  static constexpr int kMaxDepth = 10000;

  SymPtr Emit(TapeInstr instr) {
    tape_.push_back(std::move(instr));
    auto s = std::make_shared<Sym>();
    s->slot = static_cast<int>(tape_.size()) - 1;
    return s;
  }

  absl::StatusOr<Value> Materialize(
      const SymPtr& s,
      const std::vector<std::shared_ptr<const TensorValue>>& slots) {
    switch (s->kind) {
      case Sym::Kind::kSlot:
        return Value(*slots[s->slot]);
      case Sym::Kind::kTuple: {
        std::vector<Value> fields;
        for (const SymPtr& f : s->fields) {
          GF_ASSIGN_OR_RETURN(Value v, Materialize(f, slots));
          fields.push_back(std::move(v));
        }
        return Value::Tuple(std::move(fields));
      }
      default:
        return RuntimeError("@main", "result is a function, not data");
    }
  }

  absl::StatusOr<SymPtr> Flatten(const ExprPtr& root, ScopedMap<SymPtr>& env) {
    std::vector<const std::string*> bound;
    ExprPtr e = root;
    absl::Status status;
    while (e->kind == ExprKind::kLet) {
      absl::StatusOr<SymPtr> v = Flatten(e->lhs, env);
      if (!v.ok()) {
        status = v.status();
        break;
      }
      env.Push(e->name, *std::move(v));
      bound.push_back(&e->name);
      e = e->body;
    }
    absl::StatusOr<SymPtr> result =
        status.ok() ? FlattenNode(e, env) : absl::StatusOr<SymPtr>(status);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) env.Pop(**it);
    return result;
  }

  absl::StatusOr<SymPtr> FlattenNode(const ExprPtr& e, ScopedMap<SymPtr>& env) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const SymPtr* v = env.Find(e->name);
        if (!v) return RuntimeError("%" + e->name, "unbound variable");
        return *v;
      }
      case ExprKind::kConst: {
        TapeInstr c;
        c.kind = TapeInstr::Kind::kConst;
        c.value = e->value;
        return Emit(std::move(c));
      }
      case ExprKind::kPrim: {
        TapeInstr p;
        p.kind = TapeInstr::Kind::kPrim;
        p.op = e->op;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(SymPtr s, Flatten(a, env));
          if (s->kind != Sym::Kind::kSlot) {
            return RuntimeError(OpName(e->op), "operand is not a tensor");
          }
          p.args.push_back(s->slot);
        }
        return Emit(std::move(p));
      }
      case ExprKind::kFuncRef: {
        if (!module_.Find(e->name)) return RuntimeError("@" + e->name, "no such global");
        auto s = std::make_shared<Sym>();
        s->kind = Sym::Kind::kGlobal;
        s->global = e->name;
        return SymPtr(s);
      }
      case ExprKind::kClosure: {
        auto s = std::make_shared<Sym>();
        s->kind = Sym::Kind::kClosure;
        s->closure = e.get();
        for (const std::string& name : FreeVars(e)) {
          const SymPtr* c = env.Find(name);
          if (!c) return RuntimeError("%" + name, "unbound variable");
          s->captured.emplace_back(name, *c);
        }
        return SymPtr(s);
      }
      case ExprKind::kCall: {
        GF_ASSIGN_OR_RETURN(SymPtr callee, Flatten(e->lhs, env));
        std::vector<SymPtr> args;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(SymPtr s, Flatten(a, env));
          args.push_back(std::move(s));
        }
        return Inline(callee, args);
      }
      case ExprKind::kTuple: {
        auto s = std::make_shared<Sym>();
        s->kind = Sym::Kind::kTuple;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(SymPtr f, Flatten(a, env));
          s->fields.push_back(std::move(f));
        }
        return SymPtr(s);
      }
      case ExprKind::kTupleGet: {
        GF_ASSIGN_OR_RETURN(SymPtr t, Flatten(e->lhs, env));
        if (t->kind != Sym::Kind::kTuple || e->index < 0 ||
            e->index >= static_cast<int>(t->fields.size())) {
          return RuntimeError("tuple_get", absl::StrCat("bad projection .", e->index));
        }
        return t->fields[e->index];
      }
      case ExprKind::kLet:
        return Flatten(e, env);
    }
    return RuntimeError("graph", "unknown expression");
  }

  // Splices the callee's body into the tape.
  absl::StatusOr<SymPtr> Inline(const SymPtr& callee,
                                const std::vector<SymPtr>& args) {
    const std::vector<Param>* params = nullptr;
    ExprPtr body;
    ScopedMap<SymPtr> env;
    if (callee->kind == Sym::Kind::kGlobal) {
      const GlobalFunction* f = module_.Find(callee->global);
      params = &f->params;
      body = f->body;
    } else if (callee->kind == Sym::Kind::kClosure) {
      params = &callee->closure->params;
      body = callee->closure->body;
      for (const auto& [name, v] : callee->captured) env.Push(name, v);
    } else {
      return RuntimeError("call", "callee is not a function");
    }
    if (params->size() != args.size()) {
      return RuntimeError("call", "argument count mismatch");
    }
    if (++depth_ > kMaxDepth) return RuntimeError("call", "call depth exceeded");
    for (size_t i = 0; i < args.size(); ++i) env.Push((*params)[i].name, args[i]);
    absl::StatusOr<SymPtr> r = Flatten(body, env);
    --depth_;
    return r;
  }

  const IrModule& module_;
  std::vector<TapeInstr> tape_;
  int depth_ = 0;
};

// -------------------------------------------------------------------- vm

enum class Opc : uint8_t {
  kConst,     // push consts[a]
  kLoad,      // push locals[a]
  kLoadCap,   // push captured[a]
  kStore,     // locals[a] = pop
  kPrim,      // pop a operands, push op(operands)
  kTuple,     // pop a fields, push tuple
  kGet,       // pop tuple, push field a
  kFuncRef,   // push global code a
  kClosure,   // pop b captured values, push closure over code a
  kCall,      // pop a arguments and the callee, push result
  kRet,       // return top of stack
};

struct Ins {
  Opc opc;
  int a = 0;
  int b = 0;
  OpCode op = OpCode::kAdd;
};

struct Code {
  std::string name;
  std::vector<Ins> ins;
  int num_params = 0;
  int num_locals = 0;
  std::vector<std::shared_ptr<const TensorValue>> consts;
};

struct Slot {
  bool captured = false;
  int index = 0;
};

class VmCompiler {
 public:
  VmCompiler(const IrModule& m, const FaultSet& faults)
      : module_(m), faults_(faults) {}

  absl::StatusOr<std::vector<Code>> Compile(int* main_code) {
    for (const GlobalFunction& f : module_.functions) {
      global_code_[f.name] = static_cast<int>(codes_.size());
      codes_.emplace_back();
    }
    for (const GlobalFunction& f : module_.functions) {
      const int idx = global_code_[f.name];
      Code code;
      code.name = "@" + f.name;
      ScopedMap<Slot> scope;
      for (const Param& p : f.params) {
        scope.Push(p.name, Slot{false, code.num_locals++});
      }
      code.num_params = static_cast<int>(f.params.size());
      GF_RETURN_IF_ERROR(Emit(f.body, scope, code));
      code.ins.push_back({Opc::kRet});
      codes_[idx] = std::move(code);
    }
    *main_code = global_code_.at(std::string(kMainName));
    return std::move(codes_);
  }

 private:
  absl::Status Emit(const ExprPtr& root, ScopedMap<Slot>& scope, Code& code) {
    std::vector<const std::string*> bound;
    ExprPtr e = root;
    absl::Status status;
    while (e->kind == ExprKind::kLet) {
      status = Emit(e->lhs, scope, code);
      if (!status.ok()) break;
      const int slot = code.num_locals++;
      code.ins.push_back({Opc::kStore, slot});
      scope.Push(e->name, Slot{false, slot});
      bound.push_back(&e->name);
      e = e->body;
    }
    if (status.ok()) status = EmitNode(e, scope, code);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) scope.Pop(**it);
    return status;
  }

  absl::Status EmitNode(const ExprPtr& e, ScopedMap<Slot>& scope, Code& code) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const Slot* s = scope.Find(e->name);
        if (!s) return RuntimeError("%" + e->name, "unbound variable");
        code.ins.push_back({s->captured ? Opc::kLoadCap : Opc::kLoad, s->index});
        return absl::OkStatus();
      }
      case ExprKind::kConst:
        code.consts.push_back(e->value);
        code.ins.push_back({Opc::kConst, static_cast<int>(code.consts.size()) - 1});
        return absl::OkStatus();
      case ExprKind::kPrim: {
        for (const ExprPtr& a : e->args) GF_RETURN_IF_ERROR(Emit(a, scope, code));
        OpCode op = e->op;
        if (op == OpCode::kNegative && faults_.Has(BugId::kVmNegative)) {
          op = OpCode::kCopy;
        }
        Ins ins{Opc::kPrim, static_cast<int>(e->args.size())};
        ins.op = op;
        code.ins.push_back(ins);
        return absl::OkStatus();
      }
      case ExprKind::kFuncRef: {
        auto it = global_code_.find(e->name);
        if (it == global_code_.end()) {
          return RuntimeError("@" + e->name, "no such global");
        }
        code.ins.push_back({Opc::kFuncRef, it->second});
        return absl::OkStatus();
      }
      case ExprKind::kClosure: {
        const std::set<std::string> free = FreeVars(e);
        Code inner;
        inner.name = code.name + "/fn";
        ScopedMap<Slot> inner_scope;
        int cap = 0;
        for (const std::string& name : free) {
          const Slot* s = scope.Find(name);
          if (!s) return RuntimeError("%" + name, "unbound variable");
          code.ins.push_back({s->captured ? Opc::kLoadCap : Opc::kLoad, s->index});
          inner_scope.Push(name, Slot{true, cap++});
        }
        for (const Param& p : e->params) {
          inner_scope.Push(p.name, Slot{false, inner.num_locals++});
        }
        inner.num_params = static_cast<int>(e->params.size());
        GF_RETURN_IF_ERROR(Emit(e->body, inner_scope, inner));
        inner.ins.push_back({Opc::kRet});
        codes_.push_back(std::move(inner));
        code.ins.push_back(
            {Opc::kClosure, static_cast<int>(codes_.size()) - 1, cap});
        return absl::OkStatus();
      }
      case ExprKind::kCall:
        GF_RETURN_IF_ERROR(Emit(e->lhs, scope, code));
        for (const ExprPtr& a : e->args) GF_RETURN_IF_ERROR(Emit(a, scope, code));
        code.ins.push_back({Opc::kCall, static_cast<int>(e->args.size())});
        return absl::OkStatus();
      case ExprKind::kTuple:
        for (const ExprPtr& a : e->args) GF_RETURN_IF_ERROR(Emit(a, scope, code));
        code.ins.push_back({Opc::kTuple, static_cast<int>(e->args.size())});
        return absl::OkStatus();
      case ExprKind::kTupleGet:
        GF_RETURN_IF_ERROR(Emit(e->lhs, scope, code));
        code.ins.push_back({Opc::kGet, e->index});
        return absl::OkStatus();
      case ExprKind::kLet:
        return Emit(e, scope, code);
    }
    return RuntimeError("vm", "unknown expression");
  }

  const IrModule& module_;
  const FaultSet& faults_;
  std::map<std::string, int> global_code_;
  std::vector<Code> codes_;
};

class VirtualMachine {
 public:
  explicit VirtualMachine(std::vector<Code> codes) : codes_(std::move(codes)) {}

  absl::StatusOr<RtPtr> Execute(int code_index, std::vector<RtPtr> args,
                                const std::vector<RtPtr>& captured) {
    const Code& code = codes_[code_index];
    if (static_cast<int>(args.size()) != code.num_params) {
      return RuntimeError(code.name, "argument count mismatch");
    }
    if (++depth_ > kMaxDepth) return RuntimeError(code.name, "call depth exceeded");
    std::vector<RtPtr> locals(code.num_locals);
    for (size_t i = 0; i < args.size(); ++i) locals[i] = std::move(args[i]);
    std::vector<RtPtr> stack;
    auto pop_n = [&stack](int n) {
      std::vector<RtPtr> out(stack.end() - n, stack.end());
      stack.resize(stack.size() - n);
      return out;
    };
    for (const Ins& ins : code.ins) {
      switch (ins.opc) {
        case Opc::kConst:
          stack.push_back(TensorRt(code.consts[ins.a]));
          break;
        case Opc::kLoad:
          stack.push_back(locals[ins.a]);
          break;
        case Opc::kLoadCap:
          stack.push_back(captured[ins.a]);
          break;
        case Opc::kStore:
          locals[ins.a] = std::move(stack.back());
          stack.pop_back();
          break;
        case Opc::kPrim: {
          GF_ASSIGN_OR_RETURN(RtPtr r, ApplyPrim(ins.op, pop_n(ins.a), OpName(ins.op)));
          stack.push_back(std::move(r));
          break;
        }
        case Opc::kTuple:
          stack.push_back(TupleRt(pop_n(ins.a)));
          break;
        case Opc::kGet: {
          RtPtr t = std::move(stack.back());
          stack.pop_back();
          GF_ASSIGN_OR_RETURN(RtPtr f, Project(t, ins.a, "tuple_get"));
          stack.push_back(std::move(f));
          break;
        }
        case Opc::kFuncRef: {
          auto v = std::make_shared<RtValue>();
          v->kind = RtValue::Kind::kGlobal;
          v->code = ins.a;
          stack.push_back(std::move(v));
          break;
        }
        case Opc::kClosure: {
          auto v = std::make_shared<RtValue>();
          v->kind = RtValue::Kind::kClosure;
          v->code = ins.a;
          v->fields = pop_n(ins.b);
          stack.push_back(std::move(v));
          break;
        }
        case Opc::kCall: {
          std::vector<RtPtr> call_args = pop_n(ins.a);
          RtPtr callee = std::move(stack.back());
          stack.pop_back();
          if (callee->kind != RtValue::Kind::kGlobal &&
              callee->kind != RtValue::Kind::kClosure) {
            return RuntimeError(code.name, "callee is not a function");
          }
          GF_ASSIGN_OR_RETURN(
              RtPtr r, Execute(callee->code, std::move(call_args),
                               callee->kind == RtValue::Kind::kClosure
                                   ? callee->fields
                                   : std::vector<RtPtr>{}));
          stack.push_back(std::move(r));
          break;
        }
        case Opc::kRet:
          --depth_;
          return stack.back();
      }
    }
    return RuntimeError(code.name, "fell off the end of the code");
  }

 private:
  static constexpr int kMaxDepth = 10000;
  std::vector<Code> codes_;
  int depth_ = 0;
};

absl::StatusOr<Value> RunUnchecked(const IrModule& m, const Inputs& inputs,
                                   Backend backend, const FaultSet& faults) {
  const GlobalFunction* main = m.main();
  if (!main) return RuntimeError("module", "no @main");
  GF_RETURN_IF_ERROR(CheckInputs(*main, inputs));
  switch (backend) {
    case Backend::kTree: {
      std::vector<RtPtr> args;
      for (const Param& p : main->params) {
        args.push_back(TensorRt(
            std::make_shared<const TensorValue>(inputs.at(p.name))));
      }
      GF_ASSIGN_OR_RETURN(RtPtr r,
                          TreeInterpreter(m).CallGlobal(main->name, args));
      return ToValue(r);
    }
    case Backend::kGraph:
      return GraphExecutor(m).Run(inputs);
    case Backend::kVm: {
      int main_code = -1;
      GF_ASSIGN_OR_RETURN(std::vector<Code> codes,
                          VmCompiler(m, faults).Compile(&main_code));
      std::vector<RtPtr> args;
      for (const Param& p : main->params) {
        args.push_back(TensorRt(
            std::make_shared<const TensorValue>(inputs.at(p.name))));
      }
      VirtualMachine vm(std::move(codes));
      GF_ASSIGN_OR_RETURN(RtPtr r, vm.Execute(main_code, std::move(args), {}));
      return ToValue(r);
    }
  }
  return RuntimeError("module", "unknown backend");
}

}  // namespace

absl::StatusOr<Value> RunBackend(const IrModule& m, const Inputs& inputs,
                                 Backend backend, const FaultSet& faults) {
  try {
    return RunUnchecked(m, inputs, backend, faults);
  } catch (const std::exception& ex) {
    return Abort(absl::StrCat("uncaught exception: ", ex.what()));
  }
}

}  // namespace graphfuzz
