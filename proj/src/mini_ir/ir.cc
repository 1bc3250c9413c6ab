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

#include "graphfuzz/ir.h"

#include <functional>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace graphfuzz {

std::string IrType::ToString() const {
  auto join = [](const std::vector<IrTypePtr>& ts) {
    return absl::StrJoin(ts, ", ", [](std::string* out, const IrTypePtr& t) {
      absl::StrAppend(out, t->ToString());
    });
  };
  switch (kind) {
    case Kind::kTensor:
      return tensor.ToString();
    case Kind::kFunc:
      return absl::StrCat("fn(", join(fields), ") -> ", result->ToString());
    case Kind::kTuple:
      if (fields.size() == 1) return absl::StrCat("(", join(fields), ",)");
      return absl::StrCat("(", join(fields), ")");
  }
  return "?";
}

IrTypePtr TensorTy(TensorType t) {
  auto ty = std::make_shared<IrType>();
  ty->kind = IrType::Kind::kTensor;
  ty->tensor = std::move(t);
  return ty;
}

IrTypePtr FuncTy(std::vector<IrTypePtr> params, IrTypePtr result) {
  auto ty = std::make_shared<IrType>();
  ty->kind = IrType::Kind::kFunc;
  ty->fields = std::move(params);
  ty->result = std::move(result);
  return ty;
}

IrTypePtr TupleTy(std::vector<IrTypePtr> fields) {
  auto ty = std::make_shared<IrType>();
  ty->kind = IrType::Kind::kTuple;
  ty->fields = std::move(fields);
  return ty;
}

bool TypesEqual(const IrTypePtr& a, const IrTypePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind == IrType::Kind::kTensor) return a->tensor == b->tensor;
  if (a->fields.size() != b->fields.size()) return false;
  for (size_t i = 0; i < a->fields.size(); ++i) {
    if (!TypesEqual(a->fields[i], b->fields[i])) return false;
  }
  if (a->kind == IrType::Kind::kFunc) return TypesEqual(a->result, b->result);
  return true;
}

namespace {

std::shared_ptr<Expr> NewExpr(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

}  // namespace

ExprPtr MakeVar(std::string name) {
  auto e = NewExpr(ExprKind::kVar);
  e->name = std::move(name);
  return e;
}

ExprPtr MakeConst(TensorValue value) {
  auto e = NewExpr(ExprKind::kConst);
  e->value = std::make_shared<const TensorValue>(std::move(value));
  return e;
}

ExprPtr MakePrim(OpCode op, std::vector<ExprPtr> args) {
  auto e = NewExpr(ExprKind::kPrim);
  e->op = op;
  e->args = std::move(args);
  return e;
}

ExprPtr MakeLet(std::string name, ExprPtr value, ExprPtr body) {
  auto e = NewExpr(ExprKind::kLet);
  e->name = std::move(name);
  e->lhs = std::move(value);
  e->body = std::move(body);
  return e;
}

ExprPtr MakeFuncRef(std::string name) {
  auto e = NewExpr(ExprKind::kFuncRef);
  e->name = std::move(name);
  return e;
}

ExprPtr MakeCall(ExprPtr callee, std::vector<ExprPtr> args) {
  auto e = NewExpr(ExprKind::kCall);
  e->lhs = std::move(callee);
  e->args = std::move(args);
  return e;
}

ExprPtr MakeClosure(std::vector<Param> params, ExprPtr body) {
  auto e = NewExpr(ExprKind::kClosure);
  e->params = std::move(params);
  e->body = std::move(body);
  return e;
}

ExprPtr MakeTuple(std::vector<ExprPtr> fields) {
  auto e = NewExpr(ExprKind::kTuple);
  e->args = std::move(fields);
  return e;
}

ExprPtr MakeTupleGet(ExprPtr tuple, int index) {
  auto e = NewExpr(ExprKind::kTupleGet);
  e->lhs = std::move(tuple);
  e->index = index;
  return e;
}

ExprPtr Rebuild(const Expr& e, std::vector<ExprPtr> args, ExprPtr lhs,
                ExprPtr body) {
  auto out = std::make_shared<Expr>(e);
  out->args = std::move(args);
  out->lhs = std::move(lhs);
  out->body = std::move(body);
  out->type = nullptr;
  return out;
}

const GlobalFunction* IrModule::Find(absl::string_view name) const {
  for (const GlobalFunction& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

GlobalFunction* IrModule::Find(absl::string_view name) {
  for (GlobalFunction& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool ExprEqual(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::kVar:
    case ExprKind::kFuncRef:
      return a->name == b->name;
    case ExprKind::kConst:
      return a->value->Identical(*b->value);
    case ExprKind::kPrim:
      if (a->op != b->op) return false;
      break;
    case ExprKind::kLet:
      if (a->name != b->name) return false;
      break;
    case ExprKind::kClosure:
      if (a->params.size() != b->params.size()) return false;
      for (size_t i = 0; i < a->params.size(); ++i) {
        if (a->params[i].name != b->params[i].name ||
            !TypesEqual(a->params[i].type, b->params[i].type)) {
          return false;
        }
      }
      break;
    case ExprKind::kTupleGet:
      if (a->index != b->index) return false;
      break;
    case ExprKind::kCall:
    case ExprKind::kTuple:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!ExprEqual(a->args[i], b->args[i])) return false;
  }
  return ExprEqual(a->lhs, b->lhs) && ExprEqual(a->body, b->body);
}

bool ModulesEqual(const IrModule& a, const IrModule& b) {
  if (a.functions.size() != b.functions.size()) return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const GlobalFunction& f = a.functions[i];
    const GlobalFunction& g = b.functions[i];
    if (f.name != g.name || f.params.size() != g.params.size()) return false;
    for (size_t j = 0; j < f.params.size(); ++j) {
      if (f.params[j].name != g.params[j].name ||
          !TypesEqual(f.params[j].type, g.params[j].type)) {
        return false;
      }
    }
    if (!ExprEqual(f.body, g.body)) return false;
  }
  return true;
}

int ExprSize(const ExprPtr& e) {
  if (!e) return 0;
  int n = 1;
  for (const ExprPtr& a : e->args) n += ExprSize(a);
  return n + ExprSize(e->lhs) + ExprSize(e->body);
}

namespace {

void CollectFree(const ExprPtr& e, std::multiset<std::string>& bound,
                 std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::kVar:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case ExprKind::kLet: {
      CollectFree(e->lhs, bound, out);
      auto it = bound.insert(e->name);
      CollectFree(e->body, bound, out);
      bound.erase(it);
      return;
    }
    case ExprKind::kClosure: {
      std::vector<std::multiset<std::string>::iterator> its;
      for (const Param& p : e->params) its.push_back(bound.insert(p.name));
      CollectFree(e->body, bound, out);
      for (auto it : its) bound.erase(it);
      return;
    }
    default:
      for (const ExprPtr& a : e->args) CollectFree(a, bound, out);
      CollectFree(e->lhs, bound, out);
      CollectFree(e->body, bound, out);
  }
}

void CollectGlobals(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::kFuncRef) out.insert(e->name);
  for (const ExprPtr& a : e->args) CollectGlobals(a, out);
  CollectGlobals(e->lhs, out);
  CollectGlobals(e->body, out);
}

void CollectNames(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::kVar || e->kind == ExprKind::kLet ||
      e->kind == ExprKind::kFuncRef) {
    out.insert(e->name);
  }
  for (const Param& p : e->params) out.insert(p.name);
  for (const ExprPtr& a : e->args) CollectNames(a, out);
  CollectNames(e->lhs, out);
  CollectNames(e->body, out);
}

bool CollectBinders(const ExprPtr& e, std::set<std::string>& seen) {
  if (!e) return true;
  if (e->kind == ExprKind::kLet && !seen.insert(e->name).second) return false;
  for (const Param& p : e->params) {
    if (!seen.insert(p.name).second) return false;
  }
  for (const ExprPtr& a : e->args) {
    if (!CollectBinders(a, seen)) return false;
  }
  return CollectBinders(e->lhs, seen) && CollectBinders(e->body, seen);
}

ExprPtr SubstituteImpl(const ExprPtr& e,
                       const std::map<std::string, ExprPtr>& repl,
                       std::multiset<std::string>& shadowed) {
  switch (e->kind) {
    case ExprKind::kVar: {
      if (shadowed.count(e->name)) return e;
      auto it = repl.find(e->name);
      return it == repl.end() ? e : it->second;
    }
    case ExprKind::kConst:
    case ExprKind::kFuncRef:
      return e;
    case ExprKind::kLet: {
      ExprPtr value = SubstituteImpl(e->lhs, repl, shadowed);
      auto it = shadowed.insert(e->name);
      ExprPtr body = SubstituteImpl(e->body, repl, shadowed);
      shadowed.erase(it);
      if (value == e->lhs && body == e->body) return e;
      return Rebuild(*e, {}, std::move(value), std::move(body));
    }
    case ExprKind::kClosure: {
      std::vector<std::multiset<std::string>::iterator> its;
      for (const Param& p : e->params) its.push_back(shadowed.insert(p.name));
      ExprPtr body = SubstituteImpl(e->body, repl, shadowed);
      for (auto it : its) shadowed.erase(it);
      if (body == e->body) return e;
      return Rebuild(*e, {}, nullptr, std::move(body));
    }
    default:
      return MapChildren(e, [&](const ExprPtr& c) {
        return SubstituteImpl(c, repl, shadowed);
      });
  }
}

}  // namespace

std::set<std::string> FreeVars(const ExprPtr& e) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  CollectFree(e, bound, out);
  return out;
}

std::set<std::string> ReferencedGlobals(const ExprPtr& e) {
  std::set<std::string> out;
  CollectGlobals(e, out);
  return out;
}

std::set<std::string> RecursiveGlobals(const IrModule& m) {
  std::map<std::string, std::set<std::string>> edges;
  for (const GlobalFunction& f : m.functions) {
    edges[f.name] = ReferencedGlobals(f.body);
  }
  std::set<std::string> out;
  for (const GlobalFunction& f : m.functions) {
    std::set<std::string> seen;
    std::vector<std::string> stack(edges[f.name].begin(), edges[f.name].end());
    while (!stack.empty()) {
      std::string n = stack.back();
      stack.pop_back();
      if (n == f.name) {
        out.insert(f.name);
        break;
      }
      if (!seen.insert(n).second) continue;
      for (const std::string& next : edges[n]) stack.push_back(next);
    }
  }
  return out;
}

ExprPtr Substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& replacements) {
  if (replacements.empty()) return e;
  std::multiset<std::string> shadowed;
  return SubstituteImpl(e, replacements, shadowed);
}

bool BindersUnique(const IrModule& m) {
  for (const GlobalFunction& f : m.functions) {
    std::set<std::string> seen;
    for (const Param& p : f.params) {
      if (!seen.insert(p.name).second) return false;
    }
    if (!CollectBinders(f.body, seen)) return false;
  }
  return true;
}

namespace {

ExprPtr RenameBinders(const ExprPtr& e, ScopedMap<std::string>& names,
                      NameSupply& supply) {
  switch (e->kind) {
    case ExprKind::kVar: {
      const std::string* n = names.Find(e->name);
      return n ? MakeVar(*n) : e;
    }
    case ExprKind::kConst:
    case ExprKind::kFuncRef:
      return e;
    case ExprKind::kLet: {
      ExprPtr value = RenameBinders(e->lhs, names, supply);
      std::string fresh = supply.FreshVar("t");
      names.Push(e->name, fresh);
      ExprPtr body = RenameBinders(e->body, names, supply);
      names.Pop(e->name);
      return MakeLet(fresh, std::move(value), std::move(body));
    }
    case ExprKind::kClosure: {
      std::vector<Param> params;
      for (const Param& p : e->params) {
        params.push_back({supply.FreshVar("a"), p.type});
        names.Push(p.name, params.back().name);
      }
      ExprPtr body = RenameBinders(e->body, names, supply);
      for (const Param& p : e->params) names.Pop(p.name);
      return MakeClosure(std::move(params), std::move(body));
    }
    default:
      return MapChildren(e, [&](const ExprPtr& c) {
        return RenameBinders(c, names, supply);
      });
  }
}

}  // namespace

ExprPtr FreshenBinders(const ExprPtr& e,
                       const std::map<std::string, std::string>& renames,
                       NameSupply& supply) {
  ScopedMap<std::string> names;
  for (const auto& [from, to] : renames) names.Push(from, to);
  return RenameBinders(e, names, supply);
}

IrModule UniquifyBinders(const IrModule& m) {
  NameSupply supply(m);
  IrModule out = m;
  for (GlobalFunction& f : out.functions) {
    ScopedMap<std::string> names;
    f.body = RenameBinders(f.body, names, supply);
    f.ret_type = nullptr;
  }
  return out;
}

NameSupply::NameSupply(const IrModule& m) {
  for (const GlobalFunction& f : m.functions) {
    used_.insert(f.name);
    for (const Param& p : f.params) used_.insert(p.name);
    CollectNames(f.body, used_);
  }
}

std::string NameSupply::FreshVar(absl::string_view hint) {
  while (true) {
    std::string name = absl::StrCat(hint, "_", counter_++);
    if (used_.insert(name).second) return name;
  }
}

std::string NameSupply::FreshGlobal(absl::string_view hint) {
  return FreshVar(hint);
}

}  // namespace graphfuzz
