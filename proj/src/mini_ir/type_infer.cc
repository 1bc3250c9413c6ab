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

#include "graphfuzz/type_infer.h"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {
namespace {

ExprPtr Annotate(const ExprPtr& e, std::vector<ExprPtr> args, ExprPtr lhs,
                 ExprPtr body, IrTypePtr type) {
  auto out = std::make_shared<Expr>(*e);
  out->args = std::move(args);
  out->lhs = std::move(lhs);
  out->body = std::move(body);
  out->type = std::move(type);
  return out;
}

class Inferencer {
 public:
  Inferencer(const IrModule& m, const FaultSet& faults)
      : module_(m), faults_(faults) {}

  absl::StatusOr<IrModule> Run() {
    if (!module_.main()) {
      return Diagnostic("MissingMain", "module", "no global named @main");
    }
    for (const GlobalFunction& f : module_.functions) {
      GF_RETURN_IF_ERROR(Signature(f.name, "module").status());
    }
    IrModule out;
    for (const GlobalFunction& f : module_.functions) {
      out.functions.push_back(done_.at(f.name));
    }
    return out;
  }

 private:
  absl::StatusOr<IrTypePtr> Signature(const std::string& name,
                                      const std::string& path) {
    auto it = done_.find(name);
    if (it != done_.end()) return GlobalType(it->second);
    const GlobalFunction* f = module_.Find(name);
    if (!f) {
      return Diagnostic("UnboundGlobal", path,
                        absl::StrCat("no global named @", name));
    }
    if (!in_progress_.insert(name).second) {
      return Diagnostic("Recursion", path,
                        absl::StrCat("@", name, " refers to itself"));
    }
    ScopedMap<IrTypePtr> scope;
    for (const Param& p : f->params) {
      if (!p.type) {
        return Diagnostic("NotATensor", absl::StrCat("@", name),
                          absl::StrCat("parameter %", p.name, " has no type"));
      }
      scope.Push(p.name, p.type);
    }
    GlobalFunction typed = *f;
    GF_ASSIGN_OR_RETURN(typed.body,
                        Infer(f->body, scope, absl::StrCat("@", name)));
    typed.ret_type = typed.body->type;
    in_progress_.erase(name);
    auto [pos, inserted] = done_.emplace(name, std::move(typed));
    return GlobalType(pos->second);
  }

  absl::StatusOr<ExprPtr> Infer(const ExprPtr& e, ScopedMap<IrTypePtr>& scope,
                                const std::string& path) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const IrTypePtr* t = scope.Find(e->name);
        if (!t) {
          return Diagnostic("UnboundVariable", path,
                            absl::StrCat("%", e->name, " is not bound"));
        }
        return Annotate(e, {}, nullptr, nullptr, *t);
      }
      case ExprKind::kConst:
        return Annotate(e, {}, nullptr, nullptr, TensorTy(e->value->type()));
      case ExprKind::kFuncRef: {
        GF_ASSIGN_OR_RETURN(IrTypePtr t, Signature(e->name, path));
        return Annotate(e, {}, nullptr, nullptr, std::move(t));
      }
      case ExprKind::kPrim:
        return InferPrim(e, scope, path);
      case ExprKind::kLet: {
        const std::string inner = absl::StrCat(path, "/%", e->name);
        GF_ASSIGN_OR_RETURN(ExprPtr value, Infer(e->lhs, scope, inner));
        scope.Push(e->name, value->type);
        absl::StatusOr<ExprPtr> body = Infer(e->body, scope, path);
        scope.Pop(e->name);
        if (!body.ok()) return body.status();
        IrTypePtr t = (*body)->type;
        return Annotate(e, {}, std::move(value), *std::move(body), t);
      }
      case ExprKind::kClosure: {
        std::vector<IrTypePtr> param_types;
        for (const Param& p : e->params) {
          if (!p.type) {
            return Diagnostic("NotATensor", path,
                              absl::StrCat("closure parameter %", p.name,
                                           " has no type"));
          }
          param_types.push_back(p.type);
          scope.Push(p.name, p.type);
        }
        absl::StatusOr<ExprPtr> body = Infer(e->body, scope, path + "/fn");
        for (const Param& p : e->params) scope.Pop(p.name);
        if (!body.ok()) return body.status();
        IrTypePtr t = FuncTy(std::move(param_types), (*body)->type);
        return Annotate(e, {}, nullptr, *std::move(body), std::move(t));
      }
      case ExprKind::kCall:
        return InferCall(e, scope, path);
      case ExprKind::kTuple: {
        std::vector<ExprPtr> fields;
        std::vector<IrTypePtr> types;
        for (const ExprPtr& a : e->args) {
          GF_ASSIGN_OR_RETURN(ExprPtr f, Infer(a, scope, path));
          types.push_back(f->type);
          fields.push_back(std::move(f));
        }
        return Annotate(e, std::move(fields), nullptr, nullptr,
                        TupleTy(std::move(types)));
      }
      case ExprKind::kTupleGet: {
        GF_ASSIGN_OR_RETURN(ExprPtr tuple, Infer(e->lhs, scope, path));
        const IrType& tt = *tuple->type;
        if (tt.kind != IrType::Kind::kTuple) {
          return Diagnostic("NotATuple", path,
                            absl::StrCat("projection .", e->index, " of ",
                                         tt.ToString()));
        }
        if (e->index < 0 || e->index >= static_cast<int>(tt.fields.size())) {
          return Diagnostic("BadTupleIndex", path,
                            absl::StrCat("index ", e->index, " out of range for ",
                                         tt.ToString()));
        }
        IrTypePtr t = tt.fields[e->index];
        return Annotate(e, {}, std::move(tuple), nullptr, std::move(t));
      }
    }
    return Diagnostic("Internal", path, "unknown expression kind");
  }

  absl::StatusOr<ExprPtr> InferPrim(const ExprPtr& e,
                                    ScopedMap<IrTypePtr>& scope,
                                    const std::string& outer) {
    const OperatorSpec& spec = SpecOf(e->op);
    const std::string path = absl::StrCat(outer, "/", spec.name);
    std::vector<ExprPtr> args;
    for (const ExprPtr& a : e->args) {
      GF_ASSIGN_OR_RETURN(ExprPtr t, Infer(a, scope, path));
      args.push_back(std::move(t));
    }
    if (static_cast<int>(args.size()) != spec.arity) {
      return Diagnostic("ArityMismatch", path,
                        absl::StrCat(spec.name, " takes ", spec.arity,
                                     " operands, got ", args.size()));
    }
    for (const ExprPtr& a : args) {
      if (a->type->kind != IrType::Kind::kTensor) {
        return Diagnostic("NotATensor", path,
                          absl::StrCat(spec.name, " operand has type ",
                                       a->type->ToString()));
      }
    }
    const TensorType& t0 = args[0]->type->tensor;
    Shape shape = t0.shape;
    if (args.size() == 2) {
      const TensorType& t1 = args[1]->type->tensor;
      if (t0.dtype != t1.dtype) {
        return Diagnostic("DtypeMismatch", path,
                          absl::StrCat(spec.name, " operands ", t0.ToString(),
                                       " and ", t1.ToString()));
      }
    }
    if (!spec.Admits(t0.dtype)) {
      if (e->op == OpCode::kSqrt && faults_.Has(BugId::kInferSqrtAbort)) {
        return Abort("Check failed: IsFloat(dtype) in SqrtRel");
      }
      return Diagnostic("Inadmissible", path,
                        absl::StrCat(spec.name, " does not accept ",
                                     DTypeName(t0.dtype)));
    }
    if (args.size() == 2) {
      absl::StatusOr<Shape> b =
          BroadcastShapes(t0.shape, args[1]->type->tensor.shape);
      if (!b.ok()) {
        return Diagnostic("ShapeMismatch", path,
                          absl::StrCat(spec.name, " operands ", t0.ToString(),
                                       " and ",
                                       args[1]->type->tensor.ToString()));
      }
      shape = *std::move(b);
    }
    return Annotate(
        e, std::move(args), nullptr, nullptr,
        TensorTy(TensorType{ResultDType(e->op, t0.dtype), std::move(shape)}));
  }

  absl::StatusOr<ExprPtr> InferCall(const ExprPtr& e,
                                    ScopedMap<IrTypePtr>& scope,
                                    const std::string& outer) {
    const std::string path = outer + "/call";
    GF_ASSIGN_OR_RETURN(ExprPtr callee, Infer(e->lhs, scope, path));
    const IrType& ft = *callee->type;
    if (ft.kind != IrType::Kind::kFunc) {
      return Diagnostic("NotCallable", path,
                        absl::StrCat("callee has type ", ft.ToString()));
    }
    if (ft.fields.size() != e->args.size()) {
      return Diagnostic("ArityMismatch", path,
                        absl::StrCat("callee takes ", ft.fields.size(),
                                     " arguments, got ", e->args.size()));
    }
    std::vector<ExprPtr> args;
    for (size_t i = 0; i < e->args.size(); ++i) {
      GF_ASSIGN_OR_RETURN(ExprPtr a, Infer(e->args[i], scope, path));
      if (!TypesEqual(a->type, ft.fields[i])) {
        const bool tensors = a->type->kind == IrType::Kind::kTensor &&
                             ft.fields[i]->kind == IrType::Kind::kTensor;
        absl::string_view kind = "TypeMismatch";
        if (tensors) {
          kind = a->type->tensor.dtype != ft.fields[i]->tensor.dtype
                     ? "DtypeMismatch"
                     : "ShapeMismatch";
        }
        return Diagnostic(kind, path,
                          absl::StrCat("argument ", i, " has type ",
                                       a->type->ToString(), ", expected ",
                                       ft.fields[i]->ToString()));
      }
      args.push_back(std::move(a));
    }
    IrTypePtr result = ft.result;
    return Annotate(e, std::move(args), std::move(callee), nullptr,
                    std::move(result));
  }

  const IrModule& module_;
  const FaultSet& faults_;
  std::map<std::string, GlobalFunction> done_;
  std::set<std::string> in_progress_;
};

bool ExprTyped(const ExprPtr& e) {
  if (!e) return true;
  if (!e->type) return false;
  for (const ExprPtr& a : e->args) {
    if (!ExprTyped(a)) return false;
  }
  return ExprTyped(e->lhs) && ExprTyped(e->body);
}

}  // namespace

absl::StatusOr<IrModule> InferTypes(const IrModule& m, const FaultSet& faults) {
  return Inferencer(m, faults).Run();
}

bool FullyTyped(const IrModule& m) {
  for (const GlobalFunction& f : m.functions) {
    if (!f.ret_type || !ExprTyped(f.body)) return false;
  }
  return true;
}

IrTypePtr GlobalType(const GlobalFunction& f) {
  std::vector<IrTypePtr> params;
  for (const Param& p : f.params) params.push_back(p.type);
  return FuncTy(std::move(params), f.ret_type);
}

}  // namespace graphfuzz
