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

#include "graphfuzz/passes.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "graphfuzz/ir_text.h"
#include "graphfuzz/status_macros.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

template <typename Fn>
IrModule MapBodies(const IrModule& m, Fn&& fn) {
  IrModule out = m;
  for (GlobalFunction& f : out.functions) {
    f.body = fn(f.body);
    f.ret_type = nullptr;
  }
  return out;
}

ExprPtr WrapLets(std::vector<std::pair<std::string, ExprPtr>> binds,
                 ExprPtr tail) {
  for (auto it = binds.rbegin(); it != binds.rend(); ++it) {
    tail = MakeLet(std::move(it->first), std::move(it->second), std::move(tail));
  }
  return tail;
}

const TensorType* TensorOf(const ExprPtr& e) {
  if (!e || !e->type || e->type->kind != IrType::Kind::kTensor) return nullptr;
  return &e->type->tensor;
}

// True for a constant whose elements all equal `v`.
bool ConstAll(const ExprPtr& e, int v) {
  if (e->kind != ExprKind::kConst) return false;
  const TensorValue& t = *e->value;
  if (t.is_float()) {
    return std::all_of(t.floats().begin(), t.floats().end(),
                       [v](double x) { return x == v; });
  }
  return std::all_of(t.ints().begin(), t.ints().end(),
                     [v](int64_t x) { return x == v; });
}

ExprPtr ZerosOf(const TensorType& t) {
  return MakeConst(TensorValue(t.dtype, t.shape));
}

// ---------------------------------------------------------------- inline

class Inliner {
 public:
  Inliner(const IrModule& m, const FaultSet& faults)
      : module_(m), faults_(faults), supply_(m),
        recursive_(RecursiveGlobals(m)) {}

  IrModule Run() {
    for (const GlobalFunction& f : module_.functions) Visit(f.name);
    IrModule out;
    for (const GlobalFunction& f : module_.functions) {
      out.functions.push_back(done_.at(f.name));
    }
    return out;
  }

 private:
  void Visit(const std::string& name) {
    if (done_.count(name) || !visiting_.insert(name).second) return;
    const GlobalFunction* f = module_.Find(name);
    if (!f) return;
    for (const std::string& callee : ReferencedGlobals(f->body)) Visit(callee);
    GlobalFunction g = *f;
    g.body = Rewrite(f->body);
    g.ret_type = nullptr;
    done_.emplace(name, std::move(g));
  }

  ExprPtr Rewrite(const ExprPtr& e) {
    ExprPtr r = MapChildren(e, [this](const ExprPtr& c) { return Rewrite(c); });
    if (r->kind != ExprKind::kCall || r->lhs->kind != ExprKind::kFuncRef) {
      return r;
    }
    const std::string& name = r->lhs->name;
    auto it = done_.find(name);
    if (name == kMainName || recursive_.count(name) || it == done_.end()) {
      return r;
    }
    const GlobalFunction& callee = it->second;
    if (callee.params.size() != r->args.size() ||
        ExprSize(callee.body) > kInlineThreshold) {
      return r;
    }
    std::map<std::string, std::string> renames;
    std::vector<std::pair<std::string, ExprPtr>> binds;
    const size_t n = r->args.size();
    for (size_t i = 0; i < n; ++i) {
      std::string fresh = supply_.FreshVar("i");
      renames[callee.params[i].name] = fresh;
      size_t src = i;
      if (faults_.Has(BugId::kInlineDropArg) && n >= 2 && i == n - 1) src = 0;
      binds.emplace_back(std::move(fresh), r->args[src]);
    }
    return WrapLets(std::move(binds),
                    FreshenBinders(callee.body, renames, supply_));
  }

  const IrModule& module_;
  const FaultSet& faults_;
  NameSupply supply_;
  std::set<std::string> recursive_;
  std::set<std::string> visiting_;
  std::map<std::string, GlobalFunction> done_;
};

// ---------------------------------------------------------- canonicalize

ExprPtr CanonicalizeExpr(const ExprPtr& e) {
  ExprPtr r = MapChildren(e, CanonicalizeExpr);
  if (r->kind != ExprKind::kPrim || r->args.size() != 2 ||
      !SpecOf(r->op).commutative) {
    return r;
  }
  const ExprPtr& a = r->args[0];
  const ExprPtr& b = r->args[1];
  const bool swap =
      (a->kind == ExprKind::kConst && b->kind != ExprKind::kConst) ||
      (a->kind == ExprKind::kVar && b->kind == ExprKind::kVar && a->name > b->name);
  if (!swap) return r;
  return Rebuild(*r, {b, a}, nullptr, nullptr);
}

// --------------------------------------------------------- simplify_expr

class Simplifier {
 public:
  explicit Simplifier(bool look_through) : look_through_(look_through) {}

  ExprPtr Run(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::kLet: {
        ExprPtr value = Run(e->lhs);
        defs_.Push(e->name, value);
        ExprPtr body = Run(e->body);
        defs_.Pop(e->name);
        if (value == e->lhs && body == e->body) return e;
        return MakeLet(e->name, std::move(value), std::move(body));
      }
      case ExprKind::kClosure: {
        for (const Param& p : e->params) defs_.Push(p.name, nullptr);
        ExprPtr body = Run(e->body);
        for (const Param& p : e->params) defs_.Pop(p.name);
        if (body == e->body) return e;
        return Rebuild(*e, {}, nullptr, std::move(body));
      }
      case ExprKind::kPrim: {
        std::vector<ExprPtr> args;
        for (const ExprPtr& a : e->args) args.push_back(Run(a));
        if (ExprPtr s = Simplify(*e, args)) return s;
        bool changed = false;
        for (size_t i = 0; i < args.size(); ++i) changed |= args[i] != e->args[i];
        return changed ? Rebuild(*e, std::move(args), nullptr, nullptr) : e;
      }
      default:
        return MapChildren(e, [this](const ExprPtr& c) { return Run(c); });
    }
  }

 private:
  // The primitive that `e` denotes, looking through let-bound variables.
  const Expr* Definition(const ExprPtr& e) const {
    if (e->kind == ExprKind::kPrim) return e.get();
    if (!look_through_ || e->kind != ExprKind::kVar) return nullptr;
    const ExprPtr* def = defs_.Find(e->name);
    if (!def || !*def || (*def)->kind != ExprKind::kPrim) return nullptr;
    return def->get();
  }

  // Returns the replacement for `e` (whose simplified arguments are
  // `args`), or null when no rule applies.
  ExprPtr Simplify(const Expr& e, const std::vector<ExprPtr>& args) const {
    const TensorType* result = e.type && e.type->kind == IrType::Kind::kTensor
                                   ? &e.type->tensor
                                   : nullptr;
    if (!result || args.empty()) return nullptr;
    std::vector<const TensorType*> types;
    for (const ExprPtr& a : e.args) {
      types.push_back(TensorOf(a));
      if (!types.back()) return nullptr;
    }
    const DType d = types[0]->dtype;
    auto same = [&](size_t i) { return *types[i] == *result; };
    const bool integer = IsInteger(d);
    switch (e.op) {
      case OpCode::kAdd:
        if (integer && ConstAll(args[1], 0) && same(0)) return args[0];
        if (integer && ConstAll(args[0], 0) && same(1)) return args[1];
        return nullptr;
      case OpCode::kSubtract:
        if (integer && ConstAll(args[1], 0) && same(0)) return args[0];
        if (integer && ExprEqual(args[0], args[1])) return ZerosOf(*result);
        return nullptr;
      case OpCode::kMultiply:
        if ((integer || IsFloat(d)) && ConstAll(args[1], 1) && same(0)) {
          return args[0];
        }
        if ((integer || IsFloat(d)) && ConstAll(args[0], 1) && same(1)) {
          return args[1];
        }
        if (integer && (ConstAll(args[0], 0) || ConstAll(args[1], 0))) {
          return ZerosOf(*result);
        }
        return nullptr;
      case OpCode::kNegative:
      case OpCode::kLogicalNot:
      case OpCode::kBitwiseNot: {
        const Expr* inner = Definition(args[0]);
        if (inner && inner->op == e.op && inner->args.size() == 1 &&
            (inner == args[0].get() || inner->args[0]->IsAtomic())) {
          return inner->args[0];
        }
        return nullptr;
      }
      case OpCode::kLogicalAnd:
      case OpCode::kLogicalOr:
      case OpCode::kBitwiseAnd:
      case OpCode::kBitwiseOr:
      case OpCode::kMaximum:
      case OpCode::kMinimum:
        if (ExprEqual(args[0], args[1]) && same(0)) return args[0];
        return nullptr;
      case OpCode::kLogicalXor:
        if (ExprEqual(args[0], args[1])) return ZerosOf(*result);
        return nullptr;
      case OpCode::kCopy:
        return same(0) ? args[0] : nullptr;
      default:
        return nullptr;
    }
  }

  bool look_through_;
  ScopedMap<ExprPtr> defs_;
};

// --------------------------------------------------------- fold_constant

class Folder {
 public:
  explicit Folder(const FaultSet& faults) : faults_(faults) {}

  ExprPtr Run(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const ExprPtr* c = consts_.Find(e->name);
        return c && *c ? *c : e;
      }
      case ExprKind::kLet: {
        ExprPtr value = Run(e->lhs);
        consts_.Push(e->name,
                     value->kind == ExprKind::kConst ? value : nullptr);
        ExprPtr body = Run(e->body);
        consts_.Pop(e->name);
        if (value == e->lhs && body == e->body) return e;
        return MakeLet(e->name, std::move(value), std::move(body));
      }
      case ExprKind::kClosure: {
        for (const Param& p : e->params) consts_.Push(p.name, nullptr);
        ExprPtr body = Run(e->body);
        for (const Param& p : e->params) consts_.Pop(p.name);
        if (body == e->body) return e;
        return Rebuild(*e, {}, nullptr, std::move(body));
      }
      case ExprKind::kPrim: {
        ExprPtr r = MapChildren(e, [this](const ExprPtr& c) { return Run(c); });
        std::vector<TensorValue> operands;
        for (const ExprPtr& a : r->args) {
          if (a->kind != ExprKind::kConst) return r;
          operands.push_back(*a->value);
        }
        OpCode op = r->op;
        if (faults_.Has(BugId::kFoldUmod) && op == OpCode::kFloorMod &&
            !operands.empty() && IsUnsigned(operands[0].dtype())) {
          op = OpCode::kFloorDivide;
        }
        absl::StatusOr<TensorValue> v = EvalElementwise(op, operands);
        if (!v.ok()) return r;
        return MakeConst(*std::move(v));
      }
      case ExprKind::kTupleGet: {
        ExprPtr t = Run(e->lhs);
        if (t->kind == ExprKind::kTuple && e->index >= 0 &&
            e->index < static_cast<int>(t->args.size())) {
          return t->args[e->index];
        }
        if (t == e->lhs) return e;
        return Rebuild(*e, {}, std::move(t), nullptr);
      }
      default:
        return MapChildren(e, [this](const ExprPtr& c) { return Run(c); });
    }
  }

 private:
  const FaultSet& faults_;
  ScopedMap<ExprPtr> consts_;
};

// ------------------------------------------------------ to_a_normal_form

class Normalizer {
 public:
  explicit Normalizer(NameSupply& supply) : supply_(supply) {}

  ExprPtr Normalize(const ExprPtr& e) {
    std::vector<std::pair<std::string, ExprPtr>> binds;
    ExprPtr tail = Flatten(e, binds);
    return WrapLets(std::move(binds), std::move(tail));
  }

 private:
  using Binds = std::vector<std::pair<std::string, ExprPtr>>;

  // Returns a non-let expression whose operands are atomic; the bindings it
  // depends on are appended to `binds`.
  ExprPtr Flatten(const ExprPtr& e, Binds& binds) {
    switch (e->kind) {
      case ExprKind::kVar:
      case ExprKind::kConst:
      case ExprKind::kFuncRef:
        return e;
      case ExprKind::kLet: {
        ExprPtr value = Flatten(e->lhs, binds);
        binds.emplace_back(e->name, std::move(value));
        return Flatten(e->body, binds);
      }
      case ExprKind::kClosure:
        return Rebuild(*e, {}, nullptr, Normalize(e->body));
      case ExprKind::kPrim:
      case ExprKind::kTuple: {
        std::vector<ExprPtr> args;
        for (const ExprPtr& a : e->args) args.push_back(Atomize(a, binds));
        return Rebuild(*e, std::move(args), nullptr, nullptr);
      }
      case ExprKind::kCall: {
        ExprPtr callee = Atomize(e->lhs, binds);
        std::vector<ExprPtr> args;
        for (const ExprPtr& a : e->args) args.push_back(Atomize(a, binds));
        return Rebuild(*e, std::move(args), std::move(callee), nullptr);
      }
      case ExprKind::kTupleGet:
        return Rebuild(*e, {}, Atomize(e->lhs, binds), nullptr);
    }
    return e;
  }

  ExprPtr Atomize(const ExprPtr& e, Binds& binds) {
    ExprPtr f = Flatten(e, binds);
    if (f->IsAtomic()) return f;
    std::string name = supply_.FreshVar("a");
    binds.emplace_back(name, std::move(f));
    return MakeVar(std::move(name));
  }

  NameSupply& supply_;
};

// -------------------------------------------------- eliminate_common_subexpr

std::string AtomKey(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::kVar:
      return absl::StrCat("%", e->name);
    case ExprKind::kFuncRef:
      return absl::StrCat("@", e->name);
    case ExprKind::kConst:
      return PrintExpr(e);
    default:
      return "";
  }
}

class CommonSubexpr {
 public:
  explicit CommonSubexpr(const FaultSet& faults) : faults_(faults) {}

  ExprPtr Run(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::kVar: {
        const std::string* to = rename_.Find(e->name);
        return to ? MakeVar(*to) : e;
      }
      case ExprKind::kLet: {
        ExprPtr value = Run(e->lhs);
        if (value->kind == ExprKind::kVar) {
          rename_.Push(e->name, value->name);
          ExprPtr body = Run(e->body);
          rename_.Pop(e->name);
          return body;
        }
        std::string key = Key(value);
        if (!key.empty()) {
          auto it = available_.find(key);
          if (it != available_.end()) {
            rename_.Push(e->name, it->second);
            ExprPtr body = Run(e->body);
            rename_.Pop(e->name);
            return body;
          }
          available_.emplace(key, e->name);
          log_.push_back(key);
        }
        ExprPtr body = Run(e->body);
        if (value == e->lhs && body == e->body) return e;
        return MakeLet(e->name, std::move(value), std::move(body));
      }
      case ExprKind::kClosure: {
        const size_t mark = log_.size();
        ExprPtr body = Run(e->body);
        while (log_.size() > mark) {
          available_.erase(log_.back());
          log_.pop_back();
        }
        if (body == e->body) return e;
        return Rebuild(*e, {}, nullptr, std::move(body));
      }
      default:
        return MapChildren(e, [this](const ExprPtr& c) { return Run(c); });
    }
  }

 private:
  // Structural key of a pure, non-atomic-operand-free expression, or "".
  std::string Key(const ExprPtr& e) const {
    std::vector<std::string> parts;
    for (const ExprPtr& a : e->args) {
      parts.push_back(AtomKey(a));
      if (parts.back().empty()) return "";
    }
    const std::string operands = absl::StrJoin(parts, ",");
    switch (e->kind) {
      case ExprKind::kConst:
        return AtomKey(e);
      case ExprKind::kPrim:
        if (faults_.Has(BugId::kCseIgnoreOp)) {
          return absl::StrCat("prim/", e->args.size(), "(", operands, ")");
        }
        return absl::StrCat(OpName(e->op), "(", operands, ")");
      case ExprKind::kTuple:
        return absl::StrCat("tuple(", operands, ")");
      case ExprKind::kTupleGet: {
        std::string t = AtomKey(e->lhs);
        return t.empty() ? "" : absl::StrCat("get", e->index, "(", t, ")");
      }
      case ExprKind::kCall: {
        std::string callee = AtomKey(e->lhs);
        return callee.empty() ? ""
                              : absl::StrCat("call ", callee, "(", operands, ")");
      }
      default:
        return "";
    }
  }

  const FaultSet& faults_;
  ScopedMap<std::string> rename_;
  std::unordered_map<std::string, std::string> available_;
  std::vector<std::string> log_;
};

// ------------------------------------------------ dead_code_elimination

class DeadCode {
 public:
  explicit DeadCode(const FaultSet& faults) : faults_(faults) {}

  ExprPtr Run(const ExprPtr& e, std::unordered_set<std::string>& free) {
    switch (e->kind) {
      case ExprKind::kVar:
        free.insert(e->name);
        return e;
      case ExprKind::kConst:
      case ExprKind::kFuncRef:
        return e;
      case ExprKind::kLet: {
        ExprPtr body = Run(e->body, free);
        if (!free.count(e->name)) return body;
        free.erase(e->name);
        ExprPtr value = Run(e->lhs, free);
        if (value == e->lhs && body == e->body) return e;
        return MakeLet(e->name, std::move(value), std::move(body));
      }
      case ExprKind::kClosure: {
        std::unordered_set<std::string> inner;
        ExprPtr body = Run(e->body, inner);
        for (const Param& p : e->params) inner.erase(p.name);
        free.insert(inner.begin(), inner.end());
        if (body == e->body) return e;
        return Rebuild(*e, {}, nullptr, std::move(body));
      }
      case ExprKind::kTuple:
        if (faults_.Has(BugId::kDceTupleUse)) {
          for (const ExprPtr& a : e->args) {
            if (a->kind != ExprKind::kVar) Run(a, free);
          }
          return e;
        }
        [[fallthrough]];
      default:
        return MapChildren(e, [&](const ExprPtr& c) { return Run(c, free); });
    }
  }

 private:
  const FaultSet& faults_;
};

bool AtomicOperands(const ExprPtr& e) {
  if (!e) return true;
  switch (e->kind) {
    case ExprKind::kPrim:
    case ExprKind::kTuple:
    case ExprKind::kCall:
      for (const ExprPtr& a : e->args) {
        if (!a->IsAtomic()) return false;
      }
      if (e->kind == ExprKind::kCall && !e->lhs->IsAtomic()) return false;
      break;
    case ExprKind::kTupleGet:
      if (!e->lhs->IsAtomic()) return false;
      break;
    default:
      break;
  }
  for (const ExprPtr& a : e->args) {
    if (!AtomicOperands(a)) return false;
  }
  return AtomicOperands(e->lhs) && AtomicOperands(e->body);
}

}  // namespace

const std::array<PassId, kNumPasses>& AllPasses() {
  static const std::array<PassId, kNumPasses> kAll = {
      PassId::kInline,      PassId::kCanonicalize,
      PassId::kSimplifyExpr, PassId::kFoldConstant,
      PassId::kEliminateCommonSubexpr, PassId::kDeadCodeElimination,
      PassId::kToANormalForm,
  };
  return kAll;
}

absl::string_view PassName(PassId id) {
  switch (id) {
    case PassId::kInline:
      return "inline";
    case PassId::kCanonicalize:
      return "canonicalize";
    case PassId::kSimplifyExpr:
      return "simplify_expr";
    case PassId::kFoldConstant:
      return "fold_constant";
    case PassId::kEliminateCommonSubexpr:
      return "eliminate_common_subexpr";
    case PassId::kDeadCodeElimination:
      return "dead_code_elimination";
    case PassId::kToANormalForm:
      return "to_a_normal_form";
  }
  return "?";
}

absl::StatusOr<PassId> ParsePassName(absl::string_view name) {
  for (PassId id : AllPasses()) {
    if (PassName(id) == name) return id;
  }
  return absl::NotFoundError(absl::StrCat("UnknownPass: ", name));
}

IrModule Inline(const IrModule& m, const FaultSet& faults) {
  return Inliner(m, faults).Run();
}

IrModule Canonicalize(const IrModule& m) {
  return MapBodies(m, CanonicalizeExpr);
}

IrModule SimplifyExpr(const IrModule& m) {
  const bool unique = BindersUnique(m);
  return MapBodies(m, [unique](const ExprPtr& e) {
    return Simplifier(unique).Run(e);
  });
}

IrModule FoldConstant(const IrModule& m, const FaultSet& faults) {
  return MapBodies(m, [&](const ExprPtr& e) { return Folder(faults).Run(e); });
}

IrModule ToANormalForm(const IrModule& m) {
  IrModule src = BindersUnique(m) ? m : UniquifyBinders(m);
  NameSupply supply(src);
  return MapBodies(src, [&](const ExprPtr& e) {
    return Normalizer(supply).Normalize(e);
  });
}

IrModule EliminateCommonSubexpr(const IrModule& m, const FaultSet& faults) {
  return MapBodies(ToANormalForm(m), [&](const ExprPtr& e) {
    return CommonSubexpr(faults).Run(e);
  });
}

IrModule DeadCodeElimination(const IrModule& m, const FaultSet& faults) {
  IrModule pruned = MapBodies(m, [&](const ExprPtr& e) {
    std::unordered_set<std::string> free;
    return DeadCode(faults).Run(e, free);
  });
  // Drop globals that @main can no longer reach.
  std::set<std::string> live;
  std::vector<std::string> stack = {std::string(kMainName)};
  while (!stack.empty()) {
    std::string name = stack.back();
    stack.pop_back();
    const GlobalFunction* f = pruned.Find(name);
    if (!f || !live.insert(name).second) continue;
    for (const std::string& g : ReferencedGlobals(f->body)) stack.push_back(g);
  }
  IrModule out;
  for (GlobalFunction& f : pruned.functions) {
    if (live.count(f.name)) out.functions.push_back(std::move(f));
  }
  return out;
}

IrModule ApplyPass(PassId id, const IrModule& m, const FaultSet& faults) {
  switch (id) {
    case PassId::kInline:
      return Inline(m, faults);
    case PassId::kCanonicalize:
      return Canonicalize(m);
    case PassId::kSimplifyExpr:
      return SimplifyExpr(m);
    case PassId::kFoldConstant:
      return FoldConstant(m, faults);
    case PassId::kEliminateCommonSubexpr:
      return EliminateCommonSubexpr(m, faults);
    case PassId::kDeadCodeElimination:
      return DeadCodeElimination(m, faults);
    case PassId::kToANormalForm:
      return ToANormalForm(m);
  }
  return m;
}

Pipeline DefaultPipeline() {
  Pipeline p;
  p.name = "default";
  p.passes.assign(AllPasses().begin(), AllPasses().end());
  return p;
}

Pipeline RandomPipeline(Rng& rng) {
  std::vector<PassId> passes(AllPasses().begin(), AllPasses().end());
  rng.Shuffle(passes);
  passes.resize(rng.Uniform(1, kNumPasses));
  Pipeline p;
  p.passes = std::move(passes);
  p.name = absl::StrJoin(p.passes, ",", [](std::string* out, PassId id) {
    absl::StrAppend(out, PassName(id));
  });
  return p;
}

absl::StatusOr<Pipeline> InjectBug(Pipeline p, absl::string_view bug) {
  GF_ASSIGN_OR_RETURN(BugId id, ParseBugId(bug));
  p.faults.Add(id);
  return p;
}

absl::StatusOr<IrModule> RunPipeline(const IrModule& typed, const Pipeline& p) {
  IrModule m = typed;
  for (PassId id : p.passes) {
    GF_ASSIGN_OR_RETURN(m, InferTypes(ApplyPass(id, m, p.faults), p.faults));
  }
  return m;
}

bool IsANormalForm(const IrModule& m) {
  for (const GlobalFunction& f : m.functions) {
    if (!AtomicOperands(f.body)) return false;
  }
  return true;
}

}  // namespace graphfuzz
