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

#ifndef GRAPHFUZZ_IR_H_
#define GRAPHFUZZ_IR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/strings/string_view.h"
#include "graphfuzz/opset.h"
#include "graphfuzz/tensor.h"

namespace graphfuzz {

struct IrType;
using IrTypePtr = std::shared_ptr<const IrType>;

struct IrType {
  enum class Kind : uint8_t { kTensor, kFunc, kTuple };

  Kind kind = Kind::kTensor;
  TensorType tensor;              // kTensor
  std::vector<IrTypePtr> fields;  // kFunc parameters or kTuple fields
  IrTypePtr result;               // kFunc

  std::string ToString() const;
};

IrTypePtr TensorTy(TensorType t);
IrTypePtr FuncTy(std::vector<IrTypePtr> params, IrTypePtr result);
IrTypePtr TupleTy(std::vector<IrTypePtr> fields);
bool TypesEqual(const IrTypePtr& a, const IrTypePtr& b);

enum class ExprKind : uint8_t {
  kVar,
  kConst,
  kPrim,
  kLet,
  kFuncRef,
  kCall,
  kClosure,
  kTuple,
  kTupleGet,
};

struct Param {
  std::string name;
  IrTypePtr type;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Which fields are meaningful depends on kind:
//   kVar      name
//   kConst    value
//   kPrim     op, args
//   kLet      name (binder), lhs (bound value), body
//   kFuncRef  name (global)
//   kCall     lhs (callee), args
//   kClosure  params, body
//   kTuple    args (fields)
//   kTupleGet lhs (tuple), index
// `type` is filled in by type inference and cleared on any rebuild.
struct Expr {
  ExprKind kind = ExprKind::kVar;
  std::string name;
  OpCode op = OpCode::kAdd;
  std::shared_ptr<const TensorValue> value;
  std::vector<ExprPtr> args;
  ExprPtr lhs;
  ExprPtr body;
  std::vector<Param> params;
  int index = 0;
  IrTypePtr type;

  bool IsAtomic() const {
    return kind == ExprKind::kVar || kind == ExprKind::kConst ||
           kind == ExprKind::kFuncRef;
  }
};

ExprPtr MakeVar(std::string name);
ExprPtr MakeConst(TensorValue value);
ExprPtr MakePrim(OpCode op, std::vector<ExprPtr> args);
ExprPtr MakeLet(std::string name, ExprPtr value, ExprPtr body);
ExprPtr MakeFuncRef(std::string name);
ExprPtr MakeCall(ExprPtr callee, std::vector<ExprPtr> args);
ExprPtr MakeClosure(std::vector<Param> params, ExprPtr body);
ExprPtr MakeTuple(std::vector<ExprPtr> fields);
ExprPtr MakeTupleGet(ExprPtr tuple, int index);

// Copy of `e` with new children and no type annotation.
ExprPtr Rebuild(const Expr& e, std::vector<ExprPtr> args, ExprPtr lhs,
                ExprPtr body);
// Applies `fn` to every direct child; returns `e` itself when nothing
// changed.
template <typename Fn>
ExprPtr MapChildren(const ExprPtr& e, Fn&& fn) {
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  for (const ExprPtr& a : e->args) {
    args.push_back(fn(a));
    changed |= args.back() != a;
  }
  ExprPtr lhs = e->lhs ? fn(e->lhs) : nullptr;
  ExprPtr body = e->body ? fn(e->body) : nullptr;
  changed |= lhs != e->lhs || body != e->body;
  if (!changed) return e;
  return Rebuild(*e, std::move(args), std::move(lhs), std::move(body));
}

struct GlobalFunction {
  std::string name;
  std::vector<Param> params;
  ExprPtr body;
  IrTypePtr ret_type;  // set by type inference
};

inline constexpr absl::string_view kMainName = "main";

// Globals in definition order; "main" is the entry point.
struct IrModule {
  std::vector<GlobalFunction> functions;

  const GlobalFunction* Find(absl::string_view name) const;
  GlobalFunction* Find(absl::string_view name);
  const GlobalFunction* main() const { return Find(kMainName); }
};

// Structural equality ignoring type annotations.
bool ExprEqual(const ExprPtr& a, const ExprPtr& b);
bool ModulesEqual(const IrModule& a, const IrModule& b);
// Number of expression nodes.
int ExprSize(const ExprPtr& e);
std::set<std::string> FreeVars(const ExprPtr& e);
// Globals referenced through FuncRef anywhere in `e`.
std::set<std::string> ReferencedGlobals(const ExprPtr& e);
// Globals that can reach themselves through FuncRef edges.
std::set<std::string> RecursiveGlobals(const IrModule& m);
// Replaces free occurrences of variables, honoring shadowing.
ExprPtr Substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& replacements);
// True iff no name is bound twice within any single global.
bool BindersUnique(const IrModule& m);

// Renames every let and closure binder to a fresh name so that no name is
// bound twice inside a global. Free names are left untouched.
IrModule UniquifyBinders(const IrModule& m);

class NameSupply;
// Copy of `e` in which every binder gets a fresh name from `supply` and free
// variables are renamed through `renames` (names absent from it are kept).
ExprPtr FreshenBinders(const ExprPtr& e,
                       const std::map<std::string, std::string>& renames,
                       NameSupply& supply);

// Name-keyed map with lexical shadowing: Push hides any earlier binding of
// the same name until the matching Pop.
template <typename V>
class ScopedMap {
 public:
  void Push(const std::string& name, V value) {
    map_[name].push_back(std::move(value));
  }
  void Pop(const std::string& name) {
    auto it = map_.find(name);
    it->second.pop_back();
    if (it->second.empty()) map_.erase(it);
  }
  const V* Find(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second.back();
  }
  V* Find(const std::string& name) {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second.back();
  }

 private:
  std::unordered_map<std::string, std::vector<V>> map_;
};

// Hands out names not used anywhere in a module.
class NameSupply {
 public:
  explicit NameSupply(const IrModule& m);
  std::string FreshVar(absl::string_view hint);
  std::string FreshGlobal(absl::string_view hint);

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_IR_H_
