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

#include "graphfuzz/mutators.h"

#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"

namespace graphfuzz {
namespace {

ExprPtr RenameGlobal(const ExprPtr& e, const std::string& from,
                     const std::string& to) {
  if (e->kind == ExprKind::kFuncRef) {
    return e->name == from ? MakeFuncRef(to) : e;
  }
  return MapChildren(e, [&](const ExprPtr& c) { return RenameGlobal(c, from, to); });
}

// Rewrites f(args) into g()(args).
ExprPtr ThunkCalls(const ExprPtr& e, const std::string& f, const std::string& g) {
  ExprPtr r = MapChildren(e, [&](const ExprPtr& c) { return ThunkCalls(c, f, g); });
  if (r->kind == ExprKind::kCall && r->lhs->kind == ExprKind::kFuncRef &&
      r->lhs->name == f) {
    return MakeCall(MakeCall(MakeFuncRef(g), {}), r->args);
  }
  return r;
}

void StripTypes(IrModule& m) {
  for (GlobalFunction& f : m.functions) f.ret_type = nullptr;
}

}  // namespace

absl::StatusOr<IrModule> MutateFunctionRewrite(const IrModule& m, int strategy,
                                               Rng& rng) {
  if (strategy < 1 || strategy > kNumRewriteStrategies) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown rewrite strategy ", strategy));
  }
  std::vector<size_t> targets;
  for (size_t i = 0; i < m.functions.size(); ++i) {
    if (m.functions[i].name != kMainName) targets.push_back(i);
  }
  if (targets.empty()) return absl::NotFoundError("NoTarget");
  const size_t fi = rng.Pick(targets);
  const GlobalFunction& f = m.functions[fi];

  NameSupply supply(m);
  GlobalFunction g;
  g.name = supply.FreshGlobal("g");
  std::vector<ExprPtr> forwarded;
  if (strategy != 2) {
    for (const Param& p : f.params) {
      g.params.push_back({supply.FreshVar("x"), p.type});
      forwarded.push_back(MakeVar(g.params.back().name));
    }
  }
  switch (strategy) {
    case 1:
      g.body = MakeCall(MakeFuncRef(f.name), std::move(forwarded));
      break;
    case 2:
      g.body = MakeFuncRef(f.name);
      break;
    case 3: {
      std::string c = supply.FreshVar("c");
      g.body = MakeLet(c, MakeClosure(f.params, f.body),
                       MakeCall(MakeVar(c), std::move(forwarded)));
      break;
    }
  }

  IrModule out;
  for (size_t i = 0; i < m.functions.size(); ++i) {
    GlobalFunction h = m.functions[i];
    if (strategy == 2) {
      h.body = ThunkCalls(h.body, f.name, g.name);
    } else {
      h.body = RenameGlobal(h.body, f.name, g.name);
    }
    if (i != fi || strategy != 3) out.functions.push_back(std::move(h));
    if (i == fi) out.functions.push_back(g);
  }
  StripTypes(out);
  return out;
}

absl::StatusOr<IrModule> MutateFunctionRewrite(const IrModule& m, int strategy,
                                               uint64_t seed) {
  Rng rng(seed);
  return MutateFunctionRewrite(m, strategy, rng);
}

}  // namespace graphfuzz
