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

#ifndef GRAPHFUZZ_MUTATORS_H_
#define GRAPHFUZZ_MUTATORS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "graphfuzz/ir.h"
#include "graphfuzz/rng.h"

namespace graphfuzz {

// Semantics-preserving rewrites of a global function f other than @main,
// picked at random. The new global g gets a fresh name.
//   1  g(xs) = f(xs); every reference to f outside g now names g.
//   2  g() = f; every call f(args) becomes g()(args).
//   3  g(xs) = let c = fn(params of f) { body of f }; c(xs); every
//      reference to f names g and f is removed.
// Fails with NotFound "NoTarget" when the module has no such f, and with
// InvalidArgument for strategies outside 1..3. The result is unannotated.
absl::StatusOr<IrModule> MutateFunctionRewrite(const IrModule& m, int strategy,
                                               Rng& rng);
absl::StatusOr<IrModule> MutateFunctionRewrite(const IrModule& m, int strategy,
                                               uint64_t seed);

inline constexpr int kNumRewriteStrategies = 3;

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_MUTATORS_H_
