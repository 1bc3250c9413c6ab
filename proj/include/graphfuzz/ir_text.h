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

#ifndef GRAPHFUZZ_IR_TEXT_H_
#define GRAPHFUZZ_IR_TEXT_H_

#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/ir.h"

namespace graphfuzz {

// Canonical text form of MiniIR.
//
//   def @f3(%p0: Tensor[int32, (2)], %p1: Tensor[int32, ()]) {
//     let %n2 = add(%p0, %p1);
//     %n2
//   }
//
// Constants print as const<dtype,shape>[data], tuples as (a, b) or (a,),
// projections as e.0, closures as fn(%x: T) { body }. Function types are
// written fn(T, T) -> T and tuple types (T, T). Printing is deterministic and
// ParseModule(PrintModule(m)) is structurally equal to m.
std::string PrintType(const IrTypePtr& type);
std::string PrintExpr(const ExprPtr& e);
std::string PrintModule(const IrModule& m);

absl::StatusOr<IrModule> ParseModule(absl::string_view text);
absl::StatusOr<ExprPtr> ParseExpr(absl::string_view text);
absl::StatusOr<IrTypePtr> ParseType(absl::string_view text);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_IR_TEXT_H_
