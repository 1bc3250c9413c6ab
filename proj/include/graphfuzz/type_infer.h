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

#ifndef GRAPHFUZZ_TYPE_INFER_H_
#define GRAPHFUZZ_TYPE_INFER_H_

#include "absl/status/statusor.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/ir.h"

namespace graphfuzz {

// Annotates every expression and every global's return type. Errors are
// structured diagnostics whose kind is one of DtypeMismatch, ShapeMismatch,
// Inadmissible, ArityMismatch, UnboundVariable, UnboundGlobal, NotCallable,
// NotATensor, NotATuple, BadTupleIndex, Recursion or MissingMain. The path
// names the global, the innermost let binder and the operator involved.
absl::StatusOr<IrModule> InferTypes(const IrModule& m,
                                    const FaultSet& faults = {});

// True when every expression of every global carries a type.
bool FullyTyped(const IrModule& m);

// Type of a fully inferred global, as a function type.
IrTypePtr GlobalType(const GlobalFunction& f);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_TYPE_INFER_H_
