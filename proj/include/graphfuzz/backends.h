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

#ifndef GRAPHFUZZ_BACKENDS_H_
#define GRAPHFUZZ_BACKENDS_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/ir.h"

namespace graphfuzz {

// Result of running @main: a tensor or a (possibly nested) tuple.
class Value {
 public:
  Value() : Value(TensorValue()) {}
  explicit Value(TensorValue t)
      : tensor_(std::make_shared<const TensorValue>(std::move(t))) {}
  static Value Tuple(std::vector<Value> fields);

  bool is_tensor() const { return tensor_ != nullptr; }
  const TensorValue& tensor() const { return *tensor_; }
  const std::vector<Value>& fields() const { return fields_; }
  std::string ToString() const;

 private:
  std::shared_ptr<const TensorValue> tensor_;
  std::vector<Value> fields_;
};

// Same structure; tensors agree per TensorsAgree.
bool ValuesAgree(const Value& a, const Value& b, double rel_tol = 1e-6);

// Arguments of @main keyed by parameter name.
using Inputs = std::map<std::string, TensorValue>;

// Draws a value for every parameter of `main` with RandomValue.
absl::StatusOr<Inputs> RandomInputs(const GlobalFunction& main, uint64_t seed);
std::string InputsToString(const Inputs& inputs);

enum class Backend : uint8_t { kTree, kGraph, kVm };
inline constexpr std::array<Backend, 3> kAllBackends = {
    Backend::kTree, Backend::kGraph, Backend::kVm};
absl::string_view BackendName(Backend b);

// Executes @main of a well-typed module. kTree walks the expression tree,
// kGraph flattens @main with every call inlined into a tape of primitive
// instructions and runs the tape, kVm compiles every function to stack
// bytecode and interprets it. All element math goes through
// EvalElementwise. Failures are RuntimeError diagnostics.
absl::StatusOr<Value> RunBackend(const IrModule& m, const Inputs& inputs,
                                 Backend backend, const FaultSet& faults = {});

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_BACKENDS_H_
