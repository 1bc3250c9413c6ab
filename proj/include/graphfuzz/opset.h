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

#ifndef GRAPHFUZZ_OPSET_H_
#define GRAPHFUZZ_OPSET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/dtype.h"
#include "graphfuzz/tensor.h"

namespace graphfuzz {

// Every operator in the pool, binary operators first, each group in
// registry order.
enum class OpCode : uint8_t {
  // Binary.
  kAdd,
  kSubtract,
  kMultiply,
  kDivide,
  kPower,
  kMod,
  kFloorMod,
  kFloorDivide,
  kLogicalAnd,
  kLogicalOr,
  kLogicalXor,
  kBitwiseAnd,
  kBitwiseOr,
  kEqual,
  kNotEqual,
  kLess,
  kLessEqual,
  kGreater,
  kGreaterEqual,
  kMaximum,
  kMinimum,
  kRightShift,
  kLeftShift,
  // Unary.
  kLog,
  kLog2,
  kLog10,
  kTan,
  kTanh,
  kCos,
  kCosh,
  kSin,
  kSinh,
  kAcos,
  kAcosh,
  kAsin,
  kAsinh,
  kAtan,
  kAtanh,
  kExp,
  kErf,
  kSqrt,
  kRsqrt,
  kSigmoid,
  kFloor,
  kCeil,
  kTrunc,
  kRound,
  kAbs,
  kSign,
  kNegative,
  kLogicalNot,
  kBitwiseNot,
  kZerosLike,
  kOnesLike,
  kCopy,
  kIsNan,
  kIsFinite,
  kIsInf,
};

inline constexpr int kNumOperators = 58;

enum class ResultRule : uint8_t { kSameAsOperand, kBool };

struct OperatorSpec {
  OpCode code;
  // Name as listed in the operator pool, e.g. "Floor Mod".
  absl::string_view display_name;
  // Serialized form: lowercase, spaces replaced by underscores.
  std::string name;
  int arity;
  // Bit i set iff kAllDTypes[i] is admissible.
  uint16_t admissible_mask;
  ResultRule result_rule;
  // Operand order never changes the result bit pattern.
  bool commutative;

  bool Admits(DType d) const;
  std::vector<DType> AdmissibleDTypes() const;
};

// All 58 specs in registry order; immutable after first use.
const std::vector<OperatorSpec>& Registry();
const OperatorSpec& SpecOf(OpCode op);
absl::string_view OpName(OpCode op);

// Accepts either the display name or the normalized name.
absl::StatusOr<const OperatorSpec*> LookupOperator(absl::string_view name);
std::string NormalizeOperatorName(absl::string_view display_name);

absl::StatusOr<bool> DTypeAdmissible(absl::string_view op, DType d);
inline bool Admits(OpCode op, DType d) { return SpecOf(op).Admits(d); }
DType ResultDType(OpCode op, DType operand);

// Single-element payload used by the kernel table.
struct Scalar {
  int64_t i = 0;
  double f = 0.0;
};

// The kernel table: `operand` is the operands' dtype, the result is encoded
// for ResultDType(op, operand). Total on every (op, dtype) pair; integer
// arithmetic wraps, x/0 and x%0 are 0, shift amounts are taken modulo the
// bit width.
Scalar EvalScalar(OpCode op, DType operand, Scalar a, Scalar b = {});

// Reference elementwise evaluation with broadcasting. Fails with
// ArityMismatch, DtypeMismatch, Inadmissible, or ShapeMismatch.
absl::StatusOr<TensorValue> EvalUnary(OpCode op, const TensorValue& a);
absl::StatusOr<TensorValue> EvalBinary(OpCode op, const TensorValue& a,
                                       const TensorValue& b);
absl::StatusOr<TensorValue> EvalElementwise(
    OpCode op, std::span<const TensorValue> operands);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_OPSET_H_
