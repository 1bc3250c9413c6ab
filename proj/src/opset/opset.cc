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

#include "graphfuzz/opset.h"

#include <cmath>
#include <limits>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace graphfuzz {
namespace {

constexpr uint16_t kSignedMask = 0x00F;
constexpr uint16_t kUnsignedMask = 0x0F0;
constexpr uint16_t kFloatMask = 0x300;
constexpr uint16_t kBoolMask = 0x400;
constexpr uint16_t kIntMask = kSignedMask | kUnsignedMask;
constexpr uint16_t kNumericMask = kIntMask | kFloatMask;

int DTypeIndex(DType d) { return static_cast<int>(d); }

struct RawSpec {
  OpCode code;
  absl::string_view display_name;
  int arity;
  uint16_t mask;
  ResultRule rule;
  bool commutative;
};

constexpr ResultRule kSame = ResultRule::kSameAsOperand;
constexpr ResultRule kBoolResult = ResultRule::kBool;

// Registry order follows the operator pool listing.
constexpr RawSpec kRawSpecs[] = {
    {OpCode::kAdd, "Add", 2, kNumericMask, kSame, true},
    {OpCode::kSubtract, "Subtract", 2, kNumericMask, kSame, false},
    {OpCode::kMultiply, "Multiply", 2, kNumericMask, kSame, true},
    {OpCode::kDivide, "Divide", 2, kNumericMask, kSame, false},
    {OpCode::kPower, "Power", 2, kFloatMask, kSame, false},
    {OpCode::kMod, "Mod", 2, kNumericMask, kSame, false},
    {OpCode::kFloorMod, "Floor Mod", 2, kNumericMask, kSame, false},
    {OpCode::kFloorDivide, "Floor Divide", 2, kNumericMask, kSame, false},
    {OpCode::kLogicalAnd, "Logical And", 2, kBoolMask, kSame, true},
    {OpCode::kLogicalOr, "Logical Or", 2, kBoolMask, kSame, true},
    {OpCode::kLogicalXor, "Logical Xor", 2, kBoolMask, kSame, true},
    {OpCode::kBitwiseAnd, "Bitwise And", 2, kIntMask, kSame, true},
    {OpCode::kBitwiseOr, "Bitwise Or", 2, kIntMask, kSame, true},
    {OpCode::kEqual, "Equal", 2, kNumericMask, kBoolResult, true},
    {OpCode::kNotEqual, "Not Equal", 2, kNumericMask, kBoolResult, true},
    {OpCode::kLess, "Less", 2, kNumericMask, kBoolResult, false},
    {OpCode::kLessEqual, "LessEqual", 2, kNumericMask, kBoolResult, false},
    {OpCode::kGreater, "Greater", 2, kNumericMask, kBoolResult, false},
    {OpCode::kGreaterEqual, "GreaterEqual", 2, kNumericMask, kBoolResult,
     false},
    {OpCode::kMaximum, "Maximum", 2, kNumericMask, kSame, false},
    {OpCode::kMinimum, "Minimum", 2, kNumericMask, kSame, false},
    {OpCode::kRightShift, "Right Shift", 2, kIntMask, kSame, false},
    {OpCode::kLeftShift, "Left Shift", 2, kIntMask, kSame, false},
    {OpCode::kLog, "Log", 1, kFloatMask, kSame, false},
    {OpCode::kLog2, "Log2", 1, kFloatMask, kSame, false},
    {OpCode::kLog10, "Log10", 1, kFloatMask, kSame, false},
    {OpCode::kTan, "Tan", 1, kFloatMask, kSame, false},
    {OpCode::kTanh, "Tanh", 1, kFloatMask, kSame, false},
    {OpCode::kCos, "Cos", 1, kFloatMask, kSame, false},
    {OpCode::kCosh, "Cosh", 1, kFloatMask, kSame, false},
    {OpCode::kSin, "Sin", 1, kFloatMask, kSame, false},
    {OpCode::kSinh, "Sinh", 1, kFloatMask, kSame, false},
    {OpCode::kAcos, "Acos", 1, kFloatMask, kSame, false},
    {OpCode::kAcosh, "Acosh", 1, kFloatMask, kSame, false},
    {OpCode::kAsin, "Asin", 1, kFloatMask, kSame, false},
    {OpCode::kAsinh, "Asinh", 1, kFloatMask, kSame, false},
    {OpCode::kAtan, "Atan", 1, kFloatMask, kSame, false},
    {OpCode::kAtanh, "Atanh", 1, kFloatMask, kSame, false},
    {OpCode::kExp, "Exp", 1, kFloatMask, kSame, false},
    {OpCode::kErf, "Erf", 1, kFloatMask, kSame, false},
    {OpCode::kSqrt, "Sqrt", 1, kFloatMask, kSame, false},
    {OpCode::kRsqrt, "Rsqrt", 1, kFloatMask, kSame, false},
    {OpCode::kSigmoid, "Sigmoid", 1, kFloatMask, kSame, false},
    {OpCode::kFloor, "Floor", 1, kFloatMask, kSame, false},
    {OpCode::kCeil, "Ceil", 1, kFloatMask, kSame, false},
    {OpCode::kTrunc, "Trunc", 1, kFloatMask, kSame, false},
    {OpCode::kRound, "Round", 1, kFloatMask, kSame, false},
    {OpCode::kAbs, "Abs", 1, kNumericMask, kSame, false},
    {OpCode::kSign, "Sign", 1, kNumericMask, kSame, false},
    {OpCode::kNegative, "Negative", 1, kSignedMask | kFloatMask, kSame, false},
    {OpCode::kLogicalNot, "Logical not", 1, kBoolMask, kSame, false},
    {OpCode::kBitwiseNot, "Bitwise not", 1, kIntMask, kSame, false},
    {OpCode::kZerosLike, "Zeros Like", 1, kNumericMask, kSame, false},
    {OpCode::kOnesLike, "Ones Like", 1, kNumericMask, kSame, false},
    {OpCode::kCopy, "Copy", 1, kNumericMask, kSame, false},
    {OpCode::kIsNan, "isNan", 1, kFloatMask, kBoolResult, false},
    {OpCode::kIsFinite, "isFinite", 1, kFloatMask, kBoolResult, false},
    {OpCode::kIsInf, "isInf", 1, kFloatMask, kBoolResult, false},
};

static_assert(sizeof(kRawSpecs) / sizeof(kRawSpecs[0]) == kNumOperators);

std::vector<OperatorSpec> BuildRegistry() {
  std::vector<OperatorSpec> specs;
  specs.reserve(kNumOperators);
  for (const RawSpec& raw : kRawSpecs) {
    specs.push_back(OperatorSpec{raw.code, raw.display_name,
                                 NormalizeOperatorName(raw.display_name),
                                 raw.arity, raw.mask, raw.rule,
                                 raw.commutative});
  }
  return specs;
}

// ---- integer kernels -------------------------------------------------------

uint64_t U(int64_t v) { return static_cast<uint64_t>(v); }

bool IntLess(DType d, int64_t a, int64_t b) {
  return IsUnsigned(d) ? U(a) < U(b) : a < b;
}

int64_t IntDiv(DType d, int64_t a, int64_t b, bool floor) {
  if (b == 0) return 0;
  if (IsUnsigned(d)) return CanonicalizeInt(d, U(a) / U(b));
  if (b == -1) return CanonicalizeInt(d, 0 - U(a));
  int64_t q = a / b;
  if (floor && (a % b != 0) && ((a < 0) != (b < 0))) --q;
  return CanonicalizeInt(d, U(q));
}

int64_t IntRem(DType d, int64_t a, int64_t b, bool floor) {
  if (b == 0) return 0;
  if (IsUnsigned(d)) return CanonicalizeInt(d, U(a) % U(b));
  if (b == -1) return 0;
  int64_t r = a % b;
  if (floor && r != 0 && ((r < 0) != (b < 0))) r += b;
  return CanonicalizeInt(d, U(r));
}

int ShiftAmount(DType d, int64_t b) {
  const int w = BitWidth(d);
  if (IsUnsigned(d)) return static_cast<int>(U(b) % static_cast<uint64_t>(w));
  return static_cast<int>(((b % w) + w) % w);
}

Scalar IntKernel(OpCode op, DType d, int64_t a, int64_t b) {
  auto canon = [d](uint64_t bits) { return Scalar{CanonicalizeInt(d, bits)}; };
  auto truth = [](bool v) { return Scalar{v ? 1 : 0}; };
  switch (op) {
    case OpCode::kAdd:
      return canon(U(a) + U(b));
    case OpCode::kSubtract:
      return canon(U(a) - U(b));
    case OpCode::kMultiply:
      return canon(U(a) * U(b));
    case OpCode::kDivide:
      return Scalar{IntDiv(d, a, b, /*floor=*/false)};
    case OpCode::kFloorDivide:
      return Scalar{IntDiv(d, a, b, /*floor=*/true)};
    case OpCode::kMod:
      return Scalar{IntRem(d, a, b, /*floor=*/false)};
    case OpCode::kFloorMod:
      return Scalar{IntRem(d, a, b, /*floor=*/true)};
    case OpCode::kBitwiseAnd:
      return canon(U(a) & U(b));
    case OpCode::kBitwiseOr:
      return canon(U(a) | U(b));
    case OpCode::kBitwiseNot:
      return canon(~U(a));
    case OpCode::kEqual:
      return truth(a == b);
    case OpCode::kNotEqual:
      return truth(a != b);
    case OpCode::kLess:
      return truth(IntLess(d, a, b));
    case OpCode::kLessEqual:
      return truth(!IntLess(d, b, a));
    case OpCode::kGreater:
      return truth(IntLess(d, b, a));
    case OpCode::kGreaterEqual:
      return truth(!IntLess(d, a, b));
    case OpCode::kMaximum:
      return Scalar{IntLess(d, a, b) ? b : a};
    case OpCode::kMinimum:
      return Scalar{IntLess(d, b, a) ? b : a};
    case OpCode::kLeftShift:
      return canon(U(a) << ShiftAmount(d, b));
    case OpCode::kRightShift: {
      const int s = ShiftAmount(d, b);
      return IsUnsigned(d) ? canon(U(a) >> s) : canon(U(a >> s));
    }
    case OpCode::kAbs:
      if (IsUnsigned(d) || a >= 0) return Scalar{a};
      return canon(0 - U(a));
    case OpCode::kSign:
      if (IsUnsigned(d)) return Scalar{a != 0 ? 1 : 0};
      return Scalar{(a > 0) - (a < 0)};
    case OpCode::kNegative:
      return canon(0 - U(a));
    case OpCode::kZerosLike:
      return Scalar{0};
    case OpCode::kOnesLike:
      return Scalar{1};
    case OpCode::kCopy:
      return Scalar{a};
    default:
      return Scalar{0};
  }
}

Scalar BoolKernel(OpCode op, int64_t a, int64_t b) {
  const bool x = a != 0;
  const bool y = b != 0;
  switch (op) {
    case OpCode::kLogicalAnd:
      return Scalar{x && y};
    case OpCode::kLogicalOr:
      return Scalar{x || y};
    case OpCode::kLogicalXor:
      return Scalar{x != y};
    case OpCode::kLogicalNot:
      return Scalar{!x};
    default:
      return Scalar{0};
  }
}

// ---- float kernels ---------------------------------------------------------

Scalar FloatKernel(OpCode op, DType d, double a, double b) {
  auto num = [d](double v) {
    Scalar s;
    s.f = CanonicalizeFloat(d, v);
    return s;
  };
  auto truth = [](bool v) { return Scalar{v ? 1 : 0}; };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (op) {
    case OpCode::kAdd:
      return num(a + b);
    case OpCode::kSubtract:
      return num(a - b);
    case OpCode::kMultiply:
      return num(a * b);
    case OpCode::kDivide:
      return num(a / b);
    case OpCode::kPower:
      return num(std::pow(a, b));
    case OpCode::kMod:
      return num(std::fmod(a, b));
    case OpCode::kFloorMod:
      return num(a - std::floor(a / b) * b);
    case OpCode::kFloorDivide:
      return num(std::floor(a / b));
    case OpCode::kEqual:
      return truth(a == b);
    case OpCode::kNotEqual:
      return truth(a != b);
    case OpCode::kLess:
      return truth(a < b);
    case OpCode::kLessEqual:
      return truth(a <= b);
    case OpCode::kGreater:
      return truth(a > b);
    case OpCode::kGreaterEqual:
      return truth(a >= b);
    case OpCode::kMaximum:
      if (std::isnan(a) || std::isnan(b)) return num(nan);
      return num(a < b ? b : a);
    case OpCode::kMinimum:
      if (std::isnan(a) || std::isnan(b)) return num(nan);
      return num(b < a ? b : a);
    case OpCode::kLog:
      return num(std::log(a));
    case OpCode::kLog2:
      return num(std::log2(a));
    case OpCode::kLog10:
      return num(std::log10(a));
    case OpCode::kTan:
      return num(std::tan(a));
    case OpCode::kTanh:
      return num(std::tanh(a));
    case OpCode::kCos:
      return num(std::cos(a));
    case OpCode::kCosh:
      return num(std::cosh(a));
    case OpCode::kSin:
      return num(std::sin(a));
    case OpCode::kSinh:
      return num(std::sinh(a));
    case OpCode::kAcos:
      return num(std::acos(a));
    case OpCode::kAcosh:
      return num(std::acosh(a));
    case OpCode::kAsin:
      return num(std::asin(a));
    case OpCode::kAsinh:
      return num(std::asinh(a));
    case OpCode::kAtan:
      return num(std::atan(a));
    case OpCode::kAtanh:
      return num(std::atanh(a));
    case OpCode::kExp:
      return num(std::exp(a));
    case OpCode::kErf:
      return num(std::erf(a));
    case OpCode::kSqrt:
      return num(std::sqrt(a));
    case OpCode::kRsqrt:
      return num(1.0 / std::sqrt(a));
    case OpCode::kSigmoid:
      return num(1.0 / (1.0 + std::exp(-a)));
    case OpCode::kFloor:
      return num(std::floor(a));
    case OpCode::kCeil:
      return num(std::ceil(a));
    case OpCode::kTrunc:
      return num(std::trunc(a));
    case OpCode::kRound:
      return num(std::round(a));
    case OpCode::kAbs:
      return num(std::fabs(a));
    case OpCode::kSign:
      if (std::isnan(a)) return num(nan);
      return num(a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0));
    case OpCode::kNegative:
      return num(-a);
    case OpCode::kZerosLike:
      return num(0.0);
    case OpCode::kOnesLike:
      return num(1.0);
    case OpCode::kCopy:
      return num(a);
    case OpCode::kIsNan:
      return truth(std::isnan(a));
    case OpCode::kIsFinite:
      return truth(std::isfinite(a));
    case OpCode::kIsInf:
      return truth(std::isinf(a));
    default:
      return num(0.0);
  }
}

absl::Status CheckOperand(const OperatorSpec& spec, DType d) {
  if (!spec.Admits(d)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Inadmissible: ", spec.name, " does not accept ", DTypeName(d)));
  }
  return absl::OkStatus();
}

Scalar Load(const TensorValue& t, int64_t i) {
  Scalar s;
  if (t.is_float()) {
    s.f = t.floats()[i];
  } else {
    s.i = t.ints()[i];
  }
  return s;
}

void Store(TensorValue& t, int64_t i, Scalar s) {
  if (t.is_float()) {
    t.mutable_floats()[i] = s.f;
  } else {
    t.mutable_ints()[i] = s.i;
  }
}

}  // namespace

bool OperatorSpec::Admits(DType d) const {
  return (admissible_mask >> DTypeIndex(d)) & 1;
}

std::vector<DType> OperatorSpec::AdmissibleDTypes() const {
  std::vector<DType> out;
  for (DType d : kAllDTypes) {
    if (Admits(d)) out.push_back(d);
  }
  return out;
}

std::string NormalizeOperatorName(absl::string_view display_name) {
  std::string out = absl::AsciiStrToLower(display_name);
  for (char& c : out) {
    if (c == ' ') c = '_';
  }
  return out;
}

const std::vector<OperatorSpec>& Registry() {
  static const std::vector<OperatorSpec>* registry =
      new std::vector<OperatorSpec>(BuildRegistry());
  return *registry;
}

const OperatorSpec& SpecOf(OpCode op) {
  return Registry()[static_cast<size_t>(op)];
}

absl::string_view OpName(OpCode op) { return SpecOf(op).name; }

absl::StatusOr<const OperatorSpec*> LookupOperator(absl::string_view name) {
  const std::string normalized = NormalizeOperatorName(name);
  for (const OperatorSpec& spec : Registry()) {
    if (spec.name == normalized) return &spec;
  }
  return absl::NotFoundError(absl::StrCat("UnknownOperator: ", name));
}

absl::StatusOr<bool> DTypeAdmissible(absl::string_view op, DType d) {
  auto spec = LookupOperator(op);
  if (!spec.ok()) return spec.status();
  return (*spec)->Admits(d);
}

DType ResultDType(OpCode op, DType operand) {
  return SpecOf(op).result_rule == ResultRule::kBool ? DType::kBool : operand;
}

Scalar EvalScalar(OpCode op, DType operand, Scalar a, Scalar b) {
  switch (ClassOf(operand)) {
    case DTypeClass::kFloat:
      return FloatKernel(op, operand, a.f, b.f);
    case DTypeClass::kBool:
      return BoolKernel(op, a.i, b.i);
    default:
      return IntKernel(op, operand, a.i, b.i);
  }
}

absl::StatusOr<TensorValue> EvalUnary(OpCode op, const TensorValue& a) {
  const OperatorSpec& spec = SpecOf(op);
  if (spec.arity != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("ArityMismatch: ", spec.name, " expects 2 operands"));
  }
  if (absl::Status s = CheckOperand(spec, a.dtype()); !s.ok()) return s;
  TensorValue out(ResultDType(op, a.dtype()), a.shape());
  const int64_t n = a.size();
  for (int64_t i = 0; i < n; ++i) {
    Store(out, i, EvalScalar(op, a.dtype(), Load(a, i)));
  }
  return out;
}

absl::StatusOr<TensorValue> EvalBinary(OpCode op, const TensorValue& a,
                                       const TensorValue& b) {
  const OperatorSpec& spec = SpecOf(op);
  if (spec.arity != 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("ArityMismatch: ", spec.name, " expects 1 operand"));
  }
  if (a.dtype() != b.dtype()) {
    return absl::InvalidArgumentError(
        absl::StrCat("DtypeMismatch: ", spec.name, " got ",
                     DTypeName(a.dtype()), " and ", DTypeName(b.dtype())));
  }
  if (absl::Status s = CheckOperand(spec, a.dtype()); !s.ok()) return s;
  absl::StatusOr<Shape> shape = BroadcastShapes(a.shape(), b.shape());
  if (!shape.ok()) return shape.status();

  const DType d = a.dtype();
  TensorValue out(ResultDType(op, d), *shape);
  const int64_t n = out.size();
  if (a.shape() == b.shape()) {
    for (int64_t i = 0; i < n; ++i) {
      Store(out, i, EvalScalar(op, d, Load(a, i), Load(b, i)));
    }
    return out;
  }

  // Strides of each operand expressed in output coordinates; broadcast
  // dimensions get stride 0.
  const int rank = shape->rank();
  std::vector<int64_t> sa(rank, 0), sb(rank, 0);
  auto fill = [rank](const Shape& s, std::vector<int64_t>& strides) {
    int64_t stride = 1;
    for (int i = s.rank() - 1; i >= 0; --i) {
      const int oi = rank - s.rank() + i;
      strides[oi] = s.dim(i) == 1 ? 0 : stride;
      stride *= s.dim(i);
    }
  };
  fill(a.shape(), sa);
  fill(b.shape(), sb);
  std::vector<int64_t> index(rank, 0);
  int64_t ia = 0, ib = 0;
  for (int64_t i = 0; i < n; ++i) {
    Store(out, i, EvalScalar(op, d, Load(a, ia), Load(b, ib)));
    for (int k = rank - 1; k >= 0; --k) {
      ++index[k];
      ia += sa[k];
      ib += sb[k];
      if (index[k] < shape->dim(k)) break;
      ia -= sa[k] * index[k];
      ib -= sb[k] * index[k];
      index[k] = 0;
    }
  }
  return out;
}

absl::StatusOr<TensorValue> EvalElementwise(
    OpCode op, std::span<const TensorValue> operands) {
  const OperatorSpec& spec = SpecOf(op);
  if (static_cast<int>(operands.size()) != spec.arity) {
    return absl::InvalidArgumentError(
        absl::StrCat("ArityMismatch: ", spec.name, " expects ", spec.arity,
                     " operands, got ", operands.size()));
  }
  if (spec.arity == 1) return EvalUnary(op, operands[0]);
  return EvalBinary(op, operands[0], operands[1]);
}

}  // namespace graphfuzz
