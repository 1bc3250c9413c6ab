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


#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "graphfuzz/opset.h"
#include "graphfuzz/rng.h"

namespace graphfuzz {
namespace {

const std::vector<std::string> kBinaryNames = {
    "add",         "subtract",    "multiply",    "divide",
    "power",       "mod",         "floor_mod",   "floor_divide",
    "logical_and", "logical_or",  "logical_xor", "bitwise_and",
    "bitwise_or",  "equal",       "not_equal",   "less",
    "lessequal",   "greater",     "greaterequal", "maximum",
    "minimum",     "right_shift", "left_shift"};

const std::vector<std::string> kUnaryNames = {
    "log",   "log2",    "log10",       "tan",        "tanh",      "cos",
    "cosh",  "sin",     "sinh",        "acos",       "acosh",     "asin",
    "asinh", "atan",    "atanh",       "exp",        "erf",       "sqrt",
    "rsqrt", "sigmoid", "floor",       "ceil",       "trunc",     "round",
    "abs",   "sign",    "negative",    "logical_not", "bitwise_not",
    "zeros_like", "ones_like", "copy", "isnan",      "isfinite",  "isinf"};

TEST(RegistryTest, CountsAndOrder) {
  const std::vector<OperatorSpec>& reg = Registry();
  ASSERT_EQ(reg.size(), 58u);
  ASSERT_EQ(kBinaryNames.size(), 23u);
  ASSERT_EQ(kUnaryNames.size(), 35u);
  int binary = 0, unary = 0;
  for (const OperatorSpec& s : reg) {
    if (s.arity == 2) {
      EXPECT_EQ(s.name, kBinaryNames[binary++]);
    } else {
      ASSERT_EQ(s.arity, 1);
      EXPECT_EQ(s.name, kUnaryNames[unary++]);
    }
    EXPECT_FALSE(s.AdmissibleDTypes().empty()) << s.name;
  }
  EXPECT_EQ(binary, 23);
  EXPECT_EQ(unary, 35);
}

TEST(RegistryTest, LookupAcceptsBothSpellings) {
  absl::StatusOr<const OperatorSpec*> rsqrt = LookupOperator("Rsqrt");
  ASSERT_TRUE(rsqrt.ok());
  EXPECT_EQ((*rsqrt)->arity, 1);
  absl::StatusOr<const OperatorSpec*> fm = LookupOperator("Floor Mod");
  ASSERT_TRUE(fm.ok());
  EXPECT_EQ((*fm)->code, OpCode::kFloorMod);
  EXPECT_EQ(*LookupOperator("floor_mod"), *fm);
  EXPECT_FALSE(LookupOperator("conv2d").ok());
}

TEST(AdmissibilityTest, Examples) {
  EXPECT_TRUE(*DTypeAdmissible("Sqrt", DType::kFloat32));
  EXPECT_FALSE(*DTypeAdmissible("Sqrt", DType::kInt16));
  EXPECT_TRUE(*DTypeAdmissible("Add", DType::kInt64));
  EXPECT_FALSE(DTypeAdmissible("Nope", DType::kInt64).ok());
}

// The admissibility table written out independently by operator group.
std::set<DType> ExpectedAdmissible(const std::string& name) {
  static const std::set<std::string> float_only = {
      "log",   "log2",  "log10", "tan",     "tanh",  "cos",   "cosh",
      "sin",   "sinh",  "acos",  "acosh",   "asin",  "asinh", "atan",
      "atanh", "exp",   "erf",   "sqrt",    "rsqrt", "sigmoid", "floor",
      "ceil",  "trunc", "round", "isnan",   "isfinite", "isinf", "power"};
  static const std::set<std::string> bool_only = {
      "logical_and", "logical_or", "logical_xor", "logical_not"};
  static const std::set<std::string> int_only = {
      "bitwise_and", "bitwise_or", "bitwise_not", "right_shift",
      "left_shift"};
  std::set<DType> out;
  for (DType d : kAllDTypes) {
    bool ok;
    if (float_only.count(name)) {
      ok = IsFloat(d);
    } else if (bool_only.count(name)) {
      ok = IsBool(d);
    } else if (int_only.count(name)) {
      ok = IsInteger(d);
    } else if (name == "negative") {
      ok = IsSigned(d) || IsFloat(d);
    } else {
      ok = !IsBool(d);
    }
    if (ok) out.insert(d);
  }
  return out;
}

TEST(AdmissibilityTest, MatchesTable) {
  for (const OperatorSpec& s : Registry()) {
    std::vector<DType> got = s.AdmissibleDTypes();
    EXPECT_EQ(std::set<DType>(got.begin(), got.end()),
              ExpectedAdmissible(s.name))
        << s.name;
  }
}

TEST(ResultDTypeTest, PredicatesYieldBool) {
  const std::set<OpCode> predicates = {
      OpCode::kEqual,   OpCode::kNotEqual,     OpCode::kLess,
      OpCode::kLessEqual, OpCode::kGreater,    OpCode::kGreaterEqual,
      OpCode::kIsNan,   OpCode::kIsFinite,     OpCode::kIsInf};
  for (const OperatorSpec& s : Registry()) {
    for (DType d : s.AdmissibleDTypes()) {
      EXPECT_EQ(ResultDType(s.code, d),
                predicates.count(s.code) ? DType::kBool : d)
          << s.name;
    }
  }
}

TensorValue Ints(DType d, Shape shape, std::vector<int64_t> v) {
  return TensorValue::FromInts(d, std::move(shape), std::move(v));
}

TEST(EvalTest, Examples) {
  absl::StatusOr<TensorValue> sum =
      EvalBinary(OpCode::kAdd, Ints(DType::kInt32, {2}, {2, 3}),
                 Ints(DType::kInt32, {2}, {10, 10}));
  ASSERT_TRUE(sum.ok());
  EXPECT_EQ(sum->ints(), (std::vector<int64_t>{12, 13}));

  absl::StatusOr<TensorValue> fm =
      EvalBinary(OpCode::kFloorMod, Ints(DType::kUInt32, {}, {7}),
                 Ints(DType::kUInt32, {}, {0}));
  ASSERT_TRUE(fm.ok());
  EXPECT_EQ(fm->ints(), std::vector<int64_t>{0});

  absl::StatusOr<TensorValue> eq = EvalBinary(
      OpCode::kEqual, TensorValue::FromFloats(DType::kFloat32, {1}, {1.0}),
      TensorValue::FromFloats(DType::kFloat32, {1}, {2.0}));
  ASSERT_TRUE(eq.ok());
  EXPECT_EQ(eq->dtype(), DType::kBool);
  EXPECT_EQ(eq->ints(), std::vector<int64_t>{0});
}

TEST(EvalTest, BroadcastsAndRejects) {
  absl::StatusOr<TensorValue> r =
      EvalBinary(OpCode::kSubtract, Ints(DType::kInt8, {2, 1}, {10, 20}),
                 Ints(DType::kInt8, {3}, {1, 2, 3}));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->shape(), Shape({2, 3}));
  EXPECT_EQ(r->ints(), (std::vector<int64_t>{9, 8, 7, 19, 18, 17}));
  EXPECT_FALSE(EvalBinary(OpCode::kAdd, Ints(DType::kInt8, {2}, {1, 2}),
                          Ints(DType::kInt8, {3}, {1, 2, 3}))
                   .ok());
  EXPECT_FALSE(EvalBinary(OpCode::kAdd, Ints(DType::kInt8, {}, {1}),
                          Ints(DType::kInt16, {}, {1}))
                   .ok());
  EXPECT_FALSE(EvalUnary(OpCode::kSqrt, Ints(DType::kInt16, {}, {4})).ok());
  std::vector<TensorValue> three(3, Ints(DType::kInt8, {}, {1}));
  EXPECT_FALSE(EvalElementwise(OpCode::kAdd, three).ok());
}

// Test-side reference for the integer kernels: exact arithmetic in 128 bits
// followed by reduction modulo 2^width.
using i128 = __int128;

i128 Wrap(DType d, i128 v) {
  const int w = BitWidth(d);
  const i128 mod = i128{1} << w;
  v %= mod;
  if (v < 0) v += mod;
  if (IsSigned(d) && v >= mod / 2) v -= mod;
  return v;
}

i128 Value(DType d, int64_t stored) {
  if (IsUnsigned(d)) return static_cast<i128>(static_cast<uint64_t>(stored));
  return stored;
}

i128 FloorDiv(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::optional<i128> ReferenceInt(OpCode op, DType d, i128 a, i128 b) {
  const int w = BitWidth(d);
  const i128 s = ((b % w) + w) % w;
  switch (op) {
    case OpCode::kAdd:
      return Wrap(d, a + b);
    case OpCode::kSubtract:
      return Wrap(d, a - b);
    case OpCode::kMultiply:
      return Wrap(d, a * b);
    case OpCode::kDivide:
      return b == 0 ? 0 : Wrap(d, a / b);
    case OpCode::kMod:
      return b == 0 ? 0 : Wrap(d, a % b);
    case OpCode::kFloorDivide:
      return b == 0 ? 0 : Wrap(d, FloorDiv(a, b));
    case OpCode::kFloorMod:
      return b == 0 ? 0 : Wrap(d, a - FloorDiv(a, b) * b);
    case OpCode::kMaximum:
      return a < b ? b : a;
    case OpCode::kMinimum:
      return b < a ? b : a;
    case OpCode::kLeftShift:
      return Wrap(d, a * (i128{1} << s));
    case OpCode::kRightShift:
      return Wrap(d, FloorDiv(a, i128{1} << s));
    case OpCode::kLess:
      return a < b;
    case OpCode::kGreaterEqual:
      return a >= b;
    default:
      return std::nullopt;
  }
}

int64_t Extreme(DType d, Rng& rng) {
  const int w = BitWidth(d);
  const i128 lo = IsSigned(d) ? -(i128{1} << (w - 1)) : 0;
  const i128 hi = IsSigned(d) ? (i128{1} << (w - 1)) - 1 : (i128{1} << w) - 1;
  const i128 picks[] = {lo, lo + 1, -1, 0, 1, 2, 7, hi - 1, hi};
  i128 v = picks[rng.Below(9)];
  if (rng.Bernoulli(0.5)) v = static_cast<i128>(rng.Next());
  return static_cast<int64_t>(Wrap(d, v));
}

TEST(EvalTest, IntegerKernelsMatchWideReference) {
  Rng rng(2024);
  int checked = 0;
  for (const OperatorSpec& s : Registry()) {
    for (DType d : kAllDTypes) {
      if (!IsInteger(d) || !s.Admits(d) || s.arity != 2) continue;
      for (int i = 0; i < 2000; ++i) {
        const int64_t a = Extreme(d, rng), b = Extreme(d, rng);
        std::optional<i128> want =
            ReferenceInt(s.code, d, Value(d, a), Value(d, b));
        if (!want) break;
        Scalar got = EvalScalar(s.code, d, Scalar{a, 0}, Scalar{b, 0});
        const i128 got_v = Value(ResultDType(s.code, d), got.i);
        ASSERT_TRUE(got_v == *want)
            << s.name << " " << DTypeName(d) << " a=" << a << " b=" << b
            << " got " << got.i << " want " << static_cast<int64_t>(*want);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100000);
}

TEST(EvalTest, FrozenIntegerCorners) {
  auto eval = [](OpCode op, DType d, int64_t a, int64_t b) {
    return EvalScalar(op, d, Scalar{a, 0}, Scalar{b, 0}).i;
  };
  EXPECT_EQ(eval(OpCode::kFloorDivide, DType::kInt8, -128, -1), -128);
  EXPECT_EQ(eval(OpCode::kMod, DType::kInt32, -7, 3), -1);
  EXPECT_EQ(eval(OpCode::kFloorMod, DType::kInt32, -7, 3), 2);
  EXPECT_EQ(eval(OpCode::kFloorMod, DType::kUInt32, 7, 0), 0);
  EXPECT_EQ(eval(OpCode::kDivide, DType::kInt64, 5, 0), 0);
  EXPECT_EQ(eval(OpCode::kRightShift, DType::kInt32, -8, 33), -4);
  EXPECT_EQ(eval(OpCode::kLeftShift, DType::kUInt8, 1, 9), 2);
  EXPECT_EQ(eval(OpCode::kAbs, DType::kInt16, -32768, 0), -32768);
  EXPECT_EQ(eval(OpCode::kNegative, DType::kInt8, -128, 0), -128);
  EXPECT_EQ(eval(OpCode::kBitwiseNot, DType::kUInt16, 0, 0), 65535);
  EXPECT_EQ(eval(OpCode::kSign, DType::kUInt8, 200, 0), 1);
}

TEST(EvalTest, FloatKernelsFollowIeee) {
  auto eval = [](OpCode op, double a, double b = 0) {
    return EvalScalar(op, DType::kFloat64, Scalar{0, a}, Scalar{0, b}).f;
  };
  EXPECT_TRUE(std::isnan(eval(OpCode::kAcos, 3.0)));
  EXPECT_EQ(eval(OpCode::kDivide, 1.0, 0.0),
            std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(eval(OpCode::kMaximum, NAN, 1.0)));
  EXPECT_EQ(eval(OpCode::kFloorMod, -7.0, 3.0), 2.0);
  EXPECT_EQ(eval(OpCode::kRound, 2.5), 3.0);
  EXPECT_EQ(eval(OpCode::kSigmoid, 0.0), 0.5);
  EXPECT_EQ(EvalScalar(OpCode::kFloor, DType::kFloat32, Scalar{0, 1.7}).f,
            1.0);
  EXPECT_EQ(EvalScalar(OpCode::kIsInf, DType::kFloat32, Scalar{0, INFINITY}).i,
            1);
}

TEST(EvalTest, TotalOnRandomScalars) {
  Rng rng(99);
  for (const OperatorSpec& s : Registry()) {
    for (DType d : s.AdmissibleDTypes()) {
      const DType rd = ResultDType(s.code, d);
      for (int i = 0; i < 100000; ++i) {
        Scalar a, b;
        if (IsFloat(d)) {
          a.f = (rng.UniformDouble() - 0.5) * 64;
          b.f = (rng.UniformDouble() - 0.5) * 64;
        } else {
          a.i = CanonicalizeInt(d, rng.Next());
          b.i = CanonicalizeInt(d, rng.Next());
        }
        Scalar r = EvalScalar(s.code, d, a, b);
        if (!IsFloat(rd)) {
          ASSERT_EQ(r.i, CanonicalizeInt(rd, static_cast<uint64_t>(r.i)))
              << s.name;
        }
      }
    }
  }
}

}  // namespace
}  // namespace graphfuzz
