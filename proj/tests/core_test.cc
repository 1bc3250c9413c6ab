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
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "gtest/gtest.h"
#include "graphfuzz/dtype.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/tensor.h"

namespace graphfuzz {
namespace {

TEST(DTypeTest, ElevenTypesInFourClasses) {
  EXPECT_EQ(kAllDTypes.size(), 11u);
  std::map<DTypeClass, int> per_class;
  for (DType d : kAllDTypes) ++per_class[ClassOf(d)];
  EXPECT_EQ(per_class[DTypeClass::kSignedInt], 4);
  EXPECT_EQ(per_class[DTypeClass::kUnsignedInt], 4);
  EXPECT_EQ(per_class[DTypeClass::kFloat], 2);
  EXPECT_EQ(per_class[DTypeClass::kBool], 1);
}

TEST(DTypeTest, NamesRoundTrip) {
  for (DType d : kAllDTypes) {
    std::optional<DType> parsed = ParseDType(DTypeName(d));
    ASSERT_TRUE(parsed.has_value()) << DTypeName(d);
    EXPECT_EQ(*parsed, d);
  }
  EXPECT_EQ(DTypeName(DType::kUInt16), "uint16");
  EXPECT_FALSE(ParseDType("int128").has_value());
}

TEST(ShapeTest, ParseAndPrint) {
  EXPECT_EQ(Shape({2, 3}).ToString(), "(2,3)");
  EXPECT_EQ(Shape({4}).ToString(), "(4)");
  EXPECT_EQ(Shape{}.ToString(), "()");
  EXPECT_EQ(Shape{}.Volume(), 1);
  absl::StatusOr<Shape> s = ParseShape("(4,)");
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(*s, Shape({4}));
  EXPECT_FALSE(ParseShape("(0)").ok());
  EXPECT_FALSE(ParseShape("2,3").ok());
}

TEST(BroadcastTest, Examples) {
  EXPECT_EQ(*BroadcastShapes({2, 3}, {2, 3}), Shape({2, 3}));
  EXPECT_EQ(*BroadcastShapes({1, 2}, {3, 1}), Shape({3, 2}));
  absl::StatusOr<Shape> bad = BroadcastShapes({2, 3}, {4});
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.status().message().find("ShapeMismatch"), std::string::npos);
}

// Independent oracle: a pair broadcasts to `out` iff every output index maps
// to a valid index of each operand by clamping stretched axes to 0, and
// every operand index is reached.
std::optional<Shape> BruteForceBroadcast(const Shape& a, const Shape& b) {
  const int rank = std::max(a.rank(), b.rank());
  std::vector<int64_t> out(rank);
  for (int i = 0; i < rank; ++i) {
    const int ia = i - (rank - a.rank());
    const int ib = i - (rank - b.rank());
    const int64_t ea = ia >= 0 ? a.dim(ia) : 1;
    const int64_t eb = ib >= 0 ? b.dim(ib) : 1;
    out[i] = std::max(ea, eb);
  }
  Shape result(out);
  // Enumerate output indices.
  std::vector<int64_t> idx(rank, 0);
  for (int64_t n = 0; n < result.Volume(); ++n) {
    int64_t rem = n;
    for (int i = rank - 1; i >= 0; --i) {
      idx[i] = rem % out[i];
      rem /= out[i];
    }
    for (const Shape* s : {&a, &b}) {
      for (int i = 0; i < s->rank(); ++i) {
        const int64_t o = idx[i + rank - s->rank()];
        const int64_t extent = s->dim(i);
        if (extent != 1 && o >= extent) return std::nullopt;
      }
    }
  }
  return result;
}

std::vector<Shape> AllSmallShapes() {
  std::vector<Shape> shapes = {Shape{}};
  for (int rank = 1; rank <= 3; ++rank) {
    std::vector<int64_t> dims(rank, 1);
    while (true) {
      shapes.push_back(Shape(dims));
      int i = rank - 1;
      while (i >= 0 && dims[i] == 4) dims[i--] = 1;
      if (i < 0) break;
      ++dims[i];
    }
  }
  return shapes;
}

TEST(BroadcastTest, AgreesWithBruteForceOnSmallSpaceAndCommutes) {
  const std::vector<Shape> shapes = AllSmallShapes();
  ASSERT_EQ(shapes.size(), 1u + 4 + 16 + 64);
  for (const Shape& a : shapes) {
    for (const Shape& b : shapes) {
      absl::StatusOr<Shape> got = BroadcastShapes(a, b);
      absl::StatusOr<Shape> swapped = BroadcastShapes(b, a);
      std::optional<Shape> want = BruteForceBroadcast(a, b);
      ASSERT_EQ(got.ok(), want.has_value())
          << a.ToString() << " x " << b.ToString();
      ASSERT_EQ(got.ok(), swapped.ok());
      if (got.ok()) {
        EXPECT_EQ(*got, *want);
        EXPECT_EQ(*got, *swapped);
      }
    }
  }
}

TEST(TensorTest, CanonicalStorage) {
  EXPECT_EQ(CanonicalizeInt(DType::kInt8, 0xff), -1);
  EXPECT_EQ(CanonicalizeInt(DType::kUInt8, 0x1ff), 255);
  EXPECT_EQ(CanonicalizeInt(DType::kBool, 2), 1);
  EXPECT_EQ(CanonicalizeFloat(DType::kFloat32, 0.1), static_cast<float>(0.1));
  EXPECT_TRUE(std::isnan(CanonicalizeFloat(DType::kFloat64, std::nan("7"))));
}

TEST(TensorTest, DataStringRoundTrips) {
  TensorValue f = TensorValue::FromFloats(
      DType::kFloat64, Shape({4}),
      {0.25, -2.5, std::numeric_limits<double>::infinity(),
       std::numeric_limits<double>::quiet_NaN()});
  EXPECT_EQ(f.DataString(), "[0.25,-2.5,inf,nan]");
  absl::StatusOr<TensorValue> back =
      ParseTensorData(DType::kFloat64, Shape({4}), f.DataString());
  ASSERT_TRUE(back.ok());
  EXPECT_TRUE(back->Identical(f));

  TensorValue u = TensorValue::FromInts(DType::kUInt64, Shape({2}),
                                        {-1, 5});
  absl::StatusOr<TensorValue> uback =
      ParseTensorData(DType::kUInt64, Shape({2}), u.DataString());
  ASSERT_TRUE(uback.ok());
  EXPECT_TRUE(uback->Identical(u));
  EXPECT_EQ(u.DataString(), "[18446744073709551615,5]");
}

TEST(TensorTest, AgreementRules) {
  auto f = [](double v) {
    return TensorValue::FromFloats(DType::kFloat32, Shape{}, {v});
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(TensorsAgree(f(nan), f(nan)));
  EXPECT_FALSE(TensorsAgree(f(nan), f(1.0)));
  EXPECT_TRUE(TensorsAgree(f(1.0), f(1.0 + 1e-7)));
  EXPECT_FALSE(TensorsAgree(f(1.0), f(1.0 + 1e-5)));
  EXPECT_TRUE(TensorsAgree(f(INFINITY), f(INFINITY)));
  EXPECT_FALSE(TensorsAgree(f(INFINITY), f(-INFINITY)));
  TensorValue i1 = TensorValue::FromInts(DType::kInt32, Shape{}, {3});
  TensorValue i2 = TensorValue::FromInts(DType::kInt64, Shape{}, {3});
  EXPECT_FALSE(TensorsAgree(i1, i2));
  EXPECT_FALSE(TensorsAgree(
      i1, TensorValue::FromInts(DType::kInt32, Shape({1}), {3})));
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.Next(), b.Next());
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_NE(DeriveSeed(0, 1), DeriveSeed(1, 0));
}

TEST(RngTest, DrawHelpersStayInRange) {
  Rng rng(7);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const int64_t v = rng.Uniform(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    ++hist[v + 2];
    const double d = rng.UniformDouble();
    ASSERT_GE(d, 0.0);
    ASSERT_LT(d, 1.0);
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  std::vector<double> weights = {0, 1, 0, 3};
  int ones = 0;
  for (int i = 0; i < 4000; ++i) {
    const size_t k = rng.Weighted(weights);
    ASSERT_TRUE(k == 1 || k == 3);
    ones += k == 1;
  }
  EXPECT_NEAR(ones, 1000, 120);
}

}  // namespace
}  // namespace graphfuzz
