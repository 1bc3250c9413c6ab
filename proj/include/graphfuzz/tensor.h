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

#ifndef GRAPHFUZZ_TENSOR_H_
#define GRAPHFUZZ_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "graphfuzz/dtype.h"

namespace graphfuzz {

// Ordered tensor extents. Rank 0 is a scalar.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<int64_t> dims) : dims_(std::move(dims)) {}
  Shape(std::initializer_list<int64_t> dims) : dims_(dims) {}

  int rank() const { return static_cast<int>(dims_.size()); }
  const std::vector<int64_t>& dims() const { return dims_; }
  int64_t dim(int i) const { return dims_[i]; }
  int64_t Volume() const;

  // "(2,3)", "(4)", "()".
  std::string ToString() const;

  friend bool operator==(const Shape& a, const Shape& b) = default;

 private:
  std::vector<int64_t> dims_;
};

// Parses the ToString() form; a trailing comma is accepted ("(4,)").
absl::StatusOr<Shape> ParseShape(absl::string_view text);

// Right-aligned broadcasting: aligned extents must match or one must be 1.
// Fails with InvalidArgument("ShapeMismatch: ...") otherwise.
absl::StatusOr<Shape> BroadcastShapes(const Shape& a, const Shape& b);

struct TensorType {
  DType dtype = DType::kFloat32;
  Shape shape;

  std::string ToString() const;
  friend bool operator==(const TensorType& a, const TensorType& b) = default;
};

// Canonical integer storage: signed values sign-extended to 64 bits,
// unsigned values zero-extended (uint64 kept as its bit pattern), bool 0/1.
int64_t CanonicalizeInt(DType dtype, uint64_t bits);
// Rounds through float for float32; identity for float64.
double CanonicalizeFloat(DType dtype, double v);

// Dense row-major tensor. Integer and bool dtypes use `ints()`, float
// dtypes use `floats()`; the other buffer is empty.
class TensorValue {
 public:
  TensorValue() : TensorValue(DType::kInt32, Shape{}) {}
  TensorValue(DType dtype, Shape shape);  // zero-filled

  static TensorValue FromInts(DType dtype, Shape shape,
                              std::vector<int64_t> values);
  static TensorValue FromFloats(DType dtype, Shape shape,
                                std::vector<double> values);
  static TensorValue Scalar(DType dtype, double v);

  DType dtype() const { return dtype_; }
  const Shape& shape() const { return shape_; }
  TensorType type() const { return TensorType{dtype_, shape_}; }
  int64_t size() const {
    return IsFloat(dtype_) ? static_cast<int64_t>(floats_.size())
                           : static_cast<int64_t>(ints_.size());
  }
  bool is_float() const { return IsFloat(dtype_); }

  const std::vector<int64_t>& ints() const { return ints_; }
  const std::vector<double>& floats() const { return floats_; }
  std::vector<int64_t>& mutable_ints() { return ints_; }
  std::vector<double>& mutable_floats() { return floats_; }

  // Element as double (exact for floats, converted for ints).
  double AsDouble(int64_t i) const;

  // Data only, e.g. "[1,2,3]". Floats use round-trip precision; NaN and
  // infinities print as nan / inf / -inf.
  std::string DataString() const;
  // Bitwise equality of dtype, shape, and data (NaN payloads included).
  bool Identical(const TensorValue& other) const;

 private:
  DType dtype_;
  Shape shape_;
  std::vector<int64_t> ints_;
  std::vector<double> floats_;
};

std::string FormatElement(DType dtype, int64_t int_value, double float_value);
// Parses a DataString() body for the given type.
absl::StatusOr<TensorValue> ParseTensorData(DType dtype, const Shape& shape,
                                            absl::string_view text);

// Comparison used by every differential oracle: same dtype and shape,
// integers and bools exact, floats within `rel_tol` relative error with
// NaN matching NaN.
bool TensorsAgree(const TensorValue& a, const TensorValue& b,
                  double rel_tol = 1e-6);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_TENSOR_H_
