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

#include "graphfuzz/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace graphfuzz {

int64_t Shape::Volume() const {
  int64_t v = 1;
  for (int64_t d : dims_) v *= d;
  return v;
}

std::string Shape::ToString() const {
  return absl::StrCat("(", absl::StrJoin(dims_, ","), ")");
}

absl::StatusOr<Shape> ParseShape(absl::string_view text) {
  absl::string_view s = absl::StripAsciiWhitespace(text);
  if (!absl::ConsumePrefix(&s, "(") || !absl::ConsumeSuffix(&s, ")")) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed shape '", text, "'"));
  }
  std::vector<int64_t> dims;
  for (absl::string_view part : absl::StrSplit(s, ',')) {
    part = absl::StripAsciiWhitespace(part);
    if (part.empty()) continue;
    int64_t d;
    if (!absl::SimpleAtoi(part, &d) || d < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad extent '", part, "' in shape '", text, "'"));
    }
    dims.push_back(d);
  }
  return Shape(std::move(dims));
}

absl::StatusOr<Shape> BroadcastShapes(const Shape& a, const Shape& b) {
  const int rank = std::max(a.rank(), b.rank());
  std::vector<int64_t> out(rank);
  for (int i = 0; i < rank; ++i) {
    const int ai = a.rank() - rank + i;
    const int bi = b.rank() - rank + i;
    const int64_t da = ai >= 0 ? a.dim(ai) : 1;
    const int64_t db = bi >= 0 ? b.dim(bi) : 1;
    if (da != db && da != 1 && db != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("ShapeMismatch: cannot broadcast ", a.ToString(),
                       " with ", b.ToString()));
    }
    out[i] = std::max(da, db);
  }
  return Shape(std::move(out));
}

std::string TensorType::ToString() const {
  return absl::StrCat("Tensor[", DTypeName(dtype), ", ", shape.ToString(),
                      "]");
}

int64_t CanonicalizeInt(DType dtype, uint64_t bits) {
  if (dtype == DType::kBool) return bits != 0 ? 1 : 0;
  const int width = BitWidth(dtype);
  if (width == 64) return static_cast<int64_t>(bits);
  const uint64_t mask = (uint64_t{1} << width) - 1;
  uint64_t v = bits & mask;
  if (IsSigned(dtype) && ((v >> (width - 1)) & 1)) v |= ~mask;
  return static_cast<int64_t>(v);
}

double CanonicalizeFloat(DType dtype, double v) {
  // A single NaN bit pattern keeps printing and bitwise comparison stable.
  if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
  if (dtype == DType::kFloat32) return static_cast<double>(static_cast<float>(v));
  return v;
}

TensorValue::TensorValue(DType dtype, Shape shape)
    : dtype_(dtype), shape_(std::move(shape)) {
  if (IsFloat(dtype_)) {
    floats_.assign(shape_.Volume(), 0.0);
  } else {
    ints_.assign(shape_.Volume(), 0);
  }
}

TensorValue TensorValue::FromInts(DType dtype, Shape shape,
                                  std::vector<int64_t> values) {
  TensorValue t(dtype, Shape{});
  t.shape_ = std::move(shape);
  t.ints_.clear();
  t.floats_.clear();
  if (IsFloat(dtype)) {
    t.floats_.reserve(values.size());
    for (int64_t v : values) {
      t.floats_.push_back(CanonicalizeFloat(dtype, static_cast<double>(v)));
    }
  } else {
    for (int64_t& v : values) v = CanonicalizeInt(dtype, static_cast<uint64_t>(v));
    t.ints_ = std::move(values);
  }
  return t;
}

TensorValue TensorValue::FromFloats(DType dtype, Shape shape,
                                    std::vector<double> values) {
  TensorValue t(dtype, Shape{});
  t.shape_ = std::move(shape);
  t.ints_.clear();
  t.floats_.clear();
  if (IsFloat(dtype)) {
    for (double& v : values) v = CanonicalizeFloat(dtype, v);
    t.floats_ = std::move(values);
  } else {
    t.ints_.reserve(values.size());
    for (double v : values) {
      t.ints_.push_back(CanonicalizeInt(
          dtype, static_cast<uint64_t>(static_cast<int64_t>(v))));
    }
  }
  return t;
}

TensorValue TensorValue::Scalar(DType dtype, double v) {
  return FromFloats(dtype, Shape{}, {v});
}

double TensorValue::AsDouble(int64_t i) const {
  if (is_float()) return floats_[i];
  if (dtype_ == DType::kUInt64) {
    return static_cast<double>(static_cast<uint64_t>(ints_[i]));
  }
  return static_cast<double>(ints_[i]);
}

std::string FormatElement(DType dtype, int64_t int_value, double float_value) {
  if (IsFloat(dtype)) {
    if (std::isnan(float_value)) return "nan";
    if (std::isinf(float_value)) return float_value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), dtype == DType::kFloat32 ? "%.9g" : "%.17g",
                  float_value);
    return buf;
  }
  if (dtype == DType::kBool) return int_value ? "true" : "false";
  if (dtype == DType::kUInt64) {
    return absl::StrCat(static_cast<uint64_t>(int_value));
  }
  return absl::StrCat(int_value);
}

std::string TensorValue::DataString() const {
  std::string out = "[";
  const int64_t n = size();
  for (int64_t i = 0; i < n; ++i) {
    if (i) out += ",";
    out += is_float() ? FormatElement(dtype_, 0, floats_[i])
                      : FormatElement(dtype_, ints_[i], 0.0);
  }
  out += "]";
  return out;
}

bool TensorValue::Identical(const TensorValue& other) const {
  if (dtype_ != other.dtype_ || shape_ != other.shape_) return false;
  if (ints_ != other.ints_) return false;
  if (floats_.size() != other.floats_.size()) return false;
  return floats_.empty() ||
         std::memcmp(floats_.data(), other.floats_.data(),
                     floats_.size() * sizeof(double)) == 0;
}

absl::StatusOr<TensorValue> ParseTensorData(DType dtype, const Shape& shape,
                                            absl::string_view text) {
  absl::string_view s = absl::StripAsciiWhitespace(text);
  if (!absl::ConsumePrefix(&s, "[") || !absl::ConsumeSuffix(&s, "]")) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed tensor data '", text, "'"));
  }
  std::vector<absl::string_view> parts;
  if (!absl::StripAsciiWhitespace(s).empty()) {
    parts = absl::StrSplit(s, ',');
  }
  if (static_cast<int64_t>(parts.size()) != shape.Volume()) {
    return absl::InvalidArgumentError(
        absl::StrCat("tensor data has ", parts.size(), " elements, shape ",
                     shape.ToString(), " needs ", shape.Volume()));
  }
  TensorValue t(dtype, shape);
  for (size_t i = 0; i < parts.size(); ++i) {
    absl::string_view p = absl::StripAsciiWhitespace(parts[i]);
    bool ok = true;
    if (IsFloat(dtype)) {
      double v;
      if (p == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (p == "inf") {
        v = std::numeric_limits<double>::infinity();
      } else if (p == "-inf") {
        v = -std::numeric_limits<double>::infinity();
      } else {
        ok = absl::SimpleAtod(p, &v);
      }
      if (ok) t.mutable_floats()[i] = CanonicalizeFloat(dtype, v);
    } else if (dtype == DType::kBool) {
      if (p == "true" || p == "1") {
        t.mutable_ints()[i] = 1;
      } else if (p == "false" || p == "0") {
        t.mutable_ints()[i] = 0;
      } else {
        ok = false;
      }
    } else if (IsUnsigned(dtype)) {
      uint64_t v;
      ok = absl::SimpleAtoi(p, &v);
      if (ok) t.mutable_ints()[i] = CanonicalizeInt(dtype, v);
    } else {
      int64_t v;
      ok = absl::SimpleAtoi(p, &v);
      if (ok) t.mutable_ints()[i] = CanonicalizeInt(dtype, static_cast<uint64_t>(v));
    }
    if (!ok) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad ", DTypeName(dtype), " element '", p, "'"));
    }
  }
  return t;
}

bool TensorsAgree(const TensorValue& a, const TensorValue& b, double rel_tol) {
  if (a.dtype() != b.dtype() || a.shape() != b.shape()) return false;
  if (!a.is_float()) return a.ints() == b.ints();
  const auto& x = a.floats();
  const auto& y = b.floats();
  for (size_t i = 0; i < x.size(); ++i) {
    const double u = x[i];
    const double v = y[i];
    if (std::isnan(u) || std::isnan(v)) {
      if (std::isnan(u) && std::isnan(v)) continue;
      return false;
    }
    if (u == v) continue;
    if (std::isinf(u) || std::isinf(v)) return false;
    const double scale = std::max(std::fabs(u), std::fabs(v));
    if (std::fabs(u - v) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace graphfuzz
