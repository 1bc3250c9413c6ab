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

#ifndef GRAPHFUZZ_DTYPE_H_
#define GRAPHFUZZ_DTYPE_H_

#include <array>
#include <cstdint>
#include <optional>

#include "absl/strings/string_view.h"

namespace graphfuzz {

enum class DType : uint8_t {
  kInt64,
  kInt32,
  kInt16,
  kInt8,
  kUInt64,
  kUInt32,
  kUInt16,
  kUInt8,
  kFloat64,
  kFloat32,
  kBool,
};

// The generator's data type set, in its canonical order.
inline constexpr std::array<DType, 11> kAllDTypes = {
    DType::kInt64,  DType::kInt32,   DType::kInt16,   DType::kInt8,
    DType::kUInt64, DType::kUInt32,  DType::kUInt16,  DType::kUInt8,
    DType::kFloat64, DType::kFloat32, DType::kBool,
};

enum class DTypeClass : uint8_t { kSignedInt, kUnsignedInt, kFloat, kBool };

DTypeClass ClassOf(DType dtype);
// Storage width in bits; bool reports 1.
int BitWidth(DType dtype);
absl::string_view DTypeName(DType dtype);
std::optional<DType> ParseDType(absl::string_view name);

inline bool IsSigned(DType d) { return ClassOf(d) == DTypeClass::kSignedInt; }
inline bool IsUnsigned(DType d) {
  return ClassOf(d) == DTypeClass::kUnsignedInt;
}
inline bool IsInteger(DType d) { return IsSigned(d) || IsUnsigned(d); }
inline bool IsFloat(DType d) { return ClassOf(d) == DTypeClass::kFloat; }
inline bool IsBool(DType d) { return d == DType::kBool; }

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_DTYPE_H_
