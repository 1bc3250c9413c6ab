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

#include "graphfuzz/dtype.h"

namespace graphfuzz {

DTypeClass ClassOf(DType dtype) {
  switch (dtype) {
    case DType::kInt64:
    case DType::kInt32:
    case DType::kInt16:
    case DType::kInt8:
      return DTypeClass::kSignedInt;
    case DType::kUInt64:
    case DType::kUInt32:
    case DType::kUInt16:
    case DType::kUInt8:
      return DTypeClass::kUnsignedInt;
    case DType::kFloat64:
    case DType::kFloat32:
      return DTypeClass::kFloat;
    case DType::kBool:
      return DTypeClass::kBool;
  }
  return DTypeClass::kBool;
}

int BitWidth(DType dtype) {
  switch (dtype) {
    case DType::kInt64:
    case DType::kUInt64:
    case DType::kFloat64:
      return 64;
    case DType::kInt32:
    case DType::kUInt32:
    case DType::kFloat32:
      return 32;
    case DType::kInt16:
    case DType::kUInt16:
      return 16;
    case DType::kInt8:
    case DType::kUInt8:
      return 8;
    case DType::kBool:
      return 1;
  }
  return 0;
}

absl::string_view DTypeName(DType dtype) {
  switch (dtype) {
    case DType::kInt64:
      return "int64";
    case DType::kInt32:
      return "int32";
    case DType::kInt16:
      return "int16";
    case DType::kInt8:
      return "int8";
    case DType::kUInt64:
      return "uint64";
    case DType::kUInt32:
      return "uint32";
    case DType::kUInt16:
      return "uint16";
    case DType::kUInt8:
      return "uint8";
    case DType::kFloat64:
      return "float64";
    case DType::kFloat32:
      return "float32";
    case DType::kBool:
      return "bool";
  }
  return "?";
}

std::optional<DType> ParseDType(absl::string_view name) {
  for (DType d : kAllDTypes) {
    if (DTypeName(d) == name) return d;
  }
  return std::nullopt;
}

}  // namespace graphfuzz
