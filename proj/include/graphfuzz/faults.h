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

#ifndef GRAPHFUZZ_FAULTS_H_
#define GRAPHFUZZ_FAULTS_H_

#include <array>
#include <bitset>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace graphfuzz {

// Deliberate defects that can be switched on in the bundled compiler.
// They exist so that campaigns have known bugs to find.
enum class BugId : uint8_t {
  kFoldUmod,        // fold_constant evaluates unsigned floor_mod as floor_divide
  kCseIgnoreOp,     // CSE keys ignore the operator of a primitive
  kInlineDropArg,   // inline binds the last parameter to the first argument
  kDceTupleUse,     // DCE does not see variables used as tuple fields
  kVmNegative,      // the vm backend compiles negative as copy
  kInferSqrtAbort,  // type inference asserts on sqrt of a non-float
};
inline constexpr int kNumBugs = 6;

struct BugInfo {
  BugId id;
  absl::string_view name;
  // Oracle expected to expose the bug: "O1", "O2" or "O3".
  absl::string_view oracle;
  absl::string_view summary;
};

const std::array<BugInfo, kNumBugs>& BugCatalog();
const BugInfo& InfoOf(BugId id);
// Fails with NotFound "UnknownBug: <name>".
absl::StatusOr<BugId> ParseBugId(absl::string_view name);

class FaultSet {
 public:
  FaultSet() = default;
  bool Has(BugId id) const { return bits_[static_cast<int>(id)]; }
  void Add(BugId id) { bits_.set(static_cast<int>(id)); }
  bool empty() const { return bits_.none(); }
  std::vector<std::string> Names() const;
  friend bool operator==(const FaultSet& a, const FaultSet& b) = default;

 private:
  std::bitset<kNumBugs> bits_;
};

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_FAULTS_H_
