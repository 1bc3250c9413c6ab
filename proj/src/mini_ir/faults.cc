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

#include "graphfuzz/faults.h"

#include "absl/strings/str_cat.h"

namespace graphfuzz {

const std::array<BugInfo, kNumBugs>& BugCatalog() {
  static const std::array<BugInfo, kNumBugs> kCatalog = {{
      {BugId::kFoldUmod, "fold-umod", "O2",
       "fold_constant folds unsigned floor_mod with the floor_divide kernel"},
      {BugId::kCseIgnoreOp, "cse-ignore-op", "O2",
       "eliminate_common_subexpr merges primitives that differ only in op"},
      {BugId::kInlineDropArg, "inline-drop-arg", "O2",
       "inline binds the last parameter to the first argument"},
      {BugId::kDceTupleUse, "dce-tuple-use", "O2",
       "dead_code_elimination drops bindings used only as tuple fields"},
      {BugId::kVmNegative, "vm-negative", "O3",
       "the vm backend compiles negative as copy"},
      {BugId::kInferSqrtAbort, "infer-sqrt-abort", "O1",
       "type inference aborts on sqrt of a non-float operand"},
  }};
  return kCatalog;
}

const BugInfo& InfoOf(BugId id) {
  return BugCatalog()[static_cast<int>(id)];
}

absl::StatusOr<BugId> ParseBugId(absl::string_view name) {
  for (const BugInfo& info : BugCatalog()) {
    if (info.name == name) return info.id;
  }
  return absl::NotFoundError(absl::StrCat("UnknownBug: ", name));
}

std::vector<std::string> FaultSet::Names() const {
  std::vector<std::string> out;
  for (const BugInfo& info : BugCatalog()) {
    if (Has(info.id)) out.emplace_back(info.name);
  }
  return out;
}

}  // namespace graphfuzz
