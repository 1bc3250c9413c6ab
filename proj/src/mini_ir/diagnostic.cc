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

#include "graphfuzz/diagnostic.h"

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace graphfuzz {

absl::Status Diagnostic(absl::string_view kind, absl::string_view path,
                        absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("ERROR ", kind, " at ", path, ": ", message));
}

bool IsStructuredDiagnostic(const absl::Status& status) {
  return status.code() == absl::StatusCode::kInvalidArgument &&
         absl::StartsWith(status.message(), "ERROR ");
}

absl::string_view DiagnosticKind(const absl::Status& status) {
  if (!IsStructuredDiagnostic(status)) return "";
  absl::string_view rest = status.message().substr(6);
  return rest.substr(0, rest.find(' '));
}

absl::Status Abort(absl::string_view message) {
  return absl::InternalError(message);
}

}  // namespace graphfuzz
