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

#ifndef GRAPHFUZZ_DIAGNOSTIC_H_
#define GRAPHFUZZ_DIAGNOSTIC_H_

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace graphfuzz {

// A structured diagnostic is an InvalidArgument status whose message has
// the form "ERROR <kind> at <path>: <message>". Anything else escaping the
// compiler (internal errors, exceptions, empty messages) is treated as an
// uncontrolled abort.
absl::Status Diagnostic(absl::string_view kind, absl::string_view path,
                        absl::string_view message);
bool IsStructuredDiagnostic(const absl::Status& status);
// Returns the <kind> token of a structured diagnostic, or "" otherwise.
absl::string_view DiagnosticKind(const absl::Status& status);

// Simulates an assertion failure inside the compiler.
absl::Status Abort(absl::string_view message);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_DIAGNOSTIC_H_
