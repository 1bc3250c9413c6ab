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


#ifndef GRAPHFUZZ_ADAPTER_H_
#define GRAPHFUZZ_ADAPTER_H_

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "graphfuzz/backends.h"
#include "graphfuzz/ir.h"
#include "graphfuzz/oracles.h"
#include "graphfuzz/passes.h"
#include "json.hpp"

namespace graphfuzz {

// Wire form of values. A tensor is {"dtype", "shape", "data"} with data a
// flat row-major array; floats that are not finite travel as the strings
// "nan", "inf" and "-inf", bools as true/false. A tuple is {"tuple": [...]}.
nlohmann::json TensorToJson(const TensorValue& t);
absl::StatusOr<TensorValue> TensorFromJson(const nlohmann::json& j);
nlohmann::json ValueToJson(const Value& v);
absl::StatusOr<Value> ValueFromJson(const nlohmann::json& j);
nlohmann::json InputsToJson(const Inputs& inputs);
absl::StatusOr<Inputs> InputsFromJson(const nlohmann::json& j);

// What an adapter declared in its hello response. Empty op or dtype sets
// mean "everything".
struct AdapterCapability {
  std::string name;
  std::set<std::string> ops;
  std::set<std::string> dtypes;
  std::vector<std::string> pipelines;

  static absl::StatusOr<AdapterCapability> FromJson(const nlohmann::json& j);
  // True when every primitive and every tensor dtype in `m` is declared.
  bool Supports(const IrModule& m) const;
};

// Builds the "run" request for one module and input vector.
nlohmann::json RunRequest(const IrModule& typed, const Pipeline& pipeline,
                          const Inputs& inputs);

inline constexpr std::chrono::milliseconds kDefaultAdapterTimeout{10000};

// A child process speaking the JSON-lines adapter protocol on its standard
// streams. The command runs under /bin/sh -c. A crashed or hung child is
// killed and restarted on the next request.
class AdapterProcess : public ExternalBackend {
 public:
  explicit AdapterProcess(
      std::string command,
      std::chrono::milliseconds timeout = kDefaultAdapterTimeout);
  ~AdapterProcess() override;
  AdapterProcess(const AdapterProcess&) = delete;
  AdapterProcess& operator=(const AdapterProcess&) = delete;

  // Launches the child and performs the hello handshake.
  absl::Status Start();
  const AdapterCapability& capability() const { return capability_; }

  std::string name() const override;
  // nullopt when the module is outside the declared capability or the
  // adapter answered "unsupported". Protocol violations, timeouts and
  // process death fail with Unavailable("AdapterError: ...") and count as
  // adapter errors; an "error" answer fails with Unknown(trace).
  absl::StatusOr<std::optional<Value>> Run(const IrModule& typed,
                                           const Inputs& inputs) override;

  int adapter_errors() const { return adapter_errors_; }
  int unsupported() const { return unsupported_; }

 private:
  absl::StatusOr<nlohmann::json> Exchange(const nlohmann::json& request);
  absl::StatusOr<std::string> ReadLine();
  absl::Status AdapterError(const std::string& what);
  void Stop();

  std::string command_;
  std::chrono::milliseconds timeout_;
  AdapterCapability capability_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  int adapter_errors_ = 0;
  int unsupported_ = 0;
};

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_ADAPTER_H_
