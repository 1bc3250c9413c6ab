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


#include "graphfuzz/adapter.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "graphfuzz/ir_text.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {
namespace {

using nlohmann::json;

json FloatToJson(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

absl::StatusOr<double> FloatFromJson(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return absl::InvalidArgumentError(
      absl::StrCat("bad float element ", j.dump()));
}

void CollectTypes(const IrTypePtr& t, std::set<std::string>& dtypes) {
  if (!t) return;
  if (t->kind == IrType::Kind::kTensor) {
    dtypes.insert(std::string(DTypeName(t->tensor.dtype)));
  }
  for (const IrTypePtr& f : t->fields) CollectTypes(f, dtypes);
  CollectTypes(t->result, dtypes);
}

void Collect(const ExprPtr& e, std::set<std::string>& ops,
             std::set<std::string>& dtypes) {
  if (!e) return;
  if (e->kind == ExprKind::kPrim) ops.insert(std::string(OpName(e->op)));
  if (e->kind == ExprKind::kConst) {
    dtypes.insert(std::string(DTypeName(e->value->dtype())));
  }
  CollectTypes(e->type, dtypes);
  for (const Param& p : e->params) CollectTypes(p.type, dtypes);
  for (const ExprPtr& a : e->args) Collect(a, ops, dtypes);
  Collect(e->lhs, ops, dtypes);
  Collect(e->body, ops, dtypes);
}

bool WriteAll(int fd, const std::string& data) {
  size_t done = 0;
  while (done < data.size()) {
    ssize_t n = write(fd, data.data() + done, data.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<size_t>(n);
  }
  return true;
}

}  // namespace

json TensorToJson(const TensorValue& t) {
  json data = json::array();
  for (int64_t i = 0; i < t.size(); ++i) {
    if (t.is_float()) {
      data.push_back(FloatToJson(t.floats()[i]));
    } else if (IsBool(t.dtype())) {
      data.push_back(t.ints()[i] != 0);
    } else if (t.dtype() == DType::kUInt64) {
      data.push_back(static_cast<uint64_t>(t.ints()[i]));
    } else {
      data.push_back(t.ints()[i]);
    }
  }
  return json{{"dtype", std::string(DTypeName(t.dtype()))},
              {"shape", t.shape().dims()},
              {"data", std::move(data)}};
}

absl::StatusOr<TensorValue> TensorFromJson(const json& j) {
  if (!j.is_object() || !j.contains("dtype") || !j.contains("shape") ||
      !j.contains("data") || !j["dtype"].is_string() ||
      !j["shape"].is_array() || !j["data"].is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed tensor ", j.dump()));
  }
  std::optional<DType> dtype = ParseDType(j["dtype"].get<std::string>());
  if (!dtype) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown dtype ", j["dtype"].dump()));
  }
  std::vector<int64_t> dims;
  for (const json& d : j["shape"]) {
    if (!d.is_number_integer() || d.get<int64_t>() < 0) {
      return absl::InvalidArgumentError("bad shape extent");
    }
    dims.push_back(d.get<int64_t>());
  }
  Shape shape(std::move(dims));
  const json& data = j["data"];
  if (static_cast<int64_t>(data.size()) != shape.Volume()) {
    return absl::InvalidArgumentError(
        absl::StrCat("data has ", data.size(), " elements, shape ",
                     shape.ToString(), " needs ", shape.Volume()));
  }
  if (IsFloat(*dtype)) {
    std::vector<double> values;
    for (const json& e : data) {
      GF_ASSIGN_OR_RETURN(double v, FloatFromJson(e));
      values.push_back(v);
    }
    return TensorValue::FromFloats(*dtype, shape, std::move(values));
  }
  std::vector<int64_t> values;
  for (const json& e : data) {
    if (e.is_boolean()) {
      values.push_back(e.get<bool>() ? 1 : 0);
    } else if (e.is_number_unsigned()) {
      values.push_back(static_cast<int64_t>(e.get<uint64_t>()));
    } else if (e.is_number_integer()) {
      values.push_back(e.get<int64_t>());
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("bad integer element ", e.dump()));
    }
  }
  return TensorValue::FromInts(*dtype, shape, std::move(values));
}

json ValueToJson(const Value& v) {
  if (v.is_tensor()) return TensorToJson(v.tensor());
  json fields = json::array();
  for (const Value& f : v.fields()) fields.push_back(ValueToJson(f));
  return json{{"tuple", std::move(fields)}};
}

absl::StatusOr<Value> ValueFromJson(const json& j) {
  if (j.is_object() && j.contains("tuple")) {
    if (!j["tuple"].is_array()) {
      return absl::InvalidArgumentError("tuple must be an array");
    }
    std::vector<Value> fields;
    for (const json& f : j["tuple"]) {
      GF_ASSIGN_OR_RETURN(Value v, ValueFromJson(f));
      fields.push_back(std::move(v));
    }
    return Value::Tuple(std::move(fields));
  }
  GF_ASSIGN_OR_RETURN(TensorValue t, TensorFromJson(j));
  return Value(std::move(t));
}

json InputsToJson(const Inputs& inputs) {
  json out = json::object();
  for (const auto& [name, value] : inputs) out[name] = TensorToJson(value);
  return out;
}

absl::StatusOr<Inputs> InputsFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("inputs: object");
  Inputs out;
  for (const auto& [name, value] : j.items()) {
    GF_ASSIGN_OR_RETURN(out[name], TensorFromJson(value));
  }
  return out;
}

absl::StatusOr<AdapterCapability> AdapterCapability::FromJson(const json& j) {
  if (!j.is_object() || j.value("status", "") != "ok") {
    return absl::InvalidArgumentError(
        absl::StrCat("hello answered with ", j.dump()));
  }
  AdapterCapability cap;
  cap.name = j.value("name", "adapter");
  try {
    if (j.contains("ops")) cap.ops = j["ops"].get<std::set<std::string>>();
    if (j.contains("dtypes")) {
      cap.dtypes = j["dtypes"].get<std::set<std::string>>();
    }
    if (j.contains("pipelines")) {
      cap.pipelines = j["pipelines"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& ex) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad capability list: ", ex.what()));
  }
  return cap;
}

bool AdapterCapability::Supports(const IrModule& m) const {
  std::set<std::string> used_ops, used_dtypes;
  for (const GlobalFunction& f : m.functions) {
    for (const Param& p : f.params) CollectTypes(p.type, used_dtypes);
    CollectTypes(f.ret_type, used_dtypes);
    Collect(f.body, used_ops, used_dtypes);
  }
  for (const std::string& op : used_ops) {
    if (!ops.empty() && !ops.count(op)) return false;
  }
  for (const std::string& d : used_dtypes) {
    if (!dtypes.empty() && !dtypes.count(d)) return false;
  }
  return true;
}

json RunRequest(const IrModule& typed, const Pipeline& pipeline,
                const Inputs& inputs) {
  json passes = json::array();
  for (PassId id : pipeline.passes) passes.push_back(std::string(PassName(id)));
  return json{{"cmd", "run"},
              {"ir_text", PrintModule(typed)},
              {"pipeline", std::move(passes)},
              {"inputs", InputsToJson(inputs)}};
}

AdapterProcess::AdapterProcess(std::string command,
                               std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

AdapterProcess::~AdapterProcess() { Stop(); }

std::string AdapterProcess::name() const {
  return capability_.name.empty() ? command_ : capability_.name;
}

void AdapterProcess::Stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

absl::Status AdapterProcess::Start() {
  Stop();
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) return absl::InternalError("pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    return absl::InternalError("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) return absl::InternalError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  signal(SIGPIPE, SIG_IGN);

  GF_ASSIGN_OR_RETURN(json hello, Exchange(json{{"cmd", "hello"}}));
  absl::StatusOr<AdapterCapability> cap = AdapterCapability::FromJson(hello);
  if (!cap.ok()) return AdapterError(std::string(cap.status().message()));
  capability_ = *std::move(cap);
  return absl::OkStatus();
}

absl::Status AdapterProcess::AdapterError(const std::string& what) {
  ++adapter_errors_;
  Stop();
  return absl::UnavailableError(absl::StrCat("AdapterError: ", what));
}

absl::StatusOr<std::string> AdapterProcess::ReadLine() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      return AdapterError(
          absl::StrCat("no answer within ", timeout_.count(), " ms"));
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return AdapterError("process exited");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

absl::StatusOr<json> AdapterProcess::Exchange(const json& request) {
  if (pid_ <= 0) return AdapterError("process not running");
  if (!WriteAll(to_child_, request.dump() + "\n")) {
    return AdapterError("cannot write request");
  }
  GF_ASSIGN_OR_RETURN(std::string line, ReadLine());
  json reply = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (reply.is_discarded() || !reply.is_object()) {
    return AdapterError(absl::StrCat("malformed reply: ", line.substr(0, 80)));
  }
  return reply;
}

absl::StatusOr<std::optional<Value>> AdapterProcess::Run(
    const IrModule& typed, const Inputs& inputs) {
  if (pid_ <= 0) GF_RETURN_IF_ERROR(Start());
  if (!capability_.Supports(typed)) {
    ++unsupported_;
    return std::optional<Value>();
  }
  GF_ASSIGN_OR_RETURN(json reply,
                      Exchange(RunRequest(typed, DefaultPipeline(), inputs)));
  const std::string status = reply.value("status", "");
  if (status == "unsupported") {
    ++unsupported_;
    return std::optional<Value>();
  }
  if (status == "error") {
    return absl::UnknownError(reply.value("trace", ""));
  }
  if (status != "ok" || !reply.contains("outputs")) {
    return AdapterError(absl::StrCat("bad reply status '", status, "'"));
  }
  absl::StatusOr<Value> v = ValueFromJson(reply["outputs"]);
  if (!v.ok()) return AdapterError(std::string(v.status().message()));
  return std::optional<Value>(*std::move(v));
}

}  // namespace graphfuzz
