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

#include "graphfuzz/oracles.h"

#include <exception>
#include <utility>

#include "absl/strings/str_cat.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/lowering.h"
#include "graphfuzz/mutators.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/status_macros.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

constexpr size_t kClip = 160;

std::string Clip(std::string s) {
  if (s.size() > kClip) {
    s.resize(kClip);
    s += "...";
  }
  return s;
}

std::optional<std::string> TraceOf(const absl::Status& status) {
  if (status.message().empty()) return std::nullopt;
  return std::string(status.message());
}

Fragment Failure(OracleId oracle, Outcome outcome, std::string subject,
                 std::optional<std::string> trace, std::string detail,
                 int input_index) {
  Fragment f;
  f.oracle = oracle;
  f.outcome = outcome;
  f.subject = std::move(subject);
  f.trace = std::move(trace);
  f.detail = std::move(detail);
  f.input_index = input_index;
  return f;
}

Fragment Mismatch(OracleId oracle, const std::string& subject,
                  const Value& expected, const Value& got, int k) {
  return Failure(oracle, Outcome::kInconsistency, subject, std::nullopt,
                 absl::StrCat("value mismatch: expected ",
                              Clip(expected.ToString()), " got ",
                              Clip(got.ToString())),
                 k);
}

Fragment Divergence(OracleId oracle, const std::string& subject,
                    absl::string_view what, const absl::Status& status,
                    int k) {
  return Failure(oracle, Outcome::kInconsistency, subject, TraceOf(status),
                 absl::StrCat(what, ": ", Clip(std::string(status.message()))),
                 k);
}

// Runs `m` on every input and reports the first divergence from the
// reference.
std::optional<Fragment> CompareRuns(const IrModule& m,
                                    const std::vector<Inputs>& inputs,
                                    const std::vector<Value>& reference,
                                    Backend backend, const FaultSet& faults,
                                    OracleId oracle,
                                    const std::string& subject) {
  for (size_t k = 0; k < inputs.size(); ++k) {
    absl::StatusOr<Value> v = RunBackend(m, inputs[k], backend, faults);
    if (!v.ok()) {
      return Divergence(oracle, subject, "original runs but this fails",
                        v.status(), static_cast<int>(k));
    }
    if (!ValuesAgree(*v, reference[k])) {
      return Mismatch(oracle, subject, reference[k], *v, static_cast<int>(k));
    }
  }
  return std::nullopt;
}

FuzzVerdict Conclude(FuzzVerdict verdict, std::vector<Fragment> fragments) {
  verdict.details = std::move(fragments);
  for (const Fragment& f : verdict.details) {
    if (f.outcome == Outcome::kPass) continue;
    verdict.outcome = f.outcome;
    verdict.oracle = f.oracle;
    verdict.trace = f.trace;
    break;
  }
  return verdict;
}

FuzzVerdict RunCaseUnchecked(const ComputationalGraph& g,
                             const NodeInfoTable& t, ConstraintLevel level,
                             const CaseConfig& cfg, uint64_t input_seed) {
  FuzzVerdict verdict;
  verdict.level = level;
  verdict.input_seed = input_seed;

  absl::StatusOr<IrModule> lowered = Lower(g, t);
  if (!lowered.ok()) {
    return Conclude(verdict, {Oracle1Crash(lowered.status(), level, "lower")});
  }
  absl::StatusOr<IrModule> typed = InferTypes(*lowered, cfg.faults);
  if (!typed.ok()) {
    return Conclude(verdict,
                    {Oracle1Crash(typed.status(), level, "infer_types")});
  }
  absl::StatusOr<std::vector<Inputs>> inputs =
      CaseInputs(*typed->main(), input_seed, cfg.num_inputs);
  if (!inputs.ok()) {
    return Conclude(verdict, {Oracle1Crash(inputs.status(), level, "inputs")});
  }
  std::vector<Value> reference;
  for (const Inputs& in : *inputs) {
    absl::StatusOr<Value> v =
        RunBackend(*typed, in, Backend::kTree, cfg.faults);
    if (!v.ok()) {
      return Conclude(verdict, {Oracle1Crash(v.status(), level, "run tree")});
    }
    reference.push_back(*std::move(v));
  }

  std::vector<Fragment> fragments;
  if (cfg.enable_o2) {
    std::vector<Fragment> o2 =
        Oracle2OptMutation(*typed, *inputs, reference, cfg, input_seed);
    fragments.insert(fragments.end(), o2.begin(), o2.end());
  }
  if (cfg.enable_o3) {
    std::vector<Fragment> o3 =
        Oracle3CrossBackend(*typed, *inputs, reference, cfg);
    fragments.insert(fragments.end(), o3.begin(), o3.end());
  }
  return Conclude(verdict, std::move(fragments));
}

}  // namespace

absl::string_view OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kPass:
      return "Pass";
    case Outcome::kCrash:
      return "Crash";
    case Outcome::kInconsistency:
      return "Inconsistency";
    case Outcome::kExpectedRejection:
      return "ExpectedRejection";
  }
  return "?";
}

absl::string_view OracleName(OracleId o) {
  switch (o) {
    case OracleId::kNone:
      return "none";
    case OracleId::kO1:
      return "O1";
    case OracleId::kO2:
      return "O2";
    case OracleId::kO3:
      return "O3";
  }
  return "?";
}

nlohmann::json Fragment::ToJson() const {
  nlohmann::json j;
  j["oracle"] = std::string(OracleName(oracle));
  j["outcome"] = std::string(OutcomeName(outcome));
  j["subject"] = subject;
  j["trace"] = trace ? nlohmann::json(*trace) : nlohmann::json(nullptr);
  j["detail"] = detail;
  j["input_index"] = input_index;
  return j;
}

nlohmann::json FuzzVerdict::ToJson() const {
  nlohmann::json j;
  j["outcome"] = std::string(OutcomeName(outcome));
  j["oracle"] = std::string(OracleName(oracle));
  j["level"] = LevelNumber(level);
  j["trace"] = trace ? nlohmann::json(*trace) : nlohmann::json(nullptr);
  j["graph_ref"] = graph_ref;
  j["input_seed"] = input_seed;
  nlohmann::json list = nlohmann::json::array();
  for (const Fragment& f : details) list.push_back(f.ToJson());
  j["details"] = std::move(list);
  return j;
}

std::vector<Pipeline> CasePipelines(uint64_t seed, int random_pipelines) {
  std::vector<Pipeline> out = {DefaultPipeline()};
  Rng rng(DeriveSeed(seed, 0x70697065));
  for (int i = 0; i < random_pipelines; ++i) out.push_back(RandomPipeline(rng));
  return out;
}

Fragment Oracle1Crash(const absl::Status& status, ConstraintLevel level,
                      absl::string_view stage) {
  const bool structured = IsStructuredDiagnostic(status);
  Outcome outcome = Outcome::kCrash;
  if (level == ConstraintLevel::kUnconstrained && structured) {
    outcome = Outcome::kExpectedRejection;
  }
  return Failure(OracleId::kO1, outcome, std::string(stage), TraceOf(status),
                 absl::StrCat(structured ? "diagnostic" : "abort", " during ",
                              stage, ": ",
                              Clip(std::string(status.message()))),
                 -1);
}

std::vector<Fragment> Oracle2OptMutation(const IrModule& typed,
                                         const std::vector<Inputs>& inputs,
                                         const std::vector<Value>& reference,
                                         const CaseConfig& cfg,
                                         uint64_t seed) {
  std::vector<Fragment> out;
  for (const Pipeline& p : cfg.pipelines) {
    Pipeline faulty = p;
    for (const BugInfo& info : BugCatalog()) {
      if (cfg.faults.Has(info.id)) faulty.faults.Add(info.id);
    }
    const std::string subject = absl::StrCat("pipeline ", p.name);
    absl::StatusOr<IrModule> optimized = RunPipeline(typed, faulty);
    if (!optimized.ok()) {
      out.push_back(Divergence(OracleId::kO2, subject,
                               "original compiles but optimization fails",
                               optimized.status(), -1));
      continue;
    }
    if (std::optional<Fragment> f =
            CompareRuns(*optimized, inputs, reference, Backend::kTree,
                        faulty.faults, OracleId::kO2, subject)) {
      out.push_back(*std::move(f));
    }
  }
  if (!cfg.run_mutants) return out;
  for (int s = 1; s <= kNumRewriteStrategies; ++s) {
    absl::StatusOr<IrModule> mutant =
        MutateFunctionRewrite(typed, s, DeriveSeed(seed, 1000 + s));
    if (!mutant.ok()) continue;
    const std::string subject = absl::StrCat("mutant ", s);
    absl::StatusOr<IrModule> mt = InferTypes(*mutant, cfg.faults);
    if (!mt.ok()) {
      out.push_back(Divergence(OracleId::kO2, subject,
                               "original compiles but the mutant fails",
                               mt.status(), -1));
      continue;
    }
    if (std::optional<Fragment> f =
            CompareRuns(*mt, inputs, reference, Backend::kTree, cfg.faults,
                        OracleId::kO2, subject)) {
      out.push_back(*std::move(f));
    }
  }
  return out;
}

std::vector<Fragment> Oracle3CrossBackend(const IrModule& typed,
                                          const std::vector<Inputs>& inputs,
                                          const std::vector<Value>& reference,
                                          const CaseConfig& cfg) {
  std::vector<Fragment> out;
  for (Backend b : {Backend::kGraph, Backend::kVm}) {
    if (std::optional<Fragment> f =
            CompareRuns(typed, inputs, reference, b, cfg.faults, OracleId::kO3,
                        absl::StrCat("backend ", BackendName(b)))) {
      out.push_back(*std::move(f));
    }
  }
  for (ExternalBackend* adapter : cfg.adapters) {
    for (size_t k = 0; k < inputs.size(); ++k) {
      const int index = static_cast<int>(k);
      absl::StatusOr<std::optional<Value>> v = adapter->Run(typed, inputs[k]);
      const std::string subject = absl::StrCat("adapter ", adapter->name());
      if (!v.ok()) {
        out.push_back(Divergence(OracleId::kO3, subject,
                                 "original runs but the adapter fails",
                                 v.status(), index));
        break;
      }
      if (!v->has_value()) break;
      if (!ValuesAgree(**v, reference[k])) {
        out.push_back(
            Mismatch(OracleId::kO3, subject, reference[k], **v, index));
        break;
      }
    }
  }
  return out;
}

absl::StatusOr<std::vector<Inputs>> CaseInputs(const GlobalFunction& main,
                                               uint64_t input_seed,
                                               int num_inputs) {
  std::vector<Inputs> out;
  for (int k = 0; k < num_inputs; ++k) {
    GF_ASSIGN_OR_RETURN(Inputs in,
                        RandomInputs(main, DeriveSeed(input_seed, k)));
    out.push_back(std::move(in));
  }
  return out;
}

FuzzVerdict RunCase(const ComputationalGraph& g, const NodeInfoTable& t,
                    ConstraintLevel level, const CaseConfig& cfg,
                    uint64_t input_seed) {
  try {
    return RunCaseUnchecked(g, t, level, cfg, input_seed);
  } catch (const std::exception& ex) {
    FuzzVerdict verdict;
    verdict.level = level;
    verdict.input_seed = input_seed;
    return Conclude(
        verdict,
        {Oracle1Crash(Abort(absl::StrCat("uncaught exception: ", ex.what())),
                      level, "case")});
  }
}

}  // namespace graphfuzz
