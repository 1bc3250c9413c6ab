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


#include <optional>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/oracles.h"
#include "graphfuzz/rng.h"

namespace graphfuzz {
namespace {

constexpr ConstraintLevel kL0 = ConstraintLevel::kUnconstrained;
constexpr ConstraintLevel kL1 = ConstraintLevel::kConstrained;

CaseConfig DefaultCase(uint64_t seed = 0) {
  CaseConfig cfg;
  cfg.pipelines = CasePipelines(seed);
  return cfg;
}

FaultSet Faults(std::initializer_list<BugId> ids) {
  FaultSet f;
  for (BugId id : ids) f.Add(id);
  return f;
}

std::vector<nlohmann::json> FragmentsOf(const FuzzVerdict& v, OracleId o) {
  std::vector<nlohmann::json> out;
  for (const Fragment& f : v.details) {
    if (f.oracle == o) out.push_back(f.ToJson());
  }
  return out;
}

ComputationalGraph SqrtOfInt16() {
  ComputationalGraph g;
  g.Append(ConstantNode{TensorValue::Scalar(DType::kInt16, 4)});
  g.Append(OperatorNode{OpCode::kSqrt, {NodeId{0}}});
  return g;
}

ComputationalGraph UnsignedFloorMod() {
  ComputationalGraph g;
  g.Append(ConstantNode{TensorValue::Scalar(DType::kUInt32, 7)});
  g.Append(ConstantNode{TensorValue::Scalar(DType::kUInt32, 3)});
  g.Append(OperatorNode{OpCode::kFloorMod, {NodeId{0}, NodeId{1}}});
  return g;
}

ComputationalGraph NegateVariable() {
  ComputationalGraph g;
  g.Append(VariableNode{TensorType{DType::kInt32, Shape{4}}});
  g.Append(OperatorNode{OpCode::kNegative, {NodeId{0}}});
  return g;
}

FuzzVerdict Check(const ComputationalGraph& g, ConstraintLevel level,
                const CaseConfig& cfg, uint64_t seed = 1) {
  return RunCase(g, BuildInfoTable(g), level, cfg, seed);
}

class FixedBackend : public ExternalBackend {
 public:
  explicit FixedBackend(absl::StatusOr<std::optional<Value>> reply)
      : reply_(std::move(reply)) {}
  std::string name() const override { return "fixed"; }
  absl::StatusOr<std::optional<Value>> Run(const IrModule&,
                                           const Inputs&) override {
    ++calls_;
    return reply_;
  }
  int calls() const { return calls_; }

 private:
  absl::StatusOr<std::optional<Value>> reply_;
  int calls_ = 0;
};

TEST(Oracle1Test, Classification) {
  const absl::Status diag = Diagnostic("TypeError", "@main/%n1", "bad");
  const absl::Status abort = Abort("assertion failed");
  EXPECT_EQ(Oracle1Crash(diag, kL0, "infer_types").outcome,
            Outcome::kExpectedRejection);
  EXPECT_EQ(Oracle1Crash(abort, kL0, "infer_types").outcome, Outcome::kCrash);
  EXPECT_EQ(Oracle1Crash(diag, kL1, "infer_types").outcome, Outcome::kCrash);
  EXPECT_EQ(
      Oracle1Crash(Diagnostic("RuntimeError", "@main", "x"), kL1, "run tree")
          .outcome,
      Outcome::kCrash);
  Fragment f = Oracle1Crash(diag, kL0, "infer_types");
  EXPECT_EQ(f.oracle, OracleId::kO1);
  EXPECT_EQ(f.trace, std::string(diag.message()));
  EXPECT_EQ(f.subject, "infer_types");
  Fragment silent = Oracle1Crash(absl::InternalError(""), kL0, "lower");
  EXPECT_EQ(silent.outcome, Outcome::kCrash);
  EXPECT_FALSE(silent.trace.has_value());
}

TEST(RunCaseTest, LevelZeroSqrtIsAnExpectedRejection) {
  FuzzVerdict v = Check(SqrtOfInt16(), kL0, DefaultCase());
  EXPECT_EQ(v.outcome, Outcome::kExpectedRejection);
  EXPECT_EQ(v.oracle, OracleId::kO1);
  EXPECT_FALSE(v.IsFailure());
  ASSERT_TRUE(v.trace.has_value());
  EXPECT_NE(v.trace->find("Inadmissible"), std::string::npos);
}

TEST(RunCaseTest, SqrtAbortFaultIsACrashAtLevelZero) {
  CaseConfig cfg = DefaultCase();
  cfg.faults = Faults({BugId::kInferSqrtAbort});
  FuzzVerdict v = Check(SqrtOfInt16(), kL0, cfg);
  EXPECT_EQ(v.outcome, Outcome::kCrash);
  EXPECT_EQ(v.oracle, OracleId::kO1);
}

TEST(RunCaseTest, CleanLevelOneGraphsPass) {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    GenConfig gc;
    gc.node_num = 5 + static_cast<int>(seed % 40);
    gc.rng_seed = seed;
    absl::StatusOr<GeneratedGraph> gen = Generate(gc);
    ASSERT_TRUE(gen.ok());
    FuzzVerdict v = RunCase(gen->graph, gen->infos, kL1, DefaultCase(seed),
                            seed + 1);
    EXPECT_EQ(v.outcome, Outcome::kPass) << v.ToJson().dump();
    EXPECT_TRUE(v.details.empty());
  }
}

TEST(Oracle2Test, FoldUmodCounterexample) {
  CaseConfig cfg = DefaultCase();
  EXPECT_EQ(Check(UnsignedFloorMod(), kL1, cfg).outcome, Outcome::kPass);
  cfg.faults = Faults({BugId::kFoldUmod});
  FuzzVerdict v = Check(UnsignedFloorMod(), kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kInconsistency);
  EXPECT_EQ(v.oracle, OracleId::kO2);
  EXPECT_FALSE(v.trace.has_value());
  ASSERT_FALSE(v.details.empty());
  EXPECT_EQ(v.details[0].subject, "pipeline default");
  EXPECT_NE(v.details[0].detail.find("value mismatch"), std::string::npos);
}

TEST(Oracle2Test, ExecutionStatusDifferenceIsAnInconsistency) {
  CaseConfig cfg = DefaultCase();
  cfg.faults = Faults({BugId::kDceTupleUse});
  // Two sinks are returned as a tuple of let-bound variables.
  ComputationalGraph g;
  g.Append(VariableNode{TensorType{DType::kInt32, Shape{2}}});
  g.Append(OperatorNode{OpCode::kNegative, {NodeId{0}}});
  g.Append(OperatorNode{OpCode::kAbs, {NodeId{0}}});
  FuzzVerdict v = Check(g, kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kInconsistency);
  EXPECT_EQ(v.oracle, OracleId::kO2);
  ASSERT_TRUE(v.trace.has_value());
  EXPECT_NE(v.trace->find("UnboundVariable"), std::string::npos);
}

TEST(Oracle2Test, EmptyPipelineListIsVacuous) {
  CaseConfig cfg;
  cfg.run_mutants = false;
  cfg.faults = Faults({BugId::kFoldUmod});
  FuzzVerdict v = Check(UnsignedFloorMod(), kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kPass);
  cfg.faults = Faults({BugId::kFoldUmod, BugId::kVmNegative});
  FuzzVerdict neg = Check(NegateVariable(), kL1, cfg);
  EXPECT_EQ(neg.outcome, Outcome::kInconsistency);
  EXPECT_EQ(neg.oracle, OracleId::kO3);
}

TEST(Oracle3Test, VmNegativeIsCaught) {
  CaseConfig cfg = DefaultCase();
  cfg.faults = Faults({BugId::kVmNegative});
  FuzzVerdict v = Check(NegateVariable(), kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kInconsistency);
  EXPECT_EQ(v.oracle, OracleId::kO3);
  ASSERT_EQ(v.details.size(), 1u);
  EXPECT_EQ(v.details[0].subject, "backend vm");
  EXPECT_EQ(v.details[0].input_index, 0);
}

TEST(Oracle3Test, AdapterFailureIsAStatusDivergence) {
  FixedBackend failing(absl::UnknownError("ERROR Crash at x: boom"));
  CaseConfig cfg = DefaultCase();
  cfg.adapters = {&failing};
  FuzzVerdict v = Check(NegateVariable(), kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kInconsistency);
  EXPECT_EQ(v.oracle, OracleId::kO3);
  EXPECT_EQ(v.trace, "ERROR Crash at x: boom");
  EXPECT_EQ(v.details[0].subject, "adapter fixed");
}

TEST(Oracle3Test, AdapterMismatchAndDecline) {
  FixedBackend wrong(std::optional<Value>(
      Value(TensorValue::Scalar(DType::kInt32, 0))));
  CaseConfig cfg = DefaultCase();
  cfg.adapters = {&wrong};
  FuzzVerdict v = Check(NegateVariable(), kL1, cfg);
  EXPECT_EQ(v.outcome, Outcome::kInconsistency);
  EXPECT_EQ(v.oracle, OracleId::kO3);

  FixedBackend declines(std::optional<Value>{});
  cfg.adapters = {&declines};
  EXPECT_EQ(Check(NegateVariable(), kL1, cfg).outcome, Outcome::kPass);
  EXPECT_EQ(declines.calls(), 1);
}

TEST(ReplayTest, SameGraphAndSeedGiveTheSameVerdict) {
  Rng rng(11);
  for (uint64_t seed = 0; seed < 150; ++seed) {
    GenConfig gc;
    gc.node_num = 20;
    gc.rng_seed = seed;
    gc.level = rng.Bernoulli(0.5) ? kL0 : kL1;
    absl::StatusOr<GeneratedGraph> gen = Generate(gc);
    ASSERT_TRUE(gen.ok());
    CaseConfig cfg = DefaultCase(seed);
    cfg.faults = Faults({BugId::kFoldUmod, BugId::kVmNegative,
                         BugId::kCseIgnoreOp});
    const FuzzVerdict a = RunCase(gen->graph, gen->infos, gc.level, cfg, seed);
    const FuzzVerdict b =
        RunCase(gen->graph, BuildInfoTable(gen->graph), gc.level, cfg, seed);
    EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  }
}

TEST(IndependenceTest, DisablingOneOracleKeepsTheOther) {
  int o2_seen = 0, o3_seen = 0;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig gc;
    gc.node_num = 25;
    gc.rng_seed = seed;
    absl::StatusOr<GeneratedGraph> gen = Generate(gc);
    ASSERT_TRUE(gen.ok());
    CaseConfig both = DefaultCase(seed);
    both.faults = Faults({BugId::kCseIgnoreOp, BugId::kFoldUmod,
                          BugId::kInlineDropArg, BugId::kVmNegative});
    CaseConfig only2 = both, only3 = both;
    only2.enable_o3 = false;
    only3.enable_o2 = false;
    const FuzzVerdict all = RunCase(gen->graph, gen->infos, kL1, both, seed);
    const FuzzVerdict v2 = RunCase(gen->graph, gen->infos, kL1, only2, seed);
    const FuzzVerdict v3 = RunCase(gen->graph, gen->infos, kL1, only3, seed);
    EXPECT_EQ(FragmentsOf(all, OracleId::kO2), FragmentsOf(v2, OracleId::kO2));
    EXPECT_EQ(FragmentsOf(all, OracleId::kO3), FragmentsOf(v3, OracleId::kO3));
    EXPECT_TRUE(FragmentsOf(v2, OracleId::kO3).empty());
    EXPECT_TRUE(FragmentsOf(v3, OracleId::kO2).empty());
    o2_seen += !FragmentsOf(all, OracleId::kO2).empty();
    o3_seen += !FragmentsOf(all, OracleId::kO3).empty();
  }
  EXPECT_GT(o2_seen, 0);
  EXPECT_GT(o3_seen, 0);
}

TEST(VerdictTest, JsonShape) {
  CaseConfig cfg = DefaultCase();
  cfg.faults = Faults({BugId::kVmNegative});
  FuzzVerdict v = Check(NegateVariable(), kL1, cfg, 42);
  v.graph_ref = "case_000003.graph";
  nlohmann::json j = v.ToJson();
  EXPECT_EQ(j["outcome"], "Inconsistency");
  EXPECT_EQ(j["oracle"], "O3");
  EXPECT_EQ(j["level"], 1);
  EXPECT_TRUE(j["trace"].is_null());
  EXPECT_EQ(j["graph_ref"], "case_000003.graph");
  EXPECT_EQ(j["input_seed"], 42);
  ASSERT_EQ(j["details"].size(), 1u);
  EXPECT_EQ(j["details"][0]["subject"], "backend vm");
}

TEST(CasePipelinesTest, DefaultFirstThenRandom) {
  std::vector<Pipeline> p = CasePipelines(5, 3);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0].passes, DefaultPipeline().passes);
  std::vector<Pipeline> again = CasePipelines(5, 3);
  for (size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i].passes, again[i].passes);
  EXPECT_EQ(CasePipelines(5, 0).size(), 1u);
}

}  // namespace
}  // namespace graphfuzz
