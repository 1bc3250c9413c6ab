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


#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "graphfuzz/backends.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/graph.h"
#include "graphfuzz/ir.h"
#include "graphfuzz/ir_text.h"
#include "graphfuzz/lowering.h"
#include "graphfuzz/opset.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

IrModule MustParse(const std::string& text) {
  absl::StatusOr<IrModule> m = ParseModule(text);
  EXPECT_TRUE(m.ok()) << m.status() << "\n" << text;
  return m.ok() ? *m : IrModule{};
}

IrModule MustType(const IrModule& m) {
  absl::StatusOr<IrModule> typed = InferTypes(m);
  EXPECT_TRUE(typed.ok()) << typed.status() << "\n" << PrintModule(m);
  return typed.ok() ? *typed : IrModule{};
}

absl::StatusOr<IrModule> LowerGenerated(uint64_t seed, int nodes) {
  GenConfig cfg;
  cfg.node_num = nodes;
  cfg.rng_seed = seed;
  absl::StatusOr<GeneratedGraph> gen = Generate(cfg);
  if (!gen.ok()) return gen.status();
  return Lower(gen->graph, gen->infos);
}

void CollectTypes(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  out.push_back(e->type ? e->type->ToString() : "<none>");
  for (const ExprPtr& a : e->args) CollectTypes(a, out);
  CollectTypes(e->lhs, out);
  CollectTypes(e->body, out);
}

std::vector<std::string> AllTypes(const IrModule& m) {
  std::vector<std::string> out;
  for (const GlobalFunction& f : m.functions) {
    out.push_back(f.ret_type ? f.ret_type->ToString() : "<none>");
    CollectTypes(f.body, out);
  }
  return out;
}

int64_t ScalarInt(const Value& v) {
  EXPECT_TRUE(v.is_tensor());
  EXPECT_EQ(v.tensor().size(), 1);
  return v.tensor().ints().at(0);
}

TEST(TextTest, RoundTripsGeneratedModules) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    absl::StatusOr<IrModule> m = LowerGenerated(seed, 30);
    ASSERT_TRUE(m.ok()) << m.status();
    const std::string text = PrintModule(*m);
    IrModule back = MustParse(text);
    EXPECT_TRUE(ModulesEqual(*m, back)) << text;
    EXPECT_EQ(PrintModule(back), text);
  }
}

TEST(TextTest, ParsesClosuresTuplesAndTypes) {
  const std::string text =
      "def @main(%a: Tensor[float32, (2,3)]) {\n"
      "  let %t = (%a, const<int8,()>[-3]);\n"
      "  let %f = fn(%x: Tensor[float32, (2,3)]) {\n"
      "    negative(%x)\n"
      "  };\n"
      "  %f(%t.0)\n"
      "}\n";
  IrModule m = MustParse(text);
  EXPECT_EQ(PrintModule(m), text);
  absl::StatusOr<IrTypePtr> t =
      ParseType("fn(Tensor[int32, ()], (Tensor[bool, (1)],)) -> "
                "Tensor[int32, ()]");
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_EQ((*t)->kind, IrType::Kind::kFunc);
  EXPECT_EQ((*t)->fields.size(), 2u);
  EXPECT_EQ((*t)->fields[1]->kind, IrType::Kind::kTuple);
}

TEST(TextTest, ParseErrorsAreStructured) {
  for (const char* bad :
       {"def @main() {", "def main() { %x }", "def @main() { frob(%x) }",
        "def @main() { const<int99,()>[1] }", "def @main() { %x } trailing",
        "def @main() { %x }\ndef @main() { %y }"}) {
    absl::StatusOr<IrModule> m = ParseModule(bad);
    ASSERT_FALSE(m.ok()) << bad;
    EXPECT_EQ(DiagnosticKind(m.status()), "ParseError") << m.status();
  }
}

TEST(InferTest, AddOfInt32Constants) {
  IrModule m = MustType(MustParse(
      "def @main() {\n  add(const<int32,()>[1], const<int32,()>[2])\n}\n"));
  const GlobalFunction* main = m.main();
  ASSERT_NE(main, nullptr);
  EXPECT_TRUE(TypesEqual(main->ret_type,
                         TensorTy(TensorType{DType::kInt32, Shape{}})));
  EXPECT_TRUE(FullyTyped(m));
}

TEST(InferTest, MixedDtypesAreRejected) {
  absl::StatusOr<IrModule> m = InferTypes(MustParse(
      "def @main() {\n  add(const<int32,()>[1], const<float32,()>[2])\n}\n"));
  ASSERT_FALSE(m.ok());
  EXPECT_TRUE(IsStructuredDiagnostic(m.status()));
  EXPECT_EQ(DiagnosticKind(m.status()), "DtypeMismatch");
  EXPECT_NE(m.status().message().find("@main"), absl::string_view::npos);
}

TEST(InferTest, OtherKindsOfError) {
  struct Case {
    const char* text;
    const char* kind;
  } cases[] = {
      {"def @main() { add(const<int32,(2)>[1,2], const<int32,(3)>[1,2,3]) }",
       "ShapeMismatch"},
      {"def @main() { sqrt(const<int16,()>[4]) }", "Inadmissible"},
      {"def @f(%x: Tensor[int32, ()]) { %x }\n"
       "def @main() { @f(const<int32,()>[1], const<int32,()>[1]) }",
       "ArityMismatch"},
      {"def @main() { %nope }", "UnboundVariable"},
      {"def @main() { @nope(const<int32,()>[1]) }", "UnboundGlobal"},
      {"def @main() { const<int32,()>[1](const<int32,()>[1]) }",
       "NotCallable"},
      {"def @main() { const<int32,()>[1].0 }", "NotATuple"},
      {"def @main() { (const<int32,()>[1],).3 }", "BadTupleIndex"},
      {"def @f() { @f() }\ndef @main() { @f() }", "Recursion"},
      {"def @f() { const<int32,()>[1] }", "MissingMain"},
  };
  for (const Case& c : cases) {
    absl::StatusOr<IrModule> m = InferTypes(MustParse(c.text));
    ASSERT_FALSE(m.ok()) << c.text;
    EXPECT_EQ(DiagnosticKind(m.status()), c.kind) << m.status();
  }
}

TEST(InferTest, ClosureReturningAFunctionGetsAFunctionType) {
  IrModule m = MustType(MustParse(
      "def @wrap(%x: Tensor[int32, ()]) {\n"
      "  fn(%y: Tensor[int32, ()]) {\n"
      "    add(%x, %y)\n"
      "  }\n"
      "}\n"
      "def @main(%a: Tensor[int32, ()]) {\n"
      "  let %g = @wrap(%a);\n"
      "  %g(const<int32,()>[2])\n"
      "}\n"));
  const GlobalFunction* wrap = m.Find("wrap");
  ASSERT_NE(wrap, nullptr);
  ASSERT_NE(wrap->ret_type, nullptr);
  EXPECT_EQ(wrap->ret_type->kind, IrType::Kind::kFunc);
  EXPECT_EQ(GlobalType(*wrap)->result->kind, IrType::Kind::kFunc);
  absl::StatusOr<Value> v = RunBackend(
      m, {{"a", TensorValue::Scalar(DType::kInt32, 40)}}, Backend::kTree);
  ASSERT_TRUE(v.ok()) << v.status();
  EXPECT_EQ(ScalarInt(*v), 42);
}

TEST(InferTest, IsAFixpoint) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    absl::StatusOr<IrModule> m = LowerGenerated(seed, 40);
    ASSERT_TRUE(m.ok()) << m.status();
    IrModule once = MustType(*m);
    IrModule twice = MustType(once);
    EXPECT_TRUE(ModulesEqual(once, twice));
    EXPECT_EQ(AllTypes(once), AllTypes(twice));
    EXPECT_TRUE(FullyTyped(twice));
  }
}

TEST(LowerTest, SingleConstant) {
  ComputationalGraph g;
  g.Append(ConstantNode{TensorValue::Scalar(DType::kInt32, 5)});
  absl::StatusOr<IrModule> m = Lower(g, BuildInfoTable(g));
  ASSERT_TRUE(m.ok()) << m.status();
  ASSERT_EQ(m->functions.size(), 1u);
  IrModule typed = MustType(*m);
  for (Backend b : kAllBackends) {
    absl::StatusOr<Value> v = RunBackend(typed, {}, b);
    ASSERT_TRUE(v.ok()) << v.status();
    EXPECT_EQ(ScalarInt(*v), 5);
  }
}

TEST(LowerTest, FunctionAndCall) {
  ComputationalGraph g;
  g.Append(VariableNode{TensorType{DType::kInt32, Shape{}}});       // 0
  g.Append(ConstantNode{TensorValue::Scalar(DType::kInt32, 3)});    // 1
  g.Append(OperatorNode{OpCode::kAdd, {NodeId{0}, NodeId{1}}});     // 2
  g.Append(FunctionNode{{NodeId{2}}, {NodeId{0}, NodeId{1}}, {NodeId{2}}});
  g.Append(CallNode{NodeId{3}, NodeId{2}});                          // 4
  NodeInfoTable t = BuildInfoTable(g);
  ASSERT_TRUE(ValidateGraph(g, t).empty());
  absl::StatusOr<IrModule> m = Lower(g, t);
  ASSERT_TRUE(m.ok()) << m.status();
  EXPECT_EQ(m->functions.size(), 2u);
  EXPECT_NE(m->Find(FunctionName(NodeId{3})), nullptr);
  IrModule typed = MustType(*m);
  absl::StatusOr<Value> v = RunBackend(
      typed, {{ValueName(g, NodeId{0}), TensorValue::Scalar(DType::kInt32, 2)}}, Backend::kTree);
  ASSERT_TRUE(v.ok()) << v.status();
  // Sinks are the body operator and the call; both compute x + c.
  ASSERT_FALSE(v->is_tensor()) << PrintModule(typed);
  ASSERT_EQ(v->fields().size(), 2u);
  EXPECT_EQ(ScalarInt(v->fields()[0]), 5);
  EXPECT_EQ(ScalarInt(v->fields()[1]), 5);
}

TEST(LowerTest, LevelZeroSqrtLowersThenFailsInference) {
  ComputationalGraph g;
  g.Append(ConstantNode{TensorValue::Scalar(DType::kInt16, 4)});
  g.Append(OperatorNode{OpCode::kSqrt, {NodeId{0}}});
  absl::StatusOr<IrModule> m = Lower(g, BuildInfoTable(g));
  ASSERT_TRUE(m.ok()) << m.status();
  absl::StatusOr<IrModule> typed = InferTypes(*m);
  ASSERT_FALSE(typed.ok());
  EXPECT_TRUE(IsStructuredDiagnostic(typed.status()));
  EXPECT_EQ(DiagnosticKind(typed.status()), "Inadmissible");
}

TEST(LowerTest, MatchesDirectGraphEvaluation) {
  // Independent evaluator: each operator node applied elementwise in id
  // order over the generator's graph, then compared with the sinks.
  for (uint64_t seed = 0; seed < 100; ++seed) {
    GenConfig cfg;
    cfg.node_num = 25;
    cfg.rng_seed = seed;
    cfg.weights.function = 0;
    cfg.weights.call = 0;
    absl::StatusOr<GeneratedGraph> gen = Generate(cfg);
    ASSERT_TRUE(gen.ok()) << gen.status();
    const ComputationalGraph& g = gen->graph;
    absl::StatusOr<IrModule> m = Lower(g, gen->infos);
    ASSERT_TRUE(m.ok()) << m.status();
    IrModule typed = MustType(*m);
    absl::StatusOr<Inputs> inputs = RandomInputs(*typed.main(), seed);
    ASSERT_TRUE(inputs.ok());

    std::vector<TensorValue> values(g.size());
    std::vector<bool> consumed(g.size(), false);
    for (size_t i = 0; i < g.size(); ++i) {
      const Node& node = g.node(NodeId{static_cast<int>(i)});
      if (const auto* c = std::get_if<ConstantNode>(&node)) {
        values[i] = c->value;
      } else if (std::holds_alternative<VariableNode>(node)) {
        values[i] = inputs->at(ValueName(g, NodeId{static_cast<int>(i)}));
      } else if (const auto* op = std::get_if<OperatorNode>(&node)) {
        std::vector<TensorValue> args;
        for (NodeId p : op->parents) {
          args.push_back(values[p.value]);
          consumed[p.value] = true;
        }
        absl::StatusOr<TensorValue> r = EvalElementwise(op->op, args);
        ASSERT_TRUE(r.ok()) << r.status();
        values[i] = *r;
      }
    }
    std::vector<TensorValue> sinks;
    for (size_t i = 0; i < g.size(); ++i) {
      if (!consumed[i]) sinks.push_back(values[i]);
    }
    absl::StatusOr<Value> v = RunBackend(typed, *inputs, Backend::kTree);
    ASSERT_TRUE(v.ok()) << v.status();
    if (sinks.size() == 1) {
      ASSERT_TRUE(v->is_tensor());
      EXPECT_TRUE(ValuesAgree(*v, Value(sinks[0])));
    } else {
      ASSERT_EQ(v->fields().size(), sinks.size());
      for (size_t k = 0; k < sinks.size(); ++k) {
        EXPECT_TRUE(ValuesAgree(v->fields()[k], Value(sinks[k])));
      }
    }
  }
}

}  // namespace
}  // namespace graphfuzz
