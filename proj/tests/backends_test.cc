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


#include <cmath>
#include <limits>
#include <string>

#include "gtest/gtest.h"
#include "graphfuzz/backends.h"
#include "graphfuzz/diagnostic.h"
#include "graphfuzz/faults.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/ir_text.h"
#include "graphfuzz/lowering.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

IrModule Typed(const std::string& text) {
  absl::StatusOr<IrModule> m = ParseModule(text);
  EXPECT_TRUE(m.ok()) << m.status();
  absl::StatusOr<IrModule> t = InferTypes(*m);
  EXPECT_TRUE(t.ok()) << t.status();
  return *t;
}

TEST(BackendsTest, ConstantOnEveryBackend) {
  IrModule m = Typed("def @main() {\n  const<int32,()>[5]\n}\n");
  for (Backend b : kAllBackends) {
    absl::StatusOr<Value> v = RunBackend(m, {}, b);
    ASSERT_TRUE(v.ok()) << BackendName(b) << ": " << v.status();
    EXPECT_TRUE(v->tensor().Identical(TensorValue::Scalar(DType::kInt32, 5)));
  }
}

TEST(BackendsTest, Names) {
  EXPECT_EQ(BackendName(Backend::kTree), "tree");
  EXPECT_EQ(BackendName(Backend::kGraph), "graph");
  EXPECT_EQ(BackendName(Backend::kVm), "vm");
}

TEST(BackendsTest, ClosuresTuplesAndCalls) {
  IrModule m = Typed(
      "def @twice(%h: fn(Tensor[int64, (3)]) -> Tensor[int64, (3)], "
      "%x: Tensor[int64, (3)]) {\n"
      "  %h(%h(%x))\n"
      "}\n"
      "def @main(%a: Tensor[int64, (3)], %k: Tensor[int64, ()]) {\n"
      "  let %inc = fn(%y: Tensor[int64, (3)]) {\n"
      "    add(%y, %k)\n"
      "  };\n"
      "  let %t = (@twice(%inc, %a), negative(%a));\n"
      "  (%t.1, %t.0)\n"
      "}\n");
  const Inputs in = {
      {"a", TensorValue::FromInts(DType::kInt64, Shape{3}, {1, -2, 30})},
      {"k", TensorValue::Scalar(DType::kInt64, 10)}};
  for (Backend b : kAllBackends) {
    absl::StatusOr<Value> v = RunBackend(m, in, b);
    ASSERT_TRUE(v.ok()) << BackendName(b) << ": " << v.status();
    ASSERT_EQ(v->fields().size(), 2u);
    EXPECT_EQ(v->fields()[0].tensor().ints(),
              (std::vector<int64_t>{-1, 2, -30}));
    EXPECT_EQ(v->fields()[1].tensor().ints(),
              (std::vector<int64_t>{21, 18, 50}));
  }
}

TEST(BackendsTest, AgreeOnGeneratedModules) {
  int compared = 0;
  for (uint64_t seed = 0; seed < 300; ++seed) {
    GenConfig cfg;
    cfg.node_num = 10 + static_cast<int>(seed % 60);
    cfg.rng_seed = seed;
    absl::StatusOr<GeneratedGraph> gen = Generate(cfg);
    ASSERT_TRUE(gen.ok());
    absl::StatusOr<IrModule> lowered = Lower(gen->graph, gen->infos);
    ASSERT_TRUE(lowered.ok());
    absl::StatusOr<IrModule> m = InferTypes(*lowered);
    ASSERT_TRUE(m.ok());
    absl::StatusOr<Inputs> in = RandomInputs(*m->main(), seed);
    ASSERT_TRUE(in.ok());
    absl::StatusOr<Value> tree = RunBackend(*m, *in, Backend::kTree);
    ASSERT_TRUE(tree.ok()) << tree.status();
    for (Backend b : {Backend::kGraph, Backend::kVm}) {
      absl::StatusOr<Value> v = RunBackend(*m, *in, b);
      ASSERT_TRUE(v.ok()) << BackendName(b) << ": " << v.status();
      // The backends share one kernel table, so agreement is exact.
      EXPECT_TRUE(ValuesAgree(*tree, *v, 0.0)) << BackendName(b);
      ++compared;
    }
  }
  EXPECT_EQ(compared, 600);
}

TEST(BackendsTest, VmNegativeFaultMiscompiles) {
  IrModule m = Typed(
      "def @main(%a: Tensor[int32, (2)]) {\n  negative(%a)\n}\n");
  const Inputs in = {
      {"a", TensorValue::FromInts(DType::kInt32, Shape{2}, {3, -4})}};
  FaultSet faults;
  faults.Add(BugId::kVmNegative);
  absl::StatusOr<Value> tree = RunBackend(m, in, Backend::kTree, faults);
  absl::StatusOr<Value> graph = RunBackend(m, in, Backend::kGraph, faults);
  absl::StatusOr<Value> vm = RunBackend(m, in, Backend::kVm, faults);
  ASSERT_TRUE(tree.ok() && graph.ok() && vm.ok());
  EXPECT_EQ(tree->tensor().ints(), (std::vector<int64_t>{-3, 4}));
  EXPECT_TRUE(ValuesAgree(*tree, *graph));
  EXPECT_EQ(vm->tensor().ints(), (std::vector<int64_t>{3, -4}));
  absl::StatusOr<Value> clean_vm = RunBackend(m, in, Backend::kVm);
  EXPECT_TRUE(ValuesAgree(*tree, *clean_vm));
}

TEST(BackendsTest, BadInputsAreRuntimeErrors) {
  IrModule m = Typed(
      "def @main(%a: Tensor[int32, (2)]) {\n  negative(%a)\n}\n");
  const Inputs wrong = {{"a", TensorValue::Scalar(DType::kInt32, 1)}};
  for (Backend b : kAllBackends) {
    absl::StatusOr<Value> missing = RunBackend(m, {}, b);
    ASSERT_FALSE(missing.ok());
    EXPECT_EQ(DiagnosticKind(missing.status()), "RuntimeError");
    absl::StatusOr<Value> mistyped = RunBackend(m, wrong, b);
    ASSERT_FALSE(mistyped.ok());
    EXPECT_EQ(DiagnosticKind(mistyped.status()), "RuntimeError");
  }
}

TEST(ValuesAgreeTest, Rules) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Value a(TensorValue::FromFloats(DType::kFloat32, Shape{2}, {1.0, nan}));
  Value b(TensorValue::FromFloats(DType::kFloat32, Shape{2}, {1.0 + 1e-7, nan}));
  Value c(TensorValue::FromFloats(DType::kFloat32, Shape{2}, {1.1, nan}));
  EXPECT_TRUE(ValuesAgree(a, b));
  EXPECT_FALSE(ValuesAgree(a, c));
  EXPECT_FALSE(ValuesAgree(a, Value::Tuple({a})));
  EXPECT_TRUE(ValuesAgree(Value::Tuple({a, b}), Value::Tuple({b, a})));
  Value i(TensorValue::FromInts(DType::kInt32, Shape{1}, {1}));
  Value f(TensorValue::FromFloats(DType::kFloat32, Shape{1}, {1.0}));
  EXPECT_FALSE(ValuesAgree(i, f));
}

}  // namespace
}  // namespace graphfuzz
