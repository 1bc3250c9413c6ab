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


#include <algorithm>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/graph.h"

namespace graphfuzz {
namespace {

NodeId Var(ComputationalGraph& g, DType d, Shape s) {
  return g.Append(VariableNode{TensorType{d, std::move(s)}});
}

NodeId Const(ComputationalGraph& g, TensorValue v) {
  return g.Append(ConstantNode{std::move(v)});
}

NodeId Op(ComputationalGraph& g, OpCode op, std::vector<NodeId> parents) {
  return g.Append(OperatorNode{op, std::move(parents)});
}

TEST(ValidateTest, SqrtOfInt16IsInadmissible) {
  ComputationalGraph g;
  Const(g, TensorValue::FromInts(DType::kInt16, Shape{}, {4}));
  Op(g, OpCode::kSqrt, {NodeId{0}});
  std::vector<ConstraintViolation> v = ValidateGraph(g, BuildInfoTable(g));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].node, NodeId{1});
  EXPECT_EQ(v[0].kind, ViolationKind::kOperatorDtypeInadmissible);
}

TEST(ValidateTest, EmptyGraphIsValid) {
  ComputationalGraph g;
  EXPECT_TRUE(ValidateGraph(g, BuildInfoTable(g)).empty());
}

TEST(ValidateTest, BroadcastingAddIsValid) {
  ComputationalGraph g;
  Var(g, DType::kFloat32, {1, 2});
  Var(g, DType::kFloat32, {3, 1});
  Op(g, OpCode::kAdd, {NodeId{0}, NodeId{1}});
  NodeInfoTable t = BuildInfoTable(g);
  EXPECT_TRUE(ValidateGraph(g, t).empty());
  EXPECT_EQ(t.at(NodeId{2}).type->shape, Shape({3, 2}));
}

TEST(ValidateTest, ReportsEachKindSortedByNode) {
  ComputationalGraph g;
  Var(g, DType::kInt32, {2});
  Var(g, DType::kFloat32, {2});
  Var(g, DType::kInt32, {3});
  Op(g, OpCode::kAdd, {NodeId{0}, NodeId{2}});
  Op(g, OpCode::kAdd, {NodeId{0}, NodeId{1}});
  std::vector<ConstraintViolation> v = ValidateGraph(g, BuildInfoTable(g));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].node, NodeId{3});
  EXPECT_EQ(v[0].kind, ViolationKind::kShapeMismatch);
  EXPECT_EQ(v[1].node, NodeId{4});
  EXPECT_EQ(v[1].kind, ViolationKind::kDtypeMismatch);
}

TEST(InferInfoTest, Examples) {
  ComputationalGraph g;
  Var(g, DType::kFloat32, {2});
  Var(g, DType::kFloat32, {2});
  Var(g, DType::kInt64, {});
  Var(g, DType::kInt64, {});
  NodeInfoTable t = BuildInfoTable(g);

  absl::StatusOr<NodeInfo> eq =
      InferInfo(g, t, OperatorNode{OpCode::kEqual, {NodeId{0}, NodeId{1}}});
  ASSERT_TRUE(eq.ok());
  EXPECT_EQ(*eq->type, (TensorType{DType::kBool, Shape({2})}));

  absl::StatusOr<NodeInfo> add =
      InferInfo(g, t, OperatorNode{OpCode::kAdd, {NodeId{2}, NodeId{3}}});
  ASSERT_TRUE(add.ok());
  EXPECT_EQ(*add->type, (TensorType{DType::kInt64, Shape{}}));

  absl::StatusOr<NodeInfo> bad =
      InferInfo(g, t, OperatorNode{OpCode::kAdd, {NodeId{2}, NodeId{0}}});
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.status().message().find("DtypeMismatch"), std::string::npos);
}

TEST(InferInfoTest, RebuildingATableIsIdempotent) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    GenConfig cfg;
    cfg.node_num = 40;
    cfg.rng_seed = seed;
    cfg.level = seed % 2 ? ConstraintLevel::kConstrained
                         : ConstraintLevel::kUnconstrained;
    absl::StatusOr<GeneratedGraph> gg = Generate(cfg);
    ASSERT_TRUE(gg.ok());
    EXPECT_EQ(BuildInfoTable(gg->graph), gg->infos) << seed;
  }
}

TEST(ExtractSubgraphTest, SingleConstant) {
  ComputationalGraph g;
  Const(g, TensorValue::FromInts(DType::kInt32, Shape{}, {1}));
  Rng rng(3);
  absl::StatusOr<SubgraphSelection> s = ExtractSubgraph(g, rng);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->body, std::vector<NodeId>{NodeId{0}});
  EXPECT_TRUE(s->inputs.empty());
  EXPECT_EQ(s->outputs, std::vector<NodeId>{NodeId{0}});
}

TEST(ExtractSubgraphTest, EmptyGraphHasNoSubgraph) {
  ComputationalGraph g;
  Rng rng(0);
  absl::StatusOr<SubgraphSelection> s = ExtractSubgraph(g, rng);
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.status().message().find("NoEligibleSubgraph"),
            std::string::npos);
}

// Independent check of the selection contract by plain set arithmetic.
void ExpectWellFormedSelection(const ComputationalGraph& g,
                               const SubgraphSelection& s) {
  ASSERT_FALSE(s.body.empty());
  const std::set<NodeId> body(s.body.begin(), s.body.end());
  for (NodeId id : body) {
    NodeKind k = g.kind(id);
    ASSERT_TRUE(k != NodeKind::kFunction && k != NodeKind::kCall);
  }
  std::set<NodeId> want_inputs;
  std::set<NodeId> has_inner_consumer;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId id : body) {
    if (g.kind(id) != NodeKind::kOperator) continue;
    for (NodeId p : std::get<OperatorNode>(g.node(id)).parents) {
      if (body.count(p)) {
        has_inner_consumer.insert(p);
        edges.push_back({p, id});
      } else {
        want_inputs.insert(p);
      }
    }
  }
  EXPECT_EQ(std::set<NodeId>(s.inputs.begin(), s.inputs.end()), want_inputs);
  std::set<NodeId> want_outputs;
  for (NodeId id : body) {
    if (!has_inner_consumer.count(id)) want_outputs.insert(id);
  }
  EXPECT_EQ(std::set<NodeId>(s.outputs.begin(), s.outputs.end()),
            want_outputs);
  // Connectivity over undirected inner edges.
  std::set<NodeId> seen = {*body.begin()};
  std::queue<NodeId> work;
  work.push(*body.begin());
  while (!work.empty()) {
    NodeId n = work.front();
    work.pop();
    for (auto [a, b] : edges) {
      NodeId other = a == n ? b : (b == n ? a : NodeId{});
      if (other.value >= 0 && seen.insert(other).second) work.push(other);
    }
  }
  EXPECT_EQ(seen, body);
}

TEST(ExtractSubgraphTest, SelectionsAreWellFormed) {
  ComputationalGraph small;
  Var(small, DType::kInt32, {});
  Const(small, TensorValue::FromInts(DType::kInt32, Shape{}, {1}));
  Op(small, OpCode::kAdd, {NodeId{0}, NodeId{1}});
  for (uint64_t seed = 0; seed < 64; ++seed) {
    Rng rng(seed);
    absl::StatusOr<SubgraphSelection> s = ExtractSubgraph(small, rng);
    ASSERT_TRUE(s.ok());
    ExpectWellFormedSelection(small, *s);
  }
  for (uint64_t seed = 0; seed < 100; ++seed) {
    GenConfig cfg;
    cfg.node_num = 30;
    cfg.rng_seed = seed;
    GeneratedGraph gg = *Generate(cfg);
    Rng rng(seed);
    absl::StatusOr<SubgraphSelection> s = ExtractSubgraph(gg.graph, rng);
    ASSERT_TRUE(s.ok());
    ExpectWellFormedSelection(gg.graph, *s);
  }
}

TEST(SerializationTest, FrozenTextForm) {
  ComputationalGraph g;
  Var(g, DType::kInt32, {2, 3});
  Const(g, TensorValue::FromFloats(DType::kFloat32, Shape({2}), {0.5, 1.25}));
  g.Append(FunctionNode{{NodeId{1}}, {}, {NodeId{1}}});
  g.Append(CallNode{NodeId{2}, NodeId{1}});
  const std::string text = SerializeGraph(g);
  EXPECT_EQ(text,
            "0 variable int32 (2,3)\n"
            "1 constant float32 (2) [0.5,1.25]\n"
            "2 function body=[1] inputs=[] outputs=[1]\n"
            "3 call 2 1\n");
  absl::StatusOr<ComputationalGraph> back = ParseGraph(text);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_TRUE(*back == g);
  EXPECT_FALSE(ParseGraph("0 operator add 1 2\n").ok());
  EXPECT_FALSE(ParseGraph("0 gadget\n").ok());
}

TEST(SerializationTest, RoundTripsGeneratedGraphs) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.node_num = 5 + static_cast<int>(seed % 60);
    cfg.rng_seed = seed;
    cfg.level = seed % 3 ? ConstraintLevel::kConstrained
                         : ConstraintLevel::kUnconstrained;
    GeneratedGraph gg = *Generate(cfg);
    const std::string text = SerializeGraph(gg.graph);
    absl::StatusOr<ComputationalGraph> back = ParseGraph(text);
    ASSERT_TRUE(back.ok()) << back.status() << "\n" << text;
    EXPECT_EQ(SerializeGraph(*back), text);
    EXPECT_EQ(GraphHash(*back), GraphHash(gg.graph));
  }
}

TEST(EditTest, RemovalTakesDependents) {
  ComputationalGraph g;
  Var(g, DType::kInt32, {});                          // 0
  Var(g, DType::kInt32, {});                          // 1
  Op(g, OpCode::kAdd, {NodeId{0}, NodeId{1}});        // 2
  Op(g, OpCode::kNegative, {NodeId{1}});              // 3
  Op(g, OpCode::kMultiply, {NodeId{2}, NodeId{2}});   // 4
  EXPECT_EQ(DependentClosure(g, {NodeId{0}}),
            (std::set<NodeId>{NodeId{0}, NodeId{2}, NodeId{4}}));
  ComputationalGraph r = RemoveNodes(g, {NodeId{0}});
  EXPECT_EQ(SerializeGraph(r),
            "0 variable int32 ()\n"
            "1 operator negative 0\n");
  EXPECT_EQ(Prefix(g, 3).size(), 3);
  EXPECT_EQ(Prefix(g, 0).size(), 0);
}

TEST(EditTest, FunctionsFollowTheirBody) {
  ComputationalGraph g;
  Var(g, DType::kInt32, {});                          // 0
  Op(g, OpCode::kNegative, {NodeId{0}});              // 1
  g.Append(FunctionNode{{NodeId{1}}, {NodeId{0}}, {NodeId{1}}});  // 2
  g.Append(CallNode{NodeId{2}, NodeId{1}});           // 3
  EXPECT_EQ(DependentClosure(g, {NodeId{1}}),
            (std::set<NodeId>{NodeId{1}, NodeId{2}, NodeId{3}}));
  EXPECT_EQ(DependentClosure(g, {NodeId{2}}),
            (std::set<NodeId>{NodeId{2}, NodeId{3}}));
  EXPECT_TRUE(ValidateGraph(g, BuildInfoTable(g)).empty());
}

}  // namespace
}  // namespace graphfuzz
