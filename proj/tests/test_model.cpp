#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"

using namespace coflow;
using namespace testing_support;

namespace {

Instance two_coflows() {
  return instance_of(1, 2, {coflow_of(1, 1.0, {{1, 1, 2}}), coflow_of(2, 2.0, {{1, 2, 1}})});
}

PrecedenceDag dag_of(std::vector<CoflowId> nodes, std::vector<Edge> edges) {
  return PrecedenceDag{std::move(nodes), std::move(edges)};
}

}  // namespace

TEST(Validate, WellFormedInstance) { EXPECT_TRUE(validate_instance(two_coflows()).ok()); }

TEST(Validate, ZeroSizeFlow) {
  auto inst = two_coflows();
  inst.coflows[0].flows[0].size = 0;
  auto report = validate_instance(inst);
  EXPECT_TRUE(report.has("non-positive flow size"));
  EXPECT_NE(report.to_string().find("(1,1,1)"), std::string::npos);
}

TEST(Validate, TwoCycle) {
  auto inst = two_coflows();
  inst.edges = {{1, 2}, {2, 1}};
  EXPECT_TRUE(validate_instance(inst).has("cycle detected"));
}

TEST(Validate, EveryViolationListed) {
  Instance inst = instance_of(0, 2,
                              {coflow_of(1, -1.0, {{1, 3, 2}, {1, 3, 1}}, -4), coflow_of(1, 1.0, {})},
                              {{1, 9}, {1, 1}});
  auto r = validate_instance(inst);
  for (const char* what : {"non-positive core count", "non-positive weight", "negative release",
                           "port out of range", "duplicate flow", "duplicate coflow id",
                           "coflow has no flows", "edge endpoint is not a coflow", "cycle detected"})
    EXPECT_TRUE(r.has(what)) << what;
}

TEST(Validate, DuplicateEdge) {
  auto inst = two_coflows();
  inst.edges = {{1, 2}, {1, 2}};
  EXPECT_TRUE(validate_instance(inst).has("duplicate edge"));
}

TEST(Validate, LongerCycle) {
  Instance inst = instance_of(1, 1, {coflow_of(1, 1, {{1, 1, 1}}), coflow_of(2, 1, {{1, 1, 1}}),
                                     coflow_of(3, 1, {{1, 1, 1}})},
                              {{1, 2}, {2, 3}, {3, 1}});
  EXPECT_TRUE(validate_instance(inst).has("cycle detected"));
  EXPECT_THROW(require_valid(inst), Error);
}

TEST(ValidateJobs, PartitionAndReleases) {
  JobSet js;
  js.config = {1, 2};
  js.coflows = {coflow_of(1, 1, {{1, 1, 1}}), coflow_of(2, 1, {{1, 1, 1}}, 5),
                coflow_of(3, 1, {{1, 1, 1}})};
  js.jobs = {{1, 1.0, {1, 2}}, {2, 1.0, {2, 7}}};
  js.edges = {{1, 2}, {2, 3}};
  auto r = validate_jobset(js);
  EXPECT_TRUE(r.has("job coflows have different releases"));
  EXPECT_TRUE(r.has("coflow belongs to several jobs"));
  EXPECT_TRUE(r.has("job references unknown coflow"));
  EXPECT_TRUE(r.has("coflow belongs to no job"));

  js.coflows[1].release = 0;
  js.jobs = {{1, 1.0, {1, 2}}, {2, 1.0, {3}}};
  r = validate_jobset(js);
  EXPECT_TRUE(r.has("edge crosses jobs"));
  js.edges = {{1, 2}};
  EXPECT_TRUE(validate_jobset(js).ok()) << validate_jobset(js).to_string();
}

TEST(Chi, Examples) {
  EXPECT_EQ(longest_path_chi(dag_of({1, 2, 3, 4}, {})), 1);
  EXPECT_EQ(longest_path_chi(dag_of({1, 2, 3}, {{1, 2}, {2, 3}})), 3);
  EXPECT_EQ(longest_path_chi(dag_of({1, 2, 3, 4}, {{1, 2}, {1, 3}, {2, 4}, {3, 4}})), 3);
  EXPECT_EQ(longest_path_chi(dag_of({}, {})), 0);
}

TEST(Chi, Cycle) {
  try {
    longest_path_chi(dag_of({1, 2}, {{1, 2}, {2, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "cyclic DAG");
  }
}

TEST(Chi, FullChainEqualsN) {
  PrecedenceDag g;
  for (int k = 1; k <= 40; ++k) g.nodes.push_back(k);
  for (int k = 1; k < 40; ++k) g.edges.push_back({k, k + 1});
  EXPECT_EQ(longest_path_chi(g), 40);
}

TEST(PortLoads, Examples) {
  NetworkConfig cfg{1, 4};
  auto a = coflow_port_loads(coflow_of(1, 1, {{1, 1, 2}, {1, 2, 3}}), cfg);
  EXPECT_EQ(a.in, (std::vector<Volume>{0, 5, 0, 0, 0}));
  EXPECT_EQ(a.out, (std::vector<Volume>{0, 2, 3, 0, 0}));
  auto b = coflow_port_loads(coflow_of(1, 1, {}), cfg);
  EXPECT_EQ(b.in, std::vector<Volume>(5, 0));
  EXPECT_EQ(b.out, std::vector<Volume>(5, 0));
  auto c = coflow_port_loads(coflow_of(1, 1, {{2, 3, 7}}), cfg);
  EXPECT_EQ(c.in[2], 7);
  EXPECT_EQ(c.out[3], 7);
  EXPECT_EQ(c.in[1] + c.in[3] + c.in[4] + c.out[1] + c.out[2] + c.out[4], 0);
}

TEST(PortLoads, SidesBalanceOnGeneratedCoflows) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = generate_instance(params(seed));
    for (const auto& c : inst.coflows) {
      auto l = coflow_port_loads(c, inst.config);
      Volume in = 0, out = 0;
      for (Volume v : l.in) in += v;
      for (Volume v : l.out) out += v;
      EXPECT_EQ(in, c.total_size());
      EXPECT_EQ(out, c.total_size());
    }
  }
}

TEST(Topo, Examples) {
  EXPECT_EQ(topological_order(dag_of({1, 2, 3}, {{1, 2}, {2, 3}})), (std::vector<CoflowId>{1, 2, 3}));
  EXPECT_EQ(topological_order(dag_of({3, 1, 2}, {})), (std::vector<CoflowId>{1, 2, 3}));
  EXPECT_EQ(topological_order(dag_of({1, 2, 3}, {{3, 1}})), (std::vector<CoflowId>{2, 3, 1}));
  EXPECT_THROW(topological_order(dag_of({1, 2}, {{1, 2}, {2, 1}})), Error);
}

TEST(Topo, RespectsEdgesOnRandomDags) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto g = generate_dag(30, 3, 0.7, seed);
    auto order = topological_order(g);
    ASSERT_EQ(order.size(), 30u);
    std::vector<int> pos(31);
    for (std::size_t q = 0; q < order.size(); ++q) pos[order[q]] = static_cast<int>(q);
    for (auto [a, b] : g.edges) EXPECT_LT(pos[a], pos[b]);
    const int chi = longest_path_chi(g);
    EXPECT_GE(chi, 1);
    EXPECT_LE(chi, 30);
    EXPECT_EQ(chi == 1, g.edges.empty());
  }
}

TEST(Conforming, Detects) {
  Instance inst = instance_of(1, 1, {coflow_of(1, 5, {{1, 1, 1}}), coflow_of(2, 3, {{1, 1, 2}})}, {{1, 2}});
  EXPECT_TRUE(is_conforming(inst));
  inst.coflows[1].weight = 9;
  EXPECT_FALSE(is_conforming(inst));
  inst.coflows[1].weight = 3;
  inst.coflows[1].flows[0].size = 1;
  inst.coflows[0].flows[0].size = 4;
  EXPECT_FALSE(is_conforming(inst));
}
