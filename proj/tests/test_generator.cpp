#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"

using namespace coflow;
using namespace testing_support;

TEST(Dag, NoDegreeNoEdges) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = generate_dag(20, 0, 1.0, seed);
    EXPECT_TRUE(g.edges.empty());
    EXPECT_EQ(longest_path_chi(g), 1);
  }
}

TEST(Dag, Deterministic) {
  EXPECT_EQ(generate_dag(25, 3, 1.0, 99), generate_dag(25, 3, 1.0, 99));
  EXPECT_NE(generate_dag(25, 3, 1.0, 99), generate_dag(25, 3, 1.0, 100));
}

TEST(Dag, HighParallelismGivesOneLevel) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto l = generate_layered_dag(4, 3, 10.0, seed);
    EXPECT_TRUE(l.dag.edges.empty());
    for (int lv : l.level) EXPECT_EQ(lv, 0);
  }
}

TEST(Dag, EdgesClimbLevels) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto l = generate_layered_dag(30, 3, 0.8, seed);
    ASSERT_EQ(l.level.size(), 30u);
    for (auto [a, b] : l.dag.edges) EXPECT_LT(l.level[a - 1], l.level[b - 1]);
  }
}

TEST(Dag, LevelCountWithinSupport) {
  // n = 25, p = 1: levels ~ UniformInt[1, 10].
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto l = generate_layered_dag(25, 3, 1.0, seed);
    const int levels = 1 + *std::max_element(l.level.begin(), l.level.end());
    EXPECT_GE(levels, 1);
    EXPECT_LE(levels, 10);
    seen.insert(levels);
  }
  EXPECT_GE(seen.size(), 5u);
}

TEST(Dag, InvalidParams) {
  EXPECT_THROW(generate_dag(0, 1, 1.0, 1), Error);
  EXPECT_THROW(generate_dag(5, -1, 1.0, 1), Error);
  EXPECT_THROW(generate_dag(5, 1, 0.0, 1), Error);
}

TEST(Dag, MeanChiFallsWithParallelism) {
  double prev = INFINITY;
  for (double p : {0.5, 1.0, 2.0}) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) total += longest_path_chi(generate_dag(25, 3, p, seed));
    const double mean = total / 200;
    EXPECT_LE(mean, prev) << "p=" << p;
    prev = mean;
  }
}

TEST(Instance, SingleConfigRanges) {
  GeneratorParams g = params(5, 200, 2, 10);
  g.workload_mix = {{1, 4, 1, 10, 1.0}};
  const auto inst = generate_instance(g);
  EXPECT_TRUE(validate_instance(inst).ok());
  for (const auto& c : inst.coflows) {
    EXPECT_GE(c.flows.size(), 1u);
    EXPECT_LE(c.flows.size(), 16u);
    for (const auto& f : c.flows) {
      EXPECT_GE(f.size, 1);
      EXPECT_LE(f.size, 10);
    }
  }
}

TEST(Instance, WeightsInDefaultRange) {
  const auto inst = generate_instance(params(3, 500, 2, 10));
  std::set<double> seen;
  for (const auto& c : inst.coflows) {
    EXPECT_GE(c.weight, 1.0);
    EXPECT_LE(c.weight, 100.0);
    EXPECT_EQ(c.weight, std::floor(c.weight));
    EXPECT_EQ(c.release, 0);
    seen.insert(c.weight);
  }
  EXPECT_GT(seen.size(), 50u);
}

TEST(Instance, Deterministic) {
  GeneratorParams g = params(42, 25, 5, 10);
  g.density = DensityMode::combined;
  g.release_horizon = 50;
  EXPECT_EQ(generate_instance(g), generate_instance(g));
  GeneratorParams h = g;
  h.seed = 43;
  EXPECT_NE(generate_instance(g), generate_instance(h));
}

TEST(Instance, DefaultMixFractions) {
  const auto mix = default_workload_mix(10);
  std::vector<int> counts(4, 0);
  const int total = 20000;
  for (int k = 1; k <= total; ++k) {
    auto rng = CounterRng::stream(7, 2, k);
    const auto& w = detail::pick_config(rng, mix);
    counts[&w - mix.data()]++;
  }
  const double want[] = {0.41, 0.29, 0.09, 0.21};
  for (int q = 0; q < 4; ++q) EXPECT_NEAR(counts[q] / double(total), want[q], 0.02) << q;
}

TEST(Instance, MixDrivesGeneratedCoflows) {
  // Two distinguishable configurations, identified from the flow sizes.
  GeneratorParams g = params(9, 10000, 1, 6);
  g.deg = 0;
  g.workload_mix = {{1, 2, 1, 5, 0.7}, {1, 2, 100, 200, 0.3}};
  const auto inst = generate_instance(g);
  int small = 0;
  for (const auto& c : inst.coflows) small += c.flows.front().size <= 5;
  EXPECT_NEAR(small / 10000.0, 0.7, 0.02);
}

TEST(Instance, DensityModes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GeneratorParams g = params(seed, 100, 2, 10);
    g.density = DensityMode::dense;
    for (const auto& c : generate_instance(g).coflows) {
      EXPECT_GE(c.flows.size(), 10u);
      EXPECT_LE(c.flows.size(), 100u);
    }
    g.density = DensityMode::sparse;
    for (const auto& c : generate_instance(g).coflows) {
      EXPECT_GE(c.flows.size(), 1u);
      EXPECT_LE(c.flows.size(), 10u);
    }
    g.density = DensityMode::combined;
    int dense = 0;
    const auto inst = generate_instance(g);
    EXPECT_TRUE(validate_instance(inst).ok());
    for (const auto& c : inst.coflows) dense += c.flows.size() > 10;
    EXPECT_GT(dense, 25);
    EXPECT_LT(dense, 75);
  }
}

TEST(Instance, Releases) {
  GeneratorParams g = params(1, 200, 2, 6);
  g.release_horizon = 30;
  Time hi = 0;
  for (const auto& c : generate_instance(g).coflows) {
    EXPECT_GE(c.release, 0);
    EXPECT_LE(c.release, 30);
    hi = std::max(hi, c.release);
  }
  EXPECT_GT(hi, 0);
}

TEST(Instance, MinChi) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GeneratorParams g = params(seed, 25, 5, 10);
    g.min_chi = 3;
    EXPECT_GE(longest_path_chi(generate_instance(g).dag()), 3);
  }
}

TEST(Instance, Conforming) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GeneratorParams g = params(seed, 15, 5, 10);
    g.conforming = true;
    const auto inst = generate_instance(g);
    EXPECT_TRUE(validate_instance(inst).ok());
    EXPECT_TRUE(is_conforming(inst));
  }
}

TEST(Instance, RejectsBadParams) {
  GeneratorParams g = params(1);
  g.workload_mix = {{1, 9, 1, 10, 1.0}};
  EXPECT_THROW(generate_instance(g), Error);
  g.workload_mix = {{1, 2, 1, 10, 0.5}};
  EXPECT_THROW(generate_instance(g), Error);
  g = params(1, 5, 1, 3);
  EXPECT_THROW(generate_instance(g), Error);
  g = params(1);
  g.weight_range = {0, 3};
  EXPECT_THROW(generate_instance(g), Error);
}

TEST(JobSets, Structure) {
  GeneratorParams g = params(4, 6, 2, 6);
  g.release_horizon = 10;
  const JobSet js = generate_jobset(g, 5);
  EXPECT_TRUE(validate_jobset(js).ok()) << validate_jobset(js).to_string();
  EXPECT_EQ(js.jobs.size(), 5u);
  EXPECT_EQ(js.coflows.size(), 30u);
  EXPECT_EQ(js, generate_jobset(g, 5));
}

TEST(Rng, StreamsAreIndependentOfOrder) {
  auto a = CounterRng::stream(1, 2, 3);
  auto b = CounterRng::stream(1, 2, 3);
  auto c = CounterRng::stream(1, 2, 4);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
