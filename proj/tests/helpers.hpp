#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coflow/coflow.hpp"

namespace testing_support {

using namespace coflow;

inline Coflow coflow_of(CoflowId id, double weight, std::vector<Flow> flows, Time release = 0) {
  return Coflow{id, release, weight, std::move(flows)};
}

inline Instance instance_of(int cores, int ports, std::vector<Coflow> coflows,
                            std::vector<Edge> edges = {}) {
  return Instance{{cores, ports}, std::move(coflows), std::move(edges)};
}

inline GeneratorParams params(std::uint64_t seed, int n = 12, int cores = 2, int ports = 6) {
  GeneratorParams g;
  g.n = n;
  g.cores = cores;
  g.ports = ports;
  g.seed = seed;
  return g;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
