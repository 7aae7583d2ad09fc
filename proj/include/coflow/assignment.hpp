#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/primal_dual.hpp"

namespace coflow {

enum class AssignmentKind { flow_level, coflow_level };

inline const char* to_string(AssignmentKind kind) {
  return kind == AssignmentKind::flow_level ? "flow" : "coflow";
}

// Core ids are 1..m. Flow-level assignments fill flow_to_core; coflow-level
// assignments fill coflow_to_core and every flow follows its coflow.
struct CoreAssignment {
  AssignmentKind kind = AssignmentKind::flow_level;
  int cores = 1;
  int ports = 1;
  std::map<FlowKey, int> flow_to_core;
  std::map<CoflowId, int> coflow_to_core;
  // Row-major [port-1][core-1] accumulated volume.
  std::vector<Volume> in_load, out_load;

  Volume load_in(Port i, int core) const { return in_load[(i - 1) * cores + (core - 1)]; }
  Volume load_out(Port j, int core) const { return out_load[(j - 1) * cores + (core - 1)]; }

  int core_of(const FlowKey& flow) const {
    if (kind == AssignmentKind::flow_level) {
      auto it = flow_to_core.find(flow);
      if (it == flow_to_core.end()) throw Error("unassigned flow of coflow " + std::to_string(flow.coflow));
      return it->second;
    }
    auto it = coflow_to_core.find(flow.coflow);
    if (it == coflow_to_core.end()) throw Error("unassigned coflow " + std::to_string(flow.coflow));
    return it->second;
  }

  friend bool operator==(const CoreAssignment&, const CoreAssignment&) = default;
};

namespace detail {

inline CoreAssignment empty_assignment(AssignmentKind kind, const NetworkConfig& config) {
  CoreAssignment a;
  a.kind = kind;
  a.cores = config.cores;
  a.ports = config.ports;
  a.in_load.assign(static_cast<std::size_t>(config.ports) * config.cores, 0);
  a.out_load.assign(static_cast<std::size_t>(config.ports) * config.cores, 0);
  return a;
}

// Priority position -> dense coflow index; rejects anything that is not a
// permutation of the instance's coflow ids.
inline std::vector<int> resolve_permutation(const IndexedInstance& idx, const Permutation& perm) {
  if (static_cast<int>(perm.order.size()) != idx.size())
    throw Error("permutation does not cover the instance's coflows");
  std::vector<int> order;
  std::vector<char> seen(idx.size(), 0);
  for (auto id : perm.order) {
    int v;
    try {
      v = idx.index_of(id);
    } catch (const Error&) {
      throw Error("permutation names unknown coflow " + std::to_string(id));
    }
    if (seen[v]) throw Error("permutation repeats coflow " + std::to_string(id));
    seen[v] = 1;
    order.push_back(v);
  }
  return order;
}

// Non-increasing size, ties by (src, dst).
inline std::vector<Flow> flows_by_size(const Coflow& c) {
  std::vector<Flow> flows = c.flows;
  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    if (a.size != b.size) return a.size > b.size;
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return flows;
}

}  // namespace detail

// Flow-driven list scheduling, assignment phase: each flow goes to the core
// with the least combined load on its input and output port.
inline CoreAssignment assign_flows_fdls(const Instance& instance, const Permutation& perm) {
  IndexedInstance idx(instance);
  const auto order = detail::resolve_permutation(idx, perm);
  auto a = detail::empty_assignment(AssignmentKind::flow_level, instance.config);
  const int m = a.cores;
  for (int v : order) {
    const Coflow& c = idx.coflow(v);
    for (const Flow& f : detail::flows_by_size(c)) {
      int best = 1;
      Volume best_load = a.load_in(f.src, 1) + a.load_out(f.dst, 1);
      for (int h = 2; h <= m; ++h) {
        const Volume load = a.load_in(f.src, h) + a.load_out(f.dst, h);
        if (load < best_load) {
          best_load = load;
          best = h;
        }
      }
      a.flow_to_core[{f.src, f.dst, c.id}] = best;
      a.in_load[(f.src - 1) * m + (best - 1)] += f.size;
      a.out_load[(f.dst - 1) * m + (best - 1)] += f.size;
    }
  }
  return a;
}

// Coflow-driven list scheduling, assignment phase: each coflow goes to the
// core minimizing max_{i,j} load_I(i,h) + load_O(j,h) + L_{i,k} + L_{j,k}.
// The objective separates into max_i(load_I + L_i) + max_j(load_O + L_j).
inline CoreAssignment assign_coflows_cdls(const Instance& instance, const Permutation& perm) {
  IndexedInstance idx(instance);
  const auto order = detail::resolve_permutation(idx, perm);
  auto a = detail::empty_assignment(AssignmentKind::coflow_level, instance.config);
  const int m = a.cores;
  const int N = a.ports;
  for (int v : order) {
    const Coflow& c = idx.coflow(v);
    const auto loads = coflow_port_loads(c, instance.config);
    int best = 1;
    Volume best_score = 0;
    for (int h = 1; h <= m; ++h) {
      Volume in_max = 0, out_max = 0;
      for (Port p = 1; p <= N; ++p) {
        in_max = std::max(in_max, a.load_in(p, h) + loads.in[p]);
        out_max = std::max(out_max, a.load_out(p, h) + loads.out[p]);
      }
      const Volume score = in_max + out_max;
      if (h == 1 || score < best_score) {
        best_score = score;
        best = h;
      }
    }
    a.coflow_to_core[c.id] = best;
    for (Port p = 1; p <= N; ++p) {
      a.in_load[(p - 1) * m + (best - 1)] += loads.in[p];
      a.out_load[(p - 1) * m + (best - 1)] += loads.out[p];
    }
  }
  return a;
}

}  // namespace coflow
