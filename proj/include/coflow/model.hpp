#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coflow/error.hpp"

namespace coflow {

using CoflowId = std::int64_t;
using JobId = std::int64_t;
using Port = int;
using Time = std::int64_t;
using Volume = std::int64_t;

// m identical N x N non-blocking cores. Ports are numbered 1..N on both
// the input side and the output side.
struct NetworkConfig {
  int cores = 1;
  int ports = 1;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct Flow {
  Port src = 1;
  Port dst = 1;
  Volume size = 1;

  friend bool operator==(const Flow&, const Flow&) = default;
};

// Identity of a flow across the whole instance: (i, j, k).
struct FlowKey {
  Port src = 1;
  Port dst = 1;
  CoflowId coflow = 0;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct Coflow {
  CoflowId id = 0;
  Time release = 0;
  double weight = 1.0;
  std::vector<Flow> flows;

  Volume total_size() const {
    Volume total = 0;
    for (const auto& f : flows) total += f.size;
    return total;
  }

  friend bool operator==(const Coflow&, const Coflow&) = default;
};

// (pred, succ): every flow of pred must finish before any flow of succ starts.
using Edge = std::pair<CoflowId, CoflowId>;

struct PrecedenceDag {
  std::vector<CoflowId> nodes;
  std::vector<Edge> edges;

  friend bool operator==(const PrecedenceDag&, const PrecedenceDag&) = default;
};

struct Instance {
  NetworkConfig config;
  std::vector<Coflow> coflows;
  std::vector<Edge> edges;

  PrecedenceDag dag() const {
    PrecedenceDag g;
    g.nodes.reserve(coflows.size());
    for (const auto& c : coflows) g.nodes.push_back(c.id);
    g.edges = edges;
    return g;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Job {
  JobId id = 0;
  double weight = 1.0;
  std::vector<CoflowId> coflows;

  friend bool operator==(const Job&, const Job&) = default;
};

// Multi-stage jobs: each job owns a set of coflows that share one release
// time; precedence edges only connect coflows of the same job.
struct JobSet {
  NetworkConfig config;
  std::vector<Job> jobs;
  std::vector<Coflow> coflows;
  std::vector<Edge> edges;

  // The underlying coflow instance (coflow weights are kept as stored).
  Instance coflow_instance() const { return Instance{config, coflows, edges}; }

  friend bool operator==(const JobSet&, const JobSet&) = default;
};

struct Violation {
  std::string what;
  std::string entity;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool has(const std::string& what) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.what == what; });
  }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.what + " (" + v.entity + ")";
    }
    return out;
  }
};

namespace detail {

inline std::string flow_name(const Flow& f, CoflowId k) {
  return "flow (" + std::to_string(f.src) + "," + std::to_string(f.dst) + "," +
         std::to_string(k) + ")";
}

inline std::string edge_name(const Edge& e) {
  return "edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

// Kahn's algorithm over dense indices; the ready set is a min-heap so ties
// resolve to the smallest index. Returns fewer than n entries on a cycle.
inline std::vector<int> kahn_order(int n, const std::vector<std::vector<int>>& succ) {
  std::vector<int> indeg(n, 0);
  for (const auto& s : succ)
    for (int v : s) ++indeg[v];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  return order;
}

// Dense-index view of a DAG with nodes sorted by id.
struct DenseDag {
  std::vector<CoflowId> ids;
  std::vector<std::vector<int>> succ;

  explicit DenseDag(const PrecedenceDag& g) : ids(g.nodes) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    succ.resize(ids.size());
    for (const auto& [a, b] : g.edges) {
      int u = index(a), v = index(b);
      if (u < 0 || v < 0) throw Error("edge endpoint is not a node: " + edge_name({a, b}));
      succ[u].push_back(v);
    }
  }

  int index(CoflowId id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return -1;
    return static_cast<int>(it - ids.begin());
  }
};

}  // namespace detail

// Node ids in a topological order, ties broken by ascending id.
inline std::vector<CoflowId> topological_order(const PrecedenceDag& dag) {
  detail::DenseDag g(dag);
  auto order = detail::kahn_order(static_cast<int>(g.ids.size()), g.succ);
  if (order.size() != g.ids.size()) throw Error("cyclic DAG");
  std::vector<CoflowId> out;
  out.reserve(order.size());
  for (int v : order) out.push_back(g.ids[v]);
  return out;
}

// Number of nodes on the longest directed path (chi). An isolated node is a
// path of length 1; an empty graph yields 0.
inline int longest_path_chi(const PrecedenceDag& dag) {
  detail::DenseDag g(dag);
  const int n = static_cast<int>(g.ids.size());
  auto order = detail::kahn_order(n, g.succ);
  if (static_cast<int>(order.size()) != n) throw Error("cyclic DAG");
  std::vector<int> depth(n, 1);
  int best = n > 0 ? 1 : 0;
  for (int v : order)
    for (int w : g.succ[v]) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      best = std::max(best, depth[w]);
    }
  return best;
}

struct PortLoads {
  std::vector<Volume> in;   // index 0 unused; 1..N
  std::vector<Volume> out;  // index 0 unused; 1..N
};

// L_{i,k} and L_{j,k} for one coflow, as dense vectors indexed by port.
inline PortLoads coflow_port_loads(const Coflow& coflow, const NetworkConfig& config) {
  PortLoads loads{std::vector<Volume>(config.ports + 1, 0),
                  std::vector<Volume>(config.ports + 1, 0)};
  for (const auto& f : coflow.flows) {
    if (f.src < 1 || f.src > config.ports || f.dst < 1 || f.dst > config.ports)
      throw Error("port out of range in " + detail::flow_name(f, coflow.id));
    loads.in[f.src] += f.size;
    loads.out[f.dst] += f.size;
  }
  return loads;
}

inline ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report;
  auto add = [&](std::string what, std::string entity) {
    report.violations.push_back({std::move(what), std::move(entity)});
  };
  const auto& cfg = instance.config;
  if (cfg.cores < 1) add("non-positive core count", "config");
  if (cfg.ports < 1) add("non-positive port count", "config");

  std::set<CoflowId> ids;
  for (const auto& c : instance.coflows) {
    const std::string name = "coflow " + std::to_string(c.id);
    if (!ids.insert(c.id).second) add("duplicate coflow id", name);
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) add("non-positive weight", name);
    if (c.release < 0) add("negative release", name);
    if (c.flows.empty()) add("coflow has no flows", name);
    std::set<std::pair<Port, Port>> pairs;
    for (const auto& f : c.flows) {
      if (f.size <= 0) add("non-positive flow size", detail::flow_name(f, c.id));
      if (f.src < 1 || f.src > cfg.ports || f.dst < 1 || f.dst > cfg.ports)
        add("port out of range", detail::flow_name(f, c.id));
      if (!pairs.insert({f.src, f.dst}).second)
        add("duplicate flow", detail::flow_name(f, c.id));
    }
  }

  bool edges_ok = true;
  std::set<Edge> seen;
  for (const auto& e : instance.edges) {
    if (!ids.count(e.first) || !ids.count(e.second)) {
      add("edge endpoint is not a coflow", detail::edge_name(e));
      edges_ok = false;
    } else if (e.first == e.second) {
      add("cycle detected", detail::edge_name(e));
      edges_ok = false;
    } else if (!seen.insert(e).second) {
      add("duplicate edge", detail::edge_name(e));
    }
  }
  if (edges_ok && ids.size() == instance.coflows.size()) {
    detail::DenseDag g(instance.dag());
    if (detail::kahn_order(static_cast<int>(g.ids.size()), g.succ).size() != g.ids.size())
      add("cycle detected", "dag");
  }
  return report;
}

inline ValidationReport validate_jobset(const JobSet& jobset) {
  ValidationReport report = validate_instance(jobset.coflow_instance());
  auto add = [&](std::string what, std::string entity) {
    report.violations.push_back({std::move(what), std::move(entity)});
  };
  std::map<CoflowId, Time> release;
  for (const auto& c : jobset.coflows) release[c.id] = c.release;

  std::map<CoflowId, JobId> owner;
  std::set<JobId> job_ids;
  for (const auto& job : jobset.jobs) {
    const std::string name = "job " + std::to_string(job.id);
    if (!job_ids.insert(job.id).second) add("duplicate job id", name);
    if (!(job.weight > 0.0) || !std::isfinite(job.weight)) add("non-positive weight", name);
    if (job.coflows.empty()) add("job has no coflows", name);
    std::set<Time> releases;
    for (CoflowId k : job.coflows) {
      if (!release.count(k)) {
        add("job references unknown coflow", name + " coflow " + std::to_string(k));
        continue;
      }
      if (!owner.emplace(k, job.id).second)
        add("coflow belongs to several jobs", "coflow " + std::to_string(k));
      releases.insert(release[k]);
    }
    if (releases.size() > 1) add("job coflows have different releases", name);
  }
  for (const auto& c : jobset.coflows)
    if (!owner.count(c.id)) add("coflow belongs to no job", "coflow " + std::to_string(c.id));
  for (const auto& e : jobset.edges) {
    auto a = owner.find(e.first), b = owner.find(e.second);
    if (a != owner.end() && b != owner.end() && a->second != b->second)
      add("edge crosses jobs", detail::edge_name(e));
  }
  return report;
}

inline void require_valid(const Instance& instance) {
  auto report = validate_instance(instance);
  if (!report.ok()) throw Error("invalid instance: " + report.to_string());
}

inline void require_valid(const JobSet& jobset) {
  auto report = validate_jobset(jobset);
  if (!report.ok()) throw Error("invalid job set: " + report.to_string());
}

struct PortAmount {
  Port port = 0;
  Volume load = 0;
};

// Dense, id-sorted view of a validated instance shared by the algorithms.
// Index v refers to the v-th coflow in ascending id order, so "lowest index"
// tie-breaks are "lowest id" tie-breaks.
class IndexedInstance {
 public:
  explicit IndexedInstance(const Instance& instance) : instance_(&instance) {
    require_valid(instance);
    const int n = static_cast<int>(instance.coflows.size());
    by_id_.resize(n);
    for (int v = 0; v < n; ++v) by_id_[v] = v;
    std::sort(by_id_.begin(), by_id_.end(), [&](int a, int b) {
      return instance.coflows[a].id < instance.coflows[b].id;
    });
    ids_.reserve(n);
    for (int v : by_id_) ids_.push_back(instance.coflows[v].id);
    succ_.resize(n);
    pred_.resize(n);
    for (const auto& [a, b] : instance.edges) {
      int u = index_of(a), w = index_of(b);
      succ_[u].push_back(w);
      pred_[w].push_back(u);
    }
    for (auto& s : succ_) std::sort(s.begin(), s.end());
    for (auto& p : pred_) std::sort(p.begin(), p.end());
    in_.resize(n);
    out_.resize(n);
    for (int v = 0; v < n; ++v) {
      std::map<Port, Volume> in, out;
      for (const auto& f : coflow(v).flows) {
        in[f.src] += f.size;
        out[f.dst] += f.size;
      }
      for (auto [p, l] : in) in_[v].push_back({p, l});
      for (auto [p, l] : out) out_[v].push_back({p, l});
    }
  }

  const Instance& instance() const { return *instance_; }
  const NetworkConfig& config() const { return instance_->config; }
  int size() const { return static_cast<int>(ids_.size()); }
  CoflowId id(int v) const { return ids_[v]; }
  const Coflow& coflow(int v) const { return instance_->coflows[by_id_[v]]; }

  int index_of(CoflowId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) throw Error("unknown coflow id " + std::to_string(id));
    return static_cast<int>(it - ids_.begin());
  }

  const std::vector<int>& successors(int v) const { return succ_[v]; }
  const std::vector<int>& predecessors(int v) const { return pred_[v]; }
  // Nonzero per-port loads, sorted by port.
  const std::vector<PortAmount>& in_loads(int v) const { return in_[v]; }
  const std::vector<PortAmount>& out_loads(int v) const { return out_[v]; }

 private:
  const Instance* instance_;
  std::vector<int> by_id_;
  std::vector<CoflowId> ids_;
  std::vector<std::vector<int>> succ_, pred_;
  std::vector<std::vector<PortAmount>> in_, out_;
};

// True when along every edge (k', k) the weight does not increase and no
// per-port load decreases, i.e. w_{k'} >= w_k, L_{i,k'} <= L_{i,k} and
// L_{j,k'} <= L_{j,k} on every port.
inline bool is_conforming(const Instance& instance) {
  std::map<CoflowId, const Coflow*> by_id;
  for (const auto& c : instance.coflows) by_id[c.id] = &c;
  for (const auto& [a, b] : instance.edges) {
    const Coflow& pred = *by_id.at(a);
    const Coflow& succ = *by_id.at(b);
    if (pred.weight < succ.weight) return false;
    auto lp = coflow_port_loads(pred, instance.config);
    auto ls = coflow_port_loads(succ, instance.config);
    for (int p = 1; p <= instance.config.ports; ++p)
      if (lp.in[p] > ls.in[p] || lp.out[p] > ls.out[p]) return false;
  }
  return true;
}

}  // namespace coflow
