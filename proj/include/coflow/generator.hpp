#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/rng.hpp"

namespace coflow {

// (W_min, W_max, L_min, L_max) with its share of the mix.
struct WorkloadConfig {
  int w_min = 1;
  int w_max = 4;
  Volume l_min = 1;
  Volume l_max = 10;
  double probability = 1.0;

  friend bool operator==(const WorkloadConfig&, const WorkloadConfig&) = default;
};

// The four standard coflow descriptions, 41/29/9/21 percent.
inline std::vector<WorkloadConfig> default_workload_mix(int ports) {
  return {{1, 4, 1, 10, 0.41},
          {1, 4, 10, 1000, 0.29},
          {4, ports, 1, 10, 0.09},
          {4, ports, 10, 1000, 0.21}};
}

enum class DensityMode { standard, dense, sparse, combined };

inline const char* to_string(DensityMode mode) {
  switch (mode) {
    case DensityMode::standard: return "default";
    case DensityMode::dense: return "dense";
    case DensityMode::sparse: return "sparse";
    case DensityMode::combined: return "combined";
  }
  return "?";
}

inline DensityMode parse_density(const std::string& s) {
  if (s == "default") return DensityMode::standard;
  if (s == "dense") return DensityMode::dense;
  if (s == "sparse") return DensityMode::sparse;
  if (s == "combined") return DensityMode::combined;
  throw Error("unknown density mode '" + s + "'");
}

struct GeneratorParams {
  int n = 25;
  int deg = 3;
  double p = 1.0;
  int ports = 10;
  int cores = 5;
  std::vector<WorkloadConfig> workload_mix;  // empty: default_workload_mix(ports)
  std::pair<int, int> weight_range{1, 100};
  DensityMode density = DensityMode::standard;
  std::uint64_t seed = 0;
  Time release_horizon = 0;  // > 0: releases ~ UniformInt[0, horizon]
  bool conforming = false;
  int min_chi = 1;  // redraw the DAG until its longest path has this many coflows
};

struct LayeredDag {
  PrecedenceDag dag;
  std::vector<int> level;  // level[k-1] of coflow k, 0-based
};

namespace detail {

enum : std::uint64_t { kDagStream = 1, kCoflowStream = 2, kJobStream = 3 };

inline std::int64_t uniform(CounterRng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// Upper end of UniformInt[1, hi] whose mean approximates `mean`.
inline std::int64_t support_for_mean(double mean) {
  return std::max<std::int64_t>(1, std::llround(2.0 * mean));
}

// First `count` entries of a seeded partial Fisher-Yates shuffle of 0..total-1.
inline std::vector<int> pick_distinct(CounterRng& rng, int total, int count) {
  std::vector<int> items(total);
  std::iota(items.begin(), items.end(), 0);
  for (int q = 0; q < count; ++q) std::swap(items[q], items[uniform(rng, q, total - 1)]);
  items.resize(count);
  return items;
}

inline void check_params(const GeneratorParams& g) {
  if (g.n < 1) throw Error("generator: n must be at least 1");
  if (g.deg < 0) throw Error("generator: deg must be non-negative");
  if (!(g.p > 0.0)) throw Error("generator: p must be positive");
  if (g.ports < 1 || g.cores < 1) throw Error("generator: ports and cores must be positive");
  if (g.weight_range.first < 1 || g.weight_range.first > g.weight_range.second)
    throw Error("generator: bad weight range");
  if (g.release_horizon < 0) throw Error("generator: negative release horizon");
  if (g.min_chi < 1 || g.min_chi > g.n) throw Error("generator: min_chi must be in [1, n]");
}

inline void check_mix(const std::vector<WorkloadConfig>& mix, int ports) {
  double total = 0.0;
  for (const auto& w : mix) {
    if (w.w_min < 1 || w.w_min > w.w_max || w.w_max > ports)
      throw Error("generator: workload needs 1 <= W_min <= W_max <= N");
    if (w.l_min < 1 || w.l_min > w.l_max) throw Error("generator: workload needs 1 <= L_min <= L_max");
    if (w.probability < 0.0) throw Error("generator: negative workload probability");
    total += w.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error("generator: workload probabilities must sum to 1");
}

inline LayeredDag layered_dag(int n, int deg, double p, CounterRng rng) {
  const double root = std::sqrt(static_cast<double>(n));
  const int levels = static_cast<int>(uniform(rng, 1, support_for_mean(root / p)));
  const std::int64_t width_hi = support_for_mean(p * root);

  LayeredDag out;
  out.level.resize(n);
  int assigned = 0;
  for (int l = 0; l < levels && assigned < n; ++l) {
    int width = static_cast<int>(uniform(rng, 1, width_hi));
    if (l == levels - 1) width = n - assigned;
    width = std::min(width, n - assigned);
    for (int q = 0; q < width; ++q) out.level[assigned++] = l;
  }
  for (int k = 1; k <= n; ++k) out.dag.nodes.push_back(k);

  // Coflows are numbered level by level, so Lv(k) is a suffix of 1..n.
  for (int k = 0; k < n; ++k) {
    int first_higher = k + 1;
    while (first_higher < n && out.level[first_higher] == out.level[k]) ++first_higher;
    const int higher = n - first_higher;
    if (higher == 0 || deg == 0) continue;
    const double prob = std::min(1.0, static_cast<double>(deg) / higher);
    std::bernoulli_distribution pick(prob);
    for (int s = first_higher; s < n; ++s)
      if (pick(rng)) out.dag.edges.push_back({k + 1, s + 1});
  }
  return out;
}

inline const WorkloadConfig& pick_config(CounterRng& rng, const std::vector<WorkloadConfig>& mix) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (const auto& w : mix) {
    acc += w.probability;
    if (u < acc) return w;
  }
  return mix.back();
}

// Along every edge, successors take the elementwise max of their
// predecessors' demand matrices and weights are handed out in
// non-increasing order along a topological order.
inline void make_conforming(Instance& inst) {
  const auto order = topological_order(inst.dag());
  std::map<CoflowId, Coflow*> by_id;
  for (auto& c : inst.coflows) by_id[c.id] = &c;
  std::map<CoflowId, std::vector<CoflowId>> preds;
  for (const auto& [a, b] : inst.edges) preds[b].push_back(a);
  for (CoflowId k : order) {
    Coflow& c = *by_id[k];
    std::map<std::pair<Port, Port>, Volume> demand;
    for (const auto& f : c.flows) demand[{f.src, f.dst}] = f.size;
    for (CoflowId p : preds[k])
      for (const auto& f : by_id[p]->flows) {
        auto& d = demand[{f.src, f.dst}];
        d = std::max(d, f.size);
      }
    c.flows.clear();
    for (const auto& [pair, size] : demand) c.flows.push_back({pair.first, pair.second, size});
  }
  std::vector<double> weights;
  for (const auto& c : inst.coflows) weights.push_back(c.weight);
  std::sort(weights.begin(), weights.end(), std::greater<>());
  for (std::size_t q = 0; q < order.size(); ++q) by_id[order[q]]->weight = weights[q];
}

}  // namespace detail

// Layered random DAG over coflows 1..n. The level count is drawn from
// UniformInt[1, max(1, round(2 sqrt(n) / p))] and each level width from
// UniformInt[1, max(1, round(2 p sqrt(n)))]; the last level absorbs the
// remainder. Every coflow on a strictly higher level becomes a successor
// of k independently with probability min(1, deg / |Lv(k)|).
inline LayeredDag generate_layered_dag(int n, int deg, double p, std::uint64_t seed,
                                       std::uint64_t attempt = 0) {
  if (n < 1 || deg < 0 || !(p > 0.0)) throw Error("generate_dag: invalid parameters");
  return detail::layered_dag(n, deg, p,
                             CounterRng::stream(seed, detail::kDagStream, attempt));
}

inline PrecedenceDag generate_dag(int n, int deg, double p, std::uint64_t seed) {
  return generate_layered_dag(n, deg, p, seed).dag;
}

inline Instance generate_instance(const GeneratorParams& params) {
  detail::check_params(params);
  const std::vector<WorkloadConfig> mix =
      params.workload_mix.empty() ? default_workload_mix(params.ports) : params.workload_mix;
  detail::check_mix(mix, params.ports);
  const int N = params.ports;

  Instance inst;
  inst.config = {params.cores, params.ports};
  for (int k = 1; k <= params.n; ++k) {
    auto rng = CounterRng::stream(params.seed, detail::kCoflowStream, k);
    Coflow c;
    c.id = k;
    const WorkloadConfig& w = detail::pick_config(rng, mix);
    bool dense = params.density == DensityMode::dense;
    if (params.density == DensityMode::combined) dense = std::bernoulli_distribution(0.5)(rng);

    if (params.density == DensityMode::standard) {
      const int w1 = static_cast<int>(detail::uniform(rng, w.w_min, w.w_max));
      const int w2 = static_cast<int>(detail::uniform(rng, w.w_min, w.w_max));
      auto inputs = detail::pick_distinct(rng, N, w1);
      auto outputs = detail::pick_distinct(rng, N, w2);
      std::sort(inputs.begin(), inputs.end());
      std::sort(outputs.begin(), outputs.end());
      for (int i : inputs)
        for (int j : outputs)
          c.flows.push_back({i + 1, j + 1, detail::uniform(rng, w.l_min, w.l_max)});
    } else {
      const int count = dense ? static_cast<int>(detail::uniform(rng, N, N * N))
                              : static_cast<int>(detail::uniform(rng, 1, N));
      auto cells = detail::pick_distinct(rng, N * N, count);
      std::sort(cells.begin(), cells.end());
      for (int cell : cells)
        c.flows.push_back({cell / N + 1, cell % N + 1, detail::uniform(rng, w.l_min, w.l_max)});
    }
    c.weight = static_cast<double>(
        detail::uniform(rng, params.weight_range.first, params.weight_range.second));
    if (params.release_horizon > 0) c.release = detail::uniform(rng, 0, params.release_horizon);
    inst.coflows.push_back(std::move(c));
  }

  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 10000) throw Error("generator: could not reach min_chi");
    auto layered = generate_layered_dag(params.n, params.deg, params.p, params.seed, attempt);
    if (longest_path_chi(layered.dag) >= params.min_chi) {
      inst.edges = std::move(layered.dag.edges);
      break;
    }
  }
  if (params.conforming) detail::make_conforming(inst);
  return inst;
}

// Independent jobs, each a generated DAG instance of params.n coflows.
// Coflow ids are renumbered consecutively across jobs; all coflows of a job
// share the job's release.
inline JobSet generate_jobset(const GeneratorParams& params, int num_jobs) {
  if (num_jobs < 1) throw Error("generator: need at least one job");
  JobSet js;
  js.config = {params.cores, params.ports};
  CoflowId next = 1;
  for (int t = 1; t <= num_jobs; ++t) {
    GeneratorParams sub = params;
    sub.seed = CounterRng::mix(params.seed ^ CounterRng::mix(static_cast<std::uint64_t>(t)));
    sub.release_horizon = 0;
    Instance part = generate_instance(sub);
    auto rng = CounterRng::stream(params.seed, detail::kJobStream, t);
    Job job;
    job.id = t;
    job.weight = static_cast<double>(
        detail::uniform(rng, params.weight_range.first, params.weight_range.second));
    const Time release =
        params.release_horizon > 0 ? detail::uniform(rng, 0, params.release_horizon) : 0;
    std::map<CoflowId, CoflowId> renumber;
    for (auto& c : part.coflows) {
      renumber[c.id] = next;
      c.id = next++;
      c.release = release;
      job.coflows.push_back(c.id);
      js.coflows.push_back(std::move(c));
    }
    for (const auto& [a, b] : part.edges) js.edges.push_back({renumber[a], renumber[b]});
    js.jobs.push_back(std::move(job));
  }
  return js;
}

}  // namespace coflow
