#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "coflow/error.hpp"
#include "coflow/model.hpp"

namespace coflow {

enum class DualKind { flow_level, coflow_level, job_level };
enum class Side { input, output };

inline const char* to_string(DualKind kind) {
  switch (kind) {
    case DualKind::flow_level: return "flow";
    case DualKind::coflow_level: return "coflow";
    case DualKind::job_level: return "job";
  }
  return "?";
}

inline const char* to_string(Side side) { return side == Side::input ? "input" : "output"; }

// Release-driven variable. One value per placed entity, attached to the
// bottleneck port that was active when it was raised.
struct AlphaEntry {
  Side side = Side::input;
  Port port = 1;
  std::int64_t entity = 0;  // coflow id, or job id for job-level duals
  double value = 0.0;

  friend bool operator==(const AlphaEntry&, const AlphaEntry&) = default;
};

// Load-driven variable beta_{port,S}. The snapshot lists the entities that
// were unscheduled and loaded the port when the variable was raised; for a
// flow-level dual the set S is exactly the flows of those coflows (or of
// those jobs' coflows) that use the port.
struct BetaEntry {
  Side side = Side::input;
  Port port = 1;
  std::vector<std::int64_t> snapshot;
  double value = 0.0;

  friend bool operator==(const BetaEntry&, const BetaEntry&) = default;
};

// Precedence-driven variable gamma_{pred,succ}, aggregated over ports.
struct GammaEntry {
  CoflowId pred = 0;
  CoflowId succ = 0;
  double value = 0.0;

  friend bool operator==(const GammaEntry&, const GammaEntry&) = default;
};

struct DualSolution {
  DualKind kind = DualKind::flow_level;
  double kappa = 0.5;
  std::vector<AlphaEntry> alpha;
  std::vector<BetaEntry> beta;
  std::vector<GammaEntry> gamma;

  friend bool operator==(const DualSolution&, const DualSolution&) = default;
};

// sigma(1) .. sigma(n): processing order, first entry scheduled first.
struct Permutation {
  std::vector<std::int64_t> order;

  friend bool operator==(const Permutation&, const Permutation&) = default;
};

inline constexpr double kDefaultKappa = 0.5;

// f(S) = (d(S)^2 + d^2(S)) / 2m over a multiset of flow sizes.
inline double f_set(std::span<const Volume> sizes, int m) {
  if (m < 1) throw Error("f_set: core count must be positive");
  double sum = 0.0, squares = 0.0;
  for (Volume d : sizes) {
    const double x = static_cast<double>(d);
    sum += x;
    squares += x * x;
  }
  return (sum * sum + squares) / (2.0 * m);
}

// f_i(S) over the per-coflow loads a set of coflows places on one port. The
// arithmetic is the same as f_set; only the meaning of the multiset differs.
inline double f_port_set(std::span<const Volume> port_loads, int m) {
  if (m < 1) throw Error("f_port_set: core count must be positive");
  return f_set(port_loads, m);
}

namespace detail {

// Entities (coflows or jobs) in the form the permutation engine consumes.
struct DualProblem {
  int ports = 1;
  int cores = 1;
  std::vector<double> weight;
  std::vector<Time> release;
  std::vector<std::vector<PortAmount>> in, out;
  std::vector<std::vector<int>> succ;  // empty for jobs
};

struct EngineAlpha {
  Side side;
  Port port;
  int entity;
  double value;
};
struct EngineBeta {
  Side side;
  Port port;
  std::vector<int> snapshot;
  double value;
};
struct EngineGamma {
  int pred, succ;
  double value;
};

struct EngineResult {
  std::vector<int> order;
  std::vector<EngineAlpha> alpha;
  std::vector<EngineBeta> beta;
  std::vector<EngineGamma> gamma;
};

inline constexpr double kResidualTolerance = 1e-9;

// Right-to-left primal-dual construction shared by all three variants.
//
// residual[e] is w_e minus the current left-hand side of e's dual
// constraint; it is kept up to date incrementally so an iteration costs
// O(n + N). An entity is placed exactly when its residual reaches zero.
inline EngineResult run_permutation(const DualProblem& p, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error("kappa must be positive");
  const int n = static_cast<int>(p.weight.size());
  const int N = p.ports;

  std::vector<std::vector<std::pair<int, Volume>>> in_members(N + 1), out_members(N + 1);
  std::vector<Volume> in_total(N + 1, 0), out_total(N + 1, 0);
  for (int e = 0; e < n; ++e) {
    for (auto [port, load] : p.in[e]) {
      in_members[port].push_back({e, load});
      in_total[port] += load;
    }
    for (auto [port, load] : p.out[e]) {
      out_members[port].push_back({e, load});
      out_total[port] += load;
    }
  }

  std::vector<double> residual(p.weight);
  std::vector<char> scheduled(n, 0);
  EngineResult result;
  result.order.assign(n, -1);

  auto drop = [&](int e, double amount) {
    residual[e] -= amount;
    if (residual[e] < 0.0) {
      if (residual[e] < -kResidualTolerance * std::max(1.0, p.weight[e]))
        throw InternalError("negative dual slack for entity index " + std::to_string(e));
      residual[e] = 0.0;
    }
  };

  for (int r = n - 1; r >= 0; --r) {
    Port mu_in = 1, mu_out = 1;
    for (Port i = 2; i <= N; ++i)
      if (in_total[i] > in_total[mu_in]) mu_in = i;
    for (Port j = 2; j <= N; ++j)
      if (out_total[j] > out_total[mu_out]) mu_out = j;

    int latest = -1;
    for (int e = 0; e < n; ++e)
      if (!scheduled[e] && (latest < 0 || p.release[e] > p.release[latest])) latest = e;

    const Side side = in_total[mu_in] > out_total[mu_out] ? Side::input : Side::output;
    const Port mu = side == Side::input ? mu_in : mu_out;
    const Volume bottleneck = side == Side::input ? in_total[mu_in] : out_total[mu_out];
    const auto& members = side == Side::input ? in_members[mu] : out_members[mu];

    int placed = -1;
    if (bottleneck == 0 ||
        static_cast<double>(p.release[latest]) > kappa * static_cast<double>(bottleneck) / p.cores) {
      // Release-driven step: raise alpha of the latest-released entity.
      placed = latest;
      result.alpha.push_back({side, mu, placed, residual[placed]});
      residual[placed] = 0.0;
    } else {
      // Load-driven step on the bottleneck port.
      auto load_of = [&](int e) -> Volume {
        for (auto [m, l] : members)
          if (m == e) return l;
        return 0;
      };
      int candidate = -1;
      double best = std::numeric_limits<double>::infinity();
      for (auto [e, load] : members) {
        if (scheduled[e]) continue;
        const double ratio = residual[e] / static_cast<double>(load);
        if (ratio < best || (ratio == best && e < candidate)) {
          best = ratio;
          candidate = e;
        }
      }
      if (candidate < 0) throw InternalError("no loaded candidate on the bottleneck port");

      int tail = candidate, before_tail = -1;
      for (;;) {
        int next = -1;
        for (int s : p.succ[tail])
          if (!scheduled[s]) {
            next = s;
            break;
          }
        if (next < 0) break;
        before_tail = tail;
        tail = next;
      }

      const double beta = best;
      if (tail != candidate) {
        // tail has no gamma into it yet, so its residual already carries every
        // outgoing gamma; the new gamma absorbs what beta will not cover.
        const double gamma = residual[tail] - static_cast<double>(load_of(tail)) * beta;
        const double tol = kResidualTolerance * std::max(1.0, p.weight[tail]);
        if (gamma < -tol) throw InternalError("negative gamma on chain step");
        // A tail whose ratio ties the candidate's needs no gamma.
        if (gamma > tol) {
          result.gamma.push_back({before_tail, tail, gamma});
          residual[tail] -= gamma;
          residual[before_tail] += gamma;
        }
      }

      EngineBeta entry{side, mu, {}, beta};
      for (auto [e, load] : members) {
        if (scheduled[e]) continue;
        entry.snapshot.push_back(e);
        drop(e, beta * static_cast<double>(load));
      }
      result.beta.push_back(std::move(entry));
      placed = tail;
      residual[placed] = 0.0;
    }

    scheduled[placed] = 1;
    result.order[r] = placed;
    for (auto [port, load] : p.in[placed]) in_total[port] -= load;
    for (auto [port, load] : p.out[placed]) out_total[port] -= load;
  }
  return result;
}

inline DualProblem coflow_problem(const IndexedInstance& idx) {
  DualProblem p;
  p.ports = idx.config().ports;
  p.cores = idx.config().cores;
  const int n = idx.size();
  for (int v = 0; v < n; ++v) {
    p.weight.push_back(idx.coflow(v).weight);
    p.release.push_back(idx.coflow(v).release);
    p.in.push_back(idx.in_loads(v));
    p.out.push_back(idx.out_loads(v));
    p.succ.push_back(idx.successors(v));
  }
  return p;
}

inline std::pair<Permutation, DualSolution> package(const EngineResult& r, DualKind kind,
                                                    double kappa,
                                                    const std::vector<std::int64_t>& ids) {
  Permutation perm;
  for (int v : r.order) perm.order.push_back(ids[v]);
  DualSolution dual;
  dual.kind = kind;
  dual.kappa = kappa;
  for (const auto& a : r.alpha) dual.alpha.push_back({a.side, a.port, ids[a.entity], a.value});
  for (const auto& b : r.beta) {
    BetaEntry e{b.side, b.port, {}, b.value};
    for (int v : b.snapshot) e.snapshot.push_back(ids[v]);
    std::sort(e.snapshot.begin(), e.snapshot.end());
    dual.beta.push_back(std::move(e));
  }
  for (const auto& g : r.gamma) dual.gamma.push_back({ids[g.pred], ids[g.succ], g.value});
  return {std::move(perm), std::move(dual)};
}

inline std::vector<std::int64_t> ids_of(const IndexedInstance& idx) {
  std::vector<std::int64_t> ids;
  for (int v = 0; v < idx.size(); ++v) ids.push_back(idx.id(v));
  return ids;
}

}  // namespace detail

// Coflow order for flow-level scheduling together with a feasible dual of
// the flow-level relaxation.
inline std::pair<Permutation, DualSolution> permute_flow_level(const Instance& instance,
                                                               double kappa = kDefaultKappa) {
  IndexedInstance idx(instance);
  auto result = detail::run_permutation(detail::coflow_problem(idx), kappa);
  return detail::package(result, DualKind::flow_level, kappa, detail::ids_of(idx));
}

// Coflow order for coflow-level scheduling. The residual bookkeeping is the
// same as the flow-level variant because beta_{i,S} L_{i,S,k} collapses to
// beta_{i,S} L_{i,k} for every coflow in S; the duals differ in what the
// snapshots price in the objective.
inline std::pair<Permutation, DualSolution> permute_coflow_level(const Instance& instance,
                                                                 double kappa = kDefaultKappa) {
  IndexedInstance idx(instance);
  auto result = detail::run_permutation(detail::coflow_problem(idx), kappa);
  return detail::package(result, DualKind::coflow_level, kappa, detail::ids_of(idx));
}

// Job order: entities are whole jobs with loads aggregated over their
// coflows, and there is no precedence between jobs so gamma stays empty.
inline std::pair<Permutation, DualSolution> permute_jobs(const JobSet& jobset,
                                                         double kappa = kDefaultKappa) {
  require_valid(jobset);
  std::map<CoflowId, const Coflow*> by_id;
  for (const auto& c : jobset.coflows) by_id[c.id] = &c;

  std::vector<const Job*> jobs;
  for (const auto& j : jobset.jobs) jobs.push_back(&j);
  std::sort(jobs.begin(), jobs.end(), [](const Job* a, const Job* b) { return a->id < b->id; });

  detail::DualProblem p;
  p.ports = jobset.config.ports;
  p.cores = jobset.config.cores;
  std::vector<std::int64_t> ids;
  for (const Job* job : jobs) {
    ids.push_back(job->id);
    p.weight.push_back(job->weight);
    p.release.push_back(by_id.at(job->coflows.front())->release);
    std::map<Port, Volume> in, out;
    for (CoflowId k : job->coflows)
      for (const auto& f : by_id.at(k)->flows) {
        in[f.src] += f.size;
        out[f.dst] += f.size;
      }
    p.in.emplace_back();
    p.out.emplace_back();
    for (auto [port, l] : in) p.in.back().push_back({port, l});
    for (auto [port, l] : out) p.out.back().push_back({port, l});
    p.succ.emplace_back();
  }
  auto result = detail::run_permutation(p, kappa);
  return detail::package(result, DualKind::job_level, kappa, ids);
}

namespace detail {

// Flow sizes, port loads and completion-time terms of the coflows, looked
// up directly from the instance. Used by the objective and the feasibility
// checker; intentionally independent of the permutation engine's state.
struct DualTerms {
  NetworkConfig config;
  std::map<CoflowId, const Coflow*> coflows;

  explicit DualTerms(const Instance& inst) : config(inst.config) {
    for (const auto& c : inst.coflows) coflows[c.id] = &c;
  }

  const Coflow& coflow(CoflowId k) const {
    auto it = coflows.find(k);
    if (it == coflows.end()) throw Error("dual references unknown coflow " + std::to_string(k));
    return *it->second;
  }

  static bool touches(const Flow& f, Side side, Port port) {
    return (side == Side::input ? f.src : f.dst) == port;
  }

  Volume port_load(CoflowId k, Side side, Port port) const {
    Volume total = 0;
    for (const auto& f : coflow(k).flows)
      if (touches(f, side, port)) total += f.size;
    return total;
  }

  Volume largest_flow_at(CoflowId k, Side side, Port port) const {
    Volume best = 0;
    for (const auto& f : coflow(k).flows)
      if (touches(f, side, port)) best = std::max(best, f.size);
    return best;
  }

  Volume largest_flow(CoflowId k) const {
    Volume best = 0;
    for (const auto& f : coflow(k).flows) best = std::max(best, f.size);
    return best;
  }

  Volume largest_port_load(CoflowId k) const {
    auto loads = coflow_port_loads(coflow(k), config);
    Volume best = 0;
    for (int p = 1; p <= config.ports; ++p) best = std::max({best, loads.in[p], loads.out[p]});
    return best;
  }
};

inline const std::vector<CoflowId>& job_members(const std::map<JobId, const Job*>& jobs,
                                                JobId t) {
  auto it = jobs.find(t);
  if (it == jobs.end()) throw Error("dual references unknown job " + std::to_string(t));
  return it->second->coflows;
}

}  // namespace detail

// Value of a flow-level or coflow-level dual: a lower bound on the optimal
// total weighted completion time.
//
// alpha is priced at r_k plus the largest demand it can stand for at its
// port (largest flow of k at the port for flow-level, L_{port,k} for
// coflow-level); gamma is priced at the successor's largest flow
// (flow-level) or largest port load (coflow-level).
inline double dual_objective(const DualSolution& dual, const Instance& instance) {
  if (dual.kind == DualKind::job_level)
    throw Error("job-level dual needs the job set to be evaluated");
  detail::DualTerms terms(instance);
  const int m = instance.config.cores;
  const bool flow_level = dual.kind == DualKind::flow_level;
  double total = 0.0;
  for (const auto& a : dual.alpha) {
    const Coflow& c = terms.coflow(a.entity);
    const Volume d = flow_level ? terms.largest_flow_at(a.entity, a.side, a.port)
                                : terms.port_load(a.entity, a.side, a.port);
    total += a.value * static_cast<double>(c.release + d);
  }
  for (const auto& b : dual.beta) {
    std::vector<Volume> multiset;
    for (CoflowId k : b.snapshot) {
      if (flow_level) {
        for (const auto& f : terms.coflow(k).flows)
          if (detail::DualTerms::touches(f, b.side, b.port)) multiset.push_back(f.size);
      } else {
        const Volume l = terms.port_load(k, b.side, b.port);
        if (l > 0) multiset.push_back(l);
      }
    }
    total += b.value * (flow_level ? f_set(multiset, m) : f_port_set(multiset, m));
  }
  for (const auto& g : dual.gamma) {
    terms.coflow(g.pred);
    const Volume d = flow_level ? terms.largest_flow(g.succ) : terms.largest_port_load(g.succ);
    total += g.value * static_cast<double>(d);
  }
  return total;
}

// Value of a job-level dual (flow-level relaxation with job completion
// times).
inline double dual_objective(const DualSolution& dual, const JobSet& jobset) {
  if (dual.kind != DualKind::job_level) return dual_objective(dual, jobset.coflow_instance());
  const Instance inst = jobset.coflow_instance();
  detail::DualTerms terms(inst);
  std::map<JobId, const Job*> jobs;
  for (const auto& j : jobset.jobs) jobs[j.id] = &j;
  const int m = jobset.config.cores;
  double total = 0.0;
  for (const auto& a : dual.alpha) {
    const auto& members = detail::job_members(jobs, a.entity);
    Volume d = 0;
    for (CoflowId k : members) d = std::max(d, terms.largest_flow_at(k, a.side, a.port));
    total += a.value * static_cast<double>(terms.coflow(members.front()).release + d);
  }
  for (const auto& b : dual.beta) {
    std::vector<Volume> multiset;
    for (JobId t : b.snapshot)
      for (CoflowId k : detail::job_members(jobs, t))
        for (const auto& f : terms.coflow(k).flows)
          if (detail::DualTerms::touches(f, b.side, b.port)) multiset.push_back(f.size);
    total += b.value * f_set(multiset, m);
  }
  if (!dual.gamma.empty()) throw Error("job-level dual must not carry gamma");
  return total;
}

struct FeasibilityReport {
  bool feasible = true;
  // max over entities of (LHS - w) / w, floored at 0.
  double max_violation = 0.0;
  std::vector<std::int64_t> violators;
  std::vector<std::int64_t> tight_set;
};

namespace detail {

inline FeasibilityReport judge(const std::map<std::int64_t, double>& lhs,
                               const std::map<std::int64_t, double>& weight, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error("rel_tol must be positive");
  FeasibilityReport report;
  for (const auto& [id, w] : weight) {
    const double value = lhs.count(id) ? lhs.at(id) : 0.0;
    const double excess = (value - w) / w;
    report.max_violation = std::max(report.max_violation, excess);
    if (value > w * (1.0 + rel_tol)) {
      report.feasible = false;
      report.violators.push_back(id);
    }
    if (std::abs(value - w) <= rel_tol * w) report.tight_set.push_back(id);
  }
  return report;
}

inline bool all_nonnegative(const DualSolution& dual) {
  for (const auto& a : dual.alpha)
    if (a.value < 0.0) return false;
  for (const auto& b : dual.beta)
    if (b.value < 0.0) return false;
  for (const auto& g : dual.gamma)
    if (g.value < 0.0) return false;
  return true;
}

}  // namespace detail

// Evaluates every coflow's dual constraint directly from the instance.
inline FeasibilityReport check_dual_feasibility(const DualSolution& dual, const Instance& instance,
                                                double rel_tol) {
  detail::DualTerms terms(instance);
  std::map<std::int64_t, double> lhs, weight;
  for (const auto& c : instance.coflows) weight[c.id] = c.weight;
  for (const auto& a : dual.alpha) lhs[a.entity] += a.value;
  for (const auto& b : dual.beta)
    for (CoflowId k : b.snapshot)
      lhs[k] += b.value * static_cast<double>(terms.port_load(k, b.side, b.port));
  for (const auto& g : dual.gamma) {
    lhs[g.succ] += g.value;
    lhs[g.pred] -= g.value;
  }
  auto report = detail::judge(lhs, weight, rel_tol);
  if (!detail::all_nonnegative(dual)) report.feasible = false;
  return report;
}

// Job-level constraints: one per job, summing its coflows' terms.
inline FeasibilityReport check_dual_feasibility(const DualSolution& dual, const JobSet& jobset,
                                                double rel_tol) {
  if (dual.kind != DualKind::job_level)
    return check_dual_feasibility(dual, jobset.coflow_instance(), rel_tol);
  const Instance inst = jobset.coflow_instance();
  detail::DualTerms terms(inst);
  std::map<JobId, const Job*> jobs;
  std::map<std::int64_t, double> lhs, weight;
  for (const auto& j : jobset.jobs) {
    jobs[j.id] = &j;
    weight[j.id] = j.weight;
  }
  for (const auto& a : dual.alpha) {
    detail::job_members(jobs, a.entity);
    lhs[a.entity] += a.value;
  }
  for (const auto& b : dual.beta)
    for (JobId t : b.snapshot)
      for (CoflowId k : detail::job_members(jobs, t))
        lhs[t] += b.value * static_cast<double>(terms.port_load(k, b.side, b.port));
  auto report = detail::judge(lhs, weight, rel_tol);
  if (!detail::all_nonnegative(dual) || !dual.gamma.empty()) report.feasible = false;
  return report;
}

}  // namespace coflow
