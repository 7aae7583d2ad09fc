#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "coflow/assignment.hpp"
#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/primal_dual.hpp"

namespace coflow {

// One rate-1 transmission interval [start, end) of a flow on a core.
struct Segment {
  FlowKey flow;
  int core = 1;
  Time start = 0;
  Time end = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Schedule {
  std::map<FlowKey, Time> flow_completions;
  std::map<CoflowId, Time> coflow_completions;
  std::map<JobId, Time> job_completions;
  std::vector<Segment> segments;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

namespace detail {

struct SimFlow {
  FlowKey key;
  int coflow = 0;  // dense index
  int core = 0;    // 0-based
  Port src = 1, dst = 1;
  Volume size = 0;
  Volume remaining = 0;
  int last_segment = -1;
};

}  // namespace detail

// Event-driven execution of the transmission phase shared by FDLS and CDLS.
//
// Between events every admitted flow transmits at rate 1. At each event
// (completion or release) every core rebuilds its active set greedily:
// coflows in priority order, skipping those not yet released or not ready,
// and within a coflow flows by non-increasing remaining size (flow-level)
// or by the fixed size-sorted list (coflow-level); a flow is admitted iff
// its input and output port on that core are both still free.
inline Schedule simulate(const Instance& instance, const CoreAssignment& assignment,
                         const Permutation& priority) {
  IndexedInstance idx(instance);
  const auto order = detail::resolve_permutation(idx, priority);
  const int n = idx.size();
  const int m = instance.config.cores;
  const int N = instance.config.ports;
  if (assignment.cores != m || assignment.ports != N)
    throw Error("assignment was built for a different network");
  const bool flow_level = assignment.kind == AssignmentKind::flow_level;

  std::vector<detail::SimFlow> flows;
  // core -> (coflow index, flow indices) in priority order
  std::vector<std::vector<std::pair<int, std::vector<int>>>> lists(m);
  for (int v : order) {
    const Coflow& c = idx.coflow(v);
    std::vector<std::vector<int>> per_core(m);
    for (const Flow& f : detail::flows_by_size(c)) {
      const FlowKey key{f.src, f.dst, c.id};
      const int core = assignment.core_of(key);
      if (core < 1 || core > m) throw Error("flow assigned to a core outside 1..m");
      per_core[core - 1].push_back(static_cast<int>(flows.size()));
      flows.push_back({key, v, core - 1, f.src, f.dst, f.size, f.size, -1});
    }
    for (int h = 0; h < m; ++h)
      if (!per_core[h].empty()) lists[h].push_back({v, std::move(per_core[h])});
  }

  std::vector<int> flows_left(n, 0), preds_left(n, 0);
  for (const auto& f : flows) ++flows_left[f.coflow];
  for (int v = 0; v < n; ++v) preds_left[v] = static_cast<int>(idx.predecessors(v).size());

  std::set<Time> releases;
  for (int v = 0; v < n; ++v) releases.insert(idx.coflow(v).release);

  Schedule schedule;
  std::vector<long> in_stamp(static_cast<std::size_t>(m) * (N + 1), -1);
  std::vector<long> out_stamp(static_cast<std::size_t>(m) * (N + 1), -1);
  std::vector<int> active;
  std::size_t done = 0;
  Time now = 0;
  long event = 0;

  while (done < flows.size()) {
    active.clear();
    for (int h = 0; h < m; ++h) {
      for (auto& [v, members] : lists[h]) {
        if (flows_left[v] == 0 || preds_left[v] > 0 || idx.coflow(v).release > now) continue;
        if (flow_level)
          std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
            if (flows[a].remaining != flows[b].remaining)
              return flows[a].remaining > flows[b].remaining;
            return std::pair(flows[a].src, flows[a].dst) < std::pair(flows[b].src, flows[b].dst);
          });
        for (int fi : members) {
          auto& f = flows[fi];
          if (f.remaining == 0) continue;
          auto& in = in_stamp[h * (N + 1) + f.src];
          auto& out = out_stamp[h * (N + 1) + f.dst];
          if (in == event || out == event) continue;
          in = out = event;
          active.push_back(fi);
        }
      }
    }
    ++event;

    auto next_release = releases.upper_bound(now);
    if (active.empty()) {
      if (next_release == releases.end()) throw InternalError("simulation stalled");
      now = *next_release;
      continue;
    }
    Time step = std::numeric_limits<Time>::max();
    for (int fi : active) step = std::min(step, flows[fi].remaining);
    if (next_release != releases.end()) step = std::min(step, *next_release - now);

    const Time end = now + step;
    for (int fi : active) {
      auto& f = flows[fi];
      f.remaining -= step;
      if (f.last_segment >= 0 && schedule.segments[f.last_segment].end == now) {
        schedule.segments[f.last_segment].end = end;
      } else {
        f.last_segment = static_cast<int>(schedule.segments.size());
        schedule.segments.push_back({f.key, f.core + 1, now, end});
      }
    }
    now = end;
    for (int fi : active) {
      auto& f = flows[fi];
      if (f.remaining > 0) continue;
      ++done;
      schedule.flow_completions[f.key] = now;
      if (--flows_left[f.coflow] == 0) {
        schedule.coflow_completions[idx.id(f.coflow)] = now;
        for (int s : idx.successors(f.coflow)) --preds_left[s];
      }
    }
  }
  return schedule;
}

// Global coflow priority for a job order: jobs in order, each job's coflows
// in topological order of the intra-job DAG (ties by id).
inline Permutation job_priority(const JobSet& jobset, const Permutation& job_perm) {
  std::map<JobId, const Job*> jobs;
  for (const auto& j : jobset.jobs) jobs[j.id] = &j;
  if (job_perm.order.size() != jobs.size()) throw Error("job permutation does not cover the jobs");
  std::set<JobId> seen;
  Permutation priority;
  for (JobId t : job_perm.order) {
    auto it = jobs.find(t);
    if (it == jobs.end()) throw Error("job permutation names unknown job " + std::to_string(t));
    if (!seen.insert(t).second) throw Error("job permutation repeats job " + std::to_string(t));
    const std::set<CoflowId> members(it->second->coflows.begin(), it->second->coflows.end());
    PrecedenceDag g;
    g.nodes.assign(members.begin(), members.end());
    for (const auto& e : jobset.edges)
      if (members.count(e.first) && members.count(e.second)) g.edges.push_back(e);
    for (CoflowId k : topological_order(g)) priority.order.push_back(k);
  }
  return priority;
}

// Coflow instance with the jobs run back to back: every coflow of a job
// waits for all coflows of the job before it.
inline Instance sequential_job_instance(const JobSet& jobset, const Permutation& job_perm) {
  std::map<JobId, const Job*> jobs;
  for (const auto& j : jobset.jobs) jobs[j.id] = &j;
  Instance inst = jobset.coflow_instance();
  for (std::size_t p = 1; p < job_perm.order.size(); ++p) {
    const Job* prev = jobs.at(job_perm.order[p - 1]);
    const Job* cur = jobs.at(job_perm.order[p]);
    for (CoflowId a : prev->coflows)
      for (CoflowId b : cur->coflows) inst.edges.push_back({a, b});
  }
  return inst;
}

inline CoreAssignment assign(const Instance& instance, const Permutation& perm,
                             AssignmentKind kind) {
  return kind == AssignmentKind::flow_level ? assign_flows_fdls(instance, perm)
                                            : assign_coflows_cdls(instance, perm);
}

// Sequential job execution. Returns coflow and job completion times; the
// assignment is rebuilt from the global coflow priority with the given rule.
inline Schedule simulate_jobs(const JobSet& jobset, const Permutation& job_perm,
                              AssignmentKind kind = AssignmentKind::flow_level) {
  require_valid(jobset);
  const Permutation priority = job_priority(jobset, job_perm);
  const Instance inst = sequential_job_instance(jobset, job_perm);
  Schedule schedule = simulate(inst, assign(inst, priority, kind), priority);
  for (const auto& job : jobset.jobs) {
    Time c = 0;
    for (CoflowId k : job.coflows) c = std::max(c, schedule.coflow_completions.at(k));
    schedule.job_completions[job.id] = c;
  }
  return schedule;
}

// Independent checker for port capacity, release, precedence, volume and
// completion-time consistency of a schedule.
inline ValidationReport verify_schedule(const Schedule& schedule, const Instance& instance,
                                        const CoreAssignment& assignment) {
  ValidationReport report;
  auto add = [&](std::string what, std::string entity) {
    report.violations.push_back({std::move(what), std::move(entity)});
  };
  auto name = [](const FlowKey& k) {
    return "flow (" + std::to_string(k.src) + "," + std::to_string(k.dst) + "," +
           std::to_string(k.coflow) + ")";
  };

  std::map<FlowKey, Volume> size;
  std::map<CoflowId, const Coflow*> coflows;
  for (const auto& c : instance.coflows) {
    coflows[c.id] = &c;
    for (const auto& f : c.flows) size[{f.src, f.dst, c.id}] = f.size;
  }
  std::map<CoflowId, std::vector<CoflowId>> preds;
  for (const auto& [a, b] : instance.edges) preds[b].push_back(a);

  std::map<FlowKey, Volume> sent;
  std::map<FlowKey, Time> last_end;
  // (core, side, port) -> intervals
  std::map<std::tuple<int, int, Port>, std::vector<std::pair<Time, Time>>> busy;
  for (const auto& s : schedule.segments) {
    auto it = size.find(s.flow);
    if (it == size.end()) {
      add("segment of unknown flow", name(s.flow));
      continue;
    }
    if (s.end <= s.start) add("empty or inverted segment", name(s.flow));
    int expected_core = -1;
    try {
      expected_core = assignment.core_of(s.flow);
    } catch (const Error&) {
      add("unassigned flow", name(s.flow));
    }
    if (expected_core >= 0 && s.core != expected_core) add("core mismatch", name(s.flow));
    const Coflow& c = *coflows.at(s.flow.coflow);
    if (s.start < c.release) add("starts before release", name(s.flow));
    for (CoflowId p : preds[c.id]) {
      auto done = schedule.coflow_completions.find(p);
      if (done == schedule.coflow_completions.end() || s.start < done->second)
        add("precedence violated", name(s.flow) + " before coflow " + std::to_string(p));
    }
    sent[s.flow] += s.end - s.start;
    last_end[s.flow] = std::max(last_end[s.flow], s.end);
    busy[{s.core, 0, s.flow.src}].push_back({s.start, s.end});
    busy[{s.core, 1, s.flow.dst}].push_back({s.start, s.end});
  }
  for (auto& [where, intervals] : busy) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t q = 1; q < intervals.size(); ++q)
      if (intervals[q].first < intervals[q - 1].second) {
        add("port capacity violated",
            "core " + std::to_string(std::get<0>(where)) +
                (std::get<1>(where) == 0 ? " input " : " output ") +
                std::to_string(std::get<2>(where)));
        break;
      }
  }
  std::map<CoflowId, Time> coflow_end;
  for (const auto& [key, d] : size) {
    const Time r = coflows.at(key.coflow)->release;
    if (sent[key] != d) add("volume mismatch", name(key));
    auto c = schedule.flow_completions.find(key);
    if (c == schedule.flow_completions.end()) {
      add("missing flow completion", name(key));
      continue;
    }
    if (c->second < r + d) add("completion below release plus size", name(key));
    if (last_end.count(key) && c->second != last_end[key]) add("completion mismatch", name(key));
    coflow_end[key.coflow] = std::max(coflow_end[key.coflow], c->second);
  }
  for (const auto& [k, end] : coflow_end) {
    auto c = schedule.coflow_completions.find(k);
    if (c == schedule.coflow_completions.end() || c->second != end)
      add("coflow completion mismatch", "coflow " + std::to_string(k));
  }
  return report;
}

}  // namespace coflow
