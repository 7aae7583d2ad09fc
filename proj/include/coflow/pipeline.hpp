#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <tuple>

#include "coflow/assignment.hpp"
#include "coflow/error.hpp"
#include "coflow/metrics.hpp"
#include "coflow/model.hpp"
#include "coflow/primal_dual.hpp"
#include "coflow/simulator.hpp"

namespace coflow {

enum class Algorithm { fdls, cdls, jobs };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fdls: return "fdls";
    case Algorithm::cdls: return "cdls";
    case Algorithm::jobs: return "jobs";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "fdls") return Algorithm::fdls;
  if (s == "cdls") return Algorithm::cdls;
  if (s == "jobs") return Algorithm::jobs;
  throw Error("unknown algorithm '" + s + "'");
}

struct Run {
  Permutation order;
  DualSolution dual;
  CoreAssignment assignment;
  Schedule schedule;
  double twc = 0.0;
  double dual_value = 0.0;
};

// Primal-dual ordering, core assignment and simulation for one instance.
inline Run run_algorithm(const Instance& instance, Algorithm algorithm, double kappa) {
  if (algorithm == Algorithm::jobs) throw Error("the jobs algorithm needs a job set");
  Run run;
  const bool flow = algorithm == Algorithm::fdls;
  std::tie(run.order, run.dual) =
      flow ? permute_flow_level(instance, kappa) : permute_coflow_level(instance, kappa);
  run.assignment = flow ? assign_flows_fdls(instance, run.order)
                        : assign_coflows_cdls(instance, run.order);
  run.schedule = simulate(instance, run.assignment, run.order);
  run.twc = total_weighted_completion(run.schedule, instance);
  run.dual_value = dual_objective(run.dual, instance);
  return run;
}

// Job ordering followed by sequential job execution (flow-level assignment).
inline Run run_jobs(const JobSet& jobset, double kappa) {
  Run run;
  std::tie(run.order, run.dual) = permute_jobs(jobset, kappa);
  const Permutation priority = job_priority(jobset, run.order);
  const Instance seq = sequential_job_instance(jobset, run.order);
  run.assignment = assign_flows_fdls(seq, priority);
  run.schedule = simulate(seq, run.assignment, priority);
  for (const auto& job : jobset.jobs) {
    Time c = 0;
    for (CoflowId k : job.coflows) c = std::max(c, run.schedule.coflow_completions.at(k));
    run.schedule.job_completions[job.id] = c;
  }
  run.twc = total_weighted_completion(run.schedule, jobset);
  run.dual_value = dual_objective(run.dual, jobset);
  return run;
}

inline bool has_release(const Instance& instance) {
  for (const auto& c : instance.coflows)
    if (c.release > 0) return true;
  return false;
}

inline EvaluationRecord evaluate(const Instance& instance, Algorithm algorithm, double kappa,
                                 const std::string& name, std::uint64_t seed,
                                 bool timing = false) {
  const auto start = std::chrono::steady_clock::now();
  const Run run = run_algorithm(instance, algorithm, kappa);
  const auto stop = std::chrono::steady_clock::now();

  EvaluationRecord r;
  r.instance = name;
  r.seed = seed;
  r.algorithm = to_string(algorithm);
  r.n = static_cast<int>(instance.coflows.size());
  r.m = instance.config.cores;
  r.N = instance.config.ports;
  r.chi = longest_path_chi(instance.dag());
  r.R = weight_ratio_R(instance);
  r.twc = run.twc;
  r.dual = run.dual_value;
  r.ratio = approximation_ratio(run.twc, run.dual_value);
  r.conforming = is_conforming(instance);
  r.bound = theorem_bound(algorithm == Algorithm::fdls ? BoundKind::flow : BoundKind::coflow,
                          r.chi, r.m, r.R, has_release(instance), r.conforming);
  if (timing) r.ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return r;
}

// Job runs report the job count as n and the job-weight ratio as R.
inline EvaluationRecord evaluate_jobs(const JobSet& jobset, double kappa, const std::string& name,
                                      std::uint64_t seed, bool timing = false) {
  const auto start = std::chrono::steady_clock::now();
  const Run run = run_jobs(jobset, kappa);
  const auto stop = std::chrono::steady_clock::now();

  const Instance inst = jobset.coflow_instance();
  double lo = jobset.jobs.front().weight, hi = lo;
  for (const auto& j : jobset.jobs) {
    lo = std::min(lo, j.weight);
    hi = std::max(hi, j.weight);
  }
  EvaluationRecord r;
  r.instance = name;
  r.seed = seed;
  r.algorithm = to_string(Algorithm::jobs);
  r.n = static_cast<int>(jobset.jobs.size());
  r.m = jobset.config.cores;
  r.N = jobset.config.ports;
  r.chi = longest_path_chi(inst.dag());
  r.R = hi / lo;
  r.twc = run.twc;
  r.dual = run.dual_value;
  r.ratio = approximation_ratio(run.twc, run.dual_value);
  r.conforming = is_conforming(inst);
  r.bound = theorem_bound(BoundKind::job, r.chi, r.m, r.R, has_release(inst), r.conforming);
  if (timing) r.ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return r;
}

}  // namespace coflow
