#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/simulator.hpp"

namespace coflow {

inline double total_weighted_completion(const Schedule& schedule, const Instance& instance) {
  double total = 0.0;
  for (const auto& c : instance.coflows) {
    auto it = schedule.coflow_completions.find(c.id);
    if (it == schedule.coflow_completions.end())
      throw Error("missing completion time for coflow " + std::to_string(c.id));
    total += c.weight * static_cast<double>(it->second);
  }
  return total;
}

inline double total_weighted_completion(const Schedule& schedule, const JobSet& jobset) {
  double total = 0.0;
  for (const auto& j : jobset.jobs) {
    auto it = schedule.job_completions.find(j.id);
    if (it == schedule.job_completions.end())
      throw Error("missing completion time for job " + std::to_string(j.id));
    total += j.weight * static_cast<double>(it->second);
  }
  return total;
}

inline double approximation_ratio(double alg_value, double dual_bound) {
  if (!(dual_bound > 0.0)) throw Error("degenerate bound");
  return alg_value / dual_bound;
}

// max w / min w.
inline double weight_ratio_R(const Instance& instance) {
  if (instance.coflows.empty()) throw Error("weight ratio of an empty instance");
  double lo = instance.coflows.front().weight, hi = lo;
  for (const auto& c : instance.coflows) {
    lo = std::min(lo, c.weight);
    hi = std::max(hi, c.weight);
  }
  return hi / lo;
}

enum class BoundKind { flow, coflow, job };

inline BoundKind parse_bound_kind(const std::string& s) {
  if (s == "flow" || s == "fdls") return BoundKind::flow;
  if (s == "coflow" || s == "cdls") return BoundKind::coflow;
  if (s == "job" || s == "jobs") return BoundKind::job;
  throw Error("invalid bound kind '" + s + "'");
}

// Worst-case approximation guarantee for the scheduling variant.
//
//   flow, monotone weights:      4chi + 2 - 2/m   (release)   4chi + 1 - 2/m
//   flow, arbitrary weights:     4R chi + R + 1 - 2/m         4R chi + 1 - 2/m
//   coflow, monotone weights:    4chi m + 1                   4chi m
//   coflow, arbitrary weights:   4R chi m + R                 4R chi m
//   job:                         as flow with monotone weights (no gamma)
inline double theorem_bound(BoundKind kind, int chi, int m, double R, bool with_release,
                            bool conforming_weights) {
  if (chi < 1 || m < 1 || R < 1.0) throw Error("theorem_bound: need chi >= 1, m >= 1, R >= 1");
  const double x = chi;
  const double tail = 2.0 / m;
  switch (kind) {
    case BoundKind::job:
    case BoundKind::flow:
      if (conforming_weights || kind == BoundKind::job)
        return with_release ? 4 * x + 2 - tail : 4 * x + 1 - tail;
      return with_release ? 4 * R * x + R + 1 - tail : 4 * R * x + 1 - tail;
    case BoundKind::coflow:
      if (conforming_weights) return with_release ? 4 * x * m + 1 : 4 * x * m;
      return with_release ? 4 * R * x * m + R : 4 * R * x * m;
  }
  throw Error("invalid bound kind");
}

struct EvaluationRecord {
  std::string instance;
  std::uint64_t seed = 0;
  std::string algorithm;
  int n = 0;
  int m = 0;
  int N = 0;
  int chi = 0;
  double R = 1.0;
  double twc = 0.0;
  double dual = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool conforming = false;
  double ms = 0.0;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

struct EvaluationReport {
  std::vector<EvaluationRecord> records;

  void merge(const EvaluationReport& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }

  void sort() {
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
      return std::tie(a.instance, a.algorithm, a.seed) < std::tie(b.instance, b.algorithm, b.seed);
    });
  }
};

inline constexpr const char* kCsvHeader =
    "instance,seed,algorithm,n,m,N,chi,R,twc,dual,ratio,bound,conforming,ms";

enum class ReportFormat { csv, summary };

namespace detail {

inline std::string num(double x) {
  std::ostringstream out;
  out.precision(15);
  out << x;
  return out.str();
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw Error("bad number '" + s + "' in report");
  return v;
}

}  // namespace detail

inline std::string emit_report(const EvaluationReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : report.records)
      out << r.instance << ',' << r.seed << ',' << r.algorithm << ',' << r.n << ',' << r.m << ','
          << r.N << ',' << r.chi << ',' << detail::num(r.R) << ',' << detail::num(r.twc) << ','
          << detail::num(r.dual) << ',' << detail::num(r.ratio) << ',' << detail::num(r.bound)
          << ',' << (r.conforming ? 1 : 0) << ',' << detail::num(r.ms) << '\n';
    return out.str();
  }
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& r : report.records) ratios[r.algorithm].push_back(r.ratio);
  for (const auto& [alg, xs] : ratios) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
    out << alg << ": runs=" << xs.size() << " mean_ratio=" << detail::num(mean)
        << " stddev=" << detail::num(sd) << '\n';
  }
  return out.str();
}

inline EvaluationReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("report: unexpected CSV header");
  EvaluationReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) f.push_back(cell);
    if (f.size() != 14) throw Error("report: expected 14 columns");
    EvaluationRecord r;
    r.instance = f[0];
    r.seed = std::stoull(f[1]);
    r.algorithm = f[2];
    r.n = std::stoi(f[3]);
    r.m = std::stoi(f[4]);
    r.N = std::stoi(f[5]);
    r.chi = std::stoi(f[6]);
    r.R = detail::parse_double(f[7]);
    r.twc = detail::parse_double(f[8]);
    r.dual = detail::parse_double(f[9]);
    r.ratio = detail::parse_double(f[10]);
    r.bound = detail::parse_double(f[11]);
    r.conforming = f[12] == "1";
    r.ms = detail::parse_double(f[13]);
    report.records.push_back(r);
  }
  return report;
}

}  // namespace coflow
