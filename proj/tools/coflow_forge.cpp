#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coflow/coflow.hpp"

namespace {

using namespace coflow;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// "7" or "0..99" (inclusive).
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  try {
    const auto dots = text.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw UsageError("");
      return {v};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const auto lo = std::stoull(a, &used);
    if (used != a.size()) throw UsageError("");
    const auto hi = std::stoull(b, &used);
    if (used != b.size() || hi < lo) throw UsageError("");
    std::vector<std::uint64_t> seeds;
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  } catch (const std::exception&) {
    throw UsageError("--seeds expects S or A..B, got '" + text + "'");
  }
}

struct GenFlags {
  GeneratorParams p;
  std::string density = "default";
  int jobs = 0;
};

void add_generator_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--n", g.p.n, "coflows per instance")->capture_default_str();
  cmd->add_option("--deg", g.p.deg, "target out-degree")->capture_default_str();
  cmd->add_option("--p", g.p.p, "parallelism factor")->capture_default_str();
  cmd->add_option("--ports", g.p.ports, "ports per side (N)")->capture_default_str();
  cmd->add_option("--cores", g.p.cores, "network cores (m)")->capture_default_str();
  cmd->add_option("--density", g.density, "default | dense | sparse | combined")->capture_default_str();
  cmd->add_option("--release-horizon", g.p.release_horizon, "releases ~ U[0, H] when H > 0")
      ->capture_default_str();
  cmd->add_flag("--conforming", g.p.conforming, "monotone weights and loads along edges");
  cmd->add_option("--min-chi", g.p.min_chi, "redraw the DAG until chi reaches this")->capture_default_str();
}

GeneratorParams resolve(const GenFlags& g, std::uint64_t seed) {
  GeneratorParams p = g.p;
  p.density = parse_density(g.density);
  p.seed = seed;
  return p;
}

struct Loaded {
  InstanceDocument doc;
  std::string name;
};

Loaded load(const std::string& path) { return {read_instance_document(read_file(path)), stem(path)}; }

Json order_document(const Run& run, bool emit_dual) {
  Json doc = permutation_to_json(run.order);
  if (emit_dual) doc["dual"] = dual_to_json(run.dual);
  return doc;
}

Run run_any(const InstanceDocument& doc, Algorithm alg, double kappa) {
  if (alg == Algorithm::jobs) return run_jobs(doc.jobset(), kappa);
  return run_algorithm(doc.instance, alg, kappa);
}

unsigned thread_cap(unsigned requested) {
  unsigned n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COFLOW_FORGE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw UsageError("COFLOW_FORGE_THREADS must be a positive integer");
    }
  }
  return std::max(1u, n);
}

// Runs task(q) for q in [0, count) on up to `threads` workers; every task
// writes only its own slot.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t q; (q = next++) < count;) {
      try {
        task(q);
      } catch (...) {
        errors[q] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Coflow ordering, scheduling and evaluation on parallel networks"};
  app.require_subcommand(1);
  std::string output;
  double kappa = kDefaultKappa;

  // generate
  auto* gen = app.add_subcommand("generate", "write a seeded synthetic instance");
  GenFlags gflags;
  std::uint64_t gen_seed = 0;
  add_generator_flags(gen, gflags);
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--jobs", gflags.jobs, "emit a job set with this many jobs");
  gen->add_option("-o,--output", output, "output path (default stdout)");

  // order
  auto* order = app.add_subcommand("order", "primal-dual coflow (or job) order");
  std::string order_in, order_alg = "fdls";
  bool emit_dual = false;
  order->add_option("instance", order_in, "instance document")->required();
  order->add_option("--alg", order_alg, "fdls | cdls | jobs")->capture_default_str();
  order->add_option("--kappa", kappa, "branch constant")->capture_default_str();
  order->add_flag("--emit-dual", emit_dual, "include the dual solution");
  order->add_option("-o,--output", output, "output path (default stdout)");

  // schedule
  auto* sched = app.add_subcommand("schedule", "order, assign and simulate");
  std::string sched_in, sched_alg = "fdls";
  sched->add_option("instance", sched_in, "instance document")->required();
  sched->add_option("--alg", sched_alg, "fdls | cdls | jobs")->capture_default_str();
  sched->add_option("--kappa", kappa, "branch constant")->capture_default_str();
  sched->add_option("-o,--output", output, "output path (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "CSV report of ratios against the dual bound");
  std::vector<std::string> eval_in;
  std::vector<std::string> eval_algs{"fdls"};
  std::string format = "csv";
  bool timing = false;
  std::optional<std::size_t> eval_min_flows;
  eval->add_option("instances", eval_in, "instance documents")->required();
  eval->add_option("--alg", eval_algs, "fdls | cdls | jobs (repeatable)")->capture_default_str();
  eval->add_option("--kappa", kappa, "branch constant")->capture_default_str();
  eval->add_option("--min-flows", eval_min_flows, "drop coflows with fewer flows first");
  eval->add_option("--format", format, "csv | summary")->capture_default_str();
  eval->add_flag("--timing", timing, "fill the ms column with wall time");
  eval->add_option("-o,--output", output, "output path (default stdout)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert a coflow trace to an instance");
  std::string trace_in, weights = "uniform", releases = "zero";
  std::optional<std::uint64_t> ingest_seed;
  std::size_t min_flows = 0;
  TraceConversion conv;
  ingest->add_option("trace", trace_in, "trace file")->required();
  ingest->add_option("--min-flows", min_flows, "keep coflows with at least this many flows");
  ingest->add_option("--weights", weights, "unit | uniform")->capture_default_str();
  ingest->add_option("--releases", releases, "zero | arrival")->capture_default_str();
  ingest->add_option("--seed", ingest_seed, "seed for uniform weights");
  ingest->add_option("--cores", conv.cores, "network cores (m)")->capture_default_str();
  ingest->add_option("--rack-base", conv.rack_base, "rack number mapped to port 1")->capture_default_str();
  ingest->add_option("-o,--output", output, "output path (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "seed sweep over one parameter");
  GenFlags bflags;
  std::string sweep, seeds_text, bench_trace;
  std::vector<double> values;
  std::vector<std::string> bench_algs{"fdls", "cdls"};
  unsigned threads = 0;
  add_generator_flags(bench, bflags);
  bench->add_option("--sweep", sweep, "n | m | p | threshold")->required();
  bench->add_option("--values", values, "sweep values")->required();
  bench->add_option("--seeds", seeds_text, "single seed S or inclusive range A..B")->required();
  bench->add_option("--alg", bench_algs, "fdls | cdls (repeatable)")->capture_default_str();
  bench->add_option("--kappa", kappa, "branch constant")->capture_default_str();
  bench->add_option("--trace", bench_trace, "trace file for the threshold sweep");
  bench->add_option("--format", format, "csv | summary")->capture_default_str();
  bench->add_option("--threads", threads, "worker threads (0: all cores)");
  bench->add_flag("--timing", timing, "fill the ms column with wall time");
  bench->add_option("-o,--output", output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto report_format = [&]() {
    if (format == "csv") return ReportFormat::csv;
    if (format == "summary") return ReportFormat::summary;
    throw UsageError("--format must be csv or summary");
  };
  auto algorithm = [](const std::string& s) {
    try {
      return parse_algorithm(s);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  };
  if (!(kappa > 0.0)) throw UsageError("--kappa must be positive");

  if (*gen) {
    GeneratorParams p;
    try {
      p = resolve(gflags, gen_seed);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (gflags.jobs < 0) throw UsageError("--jobs must be positive");
    write_output(output, gflags.jobs > 0 ? write_jobset(generate_jobset(p, gflags.jobs))
                                         : write_instance(generate_instance(p)));
  } else if (*order) {
    const Algorithm alg = algorithm(order_alg);
    const Run run = run_any(load(order_in).doc, alg, kappa);
    write_output(output, detail::dump(order_document(run, emit_dual)));
  } else if (*sched) {
    const Algorithm alg = algorithm(sched_alg);
    const Run run = run_any(load(sched_in).doc, alg, kappa);
    Json doc = permutation_to_json(run.order);
    doc["assignment"] = assignment_to_json(run.assignment);
    doc["schedule"] = schedule_to_json(run.schedule);
    doc["twc"] = run.twc;
    write_output(output, detail::dump(doc));
  } else if (*eval) {
    const ReportFormat fmt = report_format();
    std::vector<Algorithm> algs;
    for (const auto& a : eval_algs) algs.push_back(algorithm(a));
    EvaluationReport report;
    for (const auto& path : eval_in) {
      Loaded in = load(path);
      if (eval_min_flows) {
        if (in.doc.jobs) throw UsageError("--min-flows does not apply to job sets");
        in.doc.instance = filter_by_min_flows(in.doc.instance, *eval_min_flows);
      }
      for (Algorithm alg : algs)
        report.records.push_back(alg == Algorithm::jobs
                                     ? evaluate_jobs(in.doc.jobset(), kappa, in.name, 0, timing)
                                     : evaluate(in.doc.instance, alg, kappa, in.name, 0, timing));
    }
    report.sort();
    write_output(output, emit_report(report, fmt));
  } else if (*ingest) {
    if (weights == "unit") {
      conv.weights = WeightMode::unit;
    } else if (weights == "uniform") {
      conv.weights = WeightMode::uniform;
      if (!ingest_seed) throw UsageError("--weights uniform needs --seed");
      conv.seed = *ingest_seed;
    } else {
      throw UsageError("--weights must be unit or uniform");
    }
    if (releases == "zero") {
      conv.releases = ReleaseMode::zero;
    } else if (releases == "arrival") {
      conv.releases = ReleaseMode::arrival;
    } else {
      throw UsageError("--releases must be zero or arrival");
    }
    if (conv.cores < 1) throw UsageError("--cores must be positive");
    const Instance inst = filter_by_min_flows(to_instance(parse_trace(read_file(trace_in)), conv), min_flows);
    write_output(output, write_instance(inst));
  } else if (*bench) {
    const ReportFormat fmt = report_format();
    const auto seeds = parse_seeds(seeds_text);
    std::vector<Algorithm> algs;
    for (const auto& a : bench_algs) {
      algs.push_back(algorithm(a));
      if (algs.back() == Algorithm::jobs) throw UsageError("bench sweeps fdls and cdls only");
    }
    if (sweep != "n" && sweep != "m" && sweep != "p" && sweep != "threshold")
      throw UsageError("--sweep must be n, m, p or threshold");
    if ((sweep == "threshold") != !bench_trace.empty())
      throw UsageError("--trace goes with --sweep threshold");
    std::optional<Trace> trace;
    if (!bench_trace.empty()) trace = parse_trace(read_file(bench_trace));
    try {
      resolve(bflags, 0);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }

    struct Task {
      double value;
      std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (double v : values)
      for (auto s : seeds) tasks.push_back({v, s});
    std::vector<std::vector<EvaluationRecord>> slots(tasks.size());
    parallel_for(tasks.size(), thread_cap(threads), [&](std::size_t q) {
      const auto [v, seed] = tasks[q];
      std::ostringstream label;
      label << sweep << '=' << v;
      Instance inst;
      if (trace) {
        TraceConversion tc;
        tc.seed = seed;
        tc.cores = bflags.p.cores;
        inst = filter_by_min_flows(to_instance(*trace, tc), static_cast<std::size_t>(v));
        if (inst.coflows.empty()) return;
      } else {
        GeneratorParams p = resolve(bflags, seed);
        if (sweep == "n") p.n = static_cast<int>(v);
        if (sweep == "m") p.cores = static_cast<int>(v);
        if (sweep == "p") p.p = v;
        inst = generate_instance(p);
      }
      for (Algorithm alg : algs) slots[q].push_back(evaluate(inst, alg, kappa, label.str(), seed, timing));
    });
    EvaluationReport report;
    for (const auto& s : slots) report.merge(EvaluationReport{s});
    report.sort();
    write_output(output, emit_report(report, fmt));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const coflow::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
