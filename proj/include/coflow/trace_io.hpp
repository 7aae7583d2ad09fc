#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/rng.hpp"

namespace coflow {

struct Reducer {
  int rack = 0;
  double megabytes = 0.0;

  friend bool operator==(const Reducer&, const Reducer&) = default;
};

struct TraceCoflow {
  CoflowId id = 0;
  Time arrival_ms = 0;
  std::vector<int> mappers;
  std::vector<Reducer> reducers;

  friend bool operator==(const TraceCoflow&, const TraceCoflow&) = default;
};

struct Trace {
  int ports = 0;
  std::vector<TraceCoflow> coflows;

  friend bool operator==(const Trace&, const Trace&) = default;
};

namespace detail {

inline Error trace_error(std::size_t line, const std::string& what) {
  return Error("trace line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw trace_error(line, "bad number '" + std::string(token) + "'");
  return value;
}

inline std::string format_megabytes(double mb) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, mb);
  return std::string(buf, ptr);
}

}  // namespace detail

// Grammar, one record per line after the header:
//   <ports> <coflows>
//   <id> <arrival-ms> <M> <mapper rack> x M <R> <reducer rack>:<MB> x R
// Blank lines are ignored.
inline Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string text;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool header = false;
  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream tokens(text);
    std::vector<std::string> t;
    for (std::string w; tokens >> w;) t.push_back(w);
    if (t.empty()) continue;
    if (!header) {
      if (t.size() != 2) throw detail::trace_error(line_no, "header must be '<ports> <coflows>'");
      trace.ports = detail::parse_number<int>(t[0], line_no);
      expected = detail::parse_number<std::size_t>(t[1], line_no);
      if (trace.ports < 1) throw detail::trace_error(line_no, "port count must be positive");
      header = true;
      continue;
    }
    std::size_t pos = 0;
    auto next = [&]() -> const std::string& {
      if (pos >= t.size()) throw detail::trace_error(line_no, "record ends early");
      return t[pos++];
    };
    TraceCoflow c;
    c.id = detail::parse_number<CoflowId>(next(), line_no);
    c.arrival_ms = detail::parse_number<Time>(next(), line_no);
    if (c.arrival_ms < 0) throw detail::trace_error(line_no, "negative arrival");
    const auto mappers = detail::parse_number<std::size_t>(next(), line_no);
    for (std::size_t q = 0; q < mappers; ++q) {
      const std::string& tok = next();
      if (tok.find(':') != std::string::npos)
        throw detail::trace_error(line_no, "mapper count does not match mapper list");
      c.mappers.push_back(detail::parse_number<int>(tok, line_no));
    }
    const auto reducers = detail::parse_number<std::size_t>(next(), line_no);
    for (std::size_t q = 0; q < reducers; ++q) {
      const std::string& tok = next();
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw detail::trace_error(line_no, "reducer must be '<rack>:<MB>'");
      Reducer r;
      r.rack = detail::parse_number<int>(std::string_view(tok).substr(0, colon), line_no);
      r.megabytes = detail::parse_number<double>(std::string_view(tok).substr(colon + 1), line_no);
      if (!(r.megabytes > 0.0) || !std::isfinite(r.megabytes))
        throw detail::trace_error(line_no, "reducer size must be positive");
      c.reducers.push_back(r);
    }
    if (pos != t.size()) throw detail::trace_error(line_no, "reducer count does not match reducer list");
    for (int rack : c.mappers)
      if (rack < 0 || rack > trace.ports) throw detail::trace_error(line_no, "mapper rack out of range");
    for (const auto& r : c.reducers)
      if (r.rack < 0 || r.rack > trace.ports) throw detail::trace_error(line_no, "reducer rack out of range");
    trace.coflows.push_back(std::move(c));
  }
  if (!header) throw Error("trace line 1: missing header");
  if (trace.coflows.size() != expected)
    throw Error("trace: header announces " + std::to_string(expected) + " coflows, found " +
                std::to_string(trace.coflows.size()));
  return trace;
}

inline Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

inline std::string serialize_trace(const Trace& trace) {
  std::ostringstream out;
  out << trace.ports << ' ' << trace.coflows.size() << '\n';
  for (const auto& c : trace.coflows) {
    out << c.id << ' ' << c.arrival_ms << ' ' << c.mappers.size();
    for (int m : c.mappers) out << ' ' << m;
    out << ' ' << c.reducers.size();
    for (const auto& r : c.reducers) out << ' ' << r.rack << ':' << detail::format_megabytes(r.megabytes);
    out << '\n';
  }
  return out.str();
}

enum class WeightMode { unit, uniform };
enum class ReleaseMode { zero, arrival };

struct TraceConversion {
  WeightMode weights = WeightMode::uniform;
  ReleaseMode releases = ReleaseMode::zero;
  std::uint64_t seed = 0;
  int cores = 1;
  // Rack number that maps to port 1 (the public Facebook trace numbers
  // racks from 0).
  int rack_base = 1;
  std::vector<Edge> dag_overlay;
};

// Each reducer of s MB with M mappers becomes M flows of ceil(s / M) units,
// one from every mapper rack. Flows that land on the same (src, dst) pair
// within a coflow are merged.
inline Instance to_instance(const Trace& trace, const TraceConversion& conv) {
  Instance inst;
  inst.config = {conv.cores, trace.ports};
  auto port_of = [&](int rack, CoflowId k) {
    const int port = rack - conv.rack_base + 1;
    if (port < 1 || port > trace.ports)
      throw Error("coflow " + std::to_string(k) + ": rack " + std::to_string(rack) + " out of range");
    return port;
  };
  for (const auto& tc : trace.coflows) {
    Coflow c;
    c.id = tc.id;
    c.release = conv.releases == ReleaseMode::arrival ? tc.arrival_ms : 0;
    if (conv.weights == WeightMode::unit) {
      c.weight = 1.0;
    } else {
      auto rng = CounterRng::stream(conv.seed, 4, static_cast<std::uint64_t>(tc.id));
      c.weight = static_cast<double>(std::uniform_int_distribution<int>(1, 100)(rng));
    }
    std::map<std::pair<Port, Port>, Volume> demand;
    if (!tc.mappers.empty())
      for (const auto& r : tc.reducers) {
        const auto share = static_cast<Volume>(std::ceil(r.megabytes / tc.mappers.size()));
        for (int m : tc.mappers) demand[{port_of(m, tc.id), port_of(r.rack, tc.id)}] += share;
      }
    for (const auto& [pair, size] : demand) c.flows.push_back({pair.first, pair.second, size});
    inst.coflows.push_back(std::move(c));
  }
  inst.edges = conv.dag_overlay;
  return inst;
}

// Keeps coflows with at least `threshold` flows and the edges among them.
inline Instance filter_by_min_flows(const Instance& instance, std::size_t threshold) {
  Instance out;
  out.config = instance.config;
  std::set<CoflowId> kept;
  for (const auto& c : instance.coflows)
    if (c.flows.size() >= threshold) {
      kept.insert(c.id);
      out.coflows.push_back(c);
    }
  for (const auto& e : instance.edges)
    if (kept.count(e.first) && kept.count(e.second)) out.edges.push_back(e);
  return out;
}

}  // namespace coflow
