#pragma once

#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "coflow/assignment.hpp"
#include "coflow/error.hpp"
#include "coflow/model.hpp"
#include "coflow/primal_dual.hpp"
#include "coflow/simulator.hpp"

// JSON documents for instances, duals, assignments and schedules. Writers
// emit fields in a fixed order with two-space indentation, so writing a
// parsed document reproduces it byte for byte. Readers reject unknown
// fields.
namespace coflow {

using Json = nlohmann::ordered_json;

struct InstanceDocument {
  Instance instance;
  std::optional<std::vector<Job>> jobs;

  JobSet jobset() const {
    if (!jobs) throw Error("instance document has no jobs");
    return JobSet{instance.config, *jobs, instance.coflows, instance.edges};
  }
};

namespace detail {

inline void only_fields(const Json& obj, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  if (!obj.is_object()) throw Error(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw Error(where + ": unknown field '" + key + "'");
}

inline const Json& field(const Json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw Error(where + ": missing field '" + std::string(name) + "'");
  return *it;
}

template <typename T>
T get(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw Error(where + ": field '" + name + "' must be a number");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw Error(where + ": field '" + name + "' must be an integer");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw Error(where + ": field '" + name + "' must be a string");
  }
  return v.get<T>();
}

inline const Json& array_field(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_array()) throw Error(where + ": field '" + name + "' must be a list");
  return v;
}

inline Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string(what) + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Side parse_side(const std::string& s) {
  if (s == "input") return Side::input;
  if (s == "output") return Side::output;
  throw Error("side must be 'input' or 'output'");
}

inline DualKind parse_dual_kind(const std::string& s) {
  if (s == "flow") return DualKind::flow_level;
  if (s == "coflow") return DualKind::coflow_level;
  if (s == "job") return DualKind::job_level;
  throw Error("dual kind must be flow, coflow or job");
}

inline std::vector<std::int64_t> id_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw Error(where + ": expected a list of ids");
  std::vector<std::int64_t> ids;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw Error(where + ": ids must be integers");
    ids.push_back(x.get<std::int64_t>());
  }
  return ids;
}

inline Json flow_key_fields(const FlowKey& k) {
  return Json{{"src", k.src}, {"dst", k.dst}, {"coflow", k.coflow}};
}

inline FlowKey read_flow_key(const Json& j, const std::string& where) {
  return {get<Port>(j, "src", where), get<Port>(j, "dst", where),
          get<CoflowId>(j, "coflow", where)};
}

}  // namespace detail

inline Json instance_to_json(const Instance& inst, const std::vector<Job>* jobs = nullptr) {
  Json doc;
  doc["cores"] = inst.config.cores;
  doc["ports"] = inst.config.ports;
  Json coflows = Json::array();
  for (const auto& c : inst.coflows) {
    Json flows = Json::array();
    for (const auto& f : c.flows) flows.push_back({{"src", f.src}, {"dst", f.dst}, {"size", f.size}});
    coflows.push_back(
        {{"id", c.id}, {"release", c.release}, {"weight", c.weight}, {"flows", std::move(flows)}});
  }
  doc["coflows"] = std::move(coflows);
  Json edges = Json::array();
  for (const auto& [a, b] : inst.edges) edges.push_back(Json::array({a, b}));
  doc["edges"] = std::move(edges);
  if (jobs) {
    Json js = Json::array();
    for (const auto& j : *jobs)
      js.push_back({{"id", j.id}, {"weight", j.weight}, {"coflows", j.coflows}});
    doc["jobs"] = std::move(js);
  }
  return doc;
}

inline std::string write_instance(const Instance& inst) { return detail::dump(instance_to_json(inst)); }

inline std::string write_jobset(const JobSet& js) {
  return detail::dump(instance_to_json(js.coflow_instance(), &js.jobs));
}

inline InstanceDocument instance_from_json(const Json& doc) {
  using detail::get;
  const std::string where = "instance document";
  detail::only_fields(doc, {"cores", "ports", "coflows", "edges", "jobs"}, where);
  InstanceDocument out;
  auto& inst = out.instance;
  inst.config.cores = get<int>(doc, "cores", where);
  inst.config.ports = get<int>(doc, "ports", where);
  for (const auto& c : detail::array_field(doc, "coflows", where)) {
    const std::string cw = where + " coflow";
    detail::only_fields(c, {"id", "release", "weight", "flows"}, cw);
    Coflow coflow;
    coflow.id = get<CoflowId>(c, "id", cw);
    coflow.release = get<Time>(c, "release", cw);
    coflow.weight = get<double>(c, "weight", cw);
    for (const auto& f : detail::array_field(c, "flows", cw)) {
      const std::string fw = cw + " " + std::to_string(coflow.id) + " flow";
      detail::only_fields(f, {"src", "dst", "size"}, fw);
      coflow.flows.push_back({get<Port>(f, "src", fw), get<Port>(f, "dst", fw), get<Volume>(f, "size", fw)});
    }
    inst.coflows.push_back(std::move(coflow));
  }
  for (const auto& e : detail::array_field(doc, "edges", where)) {
    auto pair = detail::id_list(e, where + " edge");
    if (pair.size() != 2) throw Error(where + ": an edge is [pred, succ]");
    inst.edges.push_back({pair[0], pair[1]});
  }
  if (doc.contains("jobs")) {
    std::vector<Job> jobs;
    for (const auto& j : detail::array_field(doc, "jobs", where)) {
      const std::string jw = where + " job";
      detail::only_fields(j, {"id", "weight", "coflows"}, jw);
      jobs.push_back({get<JobId>(j, "id", jw), get<double>(j, "weight", jw),
                      detail::id_list(detail::field(j, "coflows", jw), jw)});
    }
    out.jobs = std::move(jobs);
  }
  return out;
}

inline InstanceDocument read_instance_document(const std::string& text) {
  return instance_from_json(detail::parse_json(text, "instance document"));
}

inline Instance read_instance(const std::string& text) { return read_instance_document(text).instance; }

inline Json permutation_to_json(const Permutation& p) { return Json{{"order", p.order}}; }

inline Json dual_to_json(const DualSolution& d) {
  Json alpha = Json::array(), beta = Json::array(), gamma = Json::array();
  for (const auto& a : d.alpha)
    alpha.push_back({{"side", to_string(a.side)}, {"port", a.port}, {"id", a.entity}, {"value", a.value}});
  for (const auto& b : d.beta)
    beta.push_back({{"side", to_string(b.side)},
                    {"port", b.port},
                    {"snapshot", b.snapshot},
                    {"value", b.value}});
  for (const auto& g : d.gamma) gamma.push_back({{"pred", g.pred}, {"succ", g.succ}, {"value", g.value}});
  return Json{{"kind", to_string(d.kind)},
              {"kappa", d.kappa},
              {"alpha", std::move(alpha)},
              {"beta", std::move(beta)},
              {"gamma", std::move(gamma)}};
}

inline std::string write_dual(const DualSolution& d) { return detail::dump(dual_to_json(d)); }

inline DualSolution dual_from_json(const Json& doc) {
  using detail::get;
  const std::string where = "dual document";
  detail::only_fields(doc, {"kind", "kappa", "alpha", "beta", "gamma"}, where);
  DualSolution d;
  d.kind = detail::parse_dual_kind(get<std::string>(doc, "kind", where));
  d.kappa = get<double>(doc, "kappa", where);
  for (const auto& a : detail::array_field(doc, "alpha", where)) {
    detail::only_fields(a, {"side", "port", "id", "value"}, where + " alpha");
    d.alpha.push_back({detail::parse_side(get<std::string>(a, "side", where)), get<Port>(a, "port", where),
                       get<std::int64_t>(a, "id", where), get<double>(a, "value", where)});
  }
  for (const auto& b : detail::array_field(doc, "beta", where)) {
    detail::only_fields(b, {"side", "port", "snapshot", "value"}, where + " beta");
    d.beta.push_back({detail::parse_side(get<std::string>(b, "side", where)), get<Port>(b, "port", where),
                      detail::id_list(detail::field(b, "snapshot", where), where),
                      get<double>(b, "value", where)});
  }
  for (const auto& g : detail::array_field(doc, "gamma", where)) {
    detail::only_fields(g, {"pred", "succ", "value"}, where + " gamma");
    d.gamma.push_back({get<CoflowId>(g, "pred", where), get<CoflowId>(g, "succ", where),
                       get<double>(g, "value", where)});
  }
  return d;
}

inline DualSolution read_dual(const std::string& text) {
  return dual_from_json(detail::parse_json(text, "dual document"));
}

inline Json assignment_to_json(const CoreAssignment& a) {
  Json doc{{"kind", to_string(a.kind)}, {"cores", a.cores}, {"ports", a.ports}};
  if (a.kind == AssignmentKind::flow_level) {
    Json flows = Json::array();
    for (const auto& [key, core] : a.flow_to_core) {
      Json f = detail::flow_key_fields(key);
      f["core"] = core;
      flows.push_back(std::move(f));
    }
    doc["flows"] = std::move(flows);
  } else {
    Json coflows = Json::array();
    for (const auto& [k, core] : a.coflow_to_core) coflows.push_back({{"id", k}, {"core", core}});
    doc["coflows"] = std::move(coflows);
  }
  Json in = Json::array(), out = Json::array();
  for (Port p = 1; p <= a.ports; ++p) {
    Json row_in = Json::array(), row_out = Json::array();
    for (int h = 1; h <= a.cores; ++h) {
      row_in.push_back(a.load_in(p, h));
      row_out.push_back(a.load_out(p, h));
    }
    in.push_back(std::move(row_in));
    out.push_back(std::move(row_out));
  }
  doc["load_in"] = std::move(in);
  doc["load_out"] = std::move(out);
  return doc;
}

inline CoreAssignment assignment_from_json(const Json& doc) {
  using detail::get;
  const std::string where = "assignment";
  const auto kind_name = get<std::string>(doc, "kind", where);
  CoreAssignment a;
  if (kind_name == "flow") {
    a.kind = AssignmentKind::flow_level;
    detail::only_fields(doc, {"kind", "cores", "ports", "flows", "load_in", "load_out"}, where);
    for (const auto& f : detail::array_field(doc, "flows", where)) {
      detail::only_fields(f, {"src", "dst", "coflow", "core"}, where + " flow");
      a.flow_to_core[detail::read_flow_key(f, where)] = get<int>(f, "core", where);
    }
  } else if (kind_name == "coflow") {
    a.kind = AssignmentKind::coflow_level;
    detail::only_fields(doc, {"kind", "cores", "ports", "coflows", "load_in", "load_out"}, where);
    for (const auto& c : detail::array_field(doc, "coflows", where)) {
      detail::only_fields(c, {"id", "core"}, where + " coflow");
      a.coflow_to_core[get<CoflowId>(c, "id", where)] = get<int>(c, "core", where);
    }
  } else {
    throw Error(where + ": kind must be flow or coflow");
  }
  a.cores = get<int>(doc, "cores", where);
  a.ports = get<int>(doc, "ports", where);
  for (const char* name : {"load_in", "load_out"}) {
    const Json& rows = detail::array_field(doc, name, where);
    if (static_cast<int>(rows.size()) != a.ports) throw Error(where + ": load table needs one row per port");
    auto& table = std::string(name) == "load_in" ? a.in_load : a.out_load;
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != a.cores)
        throw Error(where + ": load row needs one entry per core");
      for (const auto& x : row) table.push_back(x.get<Volume>());
    }
  }
  return a;
}

inline Json schedule_to_json(const Schedule& s) {
  Json coflows = Json::array(), jobs = Json::array(), flows = Json::array(), segments = Json::array();
  for (const auto& [k, c] : s.coflow_completions) coflows.push_back({{"id", k}, {"completion", c}});
  for (const auto& [t, c] : s.job_completions) jobs.push_back({{"id", t}, {"completion", c}});
  for (const auto& [key, c] : s.flow_completions) {
    Json f = detail::flow_key_fields(key);
    f["completion"] = c;
    flows.push_back(std::move(f));
  }
  for (const auto& seg : s.segments) {
    Json j = detail::flow_key_fields(seg.flow);
    j["core"] = seg.core;
    j["start"] = seg.start;
    j["end"] = seg.end;
    segments.push_back(std::move(j));
  }
  return Json{{"coflows", std::move(coflows)},
              {"jobs", std::move(jobs)},
              {"flows", std::move(flows)},
              {"segments", std::move(segments)}};
}

inline std::string write_schedule(const Schedule& s) { return detail::dump(schedule_to_json(s)); }

inline Schedule schedule_from_json(const Json& doc) {
  using detail::get;
  const std::string where = "schedule document";
  detail::only_fields(doc, {"coflows", "jobs", "flows", "segments"}, where);
  Schedule s;
  for (const auto& c : detail::array_field(doc, "coflows", where)) {
    detail::only_fields(c, {"id", "completion"}, where + " coflow");
    s.coflow_completions[get<CoflowId>(c, "id", where)] = get<Time>(c, "completion", where);
  }
  for (const auto& j : detail::array_field(doc, "jobs", where)) {
    detail::only_fields(j, {"id", "completion"}, where + " job");
    s.job_completions[get<JobId>(j, "id", where)] = get<Time>(j, "completion", where);
  }
  for (const auto& f : detail::array_field(doc, "flows", where)) {
    detail::only_fields(f, {"src", "dst", "coflow", "completion"}, where + " flow");
    s.flow_completions[detail::read_flow_key(f, where)] = get<Time>(f, "completion", where);
  }
  for (const auto& g : detail::array_field(doc, "segments", where)) {
    detail::only_fields(g, {"src", "dst", "coflow", "core", "start", "end"}, where + " segment");
    s.segments.push_back({detail::read_flow_key(g, where), get<int>(g, "core", where),
                          get<Time>(g, "start", where), get<Time>(g, "end", where)});
  }
  return s;
}

inline Schedule read_schedule(const std::string& text) {
  return schedule_from_json(detail::parse_json(text, "schedule document"));
}

}  // namespace coflow
