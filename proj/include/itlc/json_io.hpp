#pragma once

// JSON forms: term trees, JSON-lines trace files, and report serialization.

#include "itlc/bohm.hpp"
#include "itlc/meaningless.hpp"
#include "itlc/syntax.hpp"
#include "itlc/term.hpp"
#include "itlc/trace.hpp"

#include <json.hpp>

#include <istream>
#include <sstream>
#include <string>

namespace itlc {

using json = nlohmann::json;

// {"k":"lam","b":{...}} | {"k":"app","f":..,"a":..} | {"k":"var","i":n}
// {"k":"const","n":"c"} | {"k":"bot"}
inline json term_to_json(const finite_term& t) {
  switch (t.kind.tag()) {
    case node_tag::bot: return json{{"k", "bot"}};
    case node_tag::var: return json{{"k", "var"}, {"i", t.kind.var_index()}};
    case node_tag::constant: return json{{"k", "const"}, {"n", t.kind.const_name()}};
    case node_tag::lam: return json{{"k", "lam"}, {"b", term_to_json(t.children[0])}};
    case node_tag::app:
      return json{{"k", "app"},
                  {"f", term_to_json(t.children[0])},
                  {"a", term_to_json(t.children[1])}};
  }
  throw std::logic_error("term_to_json: bad tag");
}

inline finite_term term_from_json(const json& j) {
  const std::string k = j.at("k").get<std::string>();
  if (k == "bot") return finite_term::bot();
  if (k == "var") return finite_term::var(j.at("i").get<std::uint32_t>());
  if (k == "const") return finite_term::constant(j.at("n").get<std::string>());
  if (k == "lam") return finite_term::lam(term_from_json(j.at("b")));
  if (k == "app") return finite_term::app(term_from_json(j.at("f")), term_from_json(j.at("a")));
  throw std::invalid_argument("term_from_json: bad kind '" + k + "'");
}

// --------------------------------------------------------------------------
// trace files: one JSON record per line, header first

inline std::string trace_to_jsonl(const trace& tr, std::uint32_t snapshot_depth,
                                  const json& config_echo) {
  std::ostringstream out;
  json header{{"start", term_to_json(truncate(tr.start, snapshot_depth))},
              {"snapshot_depth", snapshot_depth},
              {"config", config_echo}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const step& s = tr.steps[i];
    json rec{{"i", i},
             {"pos", position_to_string(s.pos)},
             {"rule", rule_name(s.rule)},
             {"depth", s.depth},
             {"snapshot", term_to_json(truncate(s.result, snapshot_depth))}};
    if (s.rule == rule_tag::bot_u) rec["verdict"] = s.verdict.name();
    out << rec.dump() << '\n';
  }
  return out.str();
}

struct file_trace {
  finite_term start;
  std::uint32_t snapshot_depth = 0;
  json config;
  struct file_step {
    position pos;
    rule_tag rule;
    std::uint32_t depth;
    finite_term snapshot;
  };
  std::vector<file_step> steps;
};

inline file_trace trace_from_jsonl(std::istream& in) {
  file_trace out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!have_header) {
      out.start = term_from_json(j.at("start"));
      out.snapshot_depth = j.at("snapshot_depth").get<std::uint32_t>();
      if (j.contains("config")) out.config = j.at("config");
      have_header = true;
      continue;
    }
    file_trace::file_step s;
    s.pos = position_from_string(j.at("pos").get<std::string>());
    std::string rule = j.at("rule").get<std::string>();
    if (rule == "beta")
      s.rule = rule_tag::beta;
    else if (rule == "botU")
      s.rule = rule_tag::bot_u;
    else
      throw std::invalid_argument("trace_from_jsonl: bad rule '" + rule + "'");
    s.depth = j.at("depth").get<std::uint32_t>();
    s.snapshot = term_from_json(j.at("snapshot"));
    out.steps.push_back(std::move(s));
  }
  if (!have_header) throw std::invalid_argument("trace_from_jsonl: missing header record");
  return out;
}

// rebuild an in-memory trace over the stored snapshots; convergence checking
// below the snapshot depth is exact, beyond it the snapshots carry no data
inline trace trace_from_snapshots(const file_trace& ft) {
  trace tr;
  tr.start = to_coterm(ft.start);
  for (const auto& fs : ft.steps) {
    step s;
    s.pos = fs.pos;
    s.rule = fs.rule;
    s.depth = fs.depth;
    s.result = to_coterm(fs.snapshot);
    tr.steps.push_back(std::move(s));
  }
  return tr;
}

// --------------------------------------------------------------------------
// reports

inline const char* provenance_name(nu_provenance p) {
  switch (p) {
    case nu_provenance::structural: return "structural";
    case nu_provenance::bottom_by_oracle: return "bottom-by-oracle";
    case nu_provenance::bottom_assumed: return "bottom-assumed";
    case nu_provenance::truncated: return "truncated";
  }
  return "?";
}

inline json annotated_to_json(const annotated_term& t) {
  json j = term_to_json(t.to_finite());
  // provenance rides alongside the structural fields
  struct add {
    static void prov(json& out, const annotated_term& a) {
      out["prov"] = provenance_name(a.prov);
      if (a.prov == nu_provenance::structural && a.crnf_steps > 0)
        out["crnf_steps"] = a.crnf_steps;
      const char* fields[2] = {nullptr, nullptr};
      switch (a.kind.tag()) {
        case node_tag::lam: fields[0] = "b"; break;
        case node_tag::app:
          fields[0] = "f";
          fields[1] = "a";
          break;
        default: break;
      }
      for (unsigned i = 0; i < a.children.size(); ++i)
        if (fields[i]) prov(out[fields[i]], a.children[i]);
    }
  };
  add::prov(j, t);
  return j;
}

inline json witness_to_json(const axiom_witness& w, const std::string& oracle_flag) {
  return json{{"term", w.term},
              {"partner", w.partner},
              {"detail", w.detail},
              {"seed", w.seed},
              {"fuel", w.fuel},
              {"replay", "classify --oracle " + oracle_flag + " --fuel " +
                             std::to_string(w.fuel) + " \"" + w.term + "\""}};
}

inline json outcome_to_json(const axiom_outcome& o, const std::string& oracle_flag) {
  json ws = json::array();
  for (const auto& w : o.fail_witnesses) ws.push_back(witness_to_json(w, oracle_flag));
  return json{{"pass_count", o.pass_count},
              {"unknown_count", o.unknown_count},
              {"fail_witnesses", ws}};
}

inline json axiom_report_to_json(const axiom_report& r, const std::string& oracle_flag) {
  return json{{"oracle", r.oracle_config},
              {"seed", r.seed},
              {"trials", r.trials},
              {"depth", r.depth},
              {"axioms",
               json{{"closure", outcome_to_json(r.closure, oracle_flag)},
                    {"substitution", outcome_to_json(r.substitution, oracle_flag)},
                    {"overlap", outcome_to_json(r.overlap, oracle_flag)},
                    {"root_activeness", outcome_to_json(r.root_activeness, oracle_flag)},
                    {"indiscernibility", outcome_to_json(r.indiscernibility, oracle_flag)},
                    {"expansion", outcome_to_json(r.expansion, oracle_flag)}}}};
}

inline json convergence_report_to_json(const convergence_report& r) {
  json rows = json::array();
  for (std::uint32_t d = 0; d < r.rows.size(); ++d) {
    const depth_row& row = r.rows[d];
    json jr{{"depth", d},
            {"stabilized", row.stabilized},
            {"limit", term_to_json(row.limit)}};
    if (row.last_index)
      jr["last_step_index"] = *row.last_index;
    else
      jr["last_step_index"] = nullptr;
    rows.push_back(std::move(jr));
  }
  return json{{"max_depth", r.max_depth}, {"consistent", r.consistent}, {"rows", rows}};
}

// trace_ref1/2 name the emitted trace files when the caller wrote them
inline json confluence_report_to_json(const confluence_report& r,
                                      const std::string& trace_ref1 = {},
                                      const std::string& trace_ref2 = {}) {
  json out{{"term", term_to_json(r.term)},
           {"strategy1", r.strat1.name()},
           {"strategy2", r.strat2.name()},
           {"k", r.k},
           {"depth", r.depth},
           {"oracle", r.oracle_config},
           {"steps1", r.tr1.steps.size()},
           {"steps2", r.tr2.steps.size()},
           {"tree1", annotated_to_json(r.tree1)},
           {"tree2", annotated_to_json(r.tree2)},
           {"equal", r.equal},
           {"tainted", r.tainted}};
  out["trace1"] = trace_ref1.empty() ? json(nullptr) : json(trace_ref1);
  out["trace2"] = trace_ref2.empty() ? json(nullptr) : json(trace_ref2);
  return out;
}

} // namespace itlc
