// itlc: command-line front end for the infinitary lambda calculus toolkit.
//
// Subcommands: parse, whnf, crnf, classify, tree, reduce, confluence,
// prepend, converge, axioms.  Exit codes: 0 pass, 1 check failure,
// 2 usage or parse errors.  Results that depend on assumed (unknown)
// oracle verdicts exit 0 with a tainted marker unless --strict is given.

#include "itlc/bohm.hpp"
#include "itlc/corpus.hpp"
#include "itlc/json_io.hpp"
#include "itlc/meaningless.hpp"
#include "itlc/mu.hpp"
#include "itlc/rnf.hpp"
#include "itlc/syntax.hpp"
#include "itlc/term.hpp"
#include "itlc/trace.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace itlc;

struct cli_config {
  std::uint32_t fuel = 200;
  std::uint32_t depth = 16;
  std::uint64_t seed = 0xC0FFEE;
  std::string oracle_name = "root-active";
  std::string policy_name = "assume";
  std::string output = "text";
  bool strict_exit = false;

  std::string term_text;
  std::string term_file;
  std::string demo_name;
  bool open = false;

  unknown_policy policy() const {
    return policy_name == "strict" ? unknown_policy::strict
                                   : unknown_policy::assume_meaningless;
  }

  oracle make_oracle() const {
    if (oracle_name == "root-active") return oracle::root_active(fuel, policy());
    if (oracle_name == "head-ogre") return oracle::head_ogre(fuel, policy());
    if (oracle_name == "bot-only") return oracle::bot_only(fuel, policy());
    throw CLI::ValidationError("--oracle", "unknown oracle: " + oracle_name);
  }

  json echo() const {
    return json{{"fuel", fuel},       {"depth", depth},   {"seed", seed},
                {"oracle", oracle_name}, {"policy", policy_name}};
  }

  bool json_out() const { return output == "json"; }
};

void add_common(CLI::App* cmd, cli_config& cfg, bool with_term) {
  cmd->add_option("--fuel", cfg.fuel, "weak-head search budget")->capture_default_str();
  cmd->add_option("--depth", cfg.depth, "tree / comparison depth")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
  cmd->add_option("--oracle", cfg.oracle_name, "root-active | head-ogre | bot-only")
      ->capture_default_str();
  cmd->add_option("--policy", cfg.policy_name, "assume | strict (unknown verdicts)")
      ->capture_default_str();
  cmd->add_option("--output", cfg.output, "text | json")->capture_default_str();
  cmd->add_flag("--strict", cfg.strict_exit, "tainted results exit nonzero");
  if (with_term) {
    cmd->add_option("term", cfg.term_text, "term in surface syntax");
    cmd->add_option("--file", cfg.term_file, "read the term from a file");
    cmd->add_option("--demo", cfg.demo_name, "named corpus term");
    cmd->add_flag("--open", cfg.open, "allow free variables");
  }
}

parse_result get_term(const cli_config& cfg) {
  if (!cfg.demo_name.empty()) return demo(cfg.demo_name);
  if (!cfg.term_file.empty()) {
    std::ifstream f(cfg.term_file);
    if (!f) throw CLI::ValidationError("--file", "cannot open " + cfg.term_file);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse(text, cfg.open);
  }
  if (cfg.term_text.empty())
    throw CLI::ValidationError("term", "a term, --file or --demo NAME is required");
  return parse(cfg.term_text, cfg.open);
}

int tainted_exit(const cli_config& cfg, bool tainted, bool failed) {
  if (failed) return 1;
  if (tainted && cfg.strict_exit) return 1;
  return 0;
}

// --------------------------------------------------------------------------

int cmd_parse(const cli_config& cfg) {
  parse_result pr = get_term(cfg);
  finite_term window = truncate(pr.term, cfg.depth);
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"term", term_to_json(window)},
             {"canonical", canonical_text(window)},
             {"printed", print_finite(window, print_style::named, &pr.free_names)},
             {"free_names", pr.free_names}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << print_finite(window, print_style::named, &pr.free_names) << '\n';
    std::cout << "canonical: " << canonical_text(window) << '\n';
    if (!pr.free_names.empty()) {
      std::cout << "free:";
      for (const auto& n : pr.free_names) std::cout << ' ' << n;
      std::cout << '\n';
    }
  }
  return 0;
}

int cmd_whnf(const cli_config& cfg) {
  parse_result pr = get_term(cfg);
  coterm cur = pr.term;
  std::uint32_t steps = 0;
  head_status last = head_status::stuck;
  for (; steps < cfg.fuel; ++steps) {
    whnf_result r = whnf_step_ex(cur);
    last = r.status;
    if (r.status != head_status::redex) break;
    cur = r.next;
  }
  bool finished = last != head_status::redex && steps < cfg.fuel;
  std::string printed = print_truncated(cur, cfg.depth, print_style::named, &pr.free_names);
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"steps", steps},
             {"reached_whnf", finished},
             {"term", term_to_json(truncate(cur, cfg.depth))},
             {"printed", printed}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << printed << '\n';
    std::cout << "steps: " << steps << (finished ? "" : " (fuel exhausted)") << '\n';
  }
  return 0;
}

int cmd_crnf(const cli_config& cfg) {
  parse_result pr = get_term(cfg);
  crnf_result r = crnf(pr.term, cfg.fuel);
  std::string printed = r.term
      ? print_truncated(*r.term, cfg.depth, print_style::named, &pr.free_names)
      : std::string();
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"verdict", r.verdict.name()},
             {"whnf_steps", r.whnf_steps},
             {"reached_bottom", r.reached_bottom}};
    if (r.term) {
      out["term"] = term_to_json(truncate(*r.term, cfg.depth));
      out["printed"] = printed;
    }
    if (r.verdict.is_unknown()) out["reason"] = r.verdict.reason();
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "crnf: " << r.verdict.name() << " after " << r.whnf_steps << " steps\n";
    if (r.term) std::cout << printed << '\n';
    if (r.verdict.is_unknown()) std::cout << "reason: " << r.verdict.reason() << '\n';
  }
  return tainted_exit(cfg, r.verdict.is_unknown(), false);
}

int cmd_classify(const cli_config& cfg) {
  parse_result pr = get_term(cfg);
  oracle o = cfg.make_oracle();
  tri rnf_v = is_rnf(pr.term, cfg.fuel);
  tri has_v = has_rnf(pr.term, cfg.fuel);
  tri mem_v = o.membership(pr.term);
  bool tainted = rnf_v.is_unknown() || has_v.is_unknown() || mem_v.is_unknown();
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"rnf", rnf_v.name()},
             {"has_rnf", has_v.name()},
             {"in_U", mem_v.name()},
             {"tainted", tainted}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "rnf: " << rnf_v.name() << '\n';
    std::cout << "has-rnf: " << has_v.name() << '\n';
    std::cout << "in-U: " << mem_v.name() << '\n';
    if (tainted) std::cout << "tainted: some verdicts are fuel-limited\n";
  }
  return tainted_exit(cfg, tainted, false);
}

int cmd_tree(const cli_config& cfg) {
  parse_result pr = get_term(cfg);
  oracle o = cfg.make_oracle();
  annotated_term tree = nu_tree_annotated(pr.term, o, cfg.depth);
  bool tainted = tree.tainted();
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"tree", annotated_to_json(tree)},
             {"printed", print_finite(tree.to_finite(), print_style::named, &pr.free_names)},
             {"tainted", tainted}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << print_finite(tree.to_finite(), print_style::named, &pr.free_names) << '\n';
    if (tainted) std::cout << "tainted: contains assumed bottoms\n";
  }
  return tainted_exit(cfg, tainted, false);
}

strategy strategy_by_name(const std::string& name, std::uint64_t seed, std::uint32_t depth) {
  if (name == "weak-head") return strategy::weak_head();
  if (name == "leftmost-outermost") return strategy::leftmost_outermost(depth);
  if (name == "bottom-first") return strategy::bottom_first(depth);
  if (name == "random") return strategy::random_redex(seed, depth);
  throw CLI::ValidationError("strategy", "unknown strategy: " + name);
}

int cmd_reduce(const cli_config& cfg, const std::string& strat_name, std::uint32_t k,
               const std::string& out_path) {
  parse_result pr = get_term(cfg);
  oracle o = cfg.make_oracle();
  strategy st = strategy_by_name(strat_name, cfg.seed, cfg.depth);
  trace tr = reduce(pr.term, st, k, &o);
  json echo = cfg.echo();
  echo["strategy"] = st.name();
  echo["k"] = k;
  std::string payload = trace_to_jsonl(tr, cfg.depth, echo);
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    f << payload;
    std::cout << "wrote " << tr.steps.size() << " steps to " << out_path << '\n';
  }
  return tainted_exit(cfg, tr.has_assumed_steps(), false);
}

int cmd_confluence(const cli_config& cfg, const std::string& s1_name,
                   const std::string& s2_name, std::uint32_t k,
                   const std::string& trace_prefix) {
  parse_result pr = get_term(cfg);
  oracle o = cfg.make_oracle();
  strategy s1 = strategy_by_name(s1_name, cfg.seed, cfg.depth);
  strategy s2 = strategy_by_name(s2_name, cfg.seed + 1, cfg.depth);
  confluence_report rep = confluence_check(pr.term, s1, s2, k, cfg.depth, o);
  std::string ref1, ref2;
  if (!trace_prefix.empty()) {
    json echo = cfg.echo();
    echo["k"] = k;
    ref1 = trace_prefix + ".1.jsonl";
    ref2 = trace_prefix + ".2.jsonl";
    std::ofstream(ref1) << trace_to_jsonl(rep.tr1, cfg.depth, echo);
    std::ofstream(ref2) << trace_to_jsonl(rep.tr2, cfg.depth, echo);
  }
  if (cfg.json_out()) {
    json out = confluence_report_to_json(rep, ref1, ref2);
    out["config"] = cfg.echo();
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "strategy 1: " << s1.name() << " (" << rep.tr1.steps.size() << " steps)\n";
    std::cout << "strategy 2: " << s2.name() << " (" << rep.tr2.steps.size() << " steps)\n";
    std::cout << "tree 1: " << print_finite(rep.tree1.to_finite(), print_style::named,
                                            &pr.free_names)
              << '\n';
    std::cout << "tree 2: " << print_finite(rep.tree2.to_finite(), print_style::named,
                                            &pr.free_names)
              << '\n';
    std::cout << "equal: " << (rep.equal ? "true" : "false") << '\n';
    if (rep.tainted) std::cout << "tainted: verdicts were assumed\n";
  }
  bool failed = !rep.equal && !rep.tainted;
  return tainted_exit(cfg, rep.tainted, failed || (!rep.equal && cfg.strict_exit));
}

int cmd_prepend(const cli_config& cfg, std::uint32_t k) {
  parse_result pr = get_term(cfg);
  oracle o = cfg.make_oracle();
  trace tr = reduce(pr.term, strategy::random_redex(cfg.seed, cfg.depth), k, &o);
  bool ok = prepend_check(pr.term, tr, cfg.depth, o);
  bool tainted = tr.has_assumed_steps() ||
                 nu_tree_annotated(pr.term, o, cfg.depth).tainted() ||
                 nu_tree_annotated(tr.end(), o, cfg.depth).tainted();
  if (cfg.json_out()) {
    json out{{"config", cfg.echo()},
             {"steps", tr.steps.size()},
             {"equal", ok},
             {"tainted", tainted}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "trace steps: " << tr.steps.size() << '\n';
    std::cout << "prepend: " << (ok ? "pass" : "FAIL") << '\n';
    if (tainted) std::cout << "tainted: verdicts were assumed\n";
  }
  bool failed = !ok && !tainted;
  return tainted_exit(cfg, tainted, failed || (!ok && cfg.strict_exit));
}

int cmd_converge(const cli_config& cfg, const std::string& trace_path) {
  std::ifstream f(trace_path);
  if (!f) throw std::runtime_error("cannot open " + trace_path);
  file_trace ft = trace_from_jsonl(f);
  std::uint32_t max_depth = std::min(cfg.depth, ft.snapshot_depth);
  trace tr = trace_from_snapshots(ft);
  convergence_report rep = check_strong_convergence(tr, max_depth);
  if (cfg.json_out()) {
    json out = convergence_report_to_json(rep);
    out["config"] = cfg.echo();
    out["trace_config"] = ft.config;
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "consistent up to depth " << max_depth << ": "
              << (rep.consistent ? "true" : "false") << '\n';
    for (std::uint32_t d = 0; d < rep.rows.size(); ++d) {
      const depth_row& row = rep.rows[d];
      std::cout << "depth " << d << ": last step ";
      if (row.last_index)
        std::cout << *row.last_index;
      else
        std::cout << "-";
      std::cout << (row.stabilized ? " (stable)" : " (active at prefix end)") << "  limit "
                << print_finite(row.limit) << '\n';
    }
  }
  return rep.consistent ? 0 : 1;
}

int cmd_axioms(const cli_config& cfg, std::uint32_t trials) {
  oracle o = cfg.make_oracle();
  std::vector<coterm> corpus = demo_coterms();
  corpus.push_back(coterm::bot());
  axiom_report rep = axiom_check(o, corpus, cfg.depth, trials, cfg.seed);
  if (cfg.json_out()) {
    json out = axiom_report_to_json(rep, cfg.oracle_name);
    out["config"] = cfg.echo();
    std::cout << out.dump(2) << '\n';
  } else {
    auto show = [&](const char* name, const axiom_outcome& a) {
      std::cout << name << ": " << a.pass_count << " pass, " << a.unknown_count << " unknown, "
                << a.fail_witnesses.size() << " fail\n";
      for (const auto& w : a.fail_witnesses)
        std::cout << "  witness: " << w.term << "  (" << w.detail << ")\n";
    };
    std::cout << "oracle: " << rep.oracle_config << '\n';
    show("closure", rep.closure);
    show("substitution", rep.substitution);
    show("overlap", rep.overlap);
    show("root-activeness", rep.root_activeness);
    show("indiscernibility", rep.indiscernibility);
    show("expansion", rep.expansion);
  }
  return rep.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"infinitary lambda calculus toolkit"};
  app.require_subcommand(1);

  cli_config cfg;
  std::string strat_name = "weak-head";
  std::string s1_name = "weak-head";
  std::string s2_name = "random";
  std::string out_path;
  std::string trace_path;
  std::uint32_t k = 8;
  std::uint32_t trials = 200;

  CLI::App* c_parse = app.add_subcommand("parse", "parse and echo the canonical form");
  add_common(c_parse, cfg, true);
  CLI::App* c_whnf = app.add_subcommand("whnf", "reduce to weak head normal form");
  add_common(c_whnf, cfg, true);
  CLI::App* c_crnf = app.add_subcommand("crnf", "canonical root normal form");
  add_common(c_crnf, cfg, true);
  CLI::App* c_classify = app.add_subcommand("classify", "rnf / has-rnf / oracle verdicts");
  add_common(c_classify, cfg, true);
  CLI::App* c_tree = app.add_subcommand("tree", "Bohm-like normal form tree");
  add_common(c_tree, cfg, true);
  CLI::App* c_reduce = app.add_subcommand("reduce", "emit a reduction trace file");
  add_common(c_reduce, cfg, true);
  c_reduce->add_option("--strategy", strat_name,
                       "weak-head | leftmost-outermost | random | bottom-first")
      ->capture_default_str();
  c_reduce->add_option("--k", k, "maximum steps")->capture_default_str();
  c_reduce->add_option("--out", out_path, "trace file path (default stdout)");
  CLI::App* c_confluence = app.add_subcommand("confluence", "two-strategy confluence check");
  add_common(c_confluence, cfg, true);
  c_confluence->add_option("--s1", s1_name, "first strategy")->capture_default_str();
  c_confluence->add_option("--s2", s2_name, "second strategy")->capture_default_str();
  c_confluence->add_option("--k", k, "steps per branch")->capture_default_str();
  std::string trace_prefix;
  c_confluence->add_option("--trace-out", trace_prefix,
                           "write both traces to PREFIX.{1,2}.jsonl");
  CLI::App* c_prepend = app.add_subcommand("prepend", "prepend check on a seeded trace");
  add_common(c_prepend, cfg, true);
  c_prepend->add_option("--k", k, "trace length")->capture_default_str();
  CLI::App* c_converge = app.add_subcommand("converge", "strong-convergence check on a trace file");
  add_common(c_converge, cfg, false);
  c_converge->add_option("trace", trace_path, "JSON-lines trace file")->required();
  CLI::App* c_axioms = app.add_subcommand("axioms", "meaningless-set axiom spot checks");
  add_common(c_axioms, cfg, false);
  c_axioms->add_option("--trials", trials, "samples per axiom")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_parse->parsed()) return cmd_parse(cfg);
    if (c_whnf->parsed()) return cmd_whnf(cfg);
    if (c_crnf->parsed()) return cmd_crnf(cfg);
    if (c_classify->parsed()) return cmd_classify(cfg);
    if (c_tree->parsed()) return cmd_tree(cfg);
    if (c_reduce->parsed()) return cmd_reduce(cfg, strat_name, k, out_path);
    if (c_confluence->parsed()) return cmd_confluence(cfg, s1_name, s2_name, k, trace_prefix);
    if (c_prepend->parsed()) return cmd_prepend(cfg, k);
    if (c_converge->parsed()) return cmd_converge(cfg, trace_path);
    if (c_axioms->parsed()) return cmd_axioms(cfg, trials);
  } catch (const itlc::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const itlc::unbound_variable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const itlc::guardedness_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const itlc::fuel_exhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
