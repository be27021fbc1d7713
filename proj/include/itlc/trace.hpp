#pragma once

// Finite reduction-sequence prefixes: redex enumeration under an optional
// meaninglessness oracle, positional stepping, strategy-driven reduction,
// postponement of bot-steps past beta-steps, and the strong-convergence
// consistency report.

#include "itlc/meaningless.hpp"
#include "itlc/reduction.hpp"
#include "itlc/rng.hpp"
#include "itlc/term.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace itlc {

enum class rule_tag : std::uint8_t { beta, bot_u };

inline const char* rule_name(rule_tag r) { return r == rule_tag::beta ? "beta" : "botU"; }

struct step {
  position pos;
  rule_tag rule = rule_tag::beta;
  std::uint32_t depth = 0; // == pos.size()
  coterm result;
  tri verdict = tri::yes(); // oracle verdict used, for bot_u steps
};

struct trace {
  coterm start;
  std::vector<step> steps;

  const coterm& end() const { return steps.empty() ? start : steps.back().result; }

  // true when some bot_u step was taken on an assumed (unknown) verdict
  bool has_assumed_steps() const {
    for (const auto& s : steps)
      if (s.rule == rule_tag::bot_u && s.verdict.is_unknown()) return true;
    return false;
  }
};

struct invalid_trace : std::runtime_error {
  explicit invalid_trace(std::string what) : std::runtime_error("invalid trace: " + what) {}
};

// --------------------------------------------------------------------------
// redex enumeration

struct redex_info {
  position pos;
  rule_tag rule;
  tri verdict; // yes for beta; membership verdict for bot_u
};

// preorder (prefix-first, child 0 before child 1); at one position a beta
// entry precedes a bot_u entry.  bot_u candidates are non-bot subterms whose
// membership verdict is yes, or unknown under the assume policy.
inline std::vector<redex_info> redexes(const coterm& t, std::uint32_t depth_bound,
                                       const oracle* o = nullptr,
                                       std::size_t max_count = 10000) {
  std::vector<redex_info> out;
  position cur;
  struct walker {
    std::vector<redex_info>& out;
    position& cur;
    std::uint32_t bound;
    const oracle* o;
    std::size_t cap;
    void walk(const coterm& u, std::uint32_t d) {
      if (d >= bound || out.size() >= cap) return;
      const node_kind& k = u.kind();
      if (k.is(node_tag::app) && u.child(0).kind().is(node_tag::lam))
        out.push_back(redex_info{cur, rule_tag::beta, tri::yes()});
      if (o && !k.is(node_tag::bot)) {
        tri v = o->membership(u);
        if (v.is_yes() || v.is_unknown())
          out.push_back(redex_info{cur, rule_tag::bot_u, v});
      }
      for (unsigned i = 0; i < k.arity(); ++i) {
        cur.push_back(i);
        walk(u.child(i), d + 1);
        cur.pop_back();
      }
    }
  };
  walker w{out, cur, depth_bound, o, max_count};
  w.walk(t, 0);
  return out;
}

// --------------------------------------------------------------------------
// positional stepping

inline coterm step_at(const coterm& t, const position& p, rule_tag rule,
                      const oracle* o = nullptr) {
  if (rule == rule_tag::beta) return contract_beta_at(t, p);
  return splice_at(t, p, [&](const coterm& sub) {
    if (sub.kind().is(node_tag::bot)) throw not_a_redex(p, "bot is not a bot_u redex");
    if (!o) throw not_a_redex(p, "bot_u step requires an oracle");
    tri v = o->membership(sub);
    if (v.is_no()) throw not_a_redex(p, "oracle rejects membership");
    if (v.is_unknown() && o->policy() == unknown_policy::strict)
      throw not_a_redex(p, "membership unknown under strict policy");
    return coterm::bot();
  });
}

// --------------------------------------------------------------------------
// strategies

enum class strategy_kind : std::uint8_t {
  leftmost_outermost,
  weak_head,
  random_redex,
  bottom_first
};

struct strategy {
  strategy_kind kind = strategy_kind::weak_head;
  std::uint64_t seed = 0;
  std::uint32_t search_depth = 16;

  static strategy leftmost_outermost(std::uint32_t depth = 16) {
    return strategy{strategy_kind::leftmost_outermost, 0, depth};
  }
  static strategy weak_head() { return strategy{strategy_kind::weak_head, 0, 16}; }
  static strategy random_redex(std::uint64_t seed, std::uint32_t depth = 16) {
    return strategy{strategy_kind::random_redex, seed, depth};
  }
  static strategy bottom_first(std::uint32_t depth = 16) {
    return strategy{strategy_kind::bottom_first, 0, depth};
  }

  std::string name() const {
    switch (kind) {
      case strategy_kind::leftmost_outermost: return "leftmost-outermost";
      case strategy_kind::weak_head: return "weak-head";
      case strategy_kind::random_redex: return "random(" + std::to_string(seed) + ")";
      case strategy_kind::bottom_first: return "bottom-first";
    }
    return "?";
  }
};

// up to k strategy-chosen steps; stops early when the bounded redex search
// finds nothing
inline trace reduce(const coterm& t, const strategy& strat, std::uint32_t k,
                    const oracle* o = nullptr) {
  trace tr;
  tr.start = t;
  coterm cur = t;
  xoshiro256 rng(strat.seed);

  for (std::uint32_t i = 0; i < k; ++i) {
    if (strat.kind == strategy_kind::weak_head) {
      // head strategy: descend under abstractions, then contract the weak
      // head redex of the body, so spine-producing terms step at depths
      // 0, 1, 2, ...
      position prefix;
      coterm body = cur;
      while (body.kind().is(node_tag::lam) && prefix.size() < strat.search_depth) {
        prefix.push_back(0);
        body = body.child(0);
      }
      whnf_result r = whnf_step_ex(body);
      if (r.status != head_status::redex) break;
      position abs = prefix;
      abs.insert(abs.end(), r.redex_pos.begin(), r.redex_pos.end());
      cur = step_at(cur, abs, rule_tag::beta);
      tr.steps.push_back(step{abs, rule_tag::beta, static_cast<std::uint32_t>(abs.size()), cur,
                              tri::yes()});
      continue;
    }
    auto cands = redexes(cur, strat.search_depth, o);
    // strict policy: unknown-verdict entries are not steppable
    if (o && o->policy() == unknown_policy::strict) {
      std::vector<redex_info> filtered;
      for (auto& c : cands)
        if (!(c.rule == rule_tag::bot_u && c.verdict.is_unknown())) filtered.push_back(c);
      cands = std::move(filtered);
    }
    if (cands.empty()) break;
    std::size_t pick = 0;
    switch (strat.kind) {
      case strategy_kind::leftmost_outermost: pick = 0; break;
      case strategy_kind::random_redex: pick = rng.below(cands.size()); break;
      case strategy_kind::bottom_first: {
        pick = 0;
        for (std::size_t j = 0; j < cands.size(); ++j)
          if (cands[j].rule == rule_tag::bot_u) {
            pick = j;
            break;
          }
        break;
      }
      case strategy_kind::weak_head: break; // handled above
    }
    const redex_info& chosen = cands[pick];
    cur = step_at(cur, chosen.pos, chosen.rule, o);
    tr.steps.push_back(step{chosen.pos, chosen.rule,
                            static_cast<std::uint32_t>(chosen.pos.size()), cur, chosen.verdict});
  }
  return tr;
}

// --------------------------------------------------------------------------
// postponement of bot-steps

struct postpone_result {
  trace beta_trace;                      // pure-beta trace from the input start
  std::pair<coterm, coterm> parallel_bot; // (beta endpoint, input endpoint)
};

// Commutes every bot_u step rightward past the later beta-steps.  A beta
// position in the mixed trace names the same redex in the uncollapsed line,
// because parallel bot-reduction only turns subterms into bot: replaying the
// beta-steps in order and dropping the bot-steps yields the pure-beta trace,
// and the endpoints stay in parallel bot-reduction.
inline postpone_result postpone_bot(const trace& tr) {
  postpone_result out;
  out.beta_trace.start = tr.start;
  coterm r = tr.start;
  for (const auto& s : tr.steps) {
    if (s.depth != s.pos.size()) throw invalid_trace("step depth does not match its position");
    if (s.rule == rule_tag::bot_u) continue;
    try {
      r = contract_beta_at(r, s.pos);
    } catch (const not_a_redex& e) {
      throw invalid_trace(std::string("beta replay failed: ") + e.what());
    }
    out.beta_trace.steps.push_back(
        step{s.pos, rule_tag::beta, static_cast<std::uint32_t>(s.pos.size()), r, tri::yes()});
  }
  out.parallel_bot = {r, tr.end()};
  return out;
}

// --------------------------------------------------------------------------
// strong-convergence consistency over a finite prefix

struct depth_row {
  std::optional<std::size_t> last_index; // last step with depth <= d
  finite_term limit;                     // truncation at d after that step
  bool stabilized;                       // some tail of the prefix is quiet at this depth
};

struct convergence_report {
  std::uint32_t max_depth = 0;
  std::vector<depth_row> rows; // indexed by depth 0..max_depth
  bool consistent = true;      // truncations constant after the stabilization index
};

inline convergence_report check_strong_convergence(const trace& tr, std::uint32_t max_depth) {
  for (const auto& s : tr.steps)
    if (s.depth != s.pos.size()) throw invalid_trace("step depth does not match its position");

  convergence_report rep;
  rep.max_depth = max_depth;
  auto term_after = [&](std::optional<std::size_t> idx) -> const coterm& {
    return idx ? tr.steps[*idx].result : tr.start;
  };
  for (std::uint32_t d = 0; d <= max_depth; ++d) {
    depth_row row{std::nullopt, finite_term::bot(), true};
    for (std::size_t i = 0; i < tr.steps.size(); ++i)
      if (tr.steps[i].depth <= d) row.last_index = i;
    row.limit = truncate(term_after(row.last_index), d);
    row.stabilized = !row.last_index || *row.last_index + 1 < tr.steps.size();
    std::size_t from = row.last_index ? *row.last_index + 1 : 0;
    for (std::size_t i = from; i < tr.steps.size(); ++i)
      if (truncate(tr.steps[i].result, d) != row.limit) rep.consistent = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

} // namespace itlc
