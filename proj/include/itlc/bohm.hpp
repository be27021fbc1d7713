#pragma once

// Lazy Bohm-like normal-form trees over a meaninglessness oracle,
// normal-form verification, depth-bounded confluence and prepend checks, and
// flattening of the tree derivation into a strongly convergent reduction
// prefix.

#include "itlc/meaningless.hpp"
#include "itlc/rnf.hpp"
#include "itlc/term.hpp"
#include "itlc/trace.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace itlc {

enum class nu_provenance : std::uint8_t {
  structural,       // root constructor of the canonical root normal form
  bottom_by_oracle, // membership verdict yes
  bottom_assumed,   // membership unknown, collapsed under the assume policy
  truncated         // depth cut of a finite window, not part of the tree itself
};

struct fuel_exhausted : std::runtime_error {
  explicit fuel_exhausted(position p, std::string what)
      : std::runtime_error("fuel exhausted at '" + position_to_string(p) + "': " + what),
        pos(std::move(p)) {}
  position pos;
};

namespace detail {

// memoized per-node expansion shared by the nu operations; keyed by source
// node identity and owned alongside one oracle configuration
class nu_context {
public:
  explicit nu_context(oracle o) : o_(std::move(o)) {}

  struct node {
    nu_provenance prov = nu_provenance::structural;
    node_kind kind = node_kind::bot();
    std::vector<coterm> sources; // source subterms feeding the children
    std::uint32_t crnf_steps = 0;
    tri verdict = tri::yes(); // raw oracle verdict at this node
  };

  const oracle& orac() const { return o_; }

  node expand(const coterm& t, const position& pos) {
    {
      std::lock_guard<std::mutex> lock(m_);
      auto it = memo_.find(t.id());
      if (it != memo_.end()) return it->second;
    }
    node n = compute(t, pos);
    std::lock_guard<std::mutex> lock(m_);
    auto [it, fresh] = memo_.emplace(t.id(), n);
    if (fresh) pins_.push_back(t);
    return it->second;
  }

private:
  node compute(const coterm& t, const position& pos) {
    node n;
    n.verdict = o_.membership(t);
    if (n.verdict.is_yes()) {
      n.prov = nu_provenance::bottom_by_oracle;
      return n;
    }
    if (n.verdict.is_unknown()) {
      if (o_.policy() == unknown_policy::strict)
        throw fuel_exhausted(pos, "membership undetermined: " + n.verdict.reason());
      n.prov = nu_provenance::bottom_assumed;
      return n;
    }
    crnf_result c = crnf(t, o_.fuel());
    if (!c.verdict.is_yes()) {
      // a non-member without reachable rnf: only possible when the oracle
      // violates the root-activeness axiom (e.g. bot-only); fall back to the
      // policy rather than claiming structure
      if (o_.policy() == unknown_policy::strict)
        throw fuel_exhausted(pos, "no canonical rnf within fuel");
      n.prov = nu_provenance::bottom_assumed;
      n.verdict = tri::unknown("no canonical rnf within fuel");
      return n;
    }
    const coterm& r = *c.term;
    n.prov = nu_provenance::structural;
    n.kind = r.kind();
    n.crnf_steps = c.whnf_steps;
    for (unsigned i = 0; i < n.kind.arity(); ++i) n.sources.push_back(r.child(i));
    return n;
  }

  oracle o_;
  std::mutex m_;
  std::unordered_map<const detail::cell*, node> memo_;
  std::vector<coterm> pins_;
};

inline coterm nu_tree_at(std::shared_ptr<nu_context> ctx, coterm t, position pos) {
  return coterm::defer([ctx = std::move(ctx), t = std::move(t), pos = std::move(pos)]() {
    nu_context::node n = ctx->expand(t, pos);
    switch (n.kind.tag()) {
      case node_tag::bot: return coterm::bot();
      case node_tag::var: return coterm::var(n.kind.var_index());
      case node_tag::constant: return coterm::constant(n.kind.const_name());
      case node_tag::lam: {
        position p0 = pos;
        p0.push_back(0);
        return coterm::lam(nu_tree_at(ctx, n.sources[0], std::move(p0)));
      }
      case node_tag::app: {
        position p0 = pos, p1 = pos;
        p0.push_back(0);
        p1.push_back(1);
        return coterm::app(nu_tree_at(ctx, n.sources[0], std::move(p0)),
                           nu_tree_at(ctx, n.sources[1], std::move(p1)));
      }
    }
    throw std::logic_error("nu_tree_at: bad kind");
  });
}

} // namespace detail

// the unique beta-bot-normal form of t as a lazy coterm; productive for any
// input under the assume policy, throws fuel_exhausted under strict when a
// verdict cannot be established
inline coterm nu_tree(const coterm& t, const oracle& o) {
  return detail::nu_tree_at(std::make_shared<detail::nu_context>(o), t, {});
}

inline finite_term nu_tree_truncated(const coterm& t, const oracle& o, std::uint32_t depth) {
  return truncate(nu_tree(t, o), depth);
}

// --------------------------------------------------------------------------
// annotated finite window, with provenance per node

struct annotated_term {
  node_kind kind = node_kind::bot();
  nu_provenance prov = nu_provenance::structural;
  std::uint32_t crnf_steps = 0;
  std::vector<annotated_term> children;

  bool tainted() const {
    if (prov == nu_provenance::bottom_assumed) return true;
    for (const auto& c : children)
      if (c.tainted()) return true;
    return false;
  }

  finite_term to_finite() const {
    finite_term out(kind);
    for (const auto& c : children) out.children.push_back(c.to_finite());
    return out;
  }
};

inline annotated_term nu_tree_annotated(const coterm& t, const oracle& o, std::uint32_t depth) {
  detail::nu_context ctx(o);
  struct builder {
    detail::nu_context& ctx;
    annotated_term build(const coterm& u, position pos, std::uint32_t d) {
      annotated_term out;
      if (d == 0) {
        out.prov = nu_provenance::truncated;
        return out;
      }
      detail::nu_context::node n = ctx.expand(u, pos);
      out.kind = n.kind;
      out.prov = n.prov;
      out.crnf_steps = n.crnf_steps;
      for (unsigned i = 0; i < n.kind.arity(); ++i) {
        position pc = pos;
        pc.push_back(i);
        out.children.push_back(build(n.sources[i], std::move(pc), d - 1));
      }
      return out;
    }
  };
  builder b{ctx};
  return b.build(t, {}, depth);
}

// --------------------------------------------------------------------------
// normal-form verification

// yes iff no position at depth < n is a beta-redex or a non-bot member;
// an undetermined verdict anywhere in the window dominates, then a definite
// counterexample, then yes.  On no, the first offending position is written
// to *witness when given.
inline tri is_normal_up_to(const coterm& t, std::uint32_t n, const oracle& o,
                           position* witness = nullptr) {
  std::optional<position> unknown_at;
  std::optional<position> bad_at;
  std::string unknown_reason;
  position cur;
  struct walker {
    const oracle& o;
    std::optional<position>& unknown_at;
    std::optional<position>& bad_at;
    std::string& unknown_reason;
    position& cur;
    void walk(const coterm& u, std::uint32_t left) {
      if (left == 0 || unknown_at) return;
      const node_kind& k = u.kind();
      if (k.is(node_tag::app) && u.child(0).kind().is(node_tag::lam) && !bad_at) bad_at = cur;
      if (!k.is(node_tag::bot)) {
        tri v = o.membership(u);
        if (v.is_unknown()) {
          unknown_at = cur;
          unknown_reason = v.reason();
          return;
        }
        if (v.is_yes() && !bad_at) bad_at = cur;
      }
      for (unsigned i = 0; i < k.arity(); ++i) {
        cur.push_back(i);
        walk(u.child(i), left - 1);
        cur.pop_back();
      }
    }
  };
  walker w{o, unknown_at, bad_at, unknown_reason, cur};
  w.walk(t, n);
  if (unknown_at)
    return tri::unknown("verdict undetermined at '" + position_to_string(*unknown_at) +
                        "': " + unknown_reason);
  if (bad_at) {
    if (witness) *witness = *bad_at;
    return tri::no();
  }
  return tri::yes();
}

// --------------------------------------------------------------------------
// confluence and prepend checks

struct confluence_report {
  finite_term term; // input echo, truncated at the comparison depth
  strategy strat1, strat2;
  std::uint32_t k = 0;
  std::uint32_t depth = 0;
  std::string oracle_config;
  trace tr1, tr2;
  annotated_term tree1, tree2;
  bool equal = false;
  bool tainted = false;
};

// reduce t along two strategies, normalize both endpoints with the nu-tree,
// and compare the truncations; assumed bottoms or assumed bot-steps taint
// the comparison rather than deciding it
inline confluence_report confluence_check(const coterm& t, const strategy& s1,
                                          const strategy& s2, std::uint32_t k,
                                          std::uint32_t depth, const oracle& o) {
  confluence_report rep;
  rep.term = truncate(t, depth);
  rep.strat1 = s1;
  rep.strat2 = s2;
  rep.k = k;
  rep.depth = depth;
  rep.oracle_config = o.describe();
  rep.tr1 = reduce(t, s1, k, &o);
  rep.tr2 = reduce(t, s2, k, &o);
  rep.tree1 = nu_tree_annotated(rep.tr1.end(), o, depth);
  rep.tree2 = nu_tree_annotated(rep.tr2.end(), o, depth);
  rep.equal = rep.tree1.to_finite() == rep.tree2.to_finite();
  rep.tainted = rep.tree1.tainted() || rep.tree2.tainted() || rep.tr1.has_assumed_steps() ||
                rep.tr2.has_assumed_steps();
  return rep;
}

// reducing first does not change the normal-form tree, compared on a finite
// window
inline bool prepend_check(const coterm& t, const trace& tr, std::uint32_t depth,
                          const oracle& o) {
  if (!t.same_cell(tr.start) && !bisim_up_to(t, tr.start, depth))
    throw invalid_trace("trace does not start at the given term");
  return nu_tree_truncated(t, o, depth) == nu_tree_truncated(tr.end(), o, depth);
}

// --------------------------------------------------------------------------
// flattening the nu-derivation into a strongly convergent prefix

// Breadth-order traversal of the derivation down to the given depth: each
// node contributes its weak-head prefix (at its own position) and its
// bot-collapse if any.  Steps at depth d all occur while processing nodes of
// depth <= d, so every depth is eventually quiet and the limit truncations
// equal the tree's.
inline trace nu_to_sequence(const coterm& t, const oracle& o, std::uint32_t depth) {
  trace tr;
  tr.start = t;
  coterm g = t;
  std::deque<std::pair<position, coterm>> queue;
  queue.emplace_back(position{}, t);

  while (!queue.empty()) {
    auto [pos, u] = queue.front();
    queue.pop_front();
    if (pos.size() >= depth) continue;

    tri mv = o.membership(u);
    bool collapse = mv.is_yes() || (mv.is_unknown() &&
                                    o.policy() == unknown_policy::assume_meaningless);
    if (mv.is_unknown() && o.policy() == unknown_policy::strict)
      throw fuel_exhausted(pos, "membership undetermined: " + mv.reason());
    if (collapse) {
      if (!u.kind().is(node_tag::bot)) {
        g = step_at(g, pos, rule_tag::bot_u, &o);
        tr.steps.push_back(
            step{pos, rule_tag::bot_u, static_cast<std::uint32_t>(pos.size()), g, mv});
      }
      continue;
    }

    // find the canonical rnf at this node (iterate after the last
    // root-position contraction of the terminating chain), then emit exactly
    // the steps leading to it
    coterm cur = u;
    std::vector<position> rel_steps;
    coterm node_rnf = u;
    std::size_t rnf_prefix = 0;
    bool structural = false;
    for (std::uint32_t steps = 0;; ++steps) {
      // a bot dead-end under a non-member verdict means the oracle rejected
      // a provably root-active term; stop expanding here
      if (cur.kind().is(node_tag::bot)) break;
      whnf_result r = whnf_step_ex(cur);
      if (r.status == head_status::stuck || r.status == head_status::cyclic_spine) {
        structural = true;
        break;
      }
      if (r.status == head_status::spine_overflow || steps >= o.fuel()) {
        // non-member without reachable rnf under this oracle; only possible
        // when the oracle violates the root-activeness axiom
        if (o.policy() == unknown_policy::strict)
          throw fuel_exhausted(pos, "no canonical rnf within fuel");
        break;
      }
      cur = r.next;
      rel_steps.push_back(r.redex_pos);
      if (r.redex_pos.empty()) {
        node_rnf = cur;
        rnf_prefix = rel_steps.size();
      }
    }
    if (!structural) continue; // leave the node unexpanded
    for (std::size_t i = 0; i < rnf_prefix; ++i) {
      position abs = pos;
      abs.insert(abs.end(), rel_steps[i].begin(), rel_steps[i].end());
      g = step_at(g, abs, rule_tag::beta);
      tr.steps.push_back(
          step{abs, rule_tag::beta, static_cast<std::uint32_t>(abs.size()), g, tri::yes()});
    }
    for (unsigned i = 0; i < node_rnf.kind().arity(); ++i) {
      position pc = pos;
      pc.push_back(i);
      queue.emplace_back(std::move(pc), node_rnf.child(i));
    }
  }
  return tr;
}

} // namespace itlc
