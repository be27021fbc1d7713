#pragma once

// de Bruijn lifting and lazy substitution, left-spine analysis, and one-step
// weak head reduction.  Strategy-driven traces live in trace.hpp.

#include "itlc/term.hpp"

#include <algorithm>
#include <optional>
#include <unordered_set>
#include <vector>

namespace itlc {

// free indices >= cutoff increased by amount, lazily
inline coterm lift(const coterm& t, std::uint32_t cutoff, std::uint32_t amount) {
  if (amount == 0) return t;
  auto c = std::make_shared<detail::cell>();
  c->pending = detail::lift_susp{t.p_, cutoff, amount};
  return coterm(std::move(c));
}

// capture-avoiding substitution of arg for the given index; the binder that
// bound the index is consumed, so higher free indices shift down by one.
// The result unfolds on demand.
inline coterm subst(const coterm& body, const coterm& arg, std::uint32_t index) {
  auto c = std::make_shared<detail::cell>();
  c->pending = detail::subst_susp{body.p_, arg.p_, index};
  return coterm(std::move(c));
}

// --------------------------------------------------------------------------
// left spine

inline constexpr std::size_t default_max_spine = 1u << 16;

enum class head_status : std::uint8_t {
  redex,         // spine bottoms out in lam applied to the adjacent argument
  stuck,         // spine bottoms out in a variable, constant or bot
  cyclic_spine,  // the spine revisits a node: provably no head lambda
  spine_overflow // spine longer than the bound; nothing can be concluded
};

struct spine_view {
  head_status status = head_status::stuck;
  // apps[0] = the whole term, apps[i+1] = left child of apps[i]; the head is
  // the left child of apps.back()
  std::vector<coterm> apps;
  coterm head;
};

inline spine_view walk_spine(const coterm& t, std::size_t max_len = default_max_spine) {
  spine_view out;
  if (!t.kind().is(node_tag::app)) {
    out.status = head_status::stuck;
    out.head = t;
    return out;
  }
  // cycle detection: linear scan while the spine is short, hash set beyond
  std::vector<const detail::cell*> seen_small;
  std::unordered_set<const detail::cell*> seen_big;
  constexpr std::size_t small_limit = 64;
  coterm cur = t;
  while (true) {
    const detail::cell* id = cur.id();
    bool fresh;
    if (seen_small.size() < small_limit) {
      fresh = std::find(seen_small.begin(), seen_small.end(), id) == seen_small.end();
      if (fresh) seen_small.push_back(id);
    } else {
      if (seen_big.empty()) seen_big.insert(seen_small.begin(), seen_small.end());
      fresh = seen_big.insert(id).second;
    }
    if (!fresh) {
      out.status = head_status::cyclic_spine;
      return out;
    }
    if (out.apps.size() >= max_len) {
      out.status = head_status::spine_overflow;
      return out;
    }
    out.apps.push_back(cur);
    coterm fn = cur.child(0);
    switch (fn.kind().tag()) {
      case node_tag::app: cur = fn; continue;
      case node_tag::lam:
        out.status = head_status::redex;
        out.head = fn;
        return out;
      default:
        out.status = head_status::stuck;
        out.head = fn;
        return out;
    }
  }
}

// --------------------------------------------------------------------------
// one-step weak head reduction

struct whnf_result {
  head_status status;
  coterm next;        // valid when status == redex
  position redex_pos; // 0^j, the spine position of the contracted redex
};

inline whnf_result whnf_step_ex(const coterm& t, std::size_t max_spine = default_max_spine) {
  whnf_result out{head_status::stuck, {}, {}};
  if (!t.kind().is(node_tag::app)) return out;
  spine_view sp = walk_spine(t, max_spine);
  out.status = sp.status;
  if (sp.status != head_status::redex) return out;
  // sp.apps.back() = (\ . body) arg; contract it and rebuild the spine above
  const coterm& redex = sp.apps.back();
  coterm contractum = subst(sp.head.child(0), redex.child(1), 0);
  for (std::size_t i = sp.apps.size() - 1; i-- > 0;)
    contractum = coterm::app(contractum, sp.apps[i].child(1));
  out.next = contractum;
  out.redex_pos.assign(sp.apps.size() - 1, 0);
  return out;
}

inline std::optional<coterm> whnf_step(const coterm& t) {
  whnf_result r = whnf_step_ex(t);
  if (r.status == head_status::redex) return r.next;
  return std::nullopt;
}

// --------------------------------------------------------------------------
// positional rewriting

struct not_a_redex : std::runtime_error {
  not_a_redex(position p, std::string what)
      : std::runtime_error("not a redex at '" + position_to_string(p) + "': " + what),
        pos(std::move(p)) {}
  position pos;
};

// splice `make_new(subterm)` in at position p, sharing everything off-path
template <typename F>
coterm splice_at(const coterm& t, const position& p, F&& make_new) {
  struct frame {
    coterm node;
    std::uint32_t idx;
  };
  std::vector<frame> path;
  coterm cur = t;
  for (std::uint32_t i : p) {
    if (i >= cur.arity()) throw not_a_redex(p, "position leaves the term");
    path.push_back(frame{cur, i});
    cur = cur.child(i);
  }
  coterm out = make_new(cur);
  for (std::size_t i = path.size(); i-- > 0;) {
    const frame& f = path[i];
    switch (f.node.kind().tag()) {
      case node_tag::lam: out = coterm::lam(out); break;
      case node_tag::app:
        out = f.idx == 0 ? coterm::app(out, f.node.child(1))
                         : coterm::app(f.node.child(0), out);
        break;
      default: throw std::logic_error("splice_at: inner node without children");
    }
  }
  return out;
}

// contract the beta-redex at p
inline coterm contract_beta_at(const coterm& t, const position& p) {
  return splice_at(t, p, [&](const coterm& sub) {
    if (!sub.kind().is(node_tag::app) || !sub.child(0).kind().is(node_tag::lam))
      throw not_a_redex(p, "expected (\\ . body) arg");
    return subst(sub.child(0).child(0), sub.child(1), 0);
  });
}

// all beta-redex positions at depth < depth_bound, in preorder (prefix-first,
// child 0 before child 1), capped at max_count
inline std::vector<position> beta_redex_positions(const coterm& t, std::uint32_t depth_bound,
                                                  std::size_t max_count = 10000) {
  std::vector<position> out;
  position cur;
  struct walker {
    std::vector<position>& out;
    position& cur;
    std::uint32_t bound;
    std::size_t cap;
    void walk(const coterm& u, std::uint32_t d) {
      if (d >= bound || out.size() >= cap) return;
      const node_kind& k = u.kind();
      if (k.is(node_tag::app) && u.child(0).kind().is(node_tag::lam)) out.push_back(cur);
      for (unsigned i = 0; i < k.arity(); ++i) {
        cur.push_back(i);
        walk(u.child(i), d + 1);
        cur.pop_back();
      }
    }
  };
  walker w{out, cur, depth_bound, max_count};
  w.walk(t, 0);
  return out;
}

} // namespace itlc
