#pragma once

// Fuel-bounded semi-decision of root normal forms, canonical root normal
// forms via weak head search, and a depth-bounded decider for infinitary
// beta-reduction through its weak-head standard form.

#include "itlc/reduction.hpp"
#include "itlc/term.hpp"

#include <optional>

namespace itlc {

// A term is in rnf when it is an atom other than bot, an abstraction, or an
// application whose function part never weak-head-reduces to an abstraction.
// The head search is bounded by fuel weak-head steps.
inline tri is_rnf(const coterm& t, std::uint32_t fuel) {
  switch (t.kind().tag()) {
    case node_tag::bot: return tri::no();
    case node_tag::var:
    case node_tag::constant:
    case node_tag::lam: return tri::yes();
    case node_tag::app: break;
  }
  coterm head = t.child(0);
  for (std::uint32_t step = 0;; ++step) {
    switch (head.kind().tag()) {
      case node_tag::lam: return tri::no();
      case node_tag::var:
      case node_tag::constant:
      case node_tag::bot: return tri::yes();
      case node_tag::app: break;
    }
    whnf_result r = whnf_step_ex(head);
    switch (r.status) {
      case head_status::stuck:
      case head_status::cyclic_spine: return tri::yes();
      case head_status::spine_overflow:
        return tri::unknown("head spine exceeds bound");
      case head_status::redex: break;
    }
    if (step >= fuel) return tri::unknown("head search exhausted fuel");
    head = r.next;
  }
}

struct crnf_result {
  tri verdict = tri::unknown("");      // yes: rnf found; no: chain reached bot
  std::optional<coterm> term;          // present iff yes
  std::uint32_t whnf_steps = 0;        // length of the weak-head prefix walked
  bool reached_bottom = false;         // chain hit bot at the root
};

// Shortest weak-head reduction to rnf.  A single walk of the weak-head chain
// suffices: an iterate is in rnf exactly when no later chain step contracts
// at the root (a root contraction means its function part became an
// abstraction), so when the chain terminates the canonical rnf is the
// iterate right after the last root-position step.  The verdict is no only
// when the chain provably dead-ends in bot (which has no rnf); unknown when
// fuel runs out first.
inline crnf_result crnf(const coterm& t, std::uint32_t fuel) {
  crnf_result out;
  coterm u = t;
  coterm after_last_root = t;
  std::uint32_t after_last_root_steps = 0;
  for (std::uint32_t steps = 0;; ++steps) {
    if (u.kind().is(node_tag::bot)) {
      out.verdict = tri::no();
      out.reached_bottom = true;
      out.whnf_steps = steps;
      return out;
    }
    whnf_result r = whnf_step_ex(u);
    if (r.status == head_status::stuck || r.status == head_status::cyclic_spine) {
      // chain terminated; its function parts never become abstractions past
      // the last root contraction
      tri v = is_rnf(after_last_root, fuel);
      if (v.is_yes()) {
        out.verdict = tri::yes();
        out.term = after_last_root;
        out.whnf_steps = after_last_root_steps;
      } else {
        out.verdict = tri::unknown("rnf check inconclusive at chain end");
        out.whnf_steps = steps;
      }
      return out;
    }
    if (r.status == head_status::spine_overflow) {
      out.verdict = tri::unknown("head spine exceeds bound");
      out.whnf_steps = steps;
      return out;
    }
    if (steps >= fuel) {
      out.verdict = tri::unknown("weak-head search exhausted fuel");
      out.whnf_steps = steps;
      return out;
    }
    u = r.next;
    if (r.redex_pos.empty()) {
      after_last_root = u;
      after_last_root_steps = steps + 1;
    }
  }
}

// yes iff a root normal form was found; never answers no, since
// root-activeness is only co-semi-decidable.  A provable dead-end at bot is
// reported as unknown with a telling reason; the root-active oracle uses the
// underlying crnf result directly.
inline tri has_rnf(const coterm& t, std::uint32_t fuel) {
  crnf_result r = crnf(t, fuel);
  if (r.verdict.is_yes()) return tri::yes();
  if (r.verdict.is_no()) return tri::unknown("weak-head chain reached bot: no rnf exists");
  return r.verdict;
}

// --------------------------------------------------------------------------
// depth-bounded decision of s ->>_beta t via weak-head standardization

namespace detail {

struct inf_beta_ctx {
  std::uint64_t budget; // total weak-head steps across the whole call
};

inline tri inf_beta_rec(const coterm& s, const coterm& t, std::uint32_t n, std::uint32_t fuel,
                        inf_beta_ctx& ctx) {
  if (n == 0) return tri::yes();
  const node_kind& tk = t.kind();

  bool saw_unknown = false;
  coterm u = s;
  for (std::uint32_t step = 0;; ++step) {
    const node_kind& uk = u.kind();
    if (uk == tk) {
      // candidate split point: children must relate at depth n-1
      tri children = tri::yes();
      for (unsigned i = 0; i < tk.arity() && !children.is_no(); ++i)
        children = tri_and(children, inf_beta_rec(u.child(i), t.child(i), n - 1, fuel, ctx));
      if (children.is_yes()) return tri::yes();
      if (children.is_unknown()) saw_unknown = true;
      // otherwise keep searching along the weak-head chain
    }
    if (step >= fuel || ctx.budget == 0)
      return tri::unknown("weak-head search exhausted fuel");
    whnf_result r = whnf_step_ex(u);
    switch (r.status) {
      case head_status::redex:
        --ctx.budget;
        u = r.next;
        continue;
      case head_status::spine_overflow: return tri::unknown("head spine exceeds bound");
      case head_status::stuck:
      case head_status::cyclic_spine:
        // chain terminated; the last term was already compared above
        return saw_unknown ? tri::unknown("child comparison inconclusive") : tri::no();
    }
  }
}

} // namespace detail

inline tri inf_beta_up_to(const coterm& s, const coterm& t, std::uint32_t n, std::uint32_t fuel) {
  detail::inf_beta_ctx ctx{static_cast<std::uint64_t>(fuel) * (n + 1) * 4 + 1024};
  return detail::inf_beta_rec(s, t, n, fuel, ctx);
}

} // namespace itlc
