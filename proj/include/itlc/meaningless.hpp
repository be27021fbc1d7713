#pragma once

// Oracles for sets of meaningless terms: the root-active set R, the
// head-active-or-ogre set H u O, the trivial bot-only set, and unions.
// Membership is a fuel-bounded tri-state; the unknown policy decides whether
// undetermined terms are treated as members downstream.  Also: depth-bounded
// deciders for ~U and parallel bot-reduction, and the axiom spot-checker.

#include "itlc/reduction.hpp"
#include "itlc/rng.hpp"
#include "itlc/rnf.hpp"
#include "itlc/syntax.hpp"
#include "itlc/term.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace itlc {

enum class unknown_policy : std::uint8_t { assume_meaningless, strict };

enum class oracle_kind : std::uint8_t { root_active, head_ogre, bot_only, composite };

// membership verdict after applying the oracle's unknown policy
enum class u_verdict : std::uint8_t { member, member_assumed, non_member, undetermined };

inline bool counts_as_member(u_verdict v) {
  return v == u_verdict::member || v == u_verdict::member_assumed;
}

inline tri verdict_to_tri(u_verdict v) {
  switch (v) {
    case u_verdict::member:
    case u_verdict::member_assumed: return tri::yes();
    case u_verdict::non_member: return tri::no();
    case u_verdict::undetermined: return tri::unknown("membership undetermined");
  }
  return tri::unknown("membership undetermined");
}

class oracle {
public:
  static oracle root_active(std::uint32_t fuel = 200,
                            unknown_policy policy = unknown_policy::assume_meaningless) {
    return oracle(oracle_kind::root_active, fuel, policy, {});
  }
  static oracle head_ogre(std::uint32_t fuel = 200,
                          unknown_policy policy = unknown_policy::assume_meaningless) {
    return oracle(oracle_kind::head_ogre, fuel, policy, {});
  }
  static oracle bot_only(std::uint32_t fuel = 200,
                         unknown_policy policy = unknown_policy::assume_meaningless) {
    return oracle(oracle_kind::bot_only, fuel, policy, {});
  }
  // union semantics: yes if any part says yes, else unknown if any unknown
  static oracle composite(std::vector<oracle> parts,
                          unknown_policy policy = unknown_policy::assume_meaningless) {
    std::uint32_t fuel = 0;
    for (const auto& p : parts) fuel = std::max(fuel, p.fuel());
    oracle o(oracle_kind::composite, fuel, policy, std::move(parts));
    return o;
  }

  oracle_kind kind() const { return kind_; }
  std::uint32_t fuel() const { return fuel_; }
  unknown_policy policy() const { return policy_; }

  std::string describe() const {
    std::string name;
    switch (kind_) {
      case oracle_kind::root_active: name = "root-active"; break;
      case oracle_kind::head_ogre: name = "head-ogre"; break;
      case oracle_kind::bot_only: name = "bot-only"; break;
      case oracle_kind::composite: {
        name = "union(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          if (i) name += ", ";
          name += parts_[i].describe();
        }
        name += ")";
        return name;
      }
    }
    name += "(fuel=" + std::to_string(fuel_) + ", policy=";
    name += policy_ == unknown_policy::assume_meaningless ? "assume" : "strict";
    name += ")";
    return name;
  }

  // raw tri-state membership of t in U
  tri membership(const coterm& t) const {
    {
      std::lock_guard<std::mutex> lock(memo_->m);
      auto it = memo_->verdicts.find(t.id());
      if (it != memo_->verdicts.end()) return it->second;
    }
    tri v = compute(t);
    {
      std::lock_guard<std::mutex> lock(memo_->m);
      memo_->verdicts.emplace(t.id(), v);
      memo_->pins.push_back(t);
    }
    return v;
  }

  // membership with the unknown policy applied
  u_verdict effective(const coterm& t) const {
    tri m = membership(t);
    if (m.is_yes()) return u_verdict::member;
    if (m.is_no()) return u_verdict::non_member;
    return policy_ == unknown_policy::assume_meaningless ? u_verdict::member_assumed
                                                         : u_verdict::undetermined;
  }

private:
  oracle(oracle_kind k, std::uint32_t fuel, unknown_policy policy, std::vector<oracle> parts)
      : kind_(k), fuel_(fuel), policy_(policy), parts_(std::move(parts)),
        memo_(std::make_shared<memo>()) {}

  tri compute(const coterm& t) const {
    switch (kind_) {
      case oracle_kind::bot_only:
        return t.kind().is(node_tag::bot) ? tri::yes() : tri::no();
      case oracle_kind::root_active: {
        if (t.kind().is(node_tag::bot)) return tri::yes();
        crnf_result r = crnf(t, fuel_);
        if (r.verdict.is_yes()) return tri::no();
        if (r.verdict.is_no()) return tri::yes(); // chain provably dead-ends in bot
        return tri::unknown("no rnf found within fuel");
      }
      case oracle_kind::head_ogre: return head_ogre_membership(t);
      case oracle_kind::composite: {
        tri acc = tri::no();
        for (const auto& p : parts_) acc = tri_or(acc, p.membership(t));
        return acc;
      }
    }
    throw std::logic_error("oracle::compute: bad kind");
  }

  // H u O: reachable by finite beta-reduction from t is either a head-active
  // term (lam^n . r t1..tm with r root-active) or the ogre.  The search runs
  // breadth-first in lambda-stripped space with structural deduplication;
  // "no" is claimed only when the whole reachable space was explored and
  // every head is demonstrably stable.
  tri head_ogre_membership(const coterm& t) const {
    constexpr std::size_t finite_cap = 20000;

    bool assumed_evidence = false;
    bool incomplete = false;

    // strip leading lams; fuel of them in a row counts as the ogre
    auto strip = [&](coterm u, bool& is_ogre) {
      std::uint32_t stripped = 0;
      while (u.kind().is(node_tag::lam)) {
        if (++stripped >= fuel_) {
          is_ogre = true;
          return u;
        }
        u = u.child(0);
      }
      is_ogre = false;
      return u;
    };

    bool is_ogre = false;
    coterm start = strip(t, is_ogre);
    if (is_ogre) return tri::yes();

    std::deque<coterm> queue;
    std::unordered_set<std::string> seen;
    auto enqueue = [&](const coterm& u) {
      try {
        finite_term ft = materialize_finite(u, finite_cap);
        // redex enumeration below is bounded by fuel; a deeper node may hide
        // redexes from it, so exhaustion would not be conclusive
        if (ft.depth() >= fuel_) incomplete = true;
        std::string key = structural_key(ft);
        if (seen.insert(std::move(key)).second) queue.push_back(u);
      } catch (const not_finite&) {
        incomplete = true; // cannot reliably dedupe or finish this branch
      }
    };
    enqueue(start);

    std::size_t expansions = 0;
    while (!queue.empty()) {
      coterm u = queue.front();
      queue.pop_front();

      // head-active evidence: some spine prefix of u is root-active
      if (u.kind().is(node_tag::app)) {
        spine_view sp = walk_spine(u);
        if (sp.status == head_status::spine_overflow) {
          incomplete = true;
        } else if (sp.status == head_status::cyclic_spine) {
          // infinite stuck spine: no head lambda ever, heads are stable
        } else {
          // prefixes from the innermost head outward
          std::vector<coterm> prefixes;
          prefixes.push_back(sp.head);
          for (std::size_t i = sp.apps.size(); i-- > 0;) prefixes.push_back(sp.apps[i]);
          for (const coterm& r : prefixes) {
            crnf_result c = crnf(r, fuel_);
            if (c.verdict.is_no()) return tri::yes(); // provably root-active head
            if (c.verdict.is_unknown()) assumed_evidence = true;
          }
        }
      } else if (u.kind().is(node_tag::bot)) {
        return tri::yes(); // bot is root-active, hence head-active with n=m=0
      }

      if (expansions >= fuel_) {
        incomplete = true;
        break;
      }
      ++expansions;
      for (const position& p : beta_redex_positions(u, fuel_)) {
        coterm w = contract_beta_at(u, p);
        bool ogre = false;
        coterm w2 = strip(w, ogre);
        if (ogre) return tri::yes();
        enqueue(w2);
      }
    }

    if (assumed_evidence) {
      if (policy_ == unknown_policy::assume_meaningless) return tri::yes();
      return tri::unknown("head-active only via assumed root-activeness");
    }
    if (incomplete) return tri::unknown("beta-search budget exhausted");
    return tri::no();
  }

  struct memo {
    std::mutex m;
    std::unordered_map<const detail::cell*, tri> verdicts;
    std::vector<coterm> pins; // keep keyed cells alive
  };

  oracle_kind kind_;
  std::uint32_t fuel_;
  unknown_policy policy_;
  std::vector<oracle> parts_;
  std::shared_ptr<memo> memo_;
};

// --------------------------------------------------------------------------
// depth-indexed deciders for the parallel closures

// t ~U s restricted to depth n: at each node either both sides are members,
// or the roots match and the children relate one level lower
inline tri sim_u_up_to(const coterm& t, const coterm& s, std::uint32_t n, const oracle& o) {
  if (n == 0) return tri::yes();
  tri both = tri_and(verdict_to_tri(o.effective(t)), verdict_to_tri(o.effective(s)));
  if (both.is_yes()) return tri::yes();
  tri structural = tri::no();
  const node_kind& tk = t.kind();
  if (tk == s.kind()) {
    structural = tri::yes();
    for (unsigned i = 0; i < tk.arity() && !structural.is_no(); ++i)
      structural = tri_and(structural, sim_u_up_to(t.child(i), s.child(i), n - 1, o));
  }
  return tri_or(both, structural);
}

// t => s (parallel bot-reduction) restricted to depth n: at each node either
// t is a member collapsing to bot, or roots match and children relate
inline tri par_bot_up_to(const coterm& t, const coterm& s, std::uint32_t n, const oracle& o) {
  if (n == 0) return tri::yes();
  tri root = tri::no();
  if (s.kind().is(node_tag::bot) && !t.kind().is(node_tag::bot))
    root = verdict_to_tri(o.effective(t));
  tri structural = tri::no();
  const node_kind& tk = t.kind();
  if (tk == s.kind()) {
    structural = tri::yes();
    for (unsigned i = 0; i < tk.arity() && !structural.is_no(); ++i)
      structural = tri_and(structural, par_bot_up_to(t.child(i), s.child(i), n - 1, o));
  }
  return tri_or(root, structural);
}

// --------------------------------------------------------------------------
// axiom spot-checks

struct axiom_witness {
  std::string term;    // canonical text of the offending term
  std::string partner; // second term involved, when applicable
  std::string detail;
  std::uint64_t seed = 0;
  std::uint32_t fuel = 0;
};

struct axiom_outcome {
  std::uint32_t pass_count = 0;
  std::uint32_t unknown_count = 0;
  std::vector<axiom_witness> fail_witnesses;
};

struct axiom_report {
  axiom_outcome closure;
  axiom_outcome substitution;
  axiom_outcome overlap;
  axiom_outcome root_activeness;
  axiom_outcome indiscernibility;
  axiom_outcome expansion;
  std::string oracle_config;
  std::uint64_t seed = 0;
  std::uint32_t trials = 0;
  std::uint32_t depth = 0;

  bool all_pass() const {
    for (const axiom_outcome* o :
         {&closure, &substitution, &overlap, &root_activeness, &indiscernibility, &expansion})
      if (!o->fail_witnesses.empty()) return false;
    return true;
  }
};

namespace detail {

inline std::string describe_term(const coterm& t, std::uint32_t depth = 12) {
  return print_finite(truncate(t, depth));
}

// a random finite beta-reduct of t: up to k contractions at seeded positions
inline coterm random_beta_reduct(const coterm& t, std::uint32_t k, std::uint32_t depth_bound,
                                 xoshiro256& rng) {
  coterm cur = t;
  for (std::uint32_t i = 0; i < k; ++i) {
    auto redexes = beta_redex_positions(cur, depth_bound, 256);
    if (redexes.empty()) break;
    cur = contract_beta_at(cur, redexes[rng.below(redexes.size())]);
  }
  return cur;
}

inline void record(axiom_outcome& out, const oracle& o, const coterm& offender,
                   const std::string& partner, const std::string& detail, std::uint64_t seed) {
  u_verdict v = o.effective(offender);
  if (counts_as_member(v)) {
    ++out.pass_count;
  } else if (v == u_verdict::undetermined) {
    ++out.unknown_count;
  } else {
    out.fail_witnesses.push_back(
        axiom_witness{describe_term(offender), partner, detail, seed, o.fuel()});
  }
}

} // namespace detail

// Samples members of U from the corpus and spot-checks the six axioms.  The
// expansion check uses finite wrappers it can construct, plus the infinitary
// route through the ogre: any non-member that beta-reduces (to depth n) to a
// member ogre is a genuine expansion failure.
inline axiom_report axiom_check(const oracle& o, const std::vector<coterm>& corpus,
                                std::uint32_t n, std::uint32_t trials, std::uint64_t seed) {
  axiom_report rep;
  rep.oracle_config = o.describe();
  rep.seed = seed;
  rep.trials = trials;
  rep.depth = n;
  if (corpus.empty()) return rep;

  xoshiro256 rng(seed);

  std::vector<coterm> members;
  for (const coterm& c : corpus)
    if (counts_as_member(o.effective(c))) members.push_back(c);

  // root-activeness: R is contained in U, where provable or assumed
  // root-activeness comes from the weak-head chain
  for (const coterm& c : corpus) {
    crnf_result r = crnf(c, o.fuel());
    if (r.verdict.is_yes()) continue; // has an rnf, not in R
    u_verdict v = o.effective(c);
    if (v == u_verdict::non_member) {
      rep.root_activeness.fail_witnesses.push_back(axiom_witness{
          detail::describe_term(c), "",
          r.verdict.is_no() ? "provably root-active but rejected"
                            : "assumed root-active but rejected",
          seed, o.fuel()});
    } else if (v == u_verdict::undetermined) {
      ++rep.root_activeness.unknown_count;
    } else {
      ++rep.root_activeness.pass_count;
    }
  }

  for (std::uint32_t trial = 0; trial < trials && !members.empty(); ++trial) {
    const coterm& m = members[rng.below(members.size())];

    // closure: finite beta-reducts of members stay members
    {
      coterm reduct = detail::random_beta_reduct(m, 1 + rng.below(3), n, rng);
      detail::record(rep.closure, o, reduct, detail::describe_term(m), "beta-reduct left U",
                     seed);
    }

    // substitution: m[s/0] stays a member
    {
      const coterm& s = corpus[rng.below(corpus.size())];
      detail::record(rep.substitution, o, subst(m, s, 0), detail::describe_term(s),
                     "substitution instance left U", seed);
    }

    // overlap: if a member is an abstraction, applying it stays in U
    if (m.kind().is(node_tag::lam)) {
      const coterm& s = corpus[rng.below(corpus.size())];
      detail::record(rep.overlap, o, coterm::app(m, s), detail::describe_term(s),
                     "application of member abstraction left U", seed);
    }

    // indiscernibility: ~U partners of members are members
    {
      coterm partner = rng.below(2) == 0 ? coterm::bot() : members[rng.below(members.size())];
      if (sim_u_up_to(m, partner, n, o).is_yes())
        detail::record(rep.indiscernibility, o, partner, detail::describe_term(m),
                       "~U partner left U", seed);
    }

    // expansion, finite route: wrappers that beta-reduce to the member
    {
      coterm wrapped = rng.below(2) == 0
                           ? coterm::app(coterm::lam(coterm::var(0)), m)
                           : coterm::app(coterm::lam(lift(m, 0, 1)),
                                         corpus[rng.below(corpus.size())]);
      detail::record(rep.expansion, o, wrapped, detail::describe_term(m),
                     "finite beta-expansion left U", seed);
    }
  }

  // expansion, infinitary route: a non-member reducing to the member ogre
  {
    knot k;
    k.tie(coterm::lam(k.handle()));
    coterm ogre = k.handle();
    if (counts_as_member(o.effective(ogre))) {
      for (const coterm& c : corpus) {
        if (o.effective(c) != u_verdict::non_member) continue;
        if (inf_beta_up_to(c, ogre, n, o.fuel()).is_yes()) {
          rep.expansion.fail_witnesses.push_back(
              axiom_witness{detail::describe_term(c), "ogre",
                            "infinitary beta-reduct is a member but the term is not", seed,
                            o.fuel()});
        }
      }
    }
  }

  return rep;
}

} // namespace itlc
