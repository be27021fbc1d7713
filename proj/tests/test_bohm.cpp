#include "itlc/bohm.hpp"
#include "itlc/corpus.hpp"
#include "itlc/syntax.hpp"

#include "support/gen.hpp"

#include <doctest.h>

using namespace itlc;
using namespace itlc::testsupport;

namespace {

finite_term lam_spine(std::uint32_t n) {
  finite_term t = finite_term::bot();
  for (std::uint32_t i = 0; i < n; ++i) t = finite_term::lam(t);
  return t;
}

} // namespace

TEST_CASE("nu_tree: meaningless terms collapse, structure unfolds") {
  oracle ra = oracle::root_active(100);
  CHECK(truncate(nu_tree(demo("omega").term, ra), 6) == finite_term::bot());
  annotated_term om = nu_tree_annotated(demo("omega").term, ra, 4);
  CHECK(om.prov == nu_provenance::bottom_assumed);
  CHECK(om.tainted());

  CHECK(nu_tree_truncated(demo("M").term, ra, 5) == lam_spine(5));
  CHECK(nu_tree_truncated(demo("omega_o").term, ra, 4) == lam_spine(4));
  CHECK(nu_tree_truncated(demo("omega_o").term, ra, 8) == lam_spine(8));
  CHECK(!nu_tree_annotated(demo("M").term, ra, 8).tainted());

  coterm x = parse("x", true).term;
  CHECK(truncate(nu_tree(x, ra), 6) == finite_term::var(0));
  CHECK(nu_tree_truncated(coterm::bot(), ra, 8) == finite_term::bot());
  annotated_term bt = nu_tree_annotated(coterm::bot(), ra, 8);
  CHECK(bt.prov == nu_provenance::bottom_by_oracle);
  CHECK(!bt.tainted());
}

TEST_CASE("nu_tree of Y_f is the infinite f-spine") {
  oracle ra = oracle::root_active(100);
  coterm yf = demo("Y_f").term;
  // T = f T: truncating at 3 keeps the two visible f's and cuts the third level
  finite_term expect3 = finite_term::app(
      finite_term::var(0), finite_term::app(finite_term::var(0),
                                            finite_term::app(finite_term::bot(),
                                                             finite_term::bot())));
  CHECK(nu_tree_truncated(yf, ra, 3) == expect3);
  coterm fspine = from_mu(mu_expr::mu(mu_expr::app(mu_expr::var(0), mu_expr::mu_ref(0))));
  CHECK(bisim_up_to(nu_tree(yf, ra), fspine, 12));
  CHECK(!nu_tree_annotated(yf, ra, 12).tainted());
}

TEST_CASE("nu_tree under the strict policy raises fuel_exhausted") {
  oracle strict = oracle::root_active(50, unknown_policy::strict);
  CHECK_THROWS_AS(nu_tree_truncated(demo("omega").term, strict, 4), fuel_exhausted);
  // strict is fine when every verdict resolves
  CHECK(nu_tree_truncated(demo("M").term, strict, 6) == lam_spine(6));
}

TEST_CASE("nu trees are provenance-sound") {
  oracle ra = oracle::root_active(100);
  xoshiro256 rng(61);
  std::vector<coterm> corpus = demo_coterms();
  for (int i = 0; i < 25; ++i) corpus.push_back(gen_closed_coterm(rng, 12));
  for (const auto& t : corpus) {
    annotated_term a = nu_tree_annotated(t, ra, 6);
    struct audit {
      static void walk(const annotated_term& n) {
        if (n.prov == nu_provenance::structural && n.kind.is(node_tag::app))
          CHECK(!n.children[0].kind.is(node_tag::lam)); // no beta-redex in the tree
        if (n.prov == nu_provenance::bottom_by_oracle || n.prov == nu_provenance::bottom_assumed)
          CHECK(n.kind.is(node_tag::bot));
        for (const auto& c : n.children) walk(c);
      }
    };
    audit::walk(a);
  }
}

TEST_CASE("nu_tree is deterministic and respects bisimilarity classes") {
  oracle ra = oracle::root_active(100);
  coterm o = demo("O").term;
  coterm lam_o = coterm::lam(o);
  CHECK(nu_tree_truncated(o, ra, 10) == nu_tree_truncated(lam_o, ra, 10));
  CHECK(nu_tree_truncated(demo("M").term, ra, 10) ==
        nu_tree_truncated(demo("M").term, ra, 10));
  // two structurally distinct presentations of the same term
  coterm m1 = parse("(\\m.\\x. m m) (\\m.\\x. m m)").term;
  coterm m2 = parse("(\\a.\\b. a a) (\\q.\\r. q q)").term;
  CHECK(nu_tree_truncated(m1, ra, 12) == nu_tree_truncated(m2, ra, 12));
}

TEST_CASE("nu_tree over head-ogre demonstrates the missing expansion axiom") {
  // omega_o is not in H u O, so the tree unfolds structurally into the ogre;
  // the ogre itself is in U, so the result is not a normal form for this
  // oracle.  This is the expected behavior for a non-strongly-meaningless set.
  oracle ho = oracle::head_ogre(50);
  coterm oo = demo("omega_o").term;
  finite_term spine = finite_term::bot();
  for (int i = 0; i < 6; ++i) spine = finite_term::lam(spine);
  CHECK(nu_tree_truncated(oo, ho, 6) == spine);
  CHECK(is_normal_up_to(nu_tree(oo, ho), 6, ho).is_no());
}

TEST_CASE("is_normal_up_to: verdict precedence and witness") {
  oracle ra = oracle::root_active(100);
  CHECK(is_normal_up_to(nu_tree(demo("M").term, ra), 12, ra).is_yes());
  position witness{9}; // sentinel, overwritten on no
  CHECK(is_normal_up_to(coterm::app(demo("I").term, demo("I").term), 1, oracle::bot_only(),
                        &witness)
            .is_no());
  CHECK(witness.empty()); // the beta-redex sits at the root
  // an inner collapse candidate is witnessed at its position
  coterm t = coterm::lam(coterm::app(coterm::var(0), coterm::app(demo("I").term,
                                                                 coterm::bot())));
  CHECK(is_normal_up_to(t, 4, ra, &witness).is_no());
  CHECK(witness == position({0, 1}));
  // an unknown verdict dominates even a visible beta-redex
  CHECK(is_normal_up_to(demo("omega").term, 1, oracle::root_active(5)).is_unknown());
  CHECK(is_normal_up_to(coterm::bot(), 8, ra).is_yes());
}

TEST_CASE("normalisation: nu trees pass the normal-form audit") {
  oracle ra = oracle::root_active(150);
  xoshiro256 rng(62);
  std::vector<coterm> corpus = demo_coterms();
  for (int i = 0; i < 25; ++i) corpus.push_back(gen_closed_coterm(rng, 12));
  for (const auto& t : corpus) CHECK(!is_normal_up_to(nu_tree(t, ra), 8, ra).is_no());
}

TEST_CASE("confluence check: named corpus cases") {
  oracle ra = oracle::root_active(200);
  confluence_report m = confluence_check(demo("M").term, strategy::weak_head(),
                                         strategy::random_redex(7, 10), 8, 10, ra);
  CHECK(m.equal);
  CHECK(!m.tainted);
  CHECK(m.tree1.to_finite() == lam_spine(10));

  confluence_report i = confluence_check(demo("I").term, strategy::leftmost_outermost(),
                                         strategy::bottom_first(), 5, 8, ra);
  CHECK(i.equal);
  CHECK(!i.tainted);

  // K x omega collapses to x either way
  coterm kxo = parse("(\\a. \\b. a) x ((\\y. y y) (\\y. y y))", true).term;
  confluence_report k = confluence_check(kxo, strategy::leftmost_outermost(),
                                         strategy::bottom_first(), 6, 8, ra);
  CHECK(k.equal);
  CHECK(k.tree1.to_finite() == finite_term::var(0));
  CHECK(k.tainted); // the collapse of omega rides on an assumed verdict
}

TEST_CASE("prepend check: reducing first leaves the tree unchanged") {
  oracle ra = oracle::root_active(150);

  trace empty;
  empty.start = demo("M").term;
  CHECK(prepend_check(demo("M").term, empty, 10, ra));

  trace one = reduce(demo("M").term, strategy::weak_head(), 1);
  CHECK(prepend_check(demo("M").term, one, 10, ra));

  coterm start = coterm::app(demo("I").term, demo("omega").term);
  trace mixed;
  mixed.start = start;
  coterm a1 = step_at(start, {1}, rule_tag::bot_u, &ra);
  mixed.steps.push_back(step{{1}, rule_tag::bot_u, 1, a1, ra.membership(demo("omega").term)});
  coterm a2 = step_at(a1, {}, rule_tag::beta);
  mixed.steps.push_back(step{{}, rule_tag::beta, 0, a2, tri::yes()});
  CHECK(prepend_check(start, mixed, 8, ra));

  trace wrong;
  wrong.start = demo("K").term;
  CHECK_THROWS_AS(prepend_check(demo("M").term, wrong, 8, ra), invalid_trace);
}

TEST_CASE("nu_to_sequence: the flattened derivation is strongly convergent") {
  oracle ra = oracle::root_active(150);

  trace m = nu_to_sequence(demo("M").term, ra, 4);
  REQUIRE(m.steps.size() == 4);
  for (std::uint32_t i = 0; i < 4; ++i) CHECK(m.steps[i].depth == i);
  convergence_report rep = check_strong_convergence(m, 4);
  CHECK(rep.consistent);
  CHECK(rep.rows[4].limit == lam_spine(4));

  CHECK(nu_to_sequence(parse("x", true).term, ra, 8).steps.empty());

  trace xo = nu_to_sequence(coterm::app(parse("x", true).term, demo("omega").term), ra, 2);
  REQUIRE(xo.steps.size() == 1);
  CHECK(xo.steps[0].rule == rule_tag::bot_u);
  CHECK(xo.steps[0].pos == position{1});
  CHECK(xo.steps[0].depth == 1);
}

TEST_CASE("nu_to_sequence limits equal the nu-tree truncations") {
  oracle ra = oracle::root_active(150);
  xoshiro256 rng(63);
  std::vector<coterm> corpus = demo_coterms();
  for (int i = 0; i < 20; ++i) corpus.push_back(gen_closed_coterm(rng, 12));
  for (const auto& t : corpus) {
    const std::uint32_t depth = 6;
    trace seq = nu_to_sequence(t, ra, depth);
    // step-valid: each recorded step reapplies at its position
    coterm replay = seq.start;
    oracle replay_oracle = oracle::root_active(150);
    for (const auto& s : seq.steps) {
      replay = step_at(replay, s.pos, s.rule, &replay_oracle);
      CHECK(bisim_up_to(replay, s.result, 8));
    }
    convergence_report rep = check_strong_convergence(seq, depth);
    CHECK(rep.consistent);
    for (std::uint32_t d = 0; d <= depth; ++d)
      CHECK(rep.rows[d].limit == nu_tree_truncated(t, ra, d));
  }
}

TEST_CASE("confluence corpus: untainted cases agree") {
  xoshiro256 rng(64);
  oracle ra = oracle::root_active(200);
  int untainted = 0, tainted = 0;
  for (int i = 0; i < 60; ++i) {
    coterm t = gen_closed_coterm(rng, 15);
    strategy s1{static_cast<strategy_kind>(rng.below(4)), rng.next(), 10};
    strategy s2{static_cast<strategy_kind>(rng.below(4)), rng.next(), 10};
    confluence_report rep = confluence_check(t, s1, s2, 10, 8, ra);
    if (rep.tainted) {
      ++tainted;
      continue;
    }
    ++untainted;
    CHECK(rep.equal);
  }
  CHECK(untainted > tainted); // loops are the exception in the random corpus
}
