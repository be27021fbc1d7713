#include "itlc/corpus.hpp"
#include "itlc/rnf.hpp"
#include "itlc/syntax.hpp"
#include "itlc/trace.hpp"

#include "support/gen.hpp"

#include <doctest.h>

using namespace itlc;
using namespace itlc::testsupport;

TEST_CASE("is_rnf: the three defining clauses, fuel-bounded") {
  CHECK(is_rnf(coterm::lam(demo("omega").term), 1).is_yes());
  CHECK(is_rnf(coterm::bot(), 1).is_no());
  CHECK(is_rnf(coterm::var(0), 1).is_yes());
  CHECK(is_rnf(coterm::constant("c"), 1).is_yes());
  CHECK(is_rnf(coterm::app(demo("omega").term, demo("I").term), 50).is_unknown());
  // stuck head: application of a variable, and of bot
  CHECK(is_rnf(parse("x y", true).term, 1).is_yes());
  CHECK(is_rnf(coterm::app(coterm::bot(), coterm::var(0)), 1).is_yes());
  // head resolves to a variable after one step: rnf
  CHECK(is_rnf(parse("((\\a. a) x) y", true).term, 5).is_yes());
  // head resolves to an abstraction: not rnf
  CHECK(is_rnf(parse("((\\a. a) (\\b. b)) y", true).term, 5).is_no());
  // omega itself: function part is an abstraction already
  CHECK(is_rnf(demo("omega").term, 5).is_no());
}

TEST_CASE("crnf: first rnf on the weak-head chain") {
  crnf_result i = crnf(demo("I").term, 10);
  CHECK(i.verdict.is_yes());
  CHECK(i.whnf_steps == 0);
  CHECK(bisim_up_to(*i.term, demo("I").term, 8));

  crnf_result oo = crnf(demo("omega_o").term, 10);
  CHECK(oo.verdict.is_yes());
  CHECK(oo.whnf_steps == 1);
  CHECK(oo.term->kind() == node_kind::lam());
  CHECK(bisim_up_to(oo.term->child(0), demo("omega_o").term, 24));

  crnf_result om = crnf(demo("omega").term, 100);
  CHECK(om.verdict.is_unknown());
  CHECK(om.whnf_steps == 100);

  // a term already in rnf even though it is not in whnf
  coterm t = parse("((\\a. a) x) y", true).term;
  crnf_result tr = crnf(t, 10);
  CHECK(tr.verdict.is_yes());
  CHECK(tr.whnf_steps == 0);

  // the chain provably dead-ends in bot
  crnf_result dead = crnf(coterm::app(demo("I").term, coterm::bot()), 10);
  CHECK(dead.verdict.is_no());
  CHECK(dead.reached_bottom);
  CHECK(dead.whnf_steps == 1);
}

TEST_CASE("has_rnf: yes or unknown, never no") {
  CHECK(has_rnf(demo("I").term, 1).is_yes());
  CHECK(has_rnf(demo("omega").term, 500).is_unknown());
  CHECK(has_rnf(coterm::app(parse("x", true).term, demo("omega").term), 5).is_yes());
  CHECK(has_rnf(coterm::bot(), 10).is_unknown()); // provable dead end, reported as unknown
}

TEST_CASE("crnf is deterministic and fuel-monotone on the corpus") {
  std::vector<coterm> corpus = demo_coterms();
  corpus.push_back(coterm::bot());
  corpus.push_back(coterm::app(demo("I").term, coterm::bot()));
  const std::uint32_t ladder[] = {1, 2, 3, 5, 10, 25, 50, 100, 200};
  for (const auto& t : corpus) {
    std::optional<tri_tag> settled;
    for (std::uint32_t fuel : ladder) {
      crnf_result a = crnf(t, fuel);
      crnf_result b = crnf(t, fuel);
      CHECK(a.verdict.tag() == b.verdict.tag());
      CHECK(a.whnf_steps == b.whnf_steps);
      if (a.term && b.term) CHECK(bisim_up_to(*a.term, *b.term, 12));
      if (settled) {
        // verdicts only move unknown -> {yes, no}; yes/no never flip
        if (*settled != tri_tag::unknown) CHECK(a.verdict.tag() == *settled);
      }
      if (a.verdict.tag() != tri_tag::unknown) settled = a.verdict.tag();
    }
  }
}

TEST_CASE("crnf completeness: a beta-route to an rnf means crnf finds one") {
  xoshiro256 rng(42);
  int witnessed = 0;
  for (int i = 0; i < 200; ++i) {
    coterm t = gen_closed_coterm(rng, 12);
    // random finite beta walk from t
    coterm cur = t;
    bool reached_rnf = is_rnf(cur, 200).is_yes();
    for (int s = 0; s < 5 && !reached_rnf; ++s) {
      auto reds = beta_redex_positions(cur, 10, 64);
      if (reds.empty()) break;
      cur = contract_beta_at(cur, reds[rng.below(reds.size())]);
      reached_rnf = is_rnf(cur, 200).is_yes();
    }
    if (!reached_rnf) continue;
    ++witnessed;
    CHECK(crnf(t, 200).verdict.is_yes());
  }
  CHECK(witnessed > 100);
}

TEST_CASE("rnf is preserved by finite beta-reducts (never flips to no)") {
  xoshiro256 rng(41);
  std::vector<coterm> corpus = demo_coterms();
  for (int i = 0; i < 30; ++i) corpus.push_back(gen_closed_coterm(rng, 12));
  for (const auto& t : corpus) {
    if (!is_rnf(t, 100).is_yes()) continue;
    coterm cur = t;
    for (int s = 0; s < 4; ++s) {
      auto reds = beta_redex_positions(cur, 10, 64);
      if (reds.empty()) break;
      cur = contract_beta_at(cur, reds[rng.below(reds.size())]);
      CHECK(!is_rnf(cur, 100).is_no());
    }
  }
}

TEST_CASE("inf_beta_up_to: reflexivity, the ogre, and the lambda-tower walk") {
  std::vector<coterm> corpus = demo_coterms();
  for (const auto& t : corpus) CHECK(inf_beta_up_to(t, t, 16, 1).is_yes());

  CHECK(inf_beta_up_to(demo("omega_o").term, demo("O").term, 16, 10).is_yes());
  CHECK(inf_beta_up_to(demo("M").term, demo("L").term, 16, 10).is_yes());

  // negative: I does not reduce to K, omega's search exhausts
  CHECK(inf_beta_up_to(demo("I").term, demo("K").term, 8, 10).is_no());
  CHECK(inf_beta_up_to(demo("omega").term, demo("I").term, 8, 20).is_unknown());
  // an atom never becomes an abstraction
  CHECK(inf_beta_up_to(parse("x", true).term, demo("I").term, 8, 10).is_no());
}

TEST_CASE("inf_beta_up_to finds reducts through stuck applications") {
  // x ((\a.a) y) ->> x y requires reducing inside the argument
  coterm s = parse("x ((\\a. a) y)", true).term;
  coterm t = parse("x y", true).term;
  CHECK(inf_beta_up_to(s, t, 8, 10).is_yes());
  // and Y_f unfolds to the infinite f-spine: compare against f (f (f ...))
  coterm yf = demo("Y_f").term;
  coterm fspine = from_mu(mu_expr::mu(mu_expr::app(mu_expr::var(0), mu_expr::mu_ref(0))));
  CHECK(inf_beta_up_to(yf, fspine, 10, 20).is_yes());
}

TEST_CASE("depth-zero comparisons are vacuously yes") {
  CHECK(inf_beta_up_to(demo("I").term, demo("K").term, 0, 1).is_yes());
}
