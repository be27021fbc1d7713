#include "itlc/mu.hpp"
#include "itlc/syntax.hpp"
#include "itlc/term.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <thread>

using namespace itlc;
using namespace itlc::testsupport;

namespace {

coterm ogre() { return from_mu(mu_expr::mu(mu_expr::lam(mu_expr::mu_ref(0)))); }
coterm ident() { return coterm::lam(coterm::var(0)); }
coterm kc() { return coterm::lam(coterm::lam(coterm::var(1))); }

} // namespace

TEST_CASE("node_at walks child positions") {
  CHECK(*node_at(ident(), {0}) == node_kind::var(0));
  CHECK(*node_at(ogre(), {0, 0, 0}) == node_kind::lam());
  CHECK(!node_at(ident(), {1}).has_value());
}

TEST_CASE("truncate cuts at the requested depth") {
  CHECK(truncate(ogre(), 0) == finite_term::bot());
  CHECK(truncate(coterm::var(3), 0) == finite_term::bot());
  CHECK(truncate(ogre(), 2) == finite_term::lam(finite_term::lam(finite_term::bot())));
  CHECK(truncate(ident(), 5) == finite_term::lam(finite_term::var(0)));
}

TEST_CASE("truncation coherence: re-truncating deeper output is a no-op") {
  xoshiro256 rng(11);
  std::vector<coterm> samples;
  for (int i = 0; i < 40; ++i) samples.push_back(gen_closed_coterm(rng, 12));
  samples.push_back(ogre());
  samples.push_back(from_mu(mu_expr::mu(mu_expr::app(mu_expr::constant("c"), mu_expr::mu_ref(0)))));
  for (const auto& t : samples)
    for (std::uint32_t n = 0; n <= 6; ++n)
      for (std::uint32_t m = 0; m <= n; ++m)
        CHECK(truncate(to_coterm(truncate(t, n)), m) == truncate(t, m));
}

TEST_CASE("bisimilarity up to depth") {
  coterm o = ogre();
  CHECK(bisim_up_to(ident(), ident(), 10));
  coterm lam_o = coterm::lam(o);
  for (std::uint32_t n = 0; n <= 64; ++n) CHECK(bisim_up_to(o, lam_o, n));
  CHECK(!bisim_up_to(ident(), kc(), 2));
}

TEST_CASE("bisim agrees with truncation equality") {
  xoshiro256 rng(12);
  for (int i = 0; i < 60; ++i) {
    coterm a = gen_closed_coterm(rng, 10);
    coterm b = rng.below(3) == 0 ? a : gen_closed_coterm(rng, 10);
    for (std::uint32_t n : {0u, 1u, 3u, 8u, 16u})
      CHECK(bisim_up_to(a, b, n) == (truncate(a, n) == truncate(b, n)));
  }
}

TEST_CASE("metric: distance exponents and the candidate-zero report") {
  coterm t = parse("\\x. x (x bot)").term;
  metric_bound self = metric_dist(t, t, 10);
  CHECK(self.candidate_zero);
  CHECK(self.exponent == 10);

  // roots differ immediately: only n = 0 qualifies, distance 1
  coterm x = parse("x", true).term;
  coterm lx = parse("\\y. x", true).term;
  metric_bound d = metric_dist(x, lx, 10);
  CHECK(!d.candidate_zero);
  CHECK(d.exponent == 0);

  // agree at depth 2, differ at 3
  metric_bound d2 = metric_dist(ogre(), parse("\\x. \\y. y").term, 10);
  CHECK(!d2.candidate_zero);
  CHECK(d2.exponent == 2);
}

TEST_CASE("ultrametric inequality on sampled triples") {
  xoshiro256 rng(13);
  auto dist = [](const coterm& a, const coterm& b) {
    metric_bound m = metric_dist(a, b, 12);
    return m.candidate_zero ? 13u : m.exponent; // larger exponent = smaller distance
  };
  for (int i = 0; i < 50; ++i) {
    coterm a = gen_closed_coterm(rng, 9);
    coterm b = gen_closed_coterm(rng, 9);
    coterm c = gen_closed_coterm(rng, 9);
    // d(a,c) <= max(d(a,b), d(b,c))  <=>  exp(a,c) >= min(exp(a,b), exp(b,c))
    CHECK(dist(a, c) >= std::min(dist(a, b), dist(b, c)));
  }
}

TEST_CASE("materialize_finite rejects infinite terms") {
  CHECK_THROWS_AS(materialize_finite(ogre(), 1000), not_finite);
  CHECK(materialize_finite(ident(), 1000) == finite_term::lam(finite_term::var(0)));
}

TEST_CASE("from_mu compiles guarded equations and rejects unguarded ones") {
  coterm o = ogre();
  CHECK(o.kind() == node_kind::lam());
  CHECK(bisim_up_to(o, o.child(0), 32));

  CHECK(bisim_up_to(from_mu(mu_expr::lam(mu_expr::var(0))), ident(), 8));

  CHECK_THROWS_AS(from_mu(mu_expr::mu(mu_expr::mu_ref(0))), guardedness_error);
  CHECK_THROWS_AS(from_mu(mu_expr::mu(mu_expr::mu(mu_expr::mu_ref(1)))), guardedness_error);
  // nested knots: mu X. mu Y. X Y unfolds to T = T T
  coterm tt = from_mu(mu_expr::mu(mu_expr::mu(mu_expr::app(mu_expr::mu_ref(1), mu_expr::mu_ref(0)))));
  CHECK(tt.kind() == node_kind::app());
  CHECK(bisim_up_to(tt, tt.child(0), 12));
  CHECK(bisim_up_to(tt, tt.child(1), 12));
}

TEST_CASE("corec_iterate computes nodes by finite unrolling") {
  mu_expr o = mu_expr::mu(mu_expr::lam(mu_expr::mu_ref(0)));
  CHECK(*corec_iterate(o, {}) == node_kind::lam());
  CHECK(*corec_iterate(o, {0, 0}) == node_kind::lam());
  mu_expr stream = mu_expr::mu(mu_expr::app(mu_expr::constant("c"), mu_expr::mu_ref(0)));
  CHECK(*corec_iterate(stream, {1, 1, 0}) == node_kind::constant("c"));
  CHECK(!corec_iterate(stream, {0, 0}).has_value());
  CHECK_THROWS_AS(corec_iterate(mu_expr::mu(mu_expr::mu_ref(0)), {}), guardedness_error);
}

TEST_CASE("corec_iterate agrees with from_mu at every position, seed-independently") {
  xoshiro256 rng(14);
  finite_term seed_a = finite_term::constant("seed_a");
  finite_term seed_b = finite_term::lam(finite_term::bot());
  for (int trial = 0; trial < 30; ++trial) {
    mu_expr e = gen_guarded_mu_top(rng, 10);
    coterm compiled = from_mu(e);
    // walk all positions present in the tree up to depth 8
    struct walker {
      const mu_expr& e;
      const finite_term& sa;
      const finite_term& sb;
      void walk(const coterm& t, position& p, std::uint32_t left) {
        auto via_iter = corec_iterate(e, p, sa);
        auto via_iter_b = corec_iterate(e, p, sb);
        REQUIRE(via_iter.has_value());
        REQUIRE(via_iter_b.has_value());
        CHECK(*via_iter == t.kind());
        CHECK(*via_iter_b == t.kind());
        if (left == 0) return;
        for (unsigned i = 0; i < t.arity(); ++i) {
          p.push_back(i);
          walk(t.child(i), p, left - 1);
          p.pop_back();
        }
      }
    };
    position p;
    walker w{e, seed_a, seed_b};
    w.walk(compiled, p, 8);
  }
}

TEST_CASE("concurrent forcing is consistent") {
  coterm o = ogre();
  std::vector<std::thread> threads;
  std::vector<finite_term> results(8);
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&o, &results, i] { results[i] = truncate(o, 40); });
  for (auto& t : threads) t.join();
  for (int i = 1; i < 8; ++i) CHECK(results[i] == results[0]);
}
