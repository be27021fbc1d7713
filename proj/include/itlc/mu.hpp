#pragma once

// Guarded mu-expressions and their compilation to lazy coterms, plus the
// approximant-iteration reference oracle that computes the same nodes by
// finite unrolling from an arbitrary seed.

#include "itlc/term.hpp"

#include <deque>
#include <memory>
#include <string>
#include <vector>

namespace itlc {

// finite syntax for regular infinite terms; lambda variables and mu variables
// live in separate de Bruijn index spaces
enum class mu_tag : std::uint8_t { var, constant, bot, app, lam, mu, mu_ref };

struct mu_expr {
  mu_tag tag = mu_tag::bot;
  std::uint32_t index = 0; // var / mu_ref
  std::string name;        // constant
  std::vector<mu_expr> children;

  static mu_expr var(std::uint32_t i) {
    mu_expr e;
    e.tag = mu_tag::var;
    e.index = i;
    return e;
  }
  static mu_expr constant(std::string n) {
    mu_expr e;
    e.tag = mu_tag::constant;
    e.name = std::move(n);
    return e;
  }
  static mu_expr bot() { return mu_expr{}; }
  static mu_expr app(mu_expr f, mu_expr a) {
    mu_expr e;
    e.tag = mu_tag::app;
    e.children.push_back(std::move(f));
    e.children.push_back(std::move(a));
    return e;
  }
  static mu_expr lam(mu_expr body) {
    mu_expr e;
    e.tag = mu_tag::lam;
    e.children.push_back(std::move(body));
    return e;
  }
  static mu_expr mu(mu_expr body) {
    mu_expr e;
    e.tag = mu_tag::mu;
    e.children.push_back(std::move(body));
    return e;
  }
  static mu_expr mu_ref(std::uint32_t i) {
    mu_expr e;
    e.tag = mu_tag::mu_ref;
    e.index = i;
    return e;
  }

  friend bool operator==(const mu_expr& a, const mu_expr& b) {
    return a.tag == b.tag && a.index == b.index && a.name == b.name && a.children == b.children;
  }
};

struct guardedness_error : std::runtime_error {
  explicit guardedness_error(position p)
      : std::runtime_error("unguarded mu-variable occurrence at " +
                           (p.empty() ? std::string("the binder root") : position_to_string(p))),
        path(std::move(p)) {}
  position path;
};

// syntactic criterion: every mu-bound occurrence lies strictly beneath at
// least one lam or app within its binder's body
inline void check_guarded(const mu_expr& e) {
  struct walker {
    std::vector<bool> guarded; // per mu binder in scope
    position path;
    void walk(const mu_expr& n) {
      switch (n.tag) {
        case mu_tag::var:
        case mu_tag::constant:
        case mu_tag::bot:
          return;
        case mu_tag::mu_ref: {
          if (n.index >= guarded.size())
            throw std::invalid_argument("mu_ref index out of scope at " + position_to_string(path));
          if (!guarded[guarded.size() - 1 - n.index]) throw guardedness_error(path);
          return;
        }
        case mu_tag::mu: {
          guarded.push_back(false);
          path.push_back(0);
          walk(n.children[0]);
          path.pop_back();
          guarded.pop_back();
          return;
        }
        case mu_tag::app:
        case mu_tag::lam: {
          std::vector<bool> saved = guarded;
          for (auto&& g : guarded) g = true;
          for (std::uint32_t i = 0; i < n.children.size(); ++i) {
            path.push_back(i);
            walk(n.children[i]);
            path.pop_back();
          }
          guarded = std::move(saved);
          return;
        }
      }
    }
  };
  walker w;
  w.walk(e);
}

// compile to the unique coterm solving the mu-equations
inline coterm from_mu(const mu_expr& e) {
  check_guarded(e);
  struct compiler {
    std::vector<coterm> env; // innermost mu binder last
    coterm compile(const mu_expr& n) {
      switch (n.tag) {
        case mu_tag::var: return coterm::var(n.index);
        case mu_tag::constant: return coterm::constant(n.name);
        case mu_tag::bot: return coterm::bot();
        case mu_tag::app: {
          coterm f = compile(n.children[0]);
          coterm a = compile(n.children[1]);
          return coterm::app(f, a);
        }
        case mu_tag::lam: return coterm::lam(compile(n.children[0]));
        case mu_tag::mu: {
          knot k;
          env.push_back(k.handle());
          coterm body = compile(n.children[0]);
          env.pop_back();
          k.tie(body);
          return k.handle();
        }
        case mu_tag::mu_ref: {
          if (n.index >= env.size()) throw std::invalid_argument("mu_ref index out of scope");
          return env[env.size() - 1 - n.index];
        }
      }
      throw std::logic_error("from_mu: bad tag");
    }
  };
  compiler c;
  return c.compile(e);
}

// reference oracle: the node at p obtained by unrolling the defining
// equations |p|+1 times starting from an arbitrary seed term.  Each mu-ref
// hit consumes one unrolling; guardedness puts the seed residue strictly
// deeper than |p|, so the answer never depends on the seed.
inline std::optional<node_kind> corec_iterate(const mu_expr& e, const position& p,
                                              const finite_term& seed = finite_term::constant("seed")) {
  check_guarded(e);

  struct env_node {
    const mu_expr* body = nullptr;
    const env_node* parent = nullptr;
  };
  std::deque<env_node> arena;

  const mu_expr* cur = &e;
  const env_node* env = nullptr;
  std::size_t budget = p.size() + 1;
  std::size_t consumed = 0; // path positions consumed

  auto lookup = [](const env_node* n, std::uint32_t i) -> const env_node* {
    while (i-- > 0) {
      if (!n) return nullptr;
      n = n->parent;
    }
    return n;
  };

  while (true) {
    switch (cur->tag) {
      case mu_tag::mu: {
        arena.push_back(env_node{&cur->children[0], env});
        env = &arena.back();
        cur = env->body;
        continue;
      }
      case mu_tag::mu_ref: {
        const env_node* target = lookup(env, cur->index);
        if (!target) throw std::invalid_argument("mu_ref index out of scope");
        if (budget == 1) {
          // seed takes over: walk the rest of the path inside the seed term
          const finite_term* f = &seed;
          for (; consumed < p.size(); ++consumed) {
            if (p[consumed] >= f->children.size()) return std::nullopt;
            f = &f->children[p[consumed]];
          }
          return f->kind;
        }
        --budget;
        env = target;
        cur = target->body;
        continue;
      }
      case mu_tag::var:
      case mu_tag::constant:
      case mu_tag::bot: {
        if (consumed < p.size()) return std::nullopt;
        if (cur->tag == mu_tag::var) return node_kind::var(cur->index);
        if (cur->tag == mu_tag::constant) return node_kind::constant(cur->name);
        return node_kind::bot();
      }
      case mu_tag::app:
      case mu_tag::lam: {
        unsigned arity = cur->tag == mu_tag::app ? 2 : 1;
        if (consumed == p.size())
          return cur->tag == mu_tag::app ? node_kind::app() : node_kind::lam();
        std::uint32_t i = p[consumed];
        if (i >= arity) return std::nullopt;
        ++consumed;
        cur = &cur->children[i];
        continue;
      }
    }
  }
}

} // namespace itlc
