#pragma once

// Surface syntax with named variables and mu binders, conversion to the de
// Bruijn core, and printers for truncated views of possibly-infinite terms.
//
// grammar:
//   term := '\' name '.' term | 'mu' NAME '.' term | atom+ (left-assoc)
//   atom := '(' term ')' | 'bot' | '#'name | name
// identifiers: [a-zA-Z_][a-zA-Z0-9_']*, "mu" and "bot" reserved.
// The Unicode lambda is accepted as an alias for '\'.

#include "itlc/mu.hpp"
#include "itlc/term.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace itlc {

struct parse_error : std::runtime_error {
  parse_error(std::string msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_), col(col_) {}
  int line;
  int col;
};

struct unbound_variable : std::runtime_error {
  explicit unbound_variable(std::string n)
      : std::runtime_error("unbound variable: " + n), name(std::move(n)) {}
  std::string name;
};

// parse-level tree, prior to de Bruijn conversion
struct surface_term {
  enum class tag { var, constant, bot, app, lam, mu } t = tag::bot;
  std::string name; // var / constant / binder name
  std::vector<surface_term> children;
};

namespace detail {

struct token {
  enum class kind { lambda, dot, lparen, rparen, hash, ident, kw_mu, kw_bot, end } k;
  std::string text;
  int line;
  int col;
};

inline std::vector<token> tokenize(std::string_view src) {
  std::vector<token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](token::kind k, std::string text, int l, int c) {
    out.push_back(token{k, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    int tl = line, tc = col;
    if (c == '\\') {
      push(token::kind::lambda, "\\", tl, tc);
      ++i;
      ++col;
      continue;
    }
    // U+03BB as alias for '\'
    if (static_cast<unsigned char>(c) == 0xCE && i + 1 < src.size() &&
        static_cast<unsigned char>(src[i + 1]) == 0xBB) {
      push(token::kind::lambda, "\\", tl, tc);
      i += 2;
      ++col;
      continue;
    }
    if (c == '.') {
      push(token::kind::dot, ".", tl, tc);
      ++i;
      ++col;
      continue;
    }
    if (c == '(') {
      push(token::kind::lparen, "(", tl, tc);
      ++i;
      ++col;
      continue;
    }
    if (c == ')') {
      push(token::kind::rparen, ")", tl, tc);
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      push(token::kind::hash, "#", tl, tc);
      ++i;
      ++col;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' || src[i] == '\''))
        ++i, ++col;
      std::string word(src.substr(start, i - start));
      if (word == "mu")
        push(token::kind::kw_mu, word, tl, tc);
      else if (word == "bot")
        push(token::kind::kw_bot, word, tl, tc);
      else
        push(token::kind::ident, word, tl, tc);
      continue;
    }
    throw parse_error("unexpected character '" + std::string(1, c) + "'", line, col);
  }
  out.push_back(token{token::kind::end, "", line, col});
  return out;
}

struct surface_parser {
  const std::vector<token>& toks;
  std::size_t pos = 0;

  const token& peek() const { return toks[pos]; }
  token next() { return toks[pos++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg, peek().line, peek().col);
  }

  std::string expect_ident() {
    if (peek().k != token::kind::ident) fail("expected identifier");
    return next().text;
  }
  void expect(token::kind k, const char* what) {
    if (peek().k != k) fail(std::string("expected ") + what);
    next();
  }

  surface_term parse_term() {
    if (peek().k == token::kind::lambda) {
      next();
      std::string name = expect_ident();
      expect(token::kind::dot, "'.'");
      surface_term body = parse_term();
      surface_term out;
      out.t = surface_term::tag::lam;
      out.name = std::move(name);
      out.children.push_back(std::move(body));
      return out;
    }
    if (peek().k == token::kind::kw_mu) {
      next();
      std::string name = expect_ident();
      expect(token::kind::dot, "'.'");
      surface_term body = parse_term();
      surface_term out;
      out.t = surface_term::tag::mu;
      out.name = std::move(name);
      out.children.push_back(std::move(body));
      return out;
    }
    surface_term acc = parse_atom();
    while (is_atom_start(peek().k)) {
      surface_term arg = parse_atom();
      surface_term app;
      app.t = surface_term::tag::app;
      app.children.push_back(std::move(acc));
      app.children.push_back(std::move(arg));
      acc = std::move(app);
    }
    return acc;
  }

  static bool is_atom_start(token::kind k) {
    return k == token::kind::lparen || k == token::kind::hash || k == token::kind::ident ||
           k == token::kind::kw_bot;
  }

  surface_term parse_atom() {
    switch (peek().k) {
      case token::kind::lparen: {
        next();
        surface_term t = parse_term();
        expect(token::kind::rparen, "')'");
        return t;
      }
      case token::kind::kw_bot: {
        next();
        surface_term t;
        t.t = surface_term::tag::bot;
        return t;
      }
      case token::kind::hash: {
        next();
        surface_term t;
        t.t = surface_term::tag::constant;
        t.name = expect_ident();
        return t;
      }
      case token::kind::ident: {
        surface_term t;
        t.t = surface_term::tag::var;
        t.name = next().text;
        return t;
      }
      default: fail("expected a term");
    }
  }
};

} // namespace detail

inline surface_term parse_surface(std::string_view text) {
  auto toks = detail::tokenize(text);
  detail::surface_parser p{toks};
  surface_term t = p.parse_term();
  if (p.peek().k != detail::token::kind::end) p.fail("trailing input");
  return t;
}

struct parse_result {
  coterm term;
  mu_expr expr;                        // resolved de Bruijn form
  std::vector<std::string> free_names; // frame slots in first-use order
};

// convert names to de Bruijn; lambda and mu binders use disjoint index
// spaces.  Free names (when allowed) become frame slots: a free variable
// with slot j, used under k lambda binders, is Var(k + j).
inline parse_result resolve_surface(const surface_term& root, bool allow_open) {
  struct binding {
    std::string name;
    bool is_mu;
  };
  struct resolver {
    bool allow_open;
    std::vector<binding> scope;
    std::vector<std::string> free_names;

    std::uint32_t lam_depth() const {
      std::uint32_t n = 0;
      for (const auto& b : scope)
        if (!b.is_mu) ++n;
      return n;
    }

    mu_expr resolve(const surface_term& t) {
      switch (t.t) {
        case surface_term::tag::bot: return mu_expr::bot();
        case surface_term::tag::constant: return mu_expr::constant(t.name);
        case surface_term::tag::var: {
          for (std::size_t k = scope.size(); k-- > 0;) {
            if (scope[k].name != t.name) continue;
            std::uint32_t inner = 0;
            for (std::size_t j = k + 1; j < scope.size(); ++j)
              if (scope[j].is_mu == scope[k].is_mu) ++inner;
            return scope[k].is_mu ? mu_expr::mu_ref(inner) : mu_expr::var(inner);
          }
          if (!allow_open) throw unbound_variable(t.name);
          std::uint32_t slot = 0;
          for (; slot < free_names.size(); ++slot)
            if (free_names[slot] == t.name) break;
          if (slot == free_names.size()) free_names.push_back(t.name);
          return mu_expr::var(lam_depth() + slot);
        }
        case surface_term::tag::app: {
          mu_expr f = resolve(t.children[0]);
          mu_expr a = resolve(t.children[1]);
          return mu_expr::app(std::move(f), std::move(a));
        }
        case surface_term::tag::lam: {
          scope.push_back(binding{t.name, false});
          mu_expr body = resolve(t.children[0]);
          scope.pop_back();
          return mu_expr::lam(std::move(body));
        }
        case surface_term::tag::mu: {
          scope.push_back(binding{t.name, true});
          mu_expr body = resolve(t.children[0]);
          scope.pop_back();
          return mu_expr::mu(std::move(body));
        }
      }
      throw std::logic_error("resolve_surface: bad tag");
    }
  };
  resolver r{allow_open, {}, {}};
  mu_expr expr = r.resolve(root);
  parse_result out;
  out.term = from_mu(expr);
  out.expr = std::move(expr);
  out.free_names = std::move(r.free_names);
  return out;
}

inline parse_result parse(std::string_view text, bool allow_open = false) {
  return resolve_surface(parse_surface(text), allow_open);
}

// --------------------------------------------------------------------------
// printing

enum class print_style { named, debruijn };

namespace detail {

enum class print_ctx { top, fun, arg };

inline void print_finite_rec(const finite_term& t, print_style style, print_ctx ctx,
                             std::vector<std::string>& binders, std::uint32_t& next_binder,
                             const std::vector<std::string>* free_names, std::string& out) {
  switch (t.kind.tag()) {
    case node_tag::bot: out += "bot"; return;
    case node_tag::constant:
      out += '#';
      out += t.kind.const_name();
      return;
    case node_tag::var: {
      std::uint32_t i = t.kind.var_index();
      if (style == print_style::debruijn) {
        out += std::to_string(i);
        return;
      }
      if (i < binders.size()) {
        out += binders[binders.size() - 1 - i];
      } else {
        std::uint32_t slot = i - static_cast<std::uint32_t>(binders.size());
        if (free_names && slot < free_names->size())
          out += (*free_names)[slot];
        else
          out += "f" + std::to_string(slot);
      }
      return;
    }
    case node_tag::lam: {
      bool parens = ctx != print_ctx::top;
      if (parens) out += '(';
      if (style == print_style::named) {
        std::string name = "x" + std::to_string(next_binder++);
        out += '\\';
        out += name;
        out += ". ";
        binders.push_back(std::move(name));
        print_finite_rec(t.children[0], style, print_ctx::top, binders, next_binder, free_names,
                         out);
        binders.pop_back();
      } else {
        out += "\\.";
        print_finite_rec(t.children[0], style, print_ctx::top, binders, next_binder, free_names,
                         out);
      }
      if (parens) out += ')';
      return;
    }
    case node_tag::app: {
      bool parens = ctx == print_ctx::arg;
      if (parens) out += '(';
      print_finite_rec(t.children[0], style, print_ctx::fun, binders, next_binder, free_names, out);
      out += ' ';
      print_finite_rec(t.children[1], style, print_ctx::arg, binders, next_binder, free_names, out);
      if (parens) out += ')';
      return;
    }
  }
}

} // namespace detail

inline std::string print_finite(const finite_term& t, print_style style = print_style::named,
                                const std::vector<std::string>* free_names = nullptr) {
  std::vector<std::string> binders;
  std::uint32_t next_binder = 0;
  std::string out;
  detail::print_finite_rec(t, style, detail::print_ctx::top, binders, next_binder, free_names, out);
  return out;
}

inline std::string print_truncated(const coterm& t, std::uint32_t n,
                                   print_style style = print_style::named,
                                   const std::vector<std::string>* free_names = nullptr) {
  return print_finite(truncate(t, n), style, free_names);
}

// bit-stable nested constructor form, e.g. Lam(App(Var 0, Bot))
inline std::string canonical_text(const finite_term& t) {
  switch (t.kind.tag()) {
    case node_tag::bot: return "Bot";
    case node_tag::var: return "Var " + std::to_string(t.kind.var_index());
    case node_tag::constant: return "Const " + t.kind.const_name();
    case node_tag::lam: return "Lam(" + canonical_text(t.children[0]) + ")";
    case node_tag::app:
      return "App(" + canonical_text(t.children[0]) + ", " + canonical_text(t.children[1]) + ")";
  }
  throw std::logic_error("canonical_text: bad tag");
}

} // namespace itlc
