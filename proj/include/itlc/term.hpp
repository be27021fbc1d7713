#pragma once

// Lazy possibly-infinite lambda terms in de Bruijn form. A coterm exposes a
// total, memoized root unfolding; everything else in the library is built on
// top of that: truncation, depth-bounded bisimilarity, the 2^-n convergence
// metric, and the substitution/reduction machinery.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace itlc {

// --------------------------------------------------------------------------
// node labels

enum class node_tag : std::uint8_t { var, constant, bot, app, lam };

class node_kind {
public:
  static node_kind var(std::uint32_t index) { return node_kind(node_tag::var, index, {}); }
  static node_kind constant(std::string name) { return node_kind(node_tag::constant, 0, std::move(name)); }
  static node_kind bot() { return node_kind(node_tag::bot, 0, {}); }
  static node_kind app() { return node_kind(node_tag::app, 0, {}); }
  static node_kind lam() { return node_kind(node_tag::lam, 0, {}); }

  node_tag tag() const { return tag_; }
  std::uint32_t var_index() const { return index_; }
  const std::string& const_name() const { return name_; }

  unsigned arity() const {
    switch (tag_) {
      case node_tag::app: return 2;
      case node_tag::lam: return 1;
      default: return 0;
    }
  }

  bool is(node_tag t) const { return tag_ == t; }

  friend bool operator==(const node_kind& a, const node_kind& b) {
    return a.tag_ == b.tag_ && a.index_ == b.index_ && a.name_ == b.name_;
  }
  friend bool operator!=(const node_kind& a, const node_kind& b) { return !(a == b); }

private:
  node_kind(node_tag t, std::uint32_t i, std::string n)
      : tag_(t), index_(i), name_(std::move(n)) {}
  node_tag tag_;
  std::uint32_t index_;
  std::string name_;
};

// --------------------------------------------------------------------------
// positions: paths of child indices from the root (lam child = 0, app = 0,1)

using position = std::vector<std::uint32_t>;

inline std::string position_to_string(const position& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(p[i]);
  }
  return out;
}

inline position position_from_string(const std::string& s) {
  position p;
  if (s.empty()) return p;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t dot = s.find('.', start);
    std::string tok = s.substr(start, dot == std::string::npos ? dot : dot - start);
    if (tok.empty()) throw std::invalid_argument("bad position string: " + s);
    p.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return p;
}

// --------------------------------------------------------------------------
// tri: answer of a fuel-bounded semi-decision

enum class tri_tag : std::uint8_t { yes, no, unknown };

class tri {
public:
  static tri yes() { return tri(tri_tag::yes, {}); }
  static tri no() { return tri(tri_tag::no, {}); }
  static tri unknown(std::string reason) { return tri(tri_tag::unknown, std::move(reason)); }

  tri_tag tag() const { return tag_; }
  bool is_yes() const { return tag_ == tri_tag::yes; }
  bool is_no() const { return tag_ == tri_tag::no; }
  bool is_unknown() const { return tag_ == tri_tag::unknown; }
  const std::string& reason() const { return reason_; }

  const char* name() const {
    switch (tag_) {
      case tri_tag::yes: return "yes";
      case tri_tag::no: return "no";
      default: return "unknown";
    }
  }

private:
  tri(tri_tag t, std::string r) : tag_(t), reason_(std::move(r)) {}
  tri_tag tag_;
  std::string reason_;
};

// three-valued conjunction/disjunction; no dominates and, yes dominates or
inline tri tri_and(const tri& a, const tri& b) {
  if (a.is_no()) return a;
  if (b.is_no()) return b;
  if (a.is_unknown()) return a;
  if (b.is_unknown()) return b;
  return tri::yes();
}

inline tri tri_or(const tri& a, const tri& b) {
  if (a.is_yes()) return a;
  if (b.is_yes()) return b;
  if (a.is_unknown()) return a;
  if (b.is_unknown()) return b;
  return tri::no();
}

// --------------------------------------------------------------------------
// fully materialized finite trees (truncations, parse results of finite terms)

struct finite_term {
  finite_term() : kind(node_kind::bot()) {}
  explicit finite_term(node_kind k, std::vector<finite_term> cs = {})
      : kind(std::move(k)), children(std::move(cs)) {}

  node_kind kind;
  std::vector<finite_term> children;

  static finite_term bot() { return finite_term(node_kind::bot()); }
  static finite_term var(std::uint32_t i) { return finite_term(node_kind::var(i)); }
  static finite_term constant(std::string n) { return finite_term(node_kind::constant(std::move(n))); }
  static finite_term lam(finite_term body) {
    return finite_term(node_kind::lam(), {std::move(body)});
  }
  static finite_term app(finite_term f, finite_term a) {
    std::vector<finite_term> cs;
    cs.push_back(std::move(f));
    cs.push_back(std::move(a));
    return finite_term(node_kind::app(), std::move(cs));
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth() + 1);
    return d;
  }

  friend bool operator==(const finite_term& a, const finite_term& b) {
    return a.kind == b.kind && a.children == b.children;
  }
  friend bool operator!=(const finite_term& a, const finite_term& b) { return !(a == b); }
};

class coterm;

namespace detail {

struct cell;
using cell_ptr = std::shared_ptr<const cell>;

// suspension kinds; lift and subst get direct representations so forcing can
// interpret them without closure allocation
struct lift_susp {
  cell_ptr inner;
  std::uint32_t cutoff;
  std::uint32_t amount;
};
struct subst_susp {
  cell_ptr body;
  cell_ptr arg;
  std::uint32_t index;
};
struct delegate_susp {
  cell_ptr target;
};
struct defer_susp {
  std::function<coterm()> make;
};

using pending_t =
    std::variant<std::monostate, lift_susp, subst_susp, delegate_susp, defer_susp>;

struct cell {
  mutable std::mutex fill_mutex;
  mutable std::atomic<bool> forced{false};
  mutable pending_t pending;
  mutable node_kind kind = node_kind::bot();
  mutable cell_ptr child0;
  mutable cell_ptr child1;

  cell() = default;
  cell(const cell&) = delete;
  cell& operator=(const cell&) = delete;
};

void force(const cell_ptr& c);

} // namespace detail

// --------------------------------------------------------------------------
// coterm: an immutable handle on a lazily unfolding term node

class coterm {
public:
  coterm() = default;

  static coterm bot() { return materialize(node_kind::bot(), nullptr, nullptr); }
  static coterm var(std::uint32_t i) { return materialize(node_kind::var(i), nullptr, nullptr); }
  static coterm constant(std::string name) {
    return materialize(node_kind::constant(std::move(name)), nullptr, nullptr);
  }
  static coterm lam(const coterm& body) { return materialize(node_kind::lam(), body.p_, nullptr); }
  static coterm app(const coterm& fn, const coterm& arg) {
    return materialize(node_kind::app(), fn.p_, arg.p_);
  }

  // a node whose unfolding is computed on demand by `make`, then cached
  static coterm defer(std::function<coterm()> make) {
    auto c = std::make_shared<detail::cell>();
    c->pending = detail::defer_susp{std::move(make)};
    return coterm(std::move(c));
  }

  bool valid() const { return p_ != nullptr; }

  const node_kind& kind() const {
    detail::force(p_);
    return p_->kind;
  }

  unsigned arity() const { return kind().arity(); }

  coterm child(unsigned i) const {
    detail::force(p_);
    if (i == 0 && p_->child0) return coterm(p_->child0);
    if (i == 1 && p_->child1) return coterm(p_->child1);
    throw std::out_of_range("coterm::child: index beyond arity");
  }

  // node identity; used as memoization key, never for term equality
  const detail::cell* id() const { return p_.get(); }

  bool same_cell(const coterm& other) const { return p_ == other.p_; }

private:
  explicit coterm(detail::cell_ptr p) : p_(std::move(p)) {}

  static coterm materialize(node_kind k, detail::cell_ptr c0, detail::cell_ptr c1) {
    auto c = std::make_shared<detail::cell>();
    c->kind = std::move(k);
    c->child0 = std::move(c0);
    c->child1 = std::move(c1);
    c->forced.store(true, std::memory_order_release);
    return coterm(std::move(c));
  }

  detail::cell_ptr p_;

  friend class knot;
  friend void detail::force(const detail::cell_ptr& c);
  friend coterm lift(const coterm&, std::uint32_t, std::uint32_t);
  friend coterm subst(const coterm&, const coterm&, std::uint32_t);
};

// --------------------------------------------------------------------------
// knot: a cell created empty and tied to its own unfolding afterwards; the
// building block for mu-compiled regular terms

class knot {
public:
  knot() : c_(std::make_shared<detail::cell>()) {}

  coterm handle() const { return coterm(c_); }

  // install the unfolding target; must happen before the first force
  void tie(const coterm& target) {
    c_->pending = detail::delegate_susp{target.p_};
  }

private:
  std::shared_ptr<detail::cell> c_;
};

namespace detail {

inline void force(const cell_ptr& c) {
  if (!c) throw std::logic_error("force on empty coterm");
  if (c->forced.load(std::memory_order_acquire)) return;
  std::lock_guard<std::mutex> lock(c->fill_mutex);
  if (c->forced.load(std::memory_order_relaxed)) return;

  node_kind k = node_kind::bot();
  cell_ptr c0, c1;

  auto copy_root = [&](const cell_ptr& src) {
    force(src);
    k = src->kind;
    c0 = src->child0;
    c1 = src->child1;
  };

  if (auto* l = std::get_if<lift_susp>(&c->pending)) {
    force(l->inner);
    const node_kind& ik = l->inner->kind;
    switch (ik.tag()) {
      case node_tag::var: {
        std::uint32_t i = ik.var_index();
        k = node_kind::var(i >= l->cutoff ? i + l->amount : i);
        break;
      }
      case node_tag::constant:
      case node_tag::bot:
        k = ik;
        break;
      case node_tag::app: {
        k = node_kind::app();
        auto mk = [&](const cell_ptr& ch) {
          auto n = std::make_shared<cell>();
          n->pending = lift_susp{ch, l->cutoff, l->amount};
          return n;
        };
        c0 = mk(l->inner->child0);
        c1 = mk(l->inner->child1);
        break;
      }
      case node_tag::lam: {
        k = node_kind::lam();
        auto n = std::make_shared<cell>();
        n->pending = lift_susp{l->inner->child0, l->cutoff + 1, l->amount};
        c0 = n;
        break;
      }
    }
  } else if (auto* s = std::get_if<subst_susp>(&c->pending)) {
    force(s->body);
    const node_kind& bk = s->body->kind;
    switch (bk.tag()) {
      case node_tag::var: {
        std::uint32_t i = bk.var_index();
        if (i == s->index) {
          copy_root(s->arg);
        } else if (i > s->index) {
          k = node_kind::var(i - 1);
        } else {
          k = bk;
        }
        break;
      }
      case node_tag::constant:
      case node_tag::bot:
        k = bk;
        break;
      case node_tag::app: {
        k = node_kind::app();
        auto mk = [&](const cell_ptr& ch) {
          auto n = std::make_shared<cell>();
          n->pending = subst_susp{ch, s->arg, s->index};
          return n;
        };
        c0 = mk(s->body->child0);
        c1 = mk(s->body->child1);
        break;
      }
      case node_tag::lam: {
        k = node_kind::lam();
        auto lifted = std::make_shared<cell>();
        lifted->pending = lift_susp{s->arg, 0, 1};
        auto n = std::make_shared<cell>();
        n->pending = subst_susp{s->body->child0, lifted, s->index + 1};
        c0 = n;
        break;
      }
    }
  } else if (auto* d = std::get_if<delegate_susp>(&c->pending)) {
    if (!d->target) throw std::logic_error("knot forced before tie");
    copy_root(d->target);
  } else if (auto* f = std::get_if<defer_susp>(&c->pending)) {
    coterm t = f->make();
    copy_root(t.p_);
  } else {
    throw std::logic_error("knot forced before tie");
  }

  c->kind = std::move(k);
  c->child0 = std::move(c0);
  c->child1 = std::move(c1);
  c->pending = std::monostate{};
  c->forced.store(true, std::memory_order_release);
}

} // namespace detail

// --------------------------------------------------------------------------
// basic observations

inline std::optional<node_kind> node_at(const coterm& t, const position& p) {
  coterm cur = t;
  for (std::uint32_t i : p) {
    if (i >= cur.arity()) return std::nullopt;
    cur = cur.child(i);
  }
  return cur.kind();
}

// all nodes at depth < n preserved, every subterm at depth n replaced by bot
inline finite_term truncate(const coterm& t, std::uint32_t n) {
  if (n == 0) return finite_term::bot();
  const node_kind& k = t.kind();
  finite_term out(k);
  out.children.reserve(k.arity());
  for (unsigned i = 0; i < k.arity(); ++i) out.children.push_back(truncate(t.child(i), n - 1));
  return out;
}

inline bool bisim_up_to(const coterm& t, const coterm& s, std::uint32_t n) {
  if (n == 0) return true;
  if (t.same_cell(s)) return true;
  const node_kind& tk = t.kind();
  const node_kind& sk = s.kind();
  if (tk != sk) return false;
  for (unsigned i = 0; i < tk.arity(); ++i)
    if (!bisim_up_to(t.child(i), s.child(i), n - 1)) return false;
  return true;
}

// distance inf{2^-n | t|n = s|n}, explored up to max_n.  candidate_zero means
// the truncations still agree at max_n, so the true distance is <= 2^-max_n.
struct metric_bound {
  std::uint32_t exponent = 0;
  bool candidate_zero = false;
};

inline metric_bound metric_dist(const coterm& t, const coterm& s, std::uint32_t max_n) {
  // largest n <= max_n with equal truncations = min depth of a root mismatch
  struct walker {
    std::uint32_t cap;
    std::uint32_t best; // min mismatch depth found
    void walk(const coterm& a, const coterm& b, std::uint32_t d) {
      if (d >= best || d >= cap) return;
      if (a.same_cell(b)) return;
      const node_kind& ak = a.kind();
      const node_kind& bk = b.kind();
      if (ak != bk) {
        best = d;
        return;
      }
      for (unsigned i = 0; i < ak.arity(); ++i) walk(a.child(i), b.child(i), d + 1);
    }
  };
  walker w{max_n, max_n + 1, };
  w.walk(t, s, 0);
  if (w.best > max_n) return metric_bound{max_n, true};
  return metric_bound{w.best, false};
}

inline coterm to_coterm(const finite_term& f) {
  switch (f.kind.tag()) {
    case node_tag::var: return coterm::var(f.kind.var_index());
    case node_tag::constant: return coterm::constant(f.kind.const_name());
    case node_tag::bot: return coterm::bot();
    case node_tag::lam: return coterm::lam(to_coterm(f.children[0]));
    case node_tag::app: return coterm::app(to_coterm(f.children[0]), to_coterm(f.children[1]));
  }
  throw std::logic_error("to_coterm: bad tag");
}

// materialize a coterm known (or asserted) to be finite; throws if the node
// count exceeds the budget
struct not_finite : std::runtime_error {
  not_finite() : std::runtime_error("term exceeds finite materialization budget") {}
};

// compact injective serialization, usable as a hash/set key
inline void structural_key_rec(const finite_term& t, std::string& out) {
  switch (t.kind.tag()) {
    case node_tag::bot: out.push_back('_'); return;
    case node_tag::var:
      out.push_back('v');
      out += std::to_string(t.kind.var_index());
      return;
    case node_tag::constant:
      out.push_back('c');
      out += std::to_string(t.kind.const_name().size());
      out.push_back(':');
      out += t.kind.const_name();
      return;
    case node_tag::lam:
      out.push_back('L');
      structural_key_rec(t.children[0], out);
      return;
    case node_tag::app:
      out.push_back('A');
      structural_key_rec(t.children[0], out);
      structural_key_rec(t.children[1], out);
      return;
  }
}

inline std::string structural_key(const finite_term& t) {
  std::string out;
  structural_key_rec(t, out);
  return out;
}

inline finite_term materialize_finite(const coterm& t, std::size_t max_nodes) {
  std::size_t used = 0;
  struct walker {
    std::size_t& used;
    std::size_t cap;
    finite_term walk(const coterm& u) {
      if (++used > cap) throw not_finite{};
      const node_kind& k = u.kind();
      finite_term out(k);
      for (unsigned i = 0; i < k.arity(); ++i) out.children.push_back(walk(u.child(i)));
      return out;
    }
  };
  walker w{used, max_nodes};
  return w.walk(t);
}

} // namespace itlc
