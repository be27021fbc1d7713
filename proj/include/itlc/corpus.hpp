#pragma once

// Named demonstration terms used by the CLI and the test suites.

#include "itlc/syntax.hpp"
#include "itlc/term.hpp"

#include <string>
#include <vector>

namespace itlc {

struct demo_term {
  std::string name;
  std::string source;
  bool open; // parsed with free variables allowed
};

inline const std::vector<demo_term>& demo_corpus() {
  static const std::vector<demo_term> entries = {
      {"I", "\\x. x", false},
      {"K", "\\x. \\y. x", false},
      {"S", "\\x. \\y. \\z. x z (y z)", false},
      {"omega", "(\\x. x x) (\\x. x x)", false},
      {"omega_o", "(\\x. \\y. x x) (\\x. \\y. x x)", false},
      {"M", "(\\m. \\x. m m) (\\m. \\x. m m)", false},
      {"L", "mu X. \\x. X", false},
      {"O", "mu X. \\x. X", false},
      {"Y_f", "(\\x. f (x x)) (\\x. f (x x))", true},
      {"head_active_abs", "\\x. ((\\y. y y) (\\y. y y)) x", false},
      {"head_active_app", "((\\y. y y) (\\y. y y)) z", true},
  };
  return entries;
}

inline const demo_term* find_demo(const std::string& name) {
  for (const auto& d : demo_corpus())
    if (d.name == name) return &d;
  return nullptr;
}

inline parse_result demo(const std::string& name) {
  const demo_term* d = find_demo(name);
  if (!d) throw std::invalid_argument("unknown demo term: " + name);
  return parse(d->source, d->open);
}

// every named term, compiled; open ones bring their free-variable frame
inline std::vector<coterm> demo_coterms() {
  std::vector<coterm> out;
  for (const auto& d : demo_corpus()) out.push_back(parse(d.source, d.open).term);
  return out;
}

} // namespace itlc
