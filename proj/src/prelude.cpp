#include "deltanet/prelude.hpp"

#include <array>
#include <utility>

namespace deltanet {

namespace {

constexpr std::array<std::string_view, 11> kNumerals = {"zero", "one", "two",   "three", "four", "five",
                                                        "six",  "seven", "eight", "nine",  "ten"};

constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kCombinators = {{
    {"I", "λx.x"},
    {"K", "λx.λy.x"},
    {"S", "λx.λy.λz.x z (y z)"},
    {"succ", "λn.λs.λz.s (n s z)"},
    {"add", "λm.λn.λs.λz.m s (n s z)"},
    {"mul", "λm.λn.λs.m (n s)"},
    {"exp", "λm.λn.n m"},
}};

}  // namespace

Term church_numeral(unsigned n) {
  Term body = Term::var("z");
  for (unsigned i = 0; i < n; ++i) body = Term::app(Term::var("s"), body);
  return Term::abs("s", Term::abs("z", body));
}

std::optional<unsigned> church_value(const Term& t) {
  if (!t.is_abs() || !t.body().is_abs()) return std::nullopt;
  const std::string& s = t.name();
  const std::string& z = t.body().name();
  if (s == z) return std::nullopt;
  unsigned n = 0;
  const Term* cur = &t.body().body();
  while (cur->is_app()) {
    if (!cur->fun().is_var() || cur->fun().name() != s) return std::nullopt;
    ++n;
    cur = &cur->arg();
  }
  if (!cur->is_var() || cur->name() != z) return std::nullopt;
  return n;
}

std::optional<Term> prelude_definition(std::string_view name) {
  for (std::size_t i = 0; i < kNumerals.size(); ++i) {
    if (kNumerals[i] == name) return church_numeral(static_cast<unsigned>(i));
  }
  for (const auto& [n, text] : kCombinators) {
    if (n == name) return parse_term(text);
  }
  return std::nullopt;
}

std::vector<std::string> prelude_names() {
  std::vector<std::string> out;
  for (auto n : kCombinators) out.emplace_back(n.first);
  for (auto n : kNumerals) out.emplace_back(n);
  return out;
}

Term apply_prelude(const Term& t) {
  Term out = t;
  for (const std::string& name : free_vars(t)) {
    if (auto def = prelude_definition(name)) out = substitute(out, name, *def);
  }
  return out;
}

}  // namespace deltanet
