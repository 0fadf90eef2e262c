#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deltanet/encode.hpp"
#include "deltanet/engine.hpp"
#include "deltanet/prelude.hpp"
#include "deltanet/readback.hpp"

using namespace deltanet;

namespace {

std::optional<unsigned> evaluate(const std::string& text) {
  const Term t = apply_prelude(parse_term(text));
  const NormalizeResult r = normalize(translate(t));
  REQUIRE(r.status == Status::Normal);
  return church_value(readback(r.net));
}

}  // namespace

TEST_CASE("church numerals") {
  CHECK(print_term(church_numeral(0)) == "λs.λz.z");
  CHECK(print_term(church_numeral(2)) == "λs.λz.s (s z)");
  for (unsigned n = 0; n <= 10; ++n) CHECK(church_value(church_numeral(n)) == n);
  CHECK(church_value(parse_term("λa.λb.a (a b)")) == 2u);
  CHECK_FALSE(church_value(parse_term("λs.λs.s z")));
  CHECK_FALSE(church_value(parse_term("λs.λz.z s")));
  CHECK_FALSE(church_value(parse_term("λs.λz.s (s s)")));
}

TEST_CASE("definitions") {
  CHECK(alpha_eq(*prelude_definition("two"), church_numeral(2)));
  CHECK(alpha_eq(*prelude_definition("I"), parse_term("λx.x")));
  CHECK_FALSE(prelude_definition("pred"));
  for (const std::string& name : prelude_names()) {
    const auto t = prelude_definition(name);
    REQUIRE(t);
    CHECK(free_vars(*t).empty());
  }
  for (const char* name : {"I", "K", "S", "succ", "add", "mul", "exp", "zero", "ten"}) {
    CHECK(prelude_definition(name));
  }
}

TEST_CASE("apply_prelude replaces only free names") {
  CHECK(alpha_eq(apply_prelude(parse_term("succ two")), Term::app(*prelude_definition("succ"), church_numeral(2))));
  CHECK(apply_prelude(parse_term("λtwo.two")) == parse_term("λtwo.two"));
  CHECK(apply_prelude(parse_term("x")) == parse_term("x"));
}

TEST_CASE("arithmetic") {
  CHECK(evaluate("succ three") == 4u);
  CHECK(evaluate("add two three") == 5u);
  CHECK(evaluate("mul two three") == 6u);
  CHECK(evaluate("exp two two") == 4u);
  CHECK(evaluate("exp two three") == 8u);
  CHECK(evaluate("exp three two") == 9u);
  CHECK(evaluate("S K K two") == 2u);
}
