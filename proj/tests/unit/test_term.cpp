#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "deltanet/term.hpp"

using namespace deltanet;

namespace {

Term P(std::string_view s) { return parse_term(s); }
Term V(const std::string& n) { return Term::var(n); }

// Reduces a random redex at each step (not the oracle's strategy).
std::uint64_t random_order_steps(Term t, std::mt19937_64& rng) {
  std::uint64_t steps = 0;
  for (;;) {
    std::vector<std::vector<int>> paths;
    std::vector<int> path;
    std::function<void(const Term&)> collect = [&](const Term& u) {
      if (u.is_app() && u.fun().is_abs()) paths.push_back(path);
      if (u.is_abs()) {
        path.push_back(0);
        collect(u.body());
        path.pop_back();
      } else if (u.is_app()) {
        path.push_back(1);
        collect(u.fun());
        path.back() = 2;
        collect(u.arg());
        path.pop_back();
      }
    };
    collect(t);
    if (paths.empty()) return steps;
    const auto& target = paths[std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng)];
    std::function<Term(const Term&, std::size_t)> rebuild = [&](const Term& u, std::size_t depth) -> Term {
      if (depth == target.size()) return substitute(u.fun().body(), u.fun().name(), u.arg());
      switch (target[depth]) {
        case 0: return Term::abs(u.name(), rebuild(u.body(), depth + 1));
        case 1: return Term::app(rebuild(u.fun(), depth + 1), u.arg());
        default: return Term::app(u.fun(), rebuild(u.arg(), depth + 1));
      }
    };
    t = rebuild(t, 0);
    ++steps;
  }
}

}  // namespace

TEST_CASE("parse_term builds the expected trees") {
  CHECK(P("λx.x") == Term::abs("x", V("x")));
  CHECK(P("(λx.x x)(λy.y y)") == Term::app(Term::abs("x", Term::app(V("x"), V("x"))),
                                           Term::abs("y", Term::app(V("y"), V("y")))));
  CHECK(P("λ x y. x") == Term::abs("x", Term::abs("y", V("x"))));
  CHECK(P("\\x.x") == P("λx.x"));
  CHECK(P("a b c") == Term::app(Term::app(V("a"), V("b")), V("c")));
  CHECK(P("λx.x y") == Term::abs("x", Term::app(V("x"), V("y"))));
  CHECK(P("f λx.x") == Term::app(V("f"), P("λx.x")));
  CHECK(P("x' y_1") == Term::app(V("x'"), V("y_1")));
}

TEST_CASE("parse_term reports byte offsets") {
  CHECK_THROWS_AS(P(""), SyntaxError);
  CHECK_THROWS_AS(P("   "), SyntaxError);
  try {
    P("(λx.x");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 6);  // "λ" is two bytes
  }
  try {
    P("x )");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(P("λ.x"), SyntaxError);
  CHECK_THROWS_AS(P("λx x"), SyntaxError);
  CHECK_THROWS_AS(P("λx."), SyntaxError);
  CHECK_THROWS_AS(P("x $"), SyntaxError);
}

TEST_CASE("print_term uses minimal parentheses") {
  CHECK(print_term(Term::abs("x", V("x"))) == "λx.x");
  CHECK(print_term(Term::app(Term::app(V("a"), V("b")), V("c"))) == "a b c");
  CHECK(print_term(Term::app(V("a"), Term::app(V("b"), V("c")))) == "a (b c)");
  CHECK(print_term(P("(λx.x) (λy.y)")) == "(λx.x) (λy.y)");
  CHECK(print_term(P("λx.λy.x y")) == "λx.λy.x y");
  CHECK(print_term(P("(λx.x) y z")) == "(λx.x) y z");
}

TEST_CASE("parse after print is the identity on the corpus") {
  for (const Term& t : corpus::closed_terms(7)) CHECK(parse_term(print_term(t)) == t);
  for (const auto& n : corpus::named_terms()) {
    const Term t = P(n.text);
    CHECK(parse_term(print_term(t)) == t);
  }
}

TEST_CASE("free_vars") {
  CHECK(free_vars(P("λx.x")).empty());
  CHECK(free_vars(P("λx.x y")) == std::set<std::string>{"y"});
  CHECK(free_vars(P("(λx.x) x")) == std::set<std::string>{"x"});
}

TEST_CASE("alpha_eq") {
  CHECK(alpha_eq(P("λx.x"), P("λy.y")));
  CHECK_FALSE(alpha_eq(P("λx.λy.x"), P("λa.λb.b")));
  CHECK_FALSE(alpha_eq(P("x"), P("y")));
  CHECK(alpha_eq(P("λx.λx.x"), P("λa.λb.b")));
  CHECK_FALSE(alpha_eq(P("λx.y"), P("λy.y")));
}

TEST_CASE("classify") {
  CHECK(classify(P("λx.x")) == Calculus::L);
  CHECK(classify(P("λx.λy.x")) == Calculus::A);
  CHECK(classify(P("λx.λy.x x")) == Calculus::K);
  CHECK(classify(P("λx.x x")) == Calculus::I);
  CHECK(classify(P("x y")) == Calculus::L);
  CHECK(calculus_leq(Calculus::L, Calculus::K));
  CHECK(calculus_leq(Calculus::A, Calculus::K));
  CHECK_FALSE(calculus_leq(Calculus::A, Calculus::I));
  CHECK_FALSE(calculus_leq(Calculus::K, Calculus::I));
  CHECK(parse_calculus("k") == Calculus::K);
  CHECK_THROWS(parse_calculus("Z"));
}

TEST_CASE("substitute avoids capture") {
  const Term r = substitute(P("λy.x y"), "x", P("y"));
  CHECK(alpha_eq(r, P("λz.y z")));
  CHECK(substitute(P("λx.x"), "x", P("y")) == P("λx.x"));
}

TEST_CASE("oracle_normalize examples") {
  {
    const auto r = oracle_normalize(P("(λx.x) y"), 10);
    REQUIRE(std::holds_alternative<NormalForm>(r));
    CHECK(std::get<NormalForm>(r).result == P("y"));
    CHECK(std::get<NormalForm>(r).beta_steps == 1);
  }
  {
    const auto r = oracle_normalize(P("(λx.x x)(λy.y y)"), 100);
    REQUIRE(std::holds_alternative<FuelExhausted>(r));
    CHECK(std::get<FuelExhausted>(r).beta_steps == 100);
  }
  {
    const auto r = oracle_normalize(P("(λs.λz.s (s z)) (λs.λz.s (s z))"), 100);
    REQUIRE(std::holds_alternative<NormalForm>(r));
    CHECK(alpha_eq(std::get<NormalForm>(r).result, P("λs.λz.s (s (s (s z)))")));
  }
  {
    const auto r = oracle_normalize(P("λx.x"), 1);
    REQUIRE(std::holds_alternative<NormalForm>(r));
    CHECK(std::get<NormalForm>(r).beta_steps == 0);
  }
  CHECK_THROWS_AS(oracle_normalize(P("x"), 0), std::invalid_argument);
}

TEST_CASE("oracle is deterministic and never invents free variables") {
  for (const Term& t : corpus::closed_terms(7)) {
    const auto a = oracle_normalize(t, 1000);
    const auto b = oracle_normalize(t, 1000);
    REQUIRE(a.index() == b.index());
    if (const auto* na = std::get_if<NormalForm>(&a)) {
      const auto& nb = std::get<NormalForm>(b);
      CHECK(na->result == nb.result);
      CHECK(na->beta_steps == nb.beta_steps);
      CHECK(free_vars(na->result).empty());
    }
  }
  const Term open = P("(λf.f (f z)) ((λx.x) y)");
  const auto r = oracle_normalize(open, 100);
  for (const auto& v : free_vars(std::get<NormalForm>(r).result)) CHECK(free_vars(open).count(v));
}

TEST_CASE("linear terms need the same number of steps in any order") {
  std::mt19937_64 rng(7);
  for (const Term& t : corpus::linear_terms(7)) {
    const auto r = oracle_normalize(t, 1000);
    REQUIRE(std::holds_alternative<NormalForm>(r));
    for (int trial = 0; trial < 5; ++trial) CHECK(random_order_steps(t, rng) == std::get<NormalForm>(r).beta_steps);
  }
}
