#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus.hpp"
#include "deltanet/encode.hpp"

using namespace deltanet;

namespace {

std::vector<NodeId> of_kind(const Net& n, NodeKind k) {
  std::vector<NodeId> out;
  for (NodeId id : n.ids()) {
    if (n.kind(id) == k) out.push_back(id);
  }
  return out;
}

std::vector<Flavor> admissible(const Term& t) {
  std::vector<Flavor> out;
  for (Flavor f : {Flavor::L, Flavor::A, Flavor::I, Flavor::K}) {
    if (calculus_leq(classify(t), f)) out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("identity under L is one fan wired to itself") {
  const Net n = translate(parse_term("λx.x"), Flavor::L);
  n.validate();
  const auto fans = of_kind(n, NodeKind::Fan);
  REQUIRE(fans.size() == 1);
  CHECK(n.node_count() == 2);
  CHECK(n.peer({fans[0], 1}) == PortRef{fans[0], 2});
  CHECK(n.peer({fans[0], 0}) == PortRef{*n.root(), 0});
}

TEST_CASE("identity under K gets a unary replicator") {
  const Net n = translate(parse_term("λx.x"), Flavor::K);
  const auto fans = of_kind(n, NodeKind::Fan);
  const auto reps = of_kind(n, NodeKind::Replicator);
  REQUIRE(fans.size() == 1);
  REQUIRE(reps.size() == 1);
  const Node& r = n.node(reps[0]);
  CHECK(r.level == 1);
  CHECK(r.deltas == std::vector<std::int32_t>{-1});
  CHECK(r.unpaired);
  CHECK(n.peer({fans[0], 2}) == PortRef{reps[0], 0});
  CHECK(n.peer({reps[0], 1}) == PortRef{fans[0], 1});
}

TEST_CASE("self application shares through a binary replicator") {
  for (Flavor f : {Flavor::I, Flavor::K}) {
    const Net n = translate(parse_term("λx.x x"), f);
    const auto reps = of_kind(n, NodeKind::Replicator);
    REQUIRE(reps.size() == 1);
    CHECK(n.node(reps[0]).level == 1);
    CHECK(n.node(reps[0]).deltas == std::vector<std::int32_t>{-1, 0});
    CHECK(of_kind(n, NodeKind::Fan).size() == 2);
  }
}

TEST_CASE("deltas follow occurrence levels") {
  // λf.λx.f (f x): f occurs at level 0 and 1, x at level 2; binders at level 0.
  const Net n = translate(parse_term("λf.λx.f (f x)"), Flavor::K);
  const auto reps = of_kind(n, NodeKind::Replicator);
  REQUIRE(reps.size() == 2);
  std::set<std::vector<std::int32_t>> deltas;
  for (NodeId r : reps) {
    CHECK(n.node(r).level == 1);
    deltas.insert(n.node(r).deltas);
  }
  CHECK(deltas == std::set<std::vector<std::int32_t>>{{-1, 0}, {1}});
}

TEST_CASE("flavor mismatches") {
  CHECK_THROWS_AS(translate(parse_term("λx.x x"), Flavor::A), FlavorMismatch);
  CHECK_THROWS_AS(translate(parse_term("λx.x x"), Flavor::L), FlavorMismatch);
  CHECK_THROWS_AS(translate(parse_term("λx.λy.x"), Flavor::I), FlavorMismatch);
  CHECK_THROWS_AS(translate(parse_term("λx.λy.x"), Flavor::L), FlavorMismatch);
  CHECK_NOTHROW(translate(parse_term("λx.λy.x"), Flavor::A));
  CHECK_NOTHROW(translate(parse_term("λx.λy.x"), Flavor::K));
}

TEST_CASE("unused binders get an eraser") {
  const Net n = translate(parse_term("λx.λy.x"), Flavor::A);
  CHECK(of_kind(n, NodeKind::Eraser).size() == 1);
  CHECK(of_kind(n, NodeKind::Replicator).empty());
}

TEST_CASE("translation invariants over the corpus") {
  for (const Term& t : corpus::closed_terms(7)) {
    for (Flavor f : admissible(t)) {
      const Net n = translate(t, f);
      n.validate();
      for (NodeId r : of_kind(n, NodeKind::Replicator)) {
        const Node& rep = n.node(r);
        CHECK(rep.arity() >= 1);
        CHECK_FALSE((rep.arity() == 1 && rep.deltas[0] == 0));
        CHECK(rep.unpaired);
      }
      if (f == Flavor::L) {
        std::size_t binders = 0;
        std::function<void(const Term&)> count = [&](const Term& u) {
          if (u.is_abs()) {
            ++binders;
            count(u.body());
          } else if (u.is_app()) {
            ++binders;
            count(u.fun());
            count(u.arg());
          }
        };
        count(t);
        const AgentCounts c = count_agents(n);
        CHECK(c.fans == binders);
        CHECK(c.erasers + c.replicators == 0);
      }
    }
  }
}

TEST_CASE("normal linear terms translate to normal nets") {
  for (const Term& t : corpus::linear_terms(9)) {
    const auto r = oracle_normalize(t, 1);
    if (!std::holds_alternative<NormalForm>(r) || std::get<NormalForm>(r).beta_steps != 0) continue;
    CHECK(active_pairs(translate(t, Flavor::L)).empty());
  }
}

TEST_CASE("interface_of") {
  CHECK(interface_of(translate(parse_term("(λx.x) y"))).free == std::set<std::string>{"y"});
  CHECK(interface_of(translate(parse_term("λx.x"))).free.empty());
  CHECK(interface_of(translate(parse_term("x y"))).free == std::set<std::string>{"x", "y"});
  for (const auto& named : corpus::named_terms()) {
    const Term t = parse_term(named.text);
    const NetInterface i = interface_of(translate(t));
    CHECK(i.free == free_vars(t));
    CHECK(i.root == *translate(t).root());
  }
}

TEST_CASE("fan tags can be stripped") {
  const Net tagged = translate(parse_term("λx.x y"));
  const Net plain = translate(parse_term("λx.x y"), {.fan_tags = false});
  CHECK(tagged.node(1).label == "lam");
  CHECK(plain.node(1).label.empty());
  CHECK(tagged.wires() == plain.wires());
}

TEST_CASE("binary mode builds left-leaning replicator trees") {
  const Term t = parse_term("λx.x x x x");
  const Net flat = translate(t, Flavor::I);
  const Net tree = translate(t, Flavor::I, {.fan_tags = true, .binary_replicators = true});
  tree.validate();
  REQUIRE(of_kind(flat, NodeKind::Replicator).size() == 1);
  CHECK(flat.node(of_kind(flat, NodeKind::Replicator)[0]).deltas == std::vector<std::int32_t>{-1, 0, 0, 0});
  const auto reps = of_kind(tree, NodeKind::Replicator);
  CHECK(reps.size() == 3);
  for (NodeId r : reps) {
    CHECK(tree.node(r).arity() <= 2);
    CHECK(tree.node(r).level == 1);
  }
  CHECK(check_parent_child_duality(tree).consistent);
}
