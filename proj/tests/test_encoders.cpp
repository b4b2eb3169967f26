// Lifts of classical database formalisms: single databases, distributed
// databases, deductive databases, and peer-to-peer systems.

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "mcs/bruteforce.hpp"
#include "mcs/constraints.hpp"
#include "mcs/encoders.hpp"

using namespace mcs;
using mcstest::atom;
using mcstest::fact;
using mcstest::ic;
using mcstest::lit;
using mcstest::V;

TEST_CASE("a single database lifts to one closed-world context") {
  std::set<Atom> db{fact("p", {"a"}), fact("q", {"a", "b"})};
  MultiContextSystem m = ctx_of_db(db);
  REQUIRE(m.size() == 1);
  CHECK(m.contexts[0].name == "db");
  CHECK(m.contexts[0].rules.empty());

  auto eq = enumerate_equilibria(m);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].perContext[0].atoms == db);
  CHECK(eq[0].perContext[0].closedWorld);

  CHECK_THROWS_AS(ctx_of_db({atom("p", {V("X")})}), InputError);
}

TEST_CASE("denial clauses translate literal by literal") {
  DenialClause d;
  d.positive = {atom("p", {V("X")})};
  d.negative = {atom("q", {V("X"), V("E")})};
  d.builtins = {{V("X"), mcstest::C("a"), false}};
  IntegrityConstraint c = denial_to_ic(d, 3);
  CHECK(c.positive.size() == 1);
  CHECK(c.positive[0].context == 3);
  CHECK(c.negative[0].context == 3);
  CHECK(c.negative[0].negated);
  CHECK(c.builtins.size() == 1);

  DenialClause unsafe;
  unsafe.negative = {atom("q", {V("Y"), V("Y")})};
  CHECK_THROWS_AS(denial_to_ic(unsafe), SafetyError);
}

TEST_CASE("distributed databases: replicas agree, divergent sites violate") {
  std::vector<Site> replicated{{"s0", {fact("p", {"a"})}, {}},
                               {"s1", {fact("p", {"a"})}, {}},
                               {"s2", {fact("p", {"a"})}, {}}};
  auto [m, ics] = distributed_db(replicated);
  REQUIRE(m.size() == 3);
  CHECK(ics.size() == 6);  // ordered pairs of three declaring sites
  CHECK(strong_satisfies(m, ics).holds);

  std::vector<Site> divergent{{"s0", {fact("p", {"a"})}, {}},
                              {"s1", {fact("p", {"b"})}, {}}};
  auto [m2, ics2] = distributed_db(divergent);
  auto verdict = strong_satisfies(m2, ics2);
  CHECK_FALSE(verdict.holds);
  CHECK_FALSE(verdict.inconsistent);

  // a relation declared at one site only produces no constraints
  std::vector<Site> lone{{"s0", {fact("p", {"a"})}, {}}, {"s1", {fact("q", {"b"})}, {}}};
  CHECK(distributed_db(lone).second.empty());

  // schema-only declarations participate: s1 declares p but stores nothing
  std::vector<Site> schemaOnly{{"s0", {fact("p", {"a"})}, {}}, {"s1", {}, {{"p", 1}}}};
  auto [m3, ics3] = distributed_db(schemaOnly);
  CHECK(ics3.size() == 2);
  CHECK_FALSE(strong_satisfies(m3, ics3).holds);

  CHECK_THROWS_AS(distributed_db({{"s0", {fact("p", {"a"})}, {}},
                                  {"s1", {fact("p", {"a", "b"})}, {}}}),
                  InputError);
}

TEST_CASE("deductive database lifts to an extensional store plus a view") {
  DeductiveDB d;
  d.facts = {fact("isa", {"array", "list"}), fact("isa", {"list", "collection"})};
  d.rules = {{atom("sub", {V("X"), V("Y")}), {atom("isa", {V("X"), V("Y")})}, {}},
             {atom("sub", {V("X"), V("Z")}),
              {atom("isa", {V("X"), V("Y")}), atom("sub", {V("Y"), V("Z")})},
              {}}};
  MultiContextSystem m = deductive_db_to_mcs(d);
  REQUIRE(m.size() == 2);
  CHECK(m.contexts[0].name == kExtensionalContext);
  CHECK(m.contexts[1].name == kIntensionalContext);
  CHECK(m.contexts[1].rules.size() == 2);

  auto eq = enumerate_equilibria(m);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].perContext[0].atoms == d.facts);
  CHECK(eq[0].perContext[1].atoms.count(fact("sub", {"array", "collection"})) == 1);
  CHECK(eq[0].perContext[1].atoms.size() == 3);

  // intensional body atoms route to the view, extensional ones to the store
  for (const auto& r : m.contexts[1].rules)
    for (const auto& l : r.body)
      CHECK(l.context == (l.belief.atom.predicate == "sub" ? 1 : 0));

  // extensional predicates used only in rule bodies still enter the schema
  DeductiveDB empty;
  empty.rules = {{atom("q"), {atom("p")}, {}}};
  MultiContextSystem m2 = deductive_db_to_mcs(empty);
  CHECK(m2.contexts[0].logic->signature().kbDeclared("p", 0));
}

TEST_CASE("deductive database validation") {
  DeductiveDB mixed;
  mixed.facts = {fact("q", {"a"})};
  mixed.rules = {{atom("q", {V("X")}), {atom("p", {V("X")})}, {}}};
  CHECK_THROWS_AS(deductive_db_to_mcs(mixed), InputError);

  DeductiveDB negated;
  negated.rules = {{atom("q"), {atom("p")}, {atom("r")}}};
  CHECK_THROWS_AS(deductive_db_to_mcs(negated), CapabilityError);

  auto extOnly = std::vector<IntegrityConstraint>{ic({lit(0, atom("isa", {V("X"), V("X")}))})};
  CHECK(extensional_only_check(extOnly));
  auto viewTouching = std::vector<IntegrityConstraint>{ic({lit(1, atom("sub", {V("X"), V("X")}))})};
  CHECK_FALSE(extensional_only_check(viewTouching));
}

// ---------------------------------------------------------------------------
// Peer-to-peer systems

namespace {

/// Two peers: peer 0 stores p-facts, peer 1 imports them through a mapping
/// and derives s locally.
std::vector<Peer> two_peers(std::set<Atom> facts0, std::vector<DenialClause> ics1 = {}) {
  Peer p0;
  p0.name = "alpha";
  p0.facts = std::move(facts0);
  Peer p1;
  p1.name = "beta";
  p1.mappingRules = {{atom("m", {V("X")}), 0, {atom("p", {V("X")})}}};
  p1.rules = {{atom("s", {V("X")}), {atom("m", {V("X")})}, {}}};
  p1.ics = std::move(ics1);
  return {p0, p1};
}

}  // namespace

TEST_CASE("peer validation enforces disjoint schemas and sane mappings") {
  auto peers = two_peers({fact("p", {"a"})});
  CHECK_NOTHROW(p2p_to_mcs(peers));

  auto clash = peers;
  clash[0].rules = {{atom("m", {V("X")}), {atom("p", {V("X")})}, {}}};  // m owned by beta
  CHECK_THROWS_AS(p2p_to_mcs(clash), InputError);

  auto selfMap = peers;
  selfMap[1].mappingRules[0].sourcePeer = 1;
  CHECK_THROWS_AS(p2p_to_mcs(selfMap), InputError);

  auto missing = peers;
  missing[1].mappingRules[0].sourcePeer = 9;
  CHECK_THROWS_AS(p2p_to_mcs(missing), InputError);

  auto negated = peers;
  negated[1].rules[0].negBody = {atom("p", {V("X")})};
  CHECK_THROWS_AS(p2p_to_mcs(negated), CapabilityError);
}

TEST_CASE("induced system mirrors local, mapping and constraint structure") {
  auto peers = two_peers({fact("p", {"a"})}, {{{atom("s", {V("X")})}, {}, {}}});
  auto [m, ics] = p2p_to_mcs(peers);
  REQUIRE(m.size() == 2);
  CHECK(m.contexts[0].name == "alpha");
  CHECK(m.contexts[1].rules.size() == 2);  // one local, one mapping
  REQUIRE(ics.size() == 1);
  CHECK(ics[0].positive[0].context == 1);

  // without constraints the unique equilibrium materializes the import chain
  auto [m2, ics2] = p2p_to_mcs(two_peers({fact("p", {"a"})}));
  auto eq = enumerate_equilibria(m2);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].perContext[1].atoms ==
        std::set<Atom>{fact("m", {"a"}), fact("s", {"a"})});
}

TEST_CASE("weak models drop exactly the mapping instances that cause violations") {
  // constraint at beta: never believe s(a); the only escape is to disable
  // the mapping instance importing p(a)
  auto peers = two_peers({fact("p", {"a"}), fact("p", {"b"})},
                         {{{atom("s", {mcstest::C("a")})}, {}, {}}});
  auto models = p2p_weak_models(peers);
  // dropping a mapping instance is self-justifying, so both "import only b"
  // and "import nothing" are weak models
  REQUIRE(models.size() == 2);
  std::set<Atom> importB{fact("p", {"a"}), fact("p", {"b"}), fact("m", {"b"}),
                         fact("s", {"b"})};
  CHECK(models[0] == importB);
  CHECK(models[1] == std::set<Atom>{fact("p", {"a"}), fact("p", {"b"})});
  CHECK(models == mcs::oracle::brute_force_p2p_weak_models(peers));

  // neither weak model is the minimal model of the full program, so neither
  // is an equilibrium of the induced system
  auto [m, ics] = p2p_to_mcs(peers);
  for (const auto& model : models)
    CHECK_FALSE(is_equilibrium(m, p2p_state_of(peers, model)));
}

TEST_CASE("without violations the ideal weak model is the minimal model") {
  auto peers = two_peers({fact("p", {"a"})});
  auto models = p2p_weak_models(peers);
  // the import-everything model plus the self-justified import-nothing model
  REQUIRE(models.size() == 2);
  CHECK(models[0] == p2p_program_model(p2p_ground_program(peers)));
  CHECK(models == mcs::oracle::brute_force_p2p_weak_models(peers));

  // correspondence: the ideal model is an equilibrium satisfying the ICs
  auto [m, ics] = p2p_to_mcs(peers);
  BeliefState s = p2p_state_of(peers, models[0]);
  CHECK(is_equilibrium(m, s));
  CHECK(mcs::oracle::state_satisfies(m, s, ics));
}

TEST_CASE("reduced programs keep only mapping instances with believed heads") {
  auto peers = two_peers({fact("p", {"a"}), fact("p", {"b"})});
  GroundP2PProgram full = p2p_ground_program(peers);
  CHECK(full.mappingInstances.size() == 2);
  CHECK(full.localRules.size() == 2);

  GroundP2PProgram reduced = p2p_reduced_program(peers, {fact("m", {"a"})});
  REQUIRE(reduced.mappingInstances.size() == 1);
  CHECK(reduced.mappingInstances[0].head == fact("m", {"a"}));
}

TEST_CASE("interpretation atoms route to the owning peer") {
  auto peers = two_peers({fact("p", {"a"})});
  BeliefState s = p2p_state_of(peers, {fact("p", {"a"}), fact("m", {"a"})});
  CHECK(s.perContext[0].atoms == std::set<Atom>{fact("p", {"a"})});
  CHECK(s.perContext[1].atoms == std::set<Atom>{fact("m", {"a"})});
  CHECK_THROWS_AS(p2p_state_of(peers, {fact("alien")}), InputError);
}
