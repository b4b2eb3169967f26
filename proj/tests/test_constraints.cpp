// Constraint satisfaction, weak/strong verdicts, the reduction encodings,
// and the single-database fast path.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "generators.hpp"
#include "helpers.hpp"
#include "mcs/bruteforce.hpp"
#include "mcs/constraints.hpp"
#include "mcs/encoders.hpp"

using namespace mcs;
using mcstest::atom;
using mcstest::bridge;
using mcstest::cw;
using mcstest::db_context;
using mcstest::fact;
using mcstest::ic;
using mcstest::lit;
using mcstest::V;

TEST_CASE("constraint satisfaction over a handcrafted state") {
  MultiContextSystem m;
  m.contexts.push_back(db_context("a", {fact("p", {"x"}), fact("p", {"y"})}));
  m.contexts.push_back(db_context("b", {fact("q", {"x"})}));
  BeliefState s;
  s.perContext = {cw({fact("p", {"x"}), fact("p", {"y"})}), cw({fact("q", {"x"})})};

  // every p must be mirrored by a q: violated at X=y
  IntegrityConstraint mirror =
      ic({lit(0, atom("p", {V("X")})), lit(1, atom("q", {V("X")}), true)});
  auto r = ic_satisfied(m, s, mirror);
  CHECK_FALSE(r.satisfied);
  REQUIRE(r.violation);
  CHECK(r.violation->at("X") == "y");

  // builtin rescue: the X=y instantiation is excused by X = x failing
  IntegrityConstraint guarded = mirror;
  guarded.builtins.push_back({V("X"), mcstest::C("y"), false});  // X != y
  CHECK(ic_satisfied(m, s, guarded).satisfied);

  // existential rescue: q with any second argument
  MultiContextSystem m2;
  m2.contexts.push_back(db_context("a", {fact("p", {"x"})}));
  m2.contexts.push_back(db_context("b", {fact("q", {"x", "anything"})}));
  BeliefState s2;
  s2.perContext = {cw({fact("p", {"x"})}), cw({fact("q", {"x", "anything"})})};
  IntegrityConstraint tgd =
      ic({lit(0, atom("p", {V("X")})), lit(1, atom("q", {V("X"), V("E")}), true)});
  CHECK(ic_satisfied(m2, s2, tgd).satisfied);
  s2.perContext[1].atoms.clear();
  CHECK_FALSE(ic_satisfied(m2, s2, tgd).satisfied);

  IntegrityConstraint danglingCtx = ic({lit(9, atom("p", {V("X")}))});
  CHECK_THROWS_AS(ic_satisfied(m, s, danglingCtx), InputError);
}

TEST_CASE("weak and strong verdicts on the transitive-closure system") {
  MultiContextSystem m = mcstest::transitive_closure_system();
  std::vector<IntegrityConstraint> ics{mcstest::tc_backing_ic()};

  auto weak = weak_satisfies(m, ics);
  CHECK(weak.holds);
  CHECK_FALSE(weak.inconsistent);
  REQUIRE(weak.witness);
  // any satisfying equilibrium must back the forced rt(a,c) by r(a,c)
  CHECK(weak.witness->perContext[0].atoms.count(fact("r", {"a", "c"})) == 1);
  CHECK(is_equilibrium(m, *weak.witness));

  auto strong = strong_satisfies(m, ics);
  CHECK_FALSE(strong.holds);
  CHECK_FALSE(strong.inconsistent);
  REQUIRE(strong.witness);          // a violating equilibrium
  REQUIRE(strong.violatedIc);
  CHECK(*strong.violatedIc == 0);
  CHECK(is_equilibrium(m, *strong.witness));
  CHECK_FALSE(mcs::oracle::state_satisfies(m, *strong.witness, ics));
}

TEST_CASE("an inconsistent system weakly and strongly satisfies nothing") {
  MultiContextSystem m;
  m.contexts.push_back(db_context("a", {}));
  Signature sig;
  sig.declareKb("q", 0);
  m.contexts[0].logic = std::make_shared<RelationalDbLogic>(sig);
  m.contexts[0].rules.push_back(bridge(0, atom("q"), {lit(0, atom("q"), true)}));

  auto weak = weak_satisfies(m, {});
  CHECK_FALSE(weak.holds);
  CHECK(weak.inconsistent);
  auto strong = strong_satisfies(m, {});
  CHECK_FALSE(strong.holds);
  CHECK(strong.inconsistent);
}

TEST_CASE("reduction encodings add one flag context with pre-grounded rules") {
  MultiContextSystem m = mcstest::transitive_closure_system();
  std::vector<IntegrityConstraint> ics{mcstest::tc_backing_ic()};

  MultiContextSystem mw = encode_weak(m, ics);
  REQUIRE(mw.size() == 3);
  CHECK(mw.contexts[2].name == "_flag");
  CHECK(mw.contexts[2].logic->kind() == "flag_weak");
  // one rule per ground instance: {a,b,c} x {a,b,c} over (X, Y)
  REQUIRE(mw.contexts[2].rules.size() == 9);
  for (const BridgeRule& r : mw.contexts[2].rules) {
    CHECK(r.head.context == 2);
    CHECK(r.head.element.ordinary);
    REQUIRE(r.body.size() == 2);  // positive literal + negated literal
    CHECK(r.body[0].belief.atom.ground());
  }

  CHECK(encode_strong(m, ics).contexts[2].logic->kind() == "flag_strong");

  // a context already named _flag pushes the fresh name further
  MultiContextSystem clash = m;
  clash.contexts[0].name = "_flag";
  CHECK(encode_weak(clash, ics).contexts[2].name == "_flag_");
}

TEST_CASE("encodings refuse builtins and existential singletons") {
  MultiContextSystem m = mcstest::transitive_closure_system();
  IntegrityConstraint withBuiltin = mcstest::tc_backing_ic();
  withBuiltin.builtins.push_back({V("X"), V("Y"), false});
  CHECK_THROWS_AS(encode_weak(m, {withBuiltin}), CapabilityError);

  IntegrityConstraint existential =
      ic({lit(1, atom("rt", {V("X"), V("Y")})),
          lit(0, atom("r", {V("X"), V("E")}), true)});
  CHECK_THROWS_AS(encode_strong(m, {existential}), CapabilityError);
}

TEST_CASE("encoding equivalences on the transitive-closure instance") {
  MultiContextSystem m = mcstest::transitive_closure_system();
  std::vector<IntegrityConstraint> ics{mcstest::tc_backing_ic()};

  CHECK(is_consistent(encode_weak(m, ics)).consistent == weak_satisfies(m, ics).holds);
  REQUIRE(is_consistent(m).consistent);
  CHECK(strong_satisfies(m, ics).holds == !is_consistent(encode_strong(m, ics)).consistent);
}

TEST_CASE("encoding equivalences across random systems") {
  std::mt19937 rng(90125);
  int tested = 0;
  while (tested < 40) {
    auto inst = mcstest::random_mcs(rng);
    if (!inst) continue;
    ++tested;
    bool weak, strongApplicable = false, strong = false;
    try {
      weak = weak_satisfies(inst->mcs, inst->ics).holds;
      if (is_consistent(inst->mcs).consistent) {
        strongApplicable = true;
        strong = strong_satisfies(inst->mcs, inst->ics).holds;
      }
    } catch (const CapabilityError&) {
      continue;
    }
    CHECK(weak == is_consistent(encode_weak(inst->mcs, inst->ics)).consistent);
    if (strongApplicable)
      CHECK(strong == !is_consistent(encode_strong(inst->mcs, inst->ics)).consistent);
    CHECK(weak == mcs::oracle::brute_force_weak(inst->mcs, inst->ics));
    if (strong) CHECK(weak);  // strong satisfaction implies weak satisfaction
  }
}

TEST_CASE("database fast path matches the direct oracle") {
  std::mt19937 rng(60914);
  for (int round = 0; round < 60; ++round) {
    std::set<Atom> db = mcstest::random_db(rng, 25);
    auto ics = mcstest::random_denials(rng);
    CHECK(db_fastpath_check(db, ics) == mcs::oracle::direct_db_check(db, ics));
  }
}

TEST_CASE("fast path explains its violation") {
  std::set<Atom> db{fact("p", {"k1"}), fact("q", {"k1", "k2"})};
  DenialClause d;
  d.positive = {atom("p", {V("X")}), atom("q", {V("X"), V("Y")})};
  auto ics = std::vector<IntegrityConstraint>{denial_to_ic(d)};

  std::optional<std::pair<std::size_t, Substitution>> why;
  CHECK_FALSE(db_fastpath_check(db, ics, &why));
  REQUIRE(why);
  CHECK(why->first == 0);
  CHECK(why->second == Substitution{{"X", "k1"}, {"Y", "k2"}});

  // constraints must reference the single database context
  auto foreign = std::vector<IntegrityConstraint>{ic({lit(1, atom("p", {V("X")}))})};
  CHECK_THROWS_AS(db_fastpath_check(db, foreign), InputError);
}

TEST_CASE("fast path agrees with weak and strong satisfaction on the induced system") {
  std::mt19937 rng(171717);
  for (int round = 0; round < 20; ++round) {
    std::set<Atom> db = mcstest::random_db(rng, 15);
    auto ics = mcstest::random_denials(rng);
    MultiContextSystem m = ctx_of_db(db);
    bool direct = db_fastpath_check(db, ics);
    CHECK(direct == weak_satisfies(m, ics).holds);
    CHECK(direct == strong_satisfies(m, ics).holds);
  }
}
