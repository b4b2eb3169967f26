#pragma once

// Shared builders for the test suites: compact construction of atoms,
// contexts, systems and constraints.

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mcs/encoders.hpp"
#include "mcs/kernel.hpp"
#include "mcs/logics.hpp"

namespace mcstest {

using namespace mcs;

inline Term V(std::string n) { return Term::variable(std::move(n)); }
inline Term C(std::string n) { return Term::constant(std::move(n)); }

inline Atom atom(std::string pred, std::vector<Term> args = {}) {
  Atom a;
  a.predicate = std::move(pred);
  a.args = std::move(args);
  return a;
}

/// Ground fact from constant names.
inline Atom fact(std::string pred, std::vector<std::string> consts = {}) {
  return make_atom(std::move(pred), std::move(consts));
}

inline Context db_context(std::string name, std::set<Atom> facts) {
  Context c;
  c.name = std::move(name);
  c.logic = std::make_shared<RelationalDbLogic>(infer_db_signature(facts));
  for (auto& a : facts) c.kb.insert(KBElement::relational(a));
  return c;
}

inline ContextLiteral lit(int ctx, Atom a, bool negated = false) {
  return {ctx, negated, Belief::positive(std::move(a))};
}

inline BridgeRule bridge(int headCtx, Atom head, std::vector<ContextLiteral> body,
                         std::string op = "") {
  BridgeRule r;
  r.head.context = headCtx;
  r.head.op = std::move(op);
  r.head.element = KBElement::relational(std::move(head));
  r.body = std::move(body);
  return r;
}

inline IntegrityConstraint ic(std::vector<ContextLiteral> body,
                              std::vector<BuiltinAtom> builtins = {}) {
  IntegrityConstraint out;
  for (auto& l : body) (l.negated ? out.negative : out.positive).push_back(std::move(l));
  out.builtins = std::move(builtins);
  return out;
}

inline BeliefSet cw(std::set<Atom> atoms) {
  BeliefSet s;
  s.closedWorld = true;
  s.atoms = std::move(atoms);
  return s;
}

/// The transitive-closure two-context system over first-order models:
/// context 0 stores a base relation r, context 1 materializes rt through
/// one copy rule and one recursive composition rule.
inline MultiContextSystem transitive_closure_system() {
  MultiContextSystem m;
  std::set<std::string> universe{"a", "b", "c"};

  Context c1;
  c1.name = "c1";
  Signature s1;
  s1.declareKb("r", 2);
  s1.universe = universe;
  c1.logic = std::make_shared<FolLogic>(std::move(s1));
  c1.kb.insert(KBElement::relational(fact("r", {"a", "b"})));
  c1.kb.insert(KBElement::relational(fact("r", {"b", "c"})));
  m.contexts.push_back(std::move(c1));

  Context c2;
  c2.name = "c2";
  Signature s2;
  s2.declareKb("rt", 2);
  s2.universe = universe;
  c2.logic = std::make_shared<FolLogic>(std::move(s2));
  c2.rules.push_back(bridge(1, atom("rt", {V("X"), V("Y")}),
                            {lit(0, atom("r", {V("X"), V("Y")}))}));
  c2.rules.push_back(bridge(1, atom("rt", {V("X"), V("Y")}),
                            {lit(0, atom("r", {V("X"), V("Z")})),
                             lit(1, atom("rt", {V("Z"), V("Y")}))}));
  m.contexts.push_back(std::move(c2));
  return m;
}

/// Constraint for the transitive-closure system: every derived rt pair must
/// be backed by a base r pair.
inline IntegrityConstraint tc_backing_ic() {
  return ic({lit(1, atom("rt", {V("X"), V("Y")})),
             lit(0, atom("r", {V("X"), V("Y")}), /*negated=*/true)});
}

/// Deterministic pick from a vector.
template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline int rand_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace mcstest
