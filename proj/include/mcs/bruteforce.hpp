#pragma once

// Independent reference implementations ("oracles") used to cross-check the
// engine: naive Datalog evaluation, exhaustive equilibrium search over
// candidate products, ground-and-check constraint evaluation, direct
// database denial evaluation, exhaustive repair search, and exhaustive
// peer-to-peer weak-model search. Deliberately simple and slow.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mcs/encoders.hpp"
#include "mcs/equilibria.hpp"
#include "mcs/grounding.hpp"
#include "mcs/kernel.hpp"
#include "mcs/repair.hpp"

namespace mcs::oracle {

// ---------------------------------------------------------------------------
// Naive Datalog

/// Least model by naive full-substitution iteration: re-derive everything
/// from scratch each round until nothing new appears.
inline std::set<Atom> naive_minimal_model(const std::set<Atom>& facts,
                                          const std::vector<DatalogRule>& rules) {
  std::set<std::string> consts;
  for (const Atom& f : facts) collect_constants(f, consts);
  for (const auto& r : rules) {
    collect_constants(r.head, consts);
    for (const Atom& b : r.body) collect_constants(b, consts);
  }
  std::set<Atom> model = facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      std::set<std::string> vars = variables_of(r.head);
      for (const Atom& b : r.body) collect_variables(b, vars);
      std::vector<std::pair<std::string, std::set<std::string>>> doms;
      for (const auto& v : vars) doms.emplace_back(v, consts);
      Substitution theta;
      mcs::detail::enumerate_assignments(doms, 0, theta, [&](const Substitution& th) {
        for (const Atom& b : r.body)
          if (!model.count(substitute(b, th))) return;
        if (model.insert(substitute(r.head, th)).second) changed = true;
      });
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Exhaustive equilibrium search

/// All equilibria, found by a different search than the engine's: for every
/// context, collect the ACC images of the kb extended with every subset of
/// its candidate heads; then test every product state against the
/// equilibrium definition.
inline std::vector<BeliefState> brute_force_equilibria(const MultiContextSystem& m) {
  GroundRules ground = ground_bridge_rules(m);
  std::vector<std::vector<BeliefSet>> candidates(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) {
    std::set<AppliedHead> headSet;
    for (const BridgeRule& r : ground[static_cast<std::size_t>(i)])
      headSet.insert({r.head.op, r.head.element});
    std::vector<AppliedHead> heads(headSet.begin(), headSet.end());
    if (heads.size() > 16)
      throw CapabilityError("oracle: context has more than 16 candidate heads");
    std::set<BeliefSet> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << heads.size()); ++mask) {
      std::set<AppliedHead> pick;
      for (std::size_t k = 0; k < heads.size(); ++k)
        if (mask & (std::uint64_t{1} << k)) pick.insert(heads[k]);
      for (auto& bs : m.contexts[static_cast<std::size_t>(i)].logic->acceptableBeliefSets(
               effective_kb(m.contexts[static_cast<std::size_t>(i)], pick)))
        seen.insert(std::move(bs));
    }
    candidates[static_cast<std::size_t>(i)].assign(seen.begin(), seen.end());
  }

  std::size_t product = 1;
  for (const auto& c : candidates) {
    product *= c.empty() ? 1 : c.size();
    if (product > 500000) throw CapabilityError("oracle: candidate product too large");
    if (c.empty()) return {};
  }

  std::set<BeliefState> results;
  BeliefState partial;
  partial.perContext.resize(static_cast<std::size_t>(m.size()));
  std::vector<std::size_t> pick(static_cast<std::size_t>(m.size()), 0);
  for (;;) {
    for (std::size_t i = 0; i < pick.size(); ++i)
      partial.perContext[i] = candidates[i][pick[i]];
    if (mcs::detail::state_matches(m, ground, partial)) results.insert(partial);
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == candidates[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return {results.begin(), results.end()};
}

// ---------------------------------------------------------------------------
// Ground-and-check constraint evaluation

/// Is one ground constraint instance violated by the state? Existential
/// singleton variables (the only ones left after grounding) are checked by
/// scanning the context's positive beliefs for any match.
inline bool ground_instance_violated(const BeliefState& s, const IntegrityConstraint& ic) {
  Substitution empty;
  for (const auto& lit : ic.positive) {
    if (!lit.belief.atom.ground()) return false;  // universal var left unground
    if (!s.perContext[static_cast<std::size_t>(lit.context)].contains(lit.belief))
      return false;
  }
  for (const auto& b : ic.builtins)
    if (!b.holds(empty)) return false;
  for (const auto& lit : ic.negative) {
    const BeliefSet& bs = s.perContext[static_cast<std::size_t>(lit.context)];
    if (lit.belief.atom.ground()) {
      if (bs.contains(lit.belief)) return false;
    } else {
      for (const Atom& a : bs.atoms) {
        Substitution local;
        if (match_atom(lit.belief.atom, a, local)) return false;
      }
    }
  }
  return true;
}

/// State satisfies the constraints iff no ground instance is violated.
inline bool state_satisfies(const MultiContextSystem& m, const BeliefState& s,
                            const std::vector<IntegrityConstraint>& ics) {
  for (const auto& g : ground_ics(m, ics))
    if (ground_instance_violated(s, g)) return false;
  return true;
}

/// Weak satisfaction by exhaustive equilibrium search + ground-and-check.
inline bool brute_force_weak(const MultiContextSystem& m,
                             const std::vector<IntegrityConstraint>& ics) {
  for (const auto& s : brute_force_equilibria(m))
    if (state_satisfies(m, s, ics)) return true;
  return false;
}

/// Strong satisfaction by exhaustive equilibrium search + ground-and-check.
inline bool brute_force_strong(const MultiContextSystem& m,
                               const std::vector<IntegrityConstraint>& ics) {
  auto eq = brute_force_equilibria(m);
  if (eq.empty()) return false;
  for (const auto& s : eq)
    if (!state_satisfies(m, s, ics)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Direct database denial evaluation

/// Denial evaluation straight over the fact base with full-substitution
/// enumeration; no indexes, no belief states. Universal variables range over
/// the database and constraint constants.
inline bool direct_db_check(const std::set<Atom>& db,
                            const std::vector<IntegrityConstraint>& ics) {
  std::set<std::string> consts;
  for (const Atom& a : db) collect_constants(a, consts);
  for (const auto& c : mcs::detail::ic_constants(ics)) consts.insert(c);

  for (const auto& ic : ics) {
    std::set<std::string> existentials = existential_variables(ic);
    std::set<std::string> universals;
    for (const auto& lit : ic.positive)
      for (const auto& v : variables_of(lit)) universals.insert(v);
    std::vector<std::pair<std::string, std::set<std::string>>> doms;
    for (const auto& v : universals) doms.emplace_back(v, consts);

    bool violated = false;
    Substitution theta;
    mcs::detail::enumerate_assignments(doms, 0, theta, [&](const Substitution& th) {
      if (violated) return;
      for (const auto& lit : ic.positive)
        if (!db.count(substitute(lit.belief.atom, th))) return;
      for (const auto& b : ic.builtins)
        if (!b.holds(th)) return;
      for (const auto& lit : ic.negative) {
        Atom inst = substitute(lit.belief.atom, th);
        if (inst.ground()) {
          if (db.count(inst)) return;
        } else {
          for (const Atom& a : db) {  // existential: any match rescues
            Substitution local;
            if (match_atom(inst, a, local)) return;
          }
        }
      }
      violated = true;
    });
    if (violated) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive repair search

/// All subset-minimal repairs of size <= maxSize, by checking every subset
/// of the candidate universe and filtering non-minimal ones afterwards.
inline std::vector<UpdateSet> brute_force_repairs(const MultiContextSystem& m,
                                                  const std::vector<IntegrityConstraint>& ics,
                                                  const RepairOptions& opts = {}) {
  std::vector<UpdateAction> universe = mcs::detail::candidate_universe(m, ics, opts);
  if (universe.size() > 20)
    throw CapabilityError("oracle: candidate universe larger than 20 actions");
  std::vector<UpdateSet> weakRepairs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << universe.size()); ++mask) {
    UpdateSet u;
    for (std::size_t k = 0; k < universe.size(); ++k)
      if (mask & (std::uint64_t{1} << k)) u.insert(universe[k]);
    if (u.size() > opts.maxSize || u.empty()) continue;
    if (is_weak_repair(m, ics, u, opts.mode)) weakRepairs.push_back(std::move(u));
  }
  std::vector<UpdateSet> minimal;
  for (const auto& u : weakRepairs) {
    bool isMinimal = true;
    for (const auto& v : weakRepairs)
      if (v != u && std::includes(u.begin(), u.end(), v.begin(), v.end())) {
        isMinimal = false;
        break;
      }
    if (isMinimal) minimal.push_back(u);
  }
  std::sort(minimal.begin(), minimal.end(), [](const UpdateSet& a, const UpdateSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return minimal;
}

// ---------------------------------------------------------------------------
// Exhaustive peer-to-peer weak models

/// All weak models, by testing every subset of the relevant Herbrand base
/// (facts, ground rule heads) against the fixpoint definition.
inline std::vector<std::set<Atom>> brute_force_p2p_weak_models(
    const std::vector<Peer>& peers) {
  GroundP2PProgram g = p2p_ground_program(peers);
  std::set<Atom> base = g.facts;
  for (const auto& r : g.localRules) base.insert(r.head);
  for (const auto& r : g.mappingInstances) base.insert(r.head);
  std::vector<Atom> atoms(base.begin(), base.end());
  if (atoms.size() > 18)
    throw CapabilityError("oracle: Herbrand base larger than 18 atoms");

  std::set<std::set<Atom>> models;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms.size()); ++mask) {
    std::set<Atom> interp;
    for (std::size_t k = 0; k < atoms.size(); ++k)
      if (mask & (std::uint64_t{1} << k)) interp.insert(atoms[k]);

    GroundP2PProgram reduced;
    reduced.facts = g.facts;
    reduced.localRules = g.localRules;
    for (const auto& r : g.mappingInstances)
      if (interp.count(r.head)) reduced.mappingInstances.push_back(r);
    std::vector<DatalogRule> rules = reduced.localRules;
    rules.insert(rules.end(), reduced.mappingInstances.begin(),
                 reduced.mappingInstances.end());
    if (naive_minimal_model(reduced.facts, rules) != interp) continue;
    if (!p2p_ics_satisfied(peers, interp)) continue;
    models.insert(std::move(interp));
  }
  return {models.begin(), models.end()};
}

}  // namespace mcs::oracle
