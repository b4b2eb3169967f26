#pragma once

// Lifts of classical database formalisms into multi-context systems:
// single relational databases, distributed databases, deductive databases,
// and peer-to-peer integration systems (with their weak-model semantics).

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcs/constraints.hpp"
#include "mcs/equilibria.hpp"
#include "mcs/kernel.hpp"

namespace mcs {

// ---------------------------------------------------------------------------
// Single relational database

/// The one-context system generated by a fact base: closed-world logic,
/// kb = db, no bridge rules. Its unique equilibrium is the closed-world
/// completion of the database.
inline MultiContextSystem ctx_of_db(const std::set<Atom>& db,
                                    const std::string& name = "db") {
  Context c;
  c.name = name;
  c.logic = std::make_shared<RelationalDbLogic>(infer_db_signature(db));
  for (const Atom& a : db) {
    if (!a.ground()) throw InputError("database fact is not ground: " + to_string(a));
    c.kb.insert(KBElement::relational(a));
  }
  MultiContextSystem m;
  m.contexts.push_back(std::move(c));
  return m;
}

/// Denial clause over a single schema: A1, ..., Ak, not B1, ..., not Bm plus
/// builtin comparisons, read as "this conjunction must not hold".
struct DenialClause {
  std::vector<Atom> positive;
  std::vector<Atom> negative;
  std::vector<BuiltinAtom> builtins;

  auto operator<=>(const DenialClause&) const = default;
};

/// Literal-by-literal translation of a denial clause into a constraint whose
/// literals all reference `context`. Singleton variables occurring only in a
/// negated atom are legal and read existentially.
inline IntegrityConstraint denial_to_ic(const DenialClause& r, int context = 0) {
  IntegrityConstraint ic;
  for (const Atom& a : r.positive)
    ic.positive.push_back({context, false, Belief::positive(a)});
  for (const Atom& a : r.negative)
    ic.negative.push_back({context, true, Belief::positive(a)});
  ic.builtins = r.builtins;
  existential_variables(ic);  // throws SafetyError on an unsafe clause
  return ic;
}

// ---------------------------------------------------------------------------
// Distributed databases

/// One site of a distributed database. `relations` lists the site's schema
/// (relation name -> arity); when empty it is inferred from the facts.
struct Site {
  std::string name;
  std::set<Atom> facts;
  std::map<std::string, int> relations;
};

/// One closed-world context per site, plus the constraints stating that any
/// relation present in the schemas of two sites has identical extensions:
/// for every ordered pair i != j of sites declaring p,
///   <- (i : p(X1,...,Xn)), not (j : p(X1,...,Xn)).
inline std::pair<MultiContextSystem, std::vector<IntegrityConstraint>> distributed_db(
    const std::vector<Site>& sites) {
  MultiContextSystem m;
  std::map<std::string, int> arity;                 // global relation arities
  std::map<std::string, std::set<int>> declaredAt;  // relation -> site indices

  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Site& s = sites[i];
    std::map<std::string, int> rel = s.relations;
    for (const Atom& a : s.facts) {
      auto [it, fresh] = rel.emplace(a.predicate, a.arity());
      if (!fresh && it->second != a.arity())
        throw InputError("site " + s.name + ": relation " + a.predicate +
                         " used with arities " + std::to_string(it->second) + " and " +
                         std::to_string(a.arity()));
    }
    for (const auto& [p, n] : rel) {
      auto [it, fresh] = arity.emplace(p, n);
      if (!fresh && it->second != n)
        throw InputError("relation " + p + " declared with arity " +
                         std::to_string(it->second) + " and " + std::to_string(n) +
                         " across sites");
      declaredAt[p].insert(static_cast<int>(i));
    }
    Context c;
    c.name = s.name.empty() ? "site" + std::to_string(i) : s.name;
    Signature sig = infer_db_signature(s.facts);
    for (const auto& [p, n] : rel) sig.declareKb(p, n);
    c.logic = std::make_shared<RelationalDbLogic>(std::move(sig));
    for (const Atom& a : s.facts) c.kb.insert(KBElement::relational(a));
    m.contexts.push_back(std::move(c));
  }

  std::vector<IntegrityConstraint> ics;
  for (const auto& [p, where] : declaredAt) {
    if (where.size() < 2) continue;
    Atom pat;
    pat.predicate = p;
    for (int k = 0; k < arity[p]; ++k)
      pat.args.push_back(Term::variable("X" + std::to_string(k + 1)));
    for (int i : where)
      for (int j : where) {
        if (i == j) continue;
        IntegrityConstraint ic;
        ic.positive.push_back({i, false, Belief::positive(pat)});
        ic.negative.push_back({j, true, Belief::positive(pat)});
        ics.push_back(std::move(ic));
      }
  }
  return {std::move(m), std::move(ics)};
}

// ---------------------------------------------------------------------------
// Deductive databases

/// Extensional facts plus definite rules defining a disjoint intensional
/// schema (a single view).
struct DeductiveDB {
  std::set<Atom> facts;
  std::vector<DatalogRule> rules;

  /// Predicates appearing as rule heads; all others are extensional.
  std::set<std::string> intensionalPredicates() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.head.predicate);
    return out;
  }

  void validate() const {
    std::set<std::string> intensional = intensionalPredicates();
    for (const Atom& a : facts) {
      if (!a.ground()) throw InputError("extensional fact is not ground: " + to_string(a));
      if (intensional.count(a.predicate))
        throw InputError("relation " + a.predicate +
                         " is both extensional (has facts) and intensional (has rules)");
    }
    for (const auto& r : rules)
      if (!r.negBody.empty())
        throw CapabilityError("deductive database rules must be definite");
  }
};

inline const std::string kExtensionalContext = "E";
inline const std::string kIntensionalContext = "I";

/// Two-context system induced by a deductive database: context 0 is the
/// extensional store, context 1 holds the view, materialized through one
/// bridge rule per Datalog rule with body atoms routed by their signature.
inline MultiContextSystem deductive_db_to_mcs(const DeductiveDB& d) {
  d.validate();
  std::set<std::string> intensional = d.intensionalPredicates();

  MultiContextSystem m = ctx_of_db(d.facts, kExtensionalContext);
  {
    // extensional predicates mentioned only in rule bodies still belong to
    // the store's schema (e.g. an empty table the rules read from)
    Signature eSig = infer_db_signature(d.facts);
    for (const auto& r : d.rules)
      for (const Atom& b : r.body)
        if (!intensional.count(b.predicate)) eSig.declareKb(b.predicate, b.arity());
    m.contexts[0].logic = std::make_shared<RelationalDbLogic>(std::move(eSig));
  }

  Context viewCtx;
  viewCtx.name = kIntensionalContext;
  Signature viewSig;
  std::set<std::string> consts;
  for (const Atom& a : d.facts) collect_constants(a, consts);
  for (const auto& r : d.rules) {
    viewSig.declareKb(r.head.predicate, r.head.arity());
    collect_constants(r.head, consts);
    for (const Atom& b : r.body) collect_constants(b, consts);
  }
  viewSig.universe = consts;
  viewCtx.logic = std::make_shared<RelationalDbLogic>(std::move(viewSig));

  for (const auto& r : d.rules) {
    BridgeRule br;
    br.head.context = 1;
    br.head.element = KBElement::relational(r.head);
    for (const Atom& b : r.body) {
      int target = intensional.count(b.predicate) ? 1 : 0;
      br.body.push_back({target, false, Belief::positive(b)});
    }
    viewCtx.rules.push_back(std::move(br));
  }
  m.contexts.push_back(std::move(viewCtx));
  return m;
}

/// True iff every constraint literal references the extensional context.
inline bool extensional_only_check(const std::vector<IntegrityConstraint>& ics,
                                   int extensionalIndex = 0) {
  for (const auto& ic : ics) {
    for (const auto& lit : ic.positive)
      if (lit.context != extensionalIndex) return false;
    for (const auto& lit : ic.negative)
      if (lit.context != extensionalIndex) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Peer-to-peer systems

/// Import rule of a peer: head over the peer's mapping signature, body over
/// the schema of one other peer.
struct MappingRule {
  Atom head;
  int sourcePeer = 0;
  std::vector<Atom> body;

  auto operator<=>(const MappingRule&) const = default;
};

/// A peer: extensional facts, definite local rules (which may use imported
/// mapping atoms in bodies), mapping rules, and local denial constraints.
struct Peer {
  std::string name;
  std::set<Atom> facts;
  std::vector<DatalogRule> rules;
  std::vector<MappingRule> mappingRules;
  std::vector<DenialClause> ics;
};

namespace detail {

inline void validate_peers(const std::vector<Peer>& peers) {
  std::map<std::string, int> owner;  // predicate -> peer index
  auto claim = [&](const std::string& pred, int i, const char* what) {
    auto [it, fresh] = owner.emplace(pred, i);
    if (!fresh && it->second != i)
      throw InputError(std::string("predicate ") + pred + " (" + what +
                       ") belongs to both peer " + peers[it->second].name + " and peer " +
                       peers[i].name);
  };
  for (std::size_t i = 0; i < peers.size(); ++i) {
    const Peer& p = peers[i];
    int self = static_cast<int>(i);
    for (const Atom& a : p.facts) claim(a.predicate, self, "extensional");
    for (const auto& r : p.rules) {
      claim(r.head.predicate, self, "intensional");
      if (!r.negBody.empty())
        throw CapabilityError("peer " + p.name + ": rules must be definite");
    }
    for (const auto& mr : p.mappingRules) {
      claim(mr.head.predicate, self, "mapping");
      if (mr.sourcePeer == self)
        throw InputError("peer " + p.name + ": mapping rule for " +
                         to_string(mr.head) + " targets its own peer");
      if (mr.sourcePeer < 0 || mr.sourcePeer >= static_cast<int>(peers.size()))
        throw InputError("peer " + p.name + ": mapping rule references missing peer #" +
                         std::to_string(mr.sourcePeer));
    }
  }
}

/// predicate -> owning peer, per the disjoint-schema convention.
inline std::map<std::string, int> predicate_owner(const std::vector<Peer>& peers) {
  std::map<std::string, int> owner;
  for (std::size_t i = 0; i < peers.size(); ++i) {
    const Peer& p = peers[i];
    int self = static_cast<int>(i);
    for (const Atom& a : p.facts) owner.emplace(a.predicate, self);
    for (const auto& r : p.rules) owner.emplace(r.head.predicate, self);
    for (const auto& mr : p.mappingRules) owner.emplace(mr.head.predicate, self);
  }
  return owner;
}

}  // namespace detail

/// One closed-world context per peer. Local rules become intra-context
/// bridge rules, mapping rules become cross-context bridge rules, and each
/// local denial becomes a constraint over the owning context.
inline std::pair<MultiContextSystem, std::vector<IntegrityConstraint>> p2p_to_mcs(
    const std::vector<Peer>& peers) {
  detail::validate_peers(peers);
  auto owner = detail::predicate_owner(peers);
  auto contextOf = [&](const Atom& a, int fallback) {
    auto it = owner.find(a.predicate);
    return it != owner.end() ? it->second : fallback;
  };

  MultiContextSystem m;
  std::vector<IntegrityConstraint> ics;
  for (std::size_t i = 0; i < peers.size(); ++i) {
    const Peer& p = peers[i];
    int self = static_cast<int>(i);
    Context c;
    c.name = p.name.empty() ? "peer" + std::to_string(i) : p.name;

    Signature sig = infer_db_signature(p.facts);
    std::set<std::string> consts;
    for (const Atom& a : p.facts) collect_constants(a, consts);
    for (const auto& r : p.rules) {
      sig.declareKb(r.head.predicate, r.head.arity());
      collect_constants(r.head, consts);
      for (const Atom& b : r.body) collect_constants(b, consts);
    }
    for (const auto& mr : p.mappingRules) {
      sig.declareKb(mr.head.predicate, mr.head.arity());
      collect_constants(mr.head, consts);
      for (const Atom& b : mr.body) collect_constants(b, consts);
    }
    sig.universe = consts;
    c.logic = std::make_shared<RelationalDbLogic>(std::move(sig));
    for (const Atom& a : p.facts) c.kb.insert(KBElement::relational(a));

    for (const auto& r : p.rules) {
      BridgeRule br;
      br.head.context = self;
      br.head.element = KBElement::relational(r.head);
      for (const Atom& b : r.body)
        br.body.push_back({contextOf(b, self), false, Belief::positive(b)});
      c.rules.push_back(std::move(br));
    }
    for (const auto& mr : p.mappingRules) {
      BridgeRule br;
      br.head.context = self;
      br.head.element = KBElement::relational(mr.head);
      for (const Atom& b : mr.body)
        br.body.push_back({mr.sourcePeer, false, Belief::positive(b)});
      c.rules.push_back(std::move(br));
    }
    for (const auto& d : p.ics) {
      IntegrityConstraint ic;
      for (const Atom& a : d.positive)
        ic.positive.push_back({contextOf(a, self), false, Belief::positive(a)});
      for (const Atom& a : d.negative)
        ic.negative.push_back({contextOf(a, self), true, Belief::positive(a)});
      ic.builtins = d.builtins;
      existential_variables(ic);
      ics.push_back(std::move(ic));
    }
    m.contexts.push_back(std::move(c));
  }
  return {std::move(m), std::move(ics)};
}

// ---------------------------------------------------------------------------
// P2P weak-model semantics

/// Ground program of a P2P system: facts, ground non-mapping rules, and the
/// ground mapping-rule instances kept track of separately so the reduction
/// can drop them.
struct GroundP2PProgram {
  std::set<Atom> facts;
  std::vector<DatalogRule> localRules;
  std::vector<DatalogRule> mappingInstances;
};

namespace detail {

inline std::set<std::string> p2p_constants(const std::vector<Peer>& peers) {
  std::set<std::string> out;
  for (const auto& p : peers) {
    for (const Atom& a : p.facts) collect_constants(a, out);
    for (const auto& r : p.rules) {
      collect_constants(r.head, out);
      for (const Atom& b : r.body) collect_constants(b, out);
    }
    for (const auto& mr : p.mappingRules) {
      collect_constants(mr.head, out);
      for (const Atom& b : mr.body) collect_constants(b, out);
    }
    for (const auto& d : p.ics) {
      for (const Atom& a : d.positive) collect_constants(a, out);
      for (const Atom& a : d.negative) collect_constants(a, out);
    }
  }
  return out;
}

template <typename Emit>
inline void ground_over(const std::set<std::string>& vars,
                        const std::set<std::string>& consts, Substitution& theta,
                        const Emit& emit) {
  std::vector<std::pair<std::string, std::set<std::string>>> doms;
  for (const auto& v : vars) doms.emplace_back(v, consts);
  enumerate_assignments(doms, 0, theta, emit);
}

inline std::set<std::string> rule_vars(const DatalogRule& r) {
  std::set<std::string> vars = variables_of(r.head);
  for (const Atom& b : r.body) collect_variables(b, vars);
  return vars;
}

}  // namespace detail

/// Grounds the union of all peers' facts and rules over the system's
/// constants. Mapping instances are kept apart from local rule instances.
inline GroundP2PProgram p2p_ground_program(const std::vector<Peer>& peers) {
  detail::validate_peers(peers);
  std::set<std::string> consts = detail::p2p_constants(peers);
  GroundP2PProgram out;
  std::set<DatalogRule> localSeen, mapSeen;
  auto groundInto = [&](const DatalogRule& r, std::set<DatalogRule>& seen,
                        std::vector<DatalogRule>& bucket) {
    Substitution theta;
    detail::ground_over(detail::rule_vars(r), consts, theta, [&](const Substitution& th) {
      DatalogRule g;
      g.head = substitute(r.head, th);
      for (const Atom& b : r.body) g.body.push_back(substitute(b, th));
      if (seen.insert(g).second) bucket.push_back(std::move(g));
    });
  };
  for (const auto& p : peers) {
    for (const Atom& a : p.facts) out.facts.insert(a);
    for (const auto& r : p.rules) groundInto(r, localSeen, out.localRules);
    for (const auto& mr : p.mappingRules) {
      DatalogRule r;
      r.head = mr.head;
      r.body = mr.body;
      groundInto(r, mapSeen, out.mappingInstances);
    }
  }
  return out;
}

/// The reduced ground program: all facts and local rule instances, plus only
/// those mapping-rule instances whose head belongs to the interpretation.
inline GroundP2PProgram p2p_reduced_program(const std::vector<Peer>& peers,
                                            const std::set<Atom>& interpretation) {
  GroundP2PProgram g = p2p_ground_program(peers);
  std::vector<DatalogRule> kept;
  for (auto& r : g.mappingInstances)
    if (interpretation.count(r.head)) kept.push_back(std::move(r));
  g.mappingInstances = std::move(kept);
  return g;
}

inline std::set<Atom> p2p_program_model(const GroundP2PProgram& g) {
  std::vector<DatalogRule> rules = g.localRules;
  rules.insert(rules.end(), g.mappingInstances.begin(), g.mappingInstances.end());
  return minimal_model(g.facts, rules);
}

/// Does the interpretation satisfy every peer's local denial constraints?
inline bool p2p_ics_satisfied(const std::vector<Peer>& peers,
                              const std::set<Atom>& interpretation) {
  std::set<std::string> consts = detail::p2p_constants(peers);
  for (const auto& p : peers)
    for (const auto& d : p.ics) {
      std::set<std::string> vars;
      for (const Atom& a : d.positive) collect_variables(a, vars);
      for (const Atom& a : d.negative) collect_variables(a, vars);
      bool violated = false;
      Substitution theta;
      detail::ground_over(vars, consts, theta, [&](const Substitution& th) {
        if (violated) return;
        for (const Atom& a : d.positive)
          if (!interpretation.count(substitute(a, th))) return;
        for (const auto& b : d.builtins)
          if (!b.holds(th)) return;
        for (const Atom& a : d.negative)
          if (interpretation.count(substitute(a, th))) return;
        violated = true;
      });
      if (violated) return false;
    }
  return true;
}

/// All weak models: interpretations I that equal the minimal model of the
/// program reduced by I and satisfy every local constraint. Found by
/// searching subsets of ground mapping instances to disable.
inline std::vector<std::set<Atom>> p2p_weak_models(const std::vector<Peer>& peers) {
  GroundP2PProgram g = p2p_ground_program(peers);
  const std::size_t n = g.mappingInstances.size();
  if (n > 20)
    throw CapabilityError("weak-model search over " + std::to_string(n) +
                          " ground mapping instances exceeds the supported limit of 20");
  std::set<std::set<Atom>> models;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    GroundP2PProgram candidate;
    candidate.facts = g.facts;
    candidate.localRules = g.localRules;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::uint64_t{1} << k))
        candidate.mappingInstances.push_back(g.mappingInstances[k]);
    std::set<Atom> model = p2p_program_model(candidate);
    // fixpoint test: the reduction induced by the model reproduces it
    GroundP2PProgram reduced;
    reduced.facts = g.facts;
    reduced.localRules = g.localRules;
    for (const auto& r : g.mappingInstances)
      if (model.count(r.head)) reduced.mappingInstances.push_back(r);
    if (p2p_program_model(reduced) != model) continue;
    if (!p2p_ics_satisfied(peers, model)) continue;
    models.insert(std::move(model));
  }
  return {models.begin(), models.end()};
}

/// Belief state corresponding to an interpretation, atoms routed to the peer
/// owning their predicate.
inline BeliefState p2p_state_of(const std::vector<Peer>& peers,
                                const std::set<Atom>& interpretation) {
  auto owner = detail::predicate_owner(peers);
  BeliefState s;
  s.perContext.resize(peers.size());
  for (auto& bs : s.perContext) bs.closedWorld = true;
  for (const Atom& a : interpretation) {
    auto it = owner.find(a.predicate);
    if (it == owner.end())
      throw InputError("interpretation atom " + to_string(a) + " belongs to no peer");
    s.perContext[static_cast<std::size_t>(it->second)].atoms.insert(a);
  }
  return s;
}

}  // namespace mcs
