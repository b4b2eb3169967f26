#pragma once

// Integrity-constraint layer: satisfaction of a constraint by a belief
// state, weak/strong satisfaction by a system, the two reduction encodings
// to logical (in)consistency, and the single-database fast path.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcs/equilibria.hpp"
#include "mcs/grounding.hpp"
#include "mcs/kernel.hpp"

namespace mcs {

struct IcCheckResult {
  bool satisfied = true;
  std::optional<Substitution> violation;  // instantiation of the positive part
};

namespace detail {

struct IcEvalContext {
  const BeliefState* state = nullptr;
  const IntegrityConstraint* ic = nullptr;
  std::map<std::string, std::set<std::string>> varDomain;  // universal vars
  std::set<std::string> existentials;
};

inline bool within_domain(const IcEvalContext& cx, const std::string& var,
                          const std::string& constant) {
  auto it = cx.varDomain.find(var);
  if (it == cx.varDomain.end()) return true;
  return it->second.count(constant) > 0;
}

/// Does any atom of `bs` match `pattern` under some extension of theta?
/// Used for existential rescue literals; extra bindings are discarded.
inline bool exists_match(const BeliefSet& bs, const Atom& pattern) {
  for (const Atom& a : bs.atoms) {
    Substitution local;
    if (match_atom(pattern, a, local)) return true;
  }
  return false;
}

/// Once the positive part is fully instantiated by `theta`: true when this
/// instantiation is harmless (a builtin fails or a negated literal holds).
inline bool instantiation_rescued(const IcEvalContext& cx, const Substitution& theta) {
  for (const auto& b : cx.ic->builtins)
    if (!b.holds(theta)) return true;
  for (const auto& lit : cx.ic->negative) {
    Atom inst = substitute(lit.belief.atom, theta);
    const BeliefSet& bs = cx.state->perContext[static_cast<std::size_t>(lit.context)];
    if (inst.ground()) {
      if (bs.contains(Belief::positive(inst))) return true;
    } else {
      // remaining variables are existential singletons
      if (exists_match(bs, inst)) return true;
    }
  }
  return false;
}

/// Depth-first search for a violating instantiation of the positive part.
inline bool find_violation(const IcEvalContext& cx, std::size_t pos, Substitution& theta,
                           Substitution& found) {
  if (pos == cx.ic->positive.size()) {
    if (instantiation_rescued(cx, theta)) return false;
    found = theta;
    return true;
  }
  const ContextLiteral& lit = cx.ic->positive[pos];
  const BeliefSet& bs = cx.state->perContext[static_cast<std::size_t>(lit.context)];
  Atom pattern = substitute(lit.belief.atom, theta);
  for (const Atom& fact : bs.atoms) {
    Substitution saved = theta;
    if (!match_atom(pattern, fact, theta)) continue;
    bool inDomain = true;
    for (const auto& [v, c] : theta)
      if (!saved.count(v) && !within_domain(cx, v, c)) {
        inDomain = false;
        break;
      }
    if (inDomain && find_violation(cx, pos + 1, theta, found)) return true;
    theta = std::move(saved);
  }
  return false;
}

}  // namespace detail

/// Constraint satisfaction by a belief state. Universal variables range over
/// the intersection of the export domains of the contexts querying them
/// (widened with constants mentioned in the constraint); existential
/// singleton variables are satisfied by any matching constant.
inline IcCheckResult ic_satisfied(const MultiContextSystem& m,
                                  const std::vector<std::set<std::string>>& exportDoms,
                                  const std::set<std::string>& injected,
                                  const BeliefState& s, const IntegrityConstraint& ic) {
  for (const auto& lit : ic.positive)
    if (!m.validIndex(lit.context))
      throw InputError("ic literal references missing context");
  for (const auto& lit : ic.negative)
    if (!m.validIndex(lit.context))
      throw InputError("ic literal references missing context");

  detail::IcEvalContext cx;
  cx.state = &s;
  cx.ic = &ic;
  cx.existentials = existential_variables(ic);
  for (auto& [v, dom] : ic_variable_domains(ic, exportDoms, injected))
    cx.varDomain.emplace(v, std::move(dom));

  Substitution theta, found;
  if (detail::find_violation(cx, 0, theta, found)) return {false, std::move(found)};
  return {};
}

inline IcCheckResult ic_satisfied(const MultiContextSystem& m, const BeliefState& s,
                                  const IntegrityConstraint& ic) {
  return ic_satisfied(m, export_domains(m), detail::ic_constants({ic}), s, ic);
}

/// First constraint in `ics` violated by `s`, if any.
inline std::optional<std::pair<std::size_t, Substitution>> first_violated(
    const MultiContextSystem& m, const std::vector<std::set<std::string>>& exportDoms,
    const std::set<std::string>& injected, const BeliefState& s,
    const std::vector<IntegrityConstraint>& ics) {
  for (std::size_t k = 0; k < ics.size(); ++k) {
    auto r = ic_satisfied(m, exportDoms, injected, s, ics[k]);
    if (!r.satisfied) return std::make_pair(k, r.violation.value_or(Substitution{}));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Weak and strong satisfaction

struct SatisfactionVerdict {
  bool holds = false;
  std::optional<BeliefState> witness;       // satisfying equilibrium / counterexample
  std::optional<std::size_t> violatedIc;    // index into the checked set
  std::optional<Substitution> violation;
  bool inconsistent = false;                // no equilibrium at all
};

/// Some equilibrium satisfies every constraint. Streams equilibria and
/// stops at the first satisfying one.
inline SatisfactionVerdict weak_satisfies(const MultiContextSystem& m,
                                          const std::vector<IntegrityConstraint>& ics) {
  auto exp = export_domains(m);
  auto injected = detail::ic_constants(ics);
  SatisfactionVerdict v;
  bool any = false;
  for_each_equilibrium(m, [&](const BeliefState& s) {
    any = true;
    auto bad = first_violated(m, exp, injected, s, ics);
    if (!bad) {
      v.holds = true;
      v.witness = s;
      v.violatedIc.reset();  // drop diagnostics from earlier counterexamples
      v.violation.reset();
      return false;
    }
    if (!v.witness) {  // remember one counterexample for diagnostics
      v.violatedIc = bad->first;
      v.violation = bad->second;
      v.witness = s;
    }
    return true;
  });
  v.inconsistent = !any;
  return v;
}

/// The system is logically consistent and every equilibrium satisfies every
/// constraint. An inconsistent system strongly satisfies nothing. Streams
/// equilibria and stops at the first violating one.
inline SatisfactionVerdict strong_satisfies(const MultiContextSystem& m,
                                            const std::vector<IntegrityConstraint>& ics) {
  auto exp = export_domains(m);
  auto injected = detail::ic_constants(ics);
  SatisfactionVerdict v;
  bool any = false, violated = false;
  for_each_equilibrium(m, [&](const BeliefState& s) {
    any = true;
    auto bad = first_violated(m, exp, injected, s, ics);
    if (bad) {
      violated = true;
      v.violatedIc = bad->first;
      v.violation = bad->second;
      v.witness = s;
      return false;
    }
    if (!v.witness) v.witness = s;
    return true;
  });
  v.inconsistent = !any;
  v.holds = any && !violated;
  return v;
}

// ---------------------------------------------------------------------------
// Reduction encodings

namespace detail {

inline MultiContextSystem encode_with_flag(const MultiContextSystem& m,
                                           const std::vector<IntegrityConstraint>& ics,
                                           FlagLogic::Variant variant) {
  for (const auto& ic : ics) {
    if (!ic.builtins.empty())
      throw CapabilityError("encoding does not support builtin comparisons in constraints");
    if (!existential_variables(ic).empty())
      throw CapabilityError(
          "encoding requires safe constraints (no existential singleton variables)");
  }
  MultiContextSystem out = m;
  Context flag;
  flag.name = "_flag";
  while (out.indexOf(flag.name) >= 0) flag.name += "_";
  flag.logic = std::make_shared<FlagLogic>(variant);
  if (m.managed()) flag.ops = {kOpAdd};
  int flagIdx = out.size();
  // pre-ground: constraint variables range over the export domains of their
  // positive querying contexts, which is wider than the default bridge-rule
  // import domains when a variable also appears under negation
  for (const auto& ic : ground_ics(m, ics)) {
    BridgeRule r;
    r.head.context = flagIdx;
    r.head.op = m.managed() ? kOpAdd : "";
    r.head.element = KBElement::ordinaryToken(kFlagToken);
    r.body = ic.positive;
    for (const auto& lit : ic.negative) r.body.push_back(lit);
    flag.rules.push_back(std::move(r));
  }
  out.contexts.push_back(std::move(flag));
  return out;
}

}  // namespace detail

/// M' consistent iff M weakly satisfies the constraints: a fresh weak-flag
/// context whose bridge rules are the constraints with the flag as head.
inline MultiContextSystem encode_weak(const MultiContextSystem& m,
                                      const std::vector<IntegrityConstraint>& ics) {
  return detail::encode_with_flag(m, ics, FlagLogic::Variant::Weak);
}

/// For consistent M: M strongly satisfies the constraints iff M' is
/// inconsistent. Same construction with the strong-variant flag logic.
inline MultiContextSystem encode_strong(const MultiContextSystem& m,
                                        const std::vector<IntegrityConstraint>& ics) {
  return detail::encode_with_flag(m, ics, FlagLogic::Variant::Strong);
}

// ---------------------------------------------------------------------------
// Single-database fast path

namespace detail {

/// Positional index over a fact base: predicate/arity buckets plus
/// (predicate, position, constant) buckets for bound-argument lookups.
class FactBaseIndex {
 public:
  explicit FactBaseIndex(const std::set<Atom>& db) {
    facts_.assign(db.begin(), db.end());
    for (std::size_t i = 0; i < facts_.size(); ++i) {
      const Atom& a = facts_[i];
      byPred_[predKey(a.predicate, a.arity())].push_back(i);
      for (std::size_t p = 0; p < a.args.size(); ++p)
        byArg_[argKey(a.predicate, a.arity(), p, a.args[p].name)].push_back(i);
      all_.insert(a);
    }
  }

  bool contains(const Atom& a) const { return all_.count(a) > 0; }

  /// Candidate facts for a (partially instantiated) pattern: the bucket of
  /// the first bound argument position, or the whole predicate bucket.
  const std::vector<std::size_t>& candidates(const Atom& pattern) const {
    for (std::size_t p = 0; p < pattern.args.size(); ++p)
      if (pattern.args[p].isConstant()) {
        auto it = byArg_.find(argKey(pattern.predicate, pattern.arity(), p,
                                     pattern.args[p].name));
        return it != byArg_.end() ? it->second : empty_;
      }
    auto it = byPred_.find(predKey(pattern.predicate, pattern.arity()));
    return it != byPred_.end() ? it->second : empty_;
  }

  const Atom& fact(std::size_t i) const { return facts_[i]; }

  bool exists_matching(const Atom& pattern) const {
    for (std::size_t i : candidates(pattern)) {
      Substitution local;
      if (match_atom(pattern, facts_[i], local)) return true;
    }
    return false;
  }

 private:
  static std::string predKey(const std::string& p, int arity) {
    return p + "/" + std::to_string(arity);
  }
  static std::string argKey(const std::string& p, int arity, std::size_t pos,
                            const std::string& c) {
    return p + "/" + std::to_string(arity) + "#" + std::to_string(pos) + "=" + c;
  }

  std::vector<Atom> facts_;
  std::set<Atom> all_;
  std::unordered_map<std::string, std::vector<std::size_t>> byPred_;
  std::unordered_map<std::string, std::vector<std::size_t>> byArg_;
  const std::vector<std::size_t> empty_{};
};

inline bool fastpath_violation(const FactBaseIndex& idx, const IntegrityConstraint& ic,
                               std::size_t pos, Substitution& theta) {
  if (pos == ic.positive.size()) {
    for (const auto& b : ic.builtins)
      if (!b.holds(theta)) return false;
    for (const auto& lit : ic.negative) {
      Atom inst = substitute(lit.belief.atom, theta);
      if (inst.ground() ? idx.contains(inst) : idx.exists_matching(inst)) return false;
    }
    return true;
  }
  Atom pattern = substitute(ic.positive[pos].belief.atom, theta);
  for (std::size_t i : idx.candidates(pattern)) {
    Substitution saved = theta;
    if (match_atom(pattern, idx.fact(i), theta)) {
      if (fastpath_violation(idx, ic, pos + 1, theta)) return true;
      theta = std::move(saved);
    }
  }
  return false;
}

}  // namespace detail

/// Constraint verdict for a single closed-world database context, computed
/// by conjunctive matching against the fact base without grounding. Agrees
/// with weak and strong satisfaction on the induced single-context system.
inline bool db_fastpath_check(const std::set<Atom>& db,
                              const std::vector<IntegrityConstraint>& ics,
                              std::optional<std::pair<std::size_t, Substitution>>* why =
                                  nullptr) {
  detail::FactBaseIndex idx(db);
  for (std::size_t k = 0; k < ics.size(); ++k) {
    const auto& ic = ics[k];
    for (const auto& lit : ic.positive)
      if (lit.context != 0)
        throw InputError("fast path: constraint references context #" +
                         std::to_string(lit.context));
    for (const auto& lit : ic.negative)
      if (lit.context != 0)
        throw InputError("fast path: constraint references context #" +
                         std::to_string(lit.context));
    existential_variables(ic);  // safety check; throws on unsafe constraints
    Substitution theta;
    if (detail::fastpath_violation(idx, ic, 0, theta)) {
      if (why) *why = std::make_pair(k, theta);
      return false;
    }
  }
  return true;
}

}  // namespace mcs
