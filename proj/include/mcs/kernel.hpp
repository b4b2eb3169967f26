#pragma once

// Domain types for relational multi-context systems: context-qualified
// literals, bridge rules, integrity constraints, contexts, the system
// itself, belief states, and structural validation.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcs/core.hpp"
#include "mcs/logics.hpp"

namespace mcs {

// ---------------------------------------------------------------------------
// Literals, bridge rules, integrity constraints

/// (c:p) or not (c:p): a belief queried in context `context`, possibly
/// non-ground; `negated` is the negation-as-failure marker.
struct ContextLiteral {
  int context = 0;
  bool negated = false;
  Belief belief;

  auto operator<=>(const ContextLiteral&) const = default;
};

inline std::set<std::string> variables_of(const ContextLiteral& lit) {
  if (lit.belief.kind == BeliefKind::Ordinary) return {};
  return variables_of(lit.belief.atom);
}

/// Syntactic equality / inequality test over terms, evaluated on constants
/// after instantiation. Allowed in integrity-constraint bodies only.
struct BuiltinAtom {
  Term lhs;
  Term rhs;
  bool equal = true;

  bool holds(const Substitution& theta) const {
    Term a = substitute(lhs, theta);
    Term b = substitute(rhs, theta);
    if (a.isVariable() || b.isVariable())
      throw InputError("builtin comparison on unbound variable");
    return (a.name == b.name) == equal;
  }

  auto operator<=>(const BuiltinAtom&) const = default;
};

/// Headless denial over context-qualified relational literals. Satisfied by
/// a belief state when no instantiation makes all positive literals true,
/// all builtins hold and all negated literals false.
struct IntegrityConstraint {
  std::vector<ContextLiteral> positive;   // negated == false
  std::vector<ContextLiteral> negative;   // negated == true
  std::vector<BuiltinAtom> builtins;

  auto operator<=>(const IntegrityConstraint&) const = default;
};

/// Head of a bridge rule. `op` is empty for plain systems; managed systems
/// carry the operation name interpreted by the target's management function.
struct RuleHead {
  int context = 0;
  std::string op;
  KBElement element;

  auto operator<=>(const RuleHead&) const = default;
};

struct BridgeRule {
  RuleHead head;
  std::vector<ContextLiteral> body;
  std::string name;  // informational; not part of rule identity

  bool ground() const {
    if (!head.element.ordinary && !head.element.atom.ground()) return false;
    for (const auto& lit : body)
      if (lit.belief.kind != BeliefKind::Ordinary && !lit.belief.atom.ground()) return false;
    return true;
  }

  friend bool operator==(const BridgeRule& a, const BridgeRule& b) {
    return a.head == b.head && a.body == b.body;
  }
  friend auto operator<=>(const BridgeRule& a, const BridgeRule& b) {
    if (auto c = a.head <=> b.head; c != 0) return c;
    return a.body <=> b.body;
  }
};

// ---------------------------------------------------------------------------
// Contexts and systems

/// Management function: a set of (operation, element) pairs plus the current
/// knowledge base yields the updated knowledge base.
using ManagementFn = std::function<KnowledgeBase(
    const std::set<std::pair<std::string, KBElement>>&, const KnowledgeBase&)>;

inline const std::string kOpAdd = "add";
inline const std::string kOpRemove = "remove";
inline const std::string kOpReplace = "replace";

/// Built-in management semantics. Replaces are applied first (drop every
/// element with the same predicate, arity and first argument, then insert),
/// then adds, then removes. Predicates listed in `keyedPredicates` get
/// replace semantics for plain adds as well.
inline ManagementFn make_builtin_mng(std::set<std::string> keyedPredicates = {}) {
  return [keyed = std::move(keyedPredicates)](
             const std::set<std::pair<std::string, KBElement>>& actions,
             const KnowledgeBase& kb) -> KnowledgeBase {
    KnowledgeBase out = kb;
    auto eraseKeyMatches = [&out](const Atom& a) {
      for (auto it = out.begin(); it != out.end();) {
        if (!it->ordinary && it->atom.predicate == a.predicate &&
            it->atom.arity() == a.arity() && !a.args.empty() &&
            it->atom.args[0] == a.args[0])
          it = out.erase(it);
        else
          ++it;
      }
    };
    for (const auto& [op, elem] : actions)
      if (!(op.empty() || op == kOpAdd || op == kOpRemove || op == kOpReplace))
        throw ActionError("unknown operation '" + op + "'");
    for (const auto& [op, elem] : actions) {
      bool keyedAdd = (op == kOpAdd || op.empty()) && !elem.ordinary &&
                      keyed.count(elem.atom.predicate) > 0;
      if (op == kOpReplace || keyedAdd) {
        if (elem.ordinary) throw ActionError("replace: ordinary element " + elem.token);
        eraseKeyMatches(elem.atom);
        out.insert(elem);
      } else if (op == kOpAdd || op.empty()) {
        out.insert(elem);
      }
    }
    for (const auto& [op, elem] : actions)
      if (op == kOpRemove) out.erase(elem);
    return out;
  };
}

struct Context {
  std::string name;
  LogicPtr logic;
  KnowledgeBase kb;
  std::vector<BridgeRule> rules;  // rules whose head targets this context
  std::map<int, std::set<std::string>> importDomains;  // explicit overrides, j -> constants

  // Managed layer. Empty `ops` means the context is unmanaged.
  std::set<std::string> ops;
  ManagementFn mng;  // null: built-in add/remove semantics

  bool managed() const { return !ops.empty(); }
};

struct MultiContextSystem {
  std::vector<Context> contexts;

  int size() const { return static_cast<int>(contexts.size()); }

  bool validIndex(int i) const { return i >= 0 && i < size(); }

  int indexOf(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (contexts[i].name == name) return i;
    return -1;
  }

  bool managed() const {
    for (const auto& c : contexts)
      if (c.managed()) return true;
    return false;
  }
};

/// One belief set per context, same index set as the system.
struct BeliefState {
  std::vector<BeliefSet> perContext;

  auto operator<=>(const BeliefState&) const = default;
};

// ---------------------------------------------------------------------------
// Safety

/// Every variable occurring in a negated body literal must also occur in a
/// positive body literal.
inline bool check_safety(const BridgeRule& rule) {
  std::set<std::string> positiveVars;
  for (const auto& lit : rule.body)
    if (!lit.negated)
      for (const auto& v : variables_of(lit)) positiveVars.insert(v);
  for (const auto& lit : rule.body)
    if (lit.negated)
      for (const auto& v : variables_of(lit))
        if (!positiveVars.count(v)) return false;
  return true;
}

/// IC safety: variables of negated literals occur positively, except
/// singleton variables used exactly once in the whole constraint (treated
/// existentially). Builtin variables must occur positively.
inline bool check_ic_safety(const IntegrityConstraint& ic,
                            std::set<std::string>* existentials = nullptr) {
  std::set<std::string> positiveVars;
  std::map<std::string, int> uses;
  for (const auto& lit : ic.positive)
    for (const auto& v : variables_of(lit)) {
      positiveVars.insert(v);
      ++uses[v];
    }
  for (const auto& lit : ic.negative)
    for (const auto& t : lit.belief.atom.args)
      if (t.isVariable()) ++uses[t.name];
  for (const auto& b : ic.builtins)
    for (const Term* t : {&b.lhs, &b.rhs})
      if (t->isVariable()) {
        ++uses[t->name];
        if (!positiveVars.count(t->name)) return false;
      }
  for (const auto& lit : ic.negative)
    for (const auto& v : variables_of(lit)) {
      if (positiveVars.count(v)) continue;
      if (uses[v] == 1) {
        if (existentials) existentials->insert(v);
      } else {
        return false;
      }
    }
  return true;
}

inline std::set<std::string> existential_variables(const IntegrityConstraint& ic) {
  std::set<std::string> ex;
  if (!check_ic_safety(ic, &ex))
    throw SafetyError("unsafe integrity constraint: non-singleton unbound variable");
  return ex;
}

// ---------------------------------------------------------------------------
// Structural validation

struct Violation {
  std::string code;
  std::string message;

  auto operator<=>(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
};

namespace detail {

inline void check_literal(const MultiContextSystem& m, const ContextLiteral& lit,
                          const std::string& where, ValidationReport& rep) {
  if (!m.validIndex(lit.context)) {
    rep.violations.push_back(
        {"dangling-context", where + ": literal references missing context #" +
                                 std::to_string(lit.context)});
    return;
  }
  if (lit.belief.kind == BeliefKind::Ordinary) return;
  const Signature& sig = m.contexts[lit.context].logic->signature();
  const Atom& a = lit.belief.atom;
  if (!sig.beliefPredicates.empty() && !sig.beliefDeclared(a.predicate, a.arity()))
    rep.violations.push_back(
        {"arity-mismatch", where + ": " + to_string(a) + " does not match a declared " +
                               "belief predicate of context " + m.contexts[lit.context].name});
}

}  // namespace detail

/// Reports every arity mismatch, dangling context index, signature-overlap
/// violation and unsafe rule. The system is valid iff the report is empty.
inline ValidationReport validate_mcs(const MultiContextSystem& m,
                                     const std::vector<IntegrityConstraint>& ics = {}) {
  ValidationReport rep;
  std::set<std::string> names;
  std::set<std::string> allVariables;
  std::set<std::string> allConstantsAndPreds;

  for (int i = 0; i < m.size(); ++i) {
    const Context& ctx = m.contexts[i];
    if (!ctx.logic) {
      rep.violations.push_back({"missing-logic", "context " + ctx.name + " has no logic"});
      continue;
    }
    if (!names.insert(ctx.name).second)
      rep.violations.push_back({"duplicate-name", "duplicate context name " + ctx.name});

    const Signature& sig = ctx.logic->signature();
    for (const auto& [p, _] : sig.kbPredicates) {
      allConstantsAndPreds.insert(p);
      if (sig.universe.count(p))
        rep.violations.push_back(
            {"signature-overlap", "context " + ctx.name + ": '" + p +
                                      "' is both a predicate and a universe constant"});
    }
    for (const auto& [p, _] : sig.beliefPredicates) {
      allConstantsAndPreds.insert(p);
      if (sig.universe.count(p))
        rep.violations.push_back(
            {"signature-overlap", "context " + ctx.name + ": '" + p +
                                      "' is both a predicate and a universe constant"});
    }
    for (const auto& c : sig.universe) allConstantsAndPreds.insert(c);

    for (const auto& e : ctx.kb) {
      if (e.ordinary) continue;
      if (!e.atom.ground())
        rep.violations.push_back(
            {"non-ground-kb", "context " + ctx.name + ": kb element " + to_string(e.atom)});
      if (!sig.kbPredicates.empty() && !sig.kbDeclared(e.atom.predicate, e.atom.arity()))
        rep.violations.push_back(
            {"arity-mismatch", "context " + ctx.name + ": kb element " + to_string(e.atom) +
                                   " does not match a declared kb predicate"});
      collect_constants(e.atom, allConstantsAndPreds);
    }

    for (const auto& rule : ctx.rules) {
      const std::string where = "rule " + (rule.name.empty() ? to_string(rule.head.element)
                                                             : rule.name);
      if (rule.head.context != i)
        rep.violations.push_back(
            {"misfiled-rule", where + ": head targets context #" +
                                  std::to_string(rule.head.context) + " but is filed under " +
                                  ctx.name});
      if (!check_safety(rule))
        rep.violations.push_back({"unsafe-rule", where + ": variable of a negated literal "
                                                         "does not occur positively"});
      if (!rule.head.element.ordinary) {
        const Atom& h = rule.head.element.atom;
        if (!sig.kbPredicates.empty() && !sig.kbDeclared(h.predicate, h.arity()))
          rep.violations.push_back(
              {"arity-mismatch", where + ": head " + to_string(h) +
                                     " does not match a declared kb predicate of " + ctx.name});
        for (const auto& t : h.args)
          if (t.isVariable()) allVariables.insert(t.name);
      }
      if (ctx.managed() && !ctx.ops.count(rule.head.op.empty() ? kOpAdd : rule.head.op))
        rep.violations.push_back({"unknown-op", where + ": head operation '" + rule.head.op +
                                                    "' not registered for " + ctx.name});
      for (const auto& lit : rule.body) {
        detail::check_literal(m, lit, where, rep);
        for (const auto& v : variables_of(lit)) allVariables.insert(v);
      }
    }

    for (const auto& [j, dom] : ctx.importDomains) {
      if (!m.validIndex(j)) {
        rep.violations.push_back(
            {"dangling-context", "context " + ctx.name + ": import domain for missing "
                                                         "context #" + std::to_string(j)});
        continue;
      }
      const Signature& exporterSig = m.contexts[j].logic->signature();
      if (!exporterSig.universe.empty())
        for (const auto& c : dom)
          if (!exporterSig.universe.count(c))
            rep.violations.push_back(
                {"domain-overflow", "context " + ctx.name + ": import domain constant '" + c +
                                        "' outside universe of " + m.contexts[j].name});
    }
  }

  for (std::size_t k = 0; k < ics.size(); ++k) {
    const std::string where = "ic #" + std::to_string(k);
    const IntegrityConstraint& ic = ics[k];
    for (const auto& lit : ic.positive) detail::check_literal(m, lit, where, rep);
    for (const auto& lit : ic.negative) detail::check_literal(m, lit, where, rep);
    for (const auto& lit : ic.positive)
      if (lit.belief.kind == BeliefKind::Ordinary)
        rep.violations.push_back({"ordinary-in-ic", where + ": ordinary element in IC body"});
    for (const auto& lit : ic.negative)
      if (lit.belief.kind == BeliefKind::Ordinary)
        rep.violations.push_back({"ordinary-in-ic", where + ": ordinary element in IC body"});
    if (!check_ic_safety(ic))
      rep.violations.push_back({"unsafe-ic", where + ": unsafe variable used more than once"});
  }

  for (const auto& v : allVariables)
    if (allConstantsAndPreds.count(v))
      rep.violations.push_back(
          {"symbol-clash", "'" + v + "' is used both as a variable and as a constant or "
                                     "predicate name"});
  return rep;
}

// ---------------------------------------------------------------------------
// Signature inference helpers (programmatic construction convenience)

inline Signature infer_db_signature(const std::set<Atom>& db) {
  Signature sig;
  for (const Atom& a : db) {
    sig.declareKb(a.predicate, a.arity());
    collect_constants(a, sig.universe);
  }
  return sig;
}

}  // namespace mcs
