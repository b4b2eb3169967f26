#pragma once

// Core vocabulary: terms, atoms, knowledge-base elements, beliefs, belief
// sets, signatures. Everything is an immutable value; mutation means
// building a new value.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcs {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates a precondition (malformed kb, bad denial form, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The requested computation is not supported by the logic/plugin involved.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A rule or constraint violates the safety condition.
class SafetyError : public Error {
 public:
  using Error::Error;
};

/// An update action names an operation the target context does not provide.
class ActionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Terms and atoms

enum class TermKind : std::uint8_t { Constant, Variable };

struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;

  static Term constant(std::string n) { return {TermKind::Constant, std::move(n)}; }
  static Term variable(std::string n) { return {TermKind::Variable, std::move(n)}; }

  bool isVariable() const { return kind == TermKind::Variable; }
  bool isConstant() const { return kind == TermKind::Constant; }

  auto operator<=>(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  int arity() const { return static_cast<int>(args.size()); }

  bool ground() const {
    return std::none_of(args.begin(), args.end(),
                        [](const Term& t) { return t.isVariable(); });
  }

  auto operator<=>(const Atom&) const = default;
};

inline Atom make_atom(std::string pred, std::vector<std::string> constants = {}) {
  Atom a;
  a.predicate = std::move(pred);
  for (auto& c : constants) a.args.push_back(Term::constant(std::move(c)));
  return a;
}

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  std::ostringstream os;
  os << a.predicate << '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ',';
    os << a.args[i].name;
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// Substitutions and matching

/// Variable name -> constant name.
using Substitution = std::map<std::string, std::string>;

inline Term substitute(const Term& t, const Substitution& theta) {
  if (t.isVariable()) {
    auto it = theta.find(t.name);
    if (it != theta.end()) return Term::constant(it->second);
  }
  return t;
}

inline Atom substitute(const Atom& a, const Substitution& theta) {
  Atom out;
  out.predicate = a.predicate;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(t, theta));
  return out;
}

inline void collect_variables(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args)
    if (t.isVariable()) out.insert(t.name);
}

inline std::set<std::string> variables_of(const Atom& a) {
  std::set<std::string> out;
  collect_variables(a, out);
  return out;
}

inline void collect_constants(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args)
    if (t.isConstant()) out.insert(t.name);
}

/// Match a (possibly non-ground) pattern against a ground fact, extending
/// `theta` in place. Returns false and leaves `theta` untouched on mismatch.
inline bool match_atom(const Atom& pattern, const Atom& fact, Substitution& theta) {
  if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size())
    return false;
  std::vector<std::pair<std::string, std::string>> added;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const Term& f = fact.args[i];
    if (p.isConstant()) {
      if (p.name != f.name) {
        for (auto& kv : added) theta.erase(kv.first);
        return false;
      }
    } else {
      auto it = theta.find(p.name);
      if (it == theta.end()) {
        theta.emplace(p.name, f.name);
        added.emplace_back(p.name, f.name);
      } else if (it->second != f.name) {
        for (auto& kv : added) theta.erase(kv.first);
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Knowledge base elements and beliefs

/// An element of a context's knowledge base: either a ground relational atom
/// or an opaque ordinary token the logic interprets on its own.
struct KBElement {
  bool ordinary = false;
  Atom atom;          // meaningful when !ordinary
  std::string token;  // meaningful when ordinary

  static KBElement relational(Atom a) {
    KBElement e;
    e.atom = std::move(a);
    return e;
  }
  static KBElement ordinaryToken(std::string t) {
    KBElement e;
    e.ordinary = true;
    e.token = std::move(t);
    return e;
  }

  auto operator<=>(const KBElement&) const = default;
};

inline std::string to_string(const KBElement& e) {
  return e.ordinary ? e.token : to_string(e.atom);
}

using KnowledgeBase = std::set<KBElement>;

enum class BeliefKind : std::uint8_t { Positive, Negative, Ordinary };

/// A belief queried by bridge-rule bodies: a relational atom, its explicit
/// negation (closed-world / closure logics only), or an ordinary token.
struct Belief {
  BeliefKind kind = BeliefKind::Positive;
  Atom atom;          // Positive / Negative
  std::string token;  // Ordinary

  static Belief positive(Atom a) { return {BeliefKind::Positive, std::move(a), {}}; }
  static Belief negative(Atom a) { return {BeliefKind::Negative, std::move(a), {}}; }
  static Belief ordinaryToken(std::string t) { return {BeliefKind::Ordinary, {}, std::move(t)}; }

  auto operator<=>(const Belief&) const = default;
};

inline std::string to_string(const Belief& b) {
  switch (b.kind) {
    case BeliefKind::Negative: return "-" + to_string(b.atom);
    case BeliefKind::Ordinary: return b.token;
    default: return to_string(b.atom);
  }
}

// ---------------------------------------------------------------------------
// Belief sets

/// One context's model. With `closedWorld` set, negative beliefs are implicit
/// (-a holds iff a is absent) and `negatives` stays empty; the completion
/// kb-union-negations is never materialized.
struct BeliefSet {
  bool closedWorld = false;
  std::set<Atom> atoms;
  std::set<Atom> negatives;
  std::set<std::string> ordinary;

  bool contains(const Belief& b) const {
    switch (b.kind) {
      case BeliefKind::Positive:
        return atoms.count(b.atom) > 0;
      case BeliefKind::Negative:
        return closedWorld ? atoms.count(b.atom) == 0 : negatives.count(b.atom) > 0;
      case BeliefKind::Ordinary:
        return ordinary.count(b.token) > 0;
    }
    return false;
  }

  auto operator<=>(const BeliefSet&) const = default;
};

// ---------------------------------------------------------------------------
// Signatures

/// First-order part of a context's language: declared kb predicates, belief
/// predicates (arity-overloading allowed: p/2 and p/3 are distinct) and the
/// universe of object constants.
struct Signature {
  std::map<std::string, std::set<int>> kbPredicates;
  std::map<std::string, std::set<int>> beliefPredicates;
  std::set<std::string> universe;

  void declareKb(const std::string& pred, int arity) {
    kbPredicates[pred].insert(arity);
    beliefPredicates[pred].insert(arity);  // kb-derived beliefs are queryable
  }
  void declareBelief(const std::string& pred, int arity) {
    beliefPredicates[pred].insert(arity);
  }

  bool kbDeclared(const std::string& pred, int arity) const {
    auto it = kbPredicates.find(pred);
    return it != kbPredicates.end() && it->second.count(arity) > 0;
  }
  bool beliefDeclared(const std::string& pred, int arity) const {
    auto it = beliefPredicates.find(pred);
    return it != beliefPredicates.end() && it->second.count(arity) > 0;
  }
};

}  // namespace mcs
