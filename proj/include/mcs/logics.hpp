#pragma once

// Built-in context logics: closed-world relational store, positive Datalog,
// consequence closure (ontology-like), and the two flag logics used by the
// consistency reductions. New logics can be registered under a kind name
// for use from the text format.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mcs/core.hpp"
#include "mcs/datalog.hpp"

namespace mcs {

/// Pluggable semantics of one context. `acceptableBeliefSets` is the ACC
/// function: it maps a knowledge base to the finite set of its models.
/// Implementations must be deterministic in the kb (as a set).
class ContextLogic {
 public:
  explicit ContextLogic(Signature sig = {}) : sig_(std::move(sig)) {}
  virtual ~ContextLogic() = default;

  virtual std::string kind() const = 0;
  virtual std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const = 0;

  /// True when ACC yields at most one belief set for every kb and adding kb
  /// elements never removes beliefs. Enables the joint-fixpoint fast path.
  virtual bool deterministicAcc() const { return false; }

  /// False for plugins whose belief sets cannot be enumerated.
  virtual bool enumerable() const { return true; }

  /// True when beliefs mirror kb elements with no internal derivation
  /// (no local rules or axioms). Used for dependency analysis.
  virtual bool flat() const { return false; }

  /// Constants the logic can introduce on its own (from local rules or
  /// axioms); they seed the context's export domain.
  virtual std::set<std::string> localConstants() const { return {}; }

  const Signature& signature() const { return sig_; }
  Signature& signature() { return sig_; }

 protected:
  Signature sig_;
};

using LogicPtr = std::shared_ptr<const ContextLogic>;

namespace detail {
inline std::set<Atom> relational_atoms(const KnowledgeBase& kb, bool rejectOrdinary,
                                       const char* who) {
  std::set<Atom> atoms;
  for (const auto& e : kb) {
    if (e.ordinary) {
      if (rejectOrdinary)
        throw InputError(std::string(who) + ": ordinary element '" + e.token +
                         "' not supported in this knowledge base");
      continue;
    }
    if (!e.atom.ground())
      throw InputError(std::string(who) + ": non-ground kb element " + to_string(e.atom));
    atoms.insert(e.atom);
  }
  return atoms;
}

inline std::set<std::string> ordinary_tokens(const KnowledgeBase& kb) {
  std::set<std::string> out;
  for (const auto& e : kb)
    if (e.ordinary) out.insert(e.token);
  return out;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-world relational store

/// ACC(kb) = { kb plus implicit negations of everything absent }. The single
/// belief set answers -a as "a not in kb"; the negative part is never
/// materialized.
class RelationalDbLogic final : public ContextLogic {
 public:
  using ContextLogic::ContextLogic;

  std::string kind() const override { return "db"; }
  bool deterministicAcc() const override { return true; }
  bool flat() const override { return true; }

  std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const override {
    BeliefSet s;
    s.closedWorld = true;
    s.atoms = detail::relational_atoms(kb, /*rejectOrdinary=*/true, "relational db");
    return {std::move(s)};
  }
};

// ---------------------------------------------------------------------------
// Positive Datalog

/// ACC(kb) = { least model of facts(kb) under the local rules }. Ordinary
/// tokens pass through untouched.
class DatalogLogic final : public ContextLogic {
 public:
  explicit DatalogLogic(std::vector<DatalogRule> rules = {}, Signature sig = {})
      : ContextLogic(std::move(sig)), rules_(std::move(rules)) {}

  std::string kind() const override { return "datalog"; }
  bool deterministicAcc() const override { return true; }
  bool flat() const override { return rules_.empty(); }
  const std::vector<DatalogRule>& rules() const { return rules_; }

  std::set<std::string> localConstants() const override {
    std::set<std::string> out;
    for (const auto& r : rules_) {
      collect_constants(r.head, out);
      for (const auto& a : r.body) collect_constants(a, out);
    }
    return out;
  }

  std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const override {
    BeliefSet s;
    s.atoms = minimal_model(detail::relational_atoms(kb, false, "datalog"), rules_);
    s.ordinary = detail::ordinary_tokens(kb);
    return {std::move(s)};
  }

 private:
  std::vector<DatalogRule> rules_;
};

// ---------------------------------------------------------------------------
// Consequence closure

/// Horn implication with an optional negative head, a stand-in for a
/// terminological axiom: body_1, ..., body_n -> [-]head.
struct HornAxiom {
  std::vector<Atom> body;
  Atom head;
  bool negativeHead = false;

  auto operator<=>(const HornAxiom&) const = default;
};

/// ACC(kb) = { deductive closure of kb under the axioms }, open world: the
/// closure may contain neither a nor -a. A derived clash a / -a means the kb
/// has no acceptable belief set.
class ClosureLogic final : public ContextLogic {
 public:
  explicit ClosureLogic(std::vector<HornAxiom> axioms = {}, Signature sig = {})
      : ContextLogic(std::move(sig)), axioms_(std::move(axioms)) {
    for (const auto& ax : axioms_) {
      std::set<std::string> bodyVars;
      for (const auto& a : ax.body) collect_variables(a, bodyVars);
      for (const auto& v : variables_of(ax.head))
        if (!bodyVars.count(v))
          throw CapabilityError("closure: head variable " + v + " unbound in axiom");
    }
  }

  std::string kind() const override { return "closure"; }
  bool deterministicAcc() const override { return true; }
  bool flat() const override { return axioms_.empty(); }
  const std::vector<HornAxiom>& axioms() const { return axioms_; }

  std::set<std::string> localConstants() const override {
    std::set<std::string> out;
    for (const auto& ax : axioms_) {
      collect_constants(ax.head, out);
      for (const auto& a : ax.body) collect_constants(a, out);
    }
    return out;
  }

  std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const override {
    BeliefSet s;
    s.atoms = detail::relational_atoms(kb, false, "closure");
    s.ordinary = detail::ordinary_tokens(kb);
    // saturate to a fixpoint; bodies are matched against positive beliefs
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& ax : axioms_) {
        std::vector<Atom> derived;
        Substitution theta;
        saturate(ax, 0, s.atoms, theta, derived);
        for (Atom& a : derived) {
          auto& target = ax.negativeHead ? s.negatives : s.atoms;
          if (target.insert(std::move(a)).second) changed = true;
        }
      }
    }
    for (const Atom& a : s.atoms)
      if (s.negatives.count(a)) return {};  // clash: no acceptable belief set
    return {std::move(s)};
  }

 private:
  static void saturate(const HornAxiom& ax, std::size_t pos, const std::set<Atom>& atoms,
                       Substitution& theta, std::vector<Atom>& out) {
    if (pos == ax.body.size()) {
      out.push_back(substitute(ax.head, theta));
      return;
    }
    for (const Atom& fact : atoms) {
      Substitution saved = theta;
      if (match_atom(ax.body[pos], fact, theta)) {
        saturate(ax, pos + 1, atoms, theta, out);
        theta = std::move(saved);
      }
    }
  }

  std::vector<HornAxiom> axioms_;
};

// ---------------------------------------------------------------------------
// First-order models

/// ACC(kb) = every subset of the ground-atom space that contains kb, i.e.
/// all models of a conjunction of positive facts. The space is spanned by
/// the signature's belief predicates over its universe; both must be
/// declared and small enough to enumerate.
class FolLogic final : public ContextLogic {
 public:
  using ContextLogic::ContextLogic;

  std::string kind() const override { return "fol"; }

  std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const override {
    std::set<Atom> required = detail::relational_atoms(kb, /*rejectOrdinary=*/true, "fol");
    std::vector<Atom> free;
    for (const Atom& a : atomSpace()) {
      if (required.count(a)) continue;
      free.push_back(a);
    }
    for (const Atom& a : required)
      if (!inSpace(a))
        throw InputError("fol: kb element " + to_string(a) +
                         " is outside the declared atom space");
    if (free.size() > 20)
      throw CapabilityError("fol: atom space leaves " + std::to_string(free.size()) +
                            " free atoms; at most 20 are enumerable");
    std::vector<BeliefSet> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
      BeliefSet s;
      s.atoms = required;
      for (std::size_t k = 0; k < free.size(); ++k)
        if (mask & (std::uint64_t{1} << k)) s.atoms.insert(free[k]);
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::vector<Atom> atomSpace() const {
    std::vector<Atom> space;
    for (const auto& [pred, arities] : sig_.beliefPredicates)
      for (int arity : arities) {
        std::vector<Atom> partial{Atom{pred, {}}};
        for (int k = 0; k < arity; ++k) {
          std::vector<Atom> next;
          for (const Atom& a : partial)
            for (const auto& c : sig_.universe) {
              Atom b = a;
              b.args.push_back(Term::constant(c));
              next.push_back(std::move(b));
            }
          partial = std::move(next);
        }
        space.insert(space.end(), partial.begin(), partial.end());
      }
    return space;
  }

  bool inSpace(const Atom& a) const {
    if (!sig_.beliefDeclared(a.predicate, a.arity())) return false;
    for (const Term& t : a.args)
      if (!sig_.universe.count(t.name)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Flag logics (consistency reductions)

inline const std::string kFlagToken = "*";

/// Two-valued logic over kb universe {{}, {*}} used by the reduction
/// encodings. Weak variant: ACC({}) = {{}}, ACC({*}) = {}. Strong variant:
/// ACC({}) = {}, ACC({*}) = {{*}}.
class FlagLogic final : public ContextLogic {
 public:
  enum class Variant { Weak, Strong };

  explicit FlagLogic(Variant v) : variant_(v) {}

  std::string kind() const override {
    return variant_ == Variant::Weak ? "flag_weak" : "flag_strong";
  }
  Variant variant() const { return variant_; }

  std::vector<BeliefSet> acceptableBeliefSets(const KnowledgeBase& kb) const override {
    bool hasStar = false;
    for (const auto& e : kb) {
      if (!e.ordinary || e.token != kFlagToken)
        throw InputError("flag logic: unexpected kb element " + to_string(e));
      hasStar = true;
    }
    if (variant_ == Variant::Weak) {
      if (hasStar) return {};
      return {BeliefSet{}};
    }
    if (!hasStar) return {};
    BeliefSet s;
    s.ordinary.insert(kFlagToken);
    return {std::move(s)};
  }

 private:
  Variant variant_;
};

// ---------------------------------------------------------------------------
// Registry (text-format kinds and user plugins)

class LogicRegistry {
 public:
  /// Factory gets the context's local rule/axiom text already parsed into
  /// datalog rules and horn axioms; a factory may ignore what it cannot use.
  using Factory =
      std::function<LogicPtr(std::vector<DatalogRule>, std::vector<HornAxiom>, Signature)>;

  static LogicRegistry& instance() {
    static LogicRegistry reg;
    return reg;
  }

  void add(const std::string& kind, Factory f) {
    std::lock_guard<std::mutex> lock(mu_);
    factories_[kind] = std::move(f);
  }

  LogicPtr make(const std::string& kind, std::vector<DatalogRule> rules,
                std::vector<HornAxiom> axioms, Signature sig) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = factories_.find(kind);
    if (it == factories_.end()) throw CapabilityError("unknown logic kind '" + kind + "'");
    return it->second(std::move(rules), std::move(axioms), std::move(sig));
  }

  bool known(const std::string& kind) const {
    std::lock_guard<std::mutex> lock(mu_);
    return factories_.count(kind) > 0;
  }

 private:
  LogicRegistry() {
    factories_["db"] = [](auto, auto, Signature sig) {
      return std::make_shared<RelationalDbLogic>(std::move(sig));
    };
    factories_["datalog"] = [](std::vector<DatalogRule> rules, auto, Signature sig) {
      return std::make_shared<DatalogLogic>(std::move(rules), std::move(sig));
    };
    factories_["closure"] = [](auto, std::vector<HornAxiom> axioms, Signature sig) {
      return std::make_shared<ClosureLogic>(std::move(axioms), std::move(sig));
    };
    factories_["fol"] = [](auto, auto, Signature sig) {
      return std::make_shared<FolLogic>(std::move(sig));
    };
    factories_["flag_weak"] = [](auto, auto, Signature) {
      return std::make_shared<FlagLogic>(FlagLogic::Variant::Weak);
    };
    factories_["flag_strong"] = [](auto, auto, Signature) {
      return std::make_shared<FlagLogic>(FlagLogic::Variant::Strong);
    };
  }

  mutable std::mutex mu_;
  std::map<std::string, Factory> factories_;
};

}  // namespace mcs
