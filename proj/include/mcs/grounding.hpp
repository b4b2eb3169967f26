#pragma once

// Import-domain computation and grounding of bridge rules and integrity
// constraints. All functions are pure.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mcs/kernel.hpp"

namespace mcs {

using DomainMap = std::map<std::pair<int, int>, std::set<std::string>>;

namespace detail {

inline void head_constants(const BridgeRule& r, std::set<std::string>& out) {
  if (!r.head.element.ordinary) collect_constants(r.head.element.atom, out);
}

/// Contexts queried by body literals containing variable `var`; the rule's
/// own context when the variable occurs in the head only.
inline std::set<int> querying_contexts(const BridgeRule& r, const std::string& var) {
  std::set<int> out;
  for (const auto& lit : r.body)
    if (variables_of(lit).count(var)) out.insert(lit.context);
  if (out.empty()) out.insert(r.head.context);
  return out;
}

inline std::set<std::string> rule_variables(const BridgeRule& r) {
  std::set<std::string> vars;
  if (!r.head.element.ordinary) collect_variables(r.head.element.atom, vars);
  for (const auto& lit : r.body)
    for (const auto& v : variables_of(lit)) vars.insert(v);
  return vars;
}

}  // namespace detail

/// Constants each context can export: constants of its kb and of its rule
/// heads, closed under import (a ground head instance carries whatever its
/// variables ranged over). Computed as a least fixpoint so that contexts
/// whose elements arrive purely through bridge rules still export the
/// constants they can receive.
inline std::vector<std::set<std::string>> export_domains(const MultiContextSystem& m) {
  std::vector<std::set<std::string>> exp(m.size());
  for (int j = 0; j < m.size(); ++j) {
    for (const auto& e : m.contexts[j].kb)
      if (!e.ordinary) collect_constants(e.atom, exp[j]);
    for (const auto& r : m.contexts[j].rules) detail::head_constants(r, exp[j]);
    for (const auto& c : m.contexts[j].logic->localConstants()) exp[j].insert(c);
  }
  auto effective = [&](int i, int j) -> std::set<std::string> {
    auto it = m.contexts[i].importDomains.find(j);
    if (it != m.contexts[i].importDomains.end()) return it->second;
    return exp[j];
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < m.size(); ++j) {
      for (const auto& r : m.contexts[j].rules) {
        if (r.head.element.ordinary) continue;
        for (const auto& v : variables_of(r.head.element.atom)) {
          std::set<std::string> dom;
          bool first = true;
          for (int c : detail::querying_contexts(r, v)) {
            std::set<std::string> d = effective(j, c);
            if (first) {
              dom = std::move(d);
              first = false;
            } else {
              std::set<std::string> inter;
              for (const auto& x : dom)
                if (d.count(x)) inter.insert(x);
              dom = std::move(inter);
            }
          }
          for (const auto& x : dom)
            if (exp[j].insert(x).second) changed = true;
        }
      }
    }
  }
  return exp;
}

/// Effective import domains for every ordered context pair: the defaults
/// from `export_domains`, with explicit user-supplied domains taking
/// precedence.
inline DomainMap default_import_domains(const MultiContextSystem& m) {
  auto exp = export_domains(m);
  DomainMap out;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      auto it = m.contexts[i].importDomains.find(j);
      out[{i, j}] = it != m.contexts[i].importDomains.end() ? it->second : exp[j];
    }
  return out;
}

namespace detail {

inline BridgeRule substitute(const BridgeRule& r, const Substitution& theta) {
  BridgeRule out = r;
  if (!out.head.element.ordinary)
    out.head.element.atom = mcs::substitute(out.head.element.atom, theta);
  for (auto& lit : out.body)
    if (lit.belief.kind != BeliefKind::Ordinary)
      lit.belief.atom = mcs::substitute(lit.belief.atom, theta);
  return out;
}

template <typename Emit>
inline void enumerate_assignments(
    const std::vector<std::pair<std::string, std::set<std::string>>>& domains,
    std::size_t pos, Substitution& theta, const Emit& emit) {
  if (pos == domains.size()) {
    emit(theta);
    return;
  }
  for (const auto& c : domains[pos].second) {
    theta[domains[pos].first] = c;
    enumerate_assignments(domains, pos + 1, theta, emit);
  }
  theta.erase(domains[pos].first);
}

}  // namespace detail

/// Ground instances of one rule over the given domains. A variable with an
/// empty substitution domain yields zero instances.
inline std::set<BridgeRule> ground_rule(const BridgeRule& rule, const DomainMap& domains) {
  std::vector<std::pair<std::string, std::set<std::string>>> varDomains;
  for (const auto& v : detail::rule_variables(rule)) {
    std::set<std::string> dom;
    bool first = true;
    for (int c : detail::querying_contexts(rule, v)) {
      auto it = domains.find({rule.head.context, c});
      std::set<std::string> d = it != domains.end() ? it->second : std::set<std::string>{};
      if (first) {
        dom = std::move(d);
        first = false;
      } else {
        std::set<std::string> inter;
        for (const auto& x : dom)
          if (d.count(x)) inter.insert(x);
        dom = std::move(inter);
      }
    }
    varDomains.emplace_back(v, std::move(dom));
  }
  std::set<BridgeRule> out;
  Substitution theta;
  detail::enumerate_assignments(varDomains, 0, theta, [&](const Substitution& th) {
    out.insert(detail::substitute(rule, th));
  });
  return out;
}

/// Per-context sets of ground bridge-rule instances, duplicates collapsed.
inline std::vector<std::set<BridgeRule>> ground_bridge_rules(const MultiContextSystem& m) {
  DomainMap domains = default_import_domains(m);
  std::vector<std::set<BridgeRule>> out(m.size());
  for (int i = 0; i < m.size(); ++i) {
    for (const auto& rule : m.contexts[i].rules) {
      if (!check_safety(rule))
        throw SafetyError("cannot ground unsafe rule " +
                          (rule.name.empty() ? to_string(rule.head.element) : rule.name));
      for (auto& g : ground_rule(rule, domains)) out[i].insert(std::move(g));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrity-constraint grounding

namespace detail {

inline IntegrityConstraint substitute(const IntegrityConstraint& ic, const Substitution& th) {
  IntegrityConstraint out = ic;
  for (auto& lit : out.positive) lit.belief.atom = mcs::substitute(lit.belief.atom, th);
  for (auto& lit : out.negative) lit.belief.atom = mcs::substitute(lit.belief.atom, th);
  for (auto& b : out.builtins) {
    b.lhs = mcs::substitute(b.lhs, th);
    b.rhs = mcs::substitute(b.rhs, th);
  }
  return out;
}

inline std::set<std::string> ic_constants(const std::vector<IntegrityConstraint>& ics) {
  std::set<std::string> out;
  for (const auto& ic : ics) {
    for (const auto& lit : ic.positive) collect_constants(lit.belief.atom, out);
    for (const auto& lit : ic.negative) collect_constants(lit.belief.atom, out);
    for (const auto& b : ic.builtins)
      for (const Term* t : {&b.lhs, &b.rhs})
        if (t->isConstant()) out.insert(t->name);
  }
  return out;
}

}  // namespace detail

/// Substitution domains of an IC's universally quantified variables: the
/// intersection of the export domains of the contexts that query each
/// variable positively, widened with constants literally mentioned in the
/// constraint set (so constraints naming fresh constants stay groundable).
/// Existential singleton variables are excluded.
inline std::vector<std::pair<std::string, std::set<std::string>>> ic_variable_domains(
    const IntegrityConstraint& ic, const std::vector<std::set<std::string>>& exp,
    const std::set<std::string>& injected) {
  std::set<std::string> existentials = existential_variables(ic);
  std::map<std::string, std::set<int>> queriedAt;
  for (const auto& lit : ic.positive)
    for (const auto& v : variables_of(lit)) queriedAt[v].insert(lit.context);
  std::vector<std::pair<std::string, std::set<std::string>>> out;
  for (const auto& [v, ctxs] : queriedAt) {
    if (existentials.count(v)) continue;
    std::set<std::string> dom;
    bool first = true;
    for (int c : ctxs) {
      const std::set<std::string>& d = exp.at(static_cast<std::size_t>(c));
      if (first) {
        dom = d;
        first = false;
      } else {
        std::set<std::string> inter;
        for (const auto& x : dom)
          if (d.count(x)) inter.insert(x);
        dom = std::move(inter);
      }
    }
    for (const auto& c : injected) dom.insert(c);
    out.emplace_back(v, std::move(dom));
  }
  return out;
}

/// Ground instances of the given constraints. Universal variables are
/// instantiated over their domains; existential singleton variables are left
/// symbolic and evaluated existentially at satisfaction time.
inline std::vector<IntegrityConstraint> ground_ics(
    const MultiContextSystem& m, const std::vector<IntegrityConstraint>& ics) {
  auto exp = export_domains(m);
  auto injected = detail::ic_constants(ics);
  std::set<IntegrityConstraint> out;
  for (const auto& ic : ics) {
    auto varDomains = ic_variable_domains(ic, exp, injected);
    Substitution theta;
    detail::enumerate_assignments(varDomains, 0, theta, [&](const Substitution& th) {
      out.insert(detail::substitute(ic, th));
    });
  }
  return {out.begin(), out.end()};
}

}  // namespace mcs
