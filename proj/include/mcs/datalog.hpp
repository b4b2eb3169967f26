#pragma once

// Definite Datalog evaluation: least Herbrand model via semi-naive
// bottom-up iteration.

#include <map>
#include <set>
#include <vector>

#include "mcs/core.hpp"

namespace mcs {

struct DatalogRule {
  Atom head;
  std::vector<Atom> body;
  std::vector<Atom> negBody;  // rejected by minimal_model; carried for diagnostics

  auto operator<=>(const DatalogRule&) const = default;
};

inline std::string to_string(const DatalogRule& r) {
  std::string s = to_string(r.head);
  if (!r.body.empty() || !r.negBody.empty()) {
    s += " :- ";
    bool first = true;
    for (const auto& a : r.body) {
      if (!first) s += ", ";
      s += to_string(a);
      first = false;
    }
    for (const auto& a : r.negBody) {
      if (!first) s += ", ";
      s += "not " + to_string(a);
      first = false;
    }
  }
  return s;
}

namespace detail {

using FactIndex = std::map<std::string, std::vector<Atom>>;

inline void index_fact(FactIndex& idx, const Atom& a) { idx[a.predicate].push_back(a); }

/// Joins body literals left to right. The literal at `pivot` is matched
/// against the delta index, literals before it against the old index and
/// literals after it against the full index (classic semi-naive split).
inline void join_rule(const DatalogRule& rule, std::size_t pos, std::size_t pivot,
                      const FactIndex& oldIdx, const FactIndex& deltaIdx,
                      const FactIndex& fullIdx, Substitution& theta,
                      std::vector<Atom>& out) {
  if (pos == rule.body.size()) {
    out.push_back(substitute(rule.head, theta));
    return;
  }
  const FactIndex& idx = pos == pivot ? deltaIdx : (pos < pivot ? oldIdx : fullIdx);
  auto it = idx.find(rule.body[pos].predicate);
  if (it == idx.end()) return;
  for (const Atom& fact : it->second) {
    Substitution saved = theta;
    if (match_atom(rule.body[pos], fact, theta)) {
      join_rule(rule, pos + 1, pivot, oldIdx, deltaIdx, fullIdx, theta, out);
      theta = std::move(saved);
    }
  }
}

}  // namespace detail

/// Least Herbrand model of `facts` under the definite rules `rules`.
/// Rules must be range-restricted (head variables bound in the body).
inline std::set<Atom> minimal_model(const std::set<Atom>& facts,
                                    const std::vector<DatalogRule>& rules) {
  for (const auto& r : rules) {
    if (!r.negBody.empty())
      throw CapabilityError("minimal_model: negation in rule body is not supported: " +
                            to_string(r));
    std::set<std::string> bodyVars;
    for (const auto& a : r.body) collect_variables(a, bodyVars);
    for (const auto& v : variables_of(r.head))
      if (!bodyVars.count(v))
        throw InputError("minimal_model: head variable " + v + " unbound in rule " +
                         to_string(r));
  }
  for (const auto& f : facts)
    if (!f.ground()) throw InputError("minimal_model: non-ground fact " + to_string(f));

  std::set<Atom> model = facts;
  std::set<Atom> delta = facts;
  detail::FactIndex fullIdx, deltaIdx, oldIdx;
  for (const Atom& a : model) detail::index_fact(fullIdx, a);
  deltaIdx = fullIdx;  // first round: everything is new, old is empty

  while (!delta.empty()) {
    std::set<Atom> next;
    std::vector<Atom> derived;
    for (const auto& rule : rules) {
      if (rule.body.empty()) {
        derived.push_back(rule.head);
        continue;
      }
      for (std::size_t pivot = 0; pivot < rule.body.size(); ++pivot) {
        Substitution theta;
        detail::join_rule(rule, 0, pivot, oldIdx, deltaIdx, fullIdx, theta, derived);
      }
    }
    for (Atom& a : derived)
      if (!model.count(a)) next.insert(std::move(a));

    oldIdx = fullIdx;
    deltaIdx.clear();
    for (const Atom& a : next) {
      model.insert(a);
      detail::index_fact(fullIdx, a);
      detail::index_fact(deltaIdx, a);
    }
    delta = std::move(next);
  }
  return model;
}

}  // namespace mcs
