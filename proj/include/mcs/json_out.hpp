#pragma once

// Machine-readable result schemas (JSON). Field names are stable and the
// schema is versioned via the top-level "schema" integer.

#include <string>
#include <vector>

#include <json.hpp>

#include "mcs/constraints.hpp"
#include "mcs/kernel.hpp"
#include "mcs/repair.hpp"

namespace mcs {

inline constexpr int kSchemaVersion = 1;

inline nlohmann::json element_json(const KBElement& e) {
  if (e.ordinary) return nlohmann::json{{"ordinary", e.token}};
  return nlohmann::json{{"atom", to_string(e.atom)}};
}

inline nlohmann::json belief_state_json(const MultiContextSystem& m, const BeliefState& s) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < m.size(); ++i) {
    const BeliefSet& bs = s.perContext[static_cast<std::size_t>(i)];
    nlohmann::json entry;
    entry["context"] = m.contexts[static_cast<std::size_t>(i)].name;
    entry["atoms"] = nlohmann::json::array();
    for (const Atom& a : bs.atoms) entry["atoms"].push_back(to_string(a));
    if (!bs.negatives.empty()) {
      entry["negatives"] = nlohmann::json::array();
      for (const Atom& a : bs.negatives) entry["negatives"].push_back(to_string(a));
    }
    if (!bs.ordinary.empty()) {
      entry["ordinary"] = nlohmann::json::array();
      for (const auto& t : bs.ordinary) entry["ordinary"].push_back(t);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

inline nlohmann::json verdict_json(const MultiContextSystem& m, const SatisfactionVerdict& v,
                                   const std::string& mode) {
  nlohmann::json out;
  out["schema"] = kSchemaVersion;
  out["mode"] = mode;
  out["verdict"] = v.inconsistent ? "inconsistent" : (v.holds ? "satisfied" : "violated");
  if (v.witness) out["witness"] = belief_state_json(m, *v.witness);
  out["violations"] = nlohmann::json::array();
  if (v.violatedIc) {
    nlohmann::json viol;
    viol["ic"] = static_cast<int>(*v.violatedIc);
    nlohmann::json binding = nlohmann::json::object();
    if (v.violation)
      for (const auto& [var, c] : *v.violation) binding[var] = c;
    viol["binding"] = std::move(binding);
    out["violations"].push_back(std::move(viol));
  }
  return out;
}

inline nlohmann::json equilibria_json(const MultiContextSystem& m,
                                      const std::vector<BeliefState>& states) {
  nlohmann::json out;
  out["schema"] = kSchemaVersion;
  out["count"] = states.size();
  out["equilibria"] = nlohmann::json::array();
  for (const auto& s : states) out["equilibria"].push_back(belief_state_json(m, s));
  return out;
}

inline nlohmann::json action_json(const MultiContextSystem& m, const UpdateAction& a) {
  nlohmann::json out;
  out["context"] = m.contexts[static_cast<std::size_t>(a.context)].name;
  out["op"] = a.op;
  out["element"] = to_string(a.element);
  return out;
}

inline nlohmann::json repairs_json(const MultiContextSystem& m, const RepairEnumeration& r) {
  nlohmann::json out;
  out["schema"] = kSchemaVersion;
  switch (r.status) {
    case RepairSearchStatus::AlreadyConsistent: out["status"] = "already-consistent"; break;
    case RepairSearchStatus::Complete: out["status"] = "complete"; break;
    case RepairSearchStatus::NoneExist: out["status"] = "none-exist"; break;
    case RepairSearchStatus::BudgetExhausted: out["status"] = "budget-exhausted"; break;
  }
  out["repairs"] = nlohmann::json::array();
  for (const auto& rep : r.repairs) {
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : rep.actions) actions.push_back(action_json(m, a));
    out["repairs"].push_back(std::move(actions));
  }
  return out;
}

}  // namespace mcs
