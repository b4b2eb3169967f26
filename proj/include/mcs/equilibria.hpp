#pragma once

// Equilibrium semantics: rule applicability, equilibrium checking,
// enumeration and the consistency problem. Enumeration searches over
// head-subset selections; belief sets are derived through ACC, so the
// selected applicable heads are the only free choice.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mcs/grounding.hpp"
#include "mcs/kernel.hpp"

namespace mcs {

/// A bridge-rule head hypothesized applicable in some context.
struct AppliedHead {
  std::string op;  // empty for plain systems
  KBElement element;

  auto operator<=>(const AppliedHead&) const = default;
};

using HeadSelection = std::vector<std::set<AppliedHead>>;  // per context
using GroundRules = std::vector<std::set<BridgeRule>>;     // per context

/// Knowledge base of context `ctx` once the selected heads are applied:
/// plain union for unmanaged contexts, the management function otherwise.
inline KnowledgeBase effective_kb(const Context& ctx, const std::set<AppliedHead>& heads) {
  if (!ctx.managed()) {
    KnowledgeBase kb = ctx.kb;
    for (const auto& h : heads) kb.insert(h.element);
    return kb;
  }
  std::set<std::pair<std::string, KBElement>> actions;
  for (const auto& h : heads)
    actions.insert({h.op.empty() ? kOpAdd : h.op, h.element});
  const ManagementFn fn = ctx.mng ? ctx.mng : make_builtin_mng();
  return fn(actions, ctx.kb);
}

/// Heads of the ground rules of context i applicable in state `s`: positive
/// body beliefs present in the respective belief sets, negated ones absent.
inline std::set<AppliedHead> applicable_heads(const GroundRules& ground,
                                              const BeliefState& s, int i) {
  std::set<AppliedHead> out;
  for (const BridgeRule& r : ground[static_cast<std::size_t>(i)]) {
    bool fires = true;
    for (const auto& lit : r.body) {
      bool holds = s.perContext[static_cast<std::size_t>(lit.context)].contains(lit.belief);
      if (holds == lit.negated) {
        fires = false;
        break;
      }
    }
    if (fires) out.insert({r.head.op, r.head.element});
  }
  return out;
}

inline std::set<AppliedHead> applicable_heads(const MultiContextSystem& m,
                                              const BeliefState& s, int i) {
  return applicable_heads(ground_bridge_rules(m), s, i);
}

/// Plain-system convenience: the applicable head elements app_i(S).
inline std::set<KBElement> applicable_elements(const MultiContextSystem& m,
                                               const BeliefState& s, int i) {
  std::set<KBElement> out;
  for (auto& h : applicable_heads(m, s, i)) out.insert(h.element);
  return out;
}

namespace detail {

inline bool state_matches(const MultiContextSystem& m, const GroundRules& ground,
                          const BeliefState& s) {
  for (int i = 0; i < m.size(); ++i) {
    auto app = applicable_heads(ground, s, i);
    KnowledgeBase kb = effective_kb(m.contexts[static_cast<std::size_t>(i)], app);
    auto acceptable =
        m.contexts[static_cast<std::size_t>(i)].logic->acceptableBeliefSets(kb);
    bool found = false;
    for (const auto& bs : acceptable)
      if (bs == s.perContext[static_cast<std::size_t>(i)]) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

/// S is an equilibrium iff every component belief set is acceptable for its
/// kb extended with the heads applicable in S.
inline bool is_equilibrium(const MultiContextSystem& m, const BeliefState& s) {
  if (static_cast<int>(s.perContext.size()) != m.size())
    throw InputError("belief state indexed differently from the system");
  return detail::state_matches(m, ground_bridge_rules(m), s);
}

struct EnumerationOptions {
  std::optional<std::size_t> limit;
};

namespace detail {

/// Flat list of candidate heads in canonical order: contexts by index, heads
/// by their natural ordering.
struct HeadUniverse {
  std::vector<std::pair<int, AppliedHead>> heads;

  HeadSelection selectionOf(const std::vector<std::size_t>& picked, int nContexts) const {
    HeadSelection sel(static_cast<std::size_t>(nContexts));
    for (std::size_t idx : picked)
      sel[static_cast<std::size_t>(heads[idx].first)].insert(heads[idx].second);
    return sel;
  }
};

inline HeadUniverse head_universe(const GroundRules& ground) {
  HeadUniverse u;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    std::set<AppliedHead> seen;
    for (const BridgeRule& r : ground[i]) seen.insert({r.head.op, r.head.element});
    for (const auto& h : seen) u.heads.emplace_back(static_cast<int>(i), h);
  }
  return u;
}

// --- fast-path gate -------------------------------------------------------

inline bool custom_mng_present(const MultiContextSystem& m) {
  for (const auto& c : m.contexts)
    if (c.managed() && c.mng) return true;
  return false;
}

/// Dependency graph over ground heads; contexts with internal derivation
/// collapse into one node so intra-logic dependencies are never missed.
inline bool head_dependencies_acyclic(const MultiContextSystem& m, const GroundRules& ground) {
  auto nodeOf = [&](int ctx, const KBElement& e) -> std::string {
    if (m.contexts[static_cast<std::size_t>(ctx)].logic->flat())
      return std::to_string(ctx) + "|" + to_string(e);
    return "ctx#" + std::to_string(ctx);
  };
  std::map<std::string, std::set<std::string>> adj;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    for (const BridgeRule& r : ground[i]) {
      std::string h = nodeOf(static_cast<int>(i), r.head.element);
      for (const auto& lit : r.body) {
        KBElement asElement =
            lit.belief.kind == BeliefKind::Ordinary
                ? KBElement::ordinaryToken(lit.belief.token)
                : KBElement::relational(lit.belief.atom);
        adj[h].insert(nodeOf(lit.context, asElement));
      }
    }
  }
  // iterative DFS, 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::string, int> color;
  for (const auto& [start, _] : adj) {
    if (color[start]) continue;
    std::vector<std::pair<std::string, bool>> stack{{start, false}};
    while (!stack.empty()) {
      auto [node, expanded] = stack.back();
      stack.pop_back();
      if (expanded) {
        color[node] = 2;
        continue;
      }
      if (color[node] == 1) continue;
      color[node] = 1;
      stack.emplace_back(node, true);
      for (const auto& next : adj[node]) {
        if (color[next] == 1) return false;
        if (color[next] == 0) stack.emplace_back(next, false);
      }
    }
  }
  return true;
}

inline bool fast_path_applicable(const MultiContextSystem& m, const GroundRules& ground) {
  if (custom_mng_present(m)) return false;
  for (const auto& c : m.contexts)
    if (!c.logic->deterministicAcc()) return false;
  for (const auto& rules : ground)
    for (const BridgeRule& r : rules) {
      if (!(r.head.op.empty() || r.head.op == kOpAdd)) return false;
      for (const auto& lit : r.body) {
        if (lit.negated) return false;
        if (lit.belief.kind == BeliefKind::Negative) return false;
      }
    }
  return head_dependencies_acyclic(m, ground);
}

/// Joint least fixpoint: grow the applicable-head selection until stable.
/// Sound and complete under the fast-path gate (deterministic monotone ACC,
/// negation-free rules, acyclic head dependencies).
inline std::vector<BeliefState> fast_path_equilibria(const MultiContextSystem& m,
                                                     const GroundRules& ground) {
  HeadSelection sel(static_cast<std::size_t>(m.size()));
  for (;;) {
    BeliefState s;
    s.perContext.resize(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) {
      KnowledgeBase kb = effective_kb(m.contexts[static_cast<std::size_t>(i)],
                                      sel[static_cast<std::size_t>(i)]);
      auto sets = m.contexts[static_cast<std::size_t>(i)].logic->acceptableBeliefSets(kb);
      if (sets.empty()) return {};
      s.perContext[static_cast<std::size_t>(i)] = std::move(sets.front());
    }
    HeadSelection next(static_cast<std::size_t>(m.size()));
    bool stable = true;
    for (int i = 0; i < m.size(); ++i) {
      next[static_cast<std::size_t>(i)] = applicable_heads(ground, s, i);
      if (next[static_cast<std::size_t>(i)] != sel[static_cast<std::size_t>(i)])
        stable = false;
    }
    if (stable) {
      if (!state_matches(m, ground, s)) return {};
      return {std::move(s)};
    }
    sel = std::move(next);
  }
}

/// Ground rules grouped by the highest context index their body queries;
/// once every context up to that index carries a belief set, applicability
/// of the rule is decided.
struct PreparedRules {
  std::vector<std::vector<const BridgeRule*>> byMaxCtx;
  std::vector<const BridgeRule*> bodyless;
};

inline PreparedRules prepare_rules(const GroundRules& ground, int n) {
  PreparedRules p;
  p.byMaxCtx.resize(static_cast<std::size_t>(n));
  for (const auto& rules : ground)
    for (const BridgeRule& r : rules) {
      if (r.body.empty()) {
        p.bodyless.push_back(&r);
        continue;
      }
      int mx = 0;
      for (const auto& lit : r.body) mx = std::max(mx, lit.context);
      p.byMaxCtx[static_cast<std::size_t>(mx)].push_back(&r);
    }
  return p;
}

inline bool body_holds(const BridgeRule& r, const BeliefState& s) {
  for (const auto& lit : r.body) {
    bool holds = s.perContext[static_cast<std::size_t>(lit.context)].contains(lit.belief);
    if (holds == lit.negated) return false;
  }
  return true;
}

template <typename Emit>
inline bool product_candidates(const MultiContextSystem& m, const GroundRules& ground,
                               const PreparedRules& prep, const HeadSelection& sel,
                               const std::vector<std::vector<BeliefSet>>& candidates,
                               std::size_t i, BeliefState& partial, const Emit& emit) {
  if (i == candidates.size()) {
    for (int c = 0; c < m.size(); ++c)
      if (applicable_heads(ground, partial, c) != sel[static_cast<std::size_t>(c)])
        return true;
    return emit(partial);
  }
  for (const BeliefSet& bs : candidates[i]) {
    partial.perContext[i] = bs;
    // prune: any rule decided by contexts 0..i that fires outside the
    // selection rules this branch out
    bool viable = true;
    for (const BridgeRule* r : prep.byMaxCtx[i]) {
      if (body_holds(*r, partial) &&
          !sel[static_cast<std::size_t>(r->head.context)].count(
              {r->head.op, r->head.element})) {
        viable = false;
        break;
      }
    }
    if (!viable) continue;
    if (!product_candidates(m, ground, prep, sel, candidates, i + 1, partial, emit))
      return false;
  }
  return true;
}

}  // namespace detail

constexpr std::size_t kMaxHeadsWithoutLimit = 20;

/// Stream the equilibria of `m` in canonical order (head selections by
/// increasing cardinality, then lexicographic). `emit` returns false to stop
/// early. With more than 20 ground heads the search is refused unless
/// `allowLargeSearch` is set (callers that bound the output).
template <typename Emit>
inline void for_each_equilibrium(const MultiContextSystem& m, const Emit& emit,
                                 bool allowLargeSearch = false) {
  for (const auto& c : m.contexts)
    if (!c.logic->enumerable())
      throw CapabilityError("context " + c.name +
                            ": logic does not enumerate belief sets");

  GroundRules ground = ground_bridge_rules(m);

  if (detail::fast_path_applicable(m, ground)) {
    for (auto& s : detail::fast_path_equilibria(m, ground))
      if (!emit(s)) return;
    return;
  }

  detail::HeadUniverse universe = detail::head_universe(ground);
  const std::size_t H = universe.heads.size();
  if (H > kMaxHeadsWithoutLimit && !allowLargeSearch)
    throw CapabilityError("search space has " + std::to_string(H) +
                          " ground heads; pass an explicit limit");
  detail::PreparedRules prep = detail::prepare_rules(ground, m.size());

  // subsets by increasing cardinality, lexicographic within one cardinality
  for (std::size_t k = 0; k <= H; ++k) {
    std::vector<std::size_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    bool done = k > H;
    while (!done) {
      HeadSelection sel = universe.selectionOf(comb, m.size());
      bool feasible = true;
      // bodyless rules always fire; their heads must be selected
      for (const BridgeRule* r : prep.bodyless)
        if (!sel[static_cast<std::size_t>(r->head.context)].count(
                {r->head.op, r->head.element})) {
          feasible = false;
          break;
        }
      std::vector<std::vector<BeliefSet>> candidates(static_cast<std::size_t>(m.size()));
      for (int i = 0; i < m.size() && feasible; ++i) {
        KnowledgeBase kb = effective_kb(m.contexts[static_cast<std::size_t>(i)],
                                        sel[static_cast<std::size_t>(i)]);
        candidates[static_cast<std::size_t>(i)] =
            m.contexts[static_cast<std::size_t>(i)].logic->acceptableBeliefSets(kb);
        if (candidates[static_cast<std::size_t>(i)].empty()) feasible = false;
      }
      if (feasible) {
        BeliefState partial;
        partial.perContext.resize(static_cast<std::size_t>(m.size()));
        if (!detail::product_candidates(m, ground, prep, sel, candidates, 0, partial, emit))
          return;
      }
      // next k-combination
      if (k == 0) break;
      std::size_t i = k;
      while (i > 0) {
        --i;
        if (comb[i] != i + H - k) {
          ++comb[i];
          for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
          break;
        }
        if (i == 0) done = true;
      }
    }
  }
}

/// All equilibria of `m` in canonical order, up to `limit`. With more than
/// 20 ground heads an explicit limit is mandatory.
inline std::vector<BeliefState> enumerate_equilibria(const MultiContextSystem& m,
                                                     EnumerationOptions opts = {}) {
  std::vector<BeliefState> results;
  for_each_equilibrium(
      m,
      [&](const BeliefState& s) {
        results.push_back(s);
        return !(opts.limit && results.size() >= *opts.limit);
      },
      opts.limit.has_value());
  return results;
}

struct ConsistencyResult {
  bool consistent = false;
  std::optional<BeliefState> witness;
};

/// The consistency problem: does the system have an equilibrium?
inline ConsistencyResult is_consistent(const MultiContextSystem& m) {
  EnumerationOptions opts;
  opts.limit = 1;
  auto eq = enumerate_equilibria(m, opts);
  if (eq.empty()) return {};
  return {true, std::move(eq.front())};
}

}  // namespace mcs
