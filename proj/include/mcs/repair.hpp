#pragma once

// Managed-system layer: update actions, weak repairs, subset-minimal
// repairs, and breadth-first repair enumeration over a finite candidate
// universe of ground actions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcs/constraints.hpp"
#include "mcs/equilibria.hpp"
#include "mcs/kernel.hpp"

namespace mcs {

/// (i : o(p)) — apply operation `op` with argument `element` to context i.
struct UpdateAction {
  int context = 0;
  std::string op;
  KBElement element;

  auto operator<=>(const UpdateAction&) const = default;
};

inline std::string to_string(const UpdateAction& a) {
  return "(#" + std::to_string(a.context) + ":" + a.op + "(" + to_string(a.element) + "))";
}

using UpdateSet = std::set<UpdateAction>;

enum class RepairMode { Weak, Strong };

// ---------------------------------------------------------------------------
// Lifting and applying updates

/// Managed version of a system: every context gains the add and remove
/// operations (keeping any it already has), bridge-rule heads without an
/// operation become add-heads. Equilibria are unchanged.
inline MultiContextSystem lift_to_managed(const MultiContextSystem& m) {
  MultiContextSystem out = m;
  for (auto& ctx : out.contexts) {
    ctx.ops.insert(kOpAdd);
    ctx.ops.insert(kOpRemove);
    for (auto& r : ctx.rules)
      if (r.head.op.empty()) r.head.op = kOpAdd;
  }
  return out;
}

/// Replace each knowledge base by its management-function image under the
/// actions targeting it; bridge rules are untouched. Updates happen before
/// any rule evaluation.
inline MultiContextSystem apply_updates(const MultiContextSystem& m, const UpdateSet& u) {
  std::map<int, std::set<std::pair<std::string, KBElement>>> perContext;
  for (const auto& a : u) {
    if (!m.validIndex(a.context))
      throw ActionError("update action targets missing context #" +
                        std::to_string(a.context));
    const Context& ctx = m.contexts[static_cast<std::size_t>(a.context)];
    if (!ctx.managed())
      throw ActionError("context " + ctx.name + " is not managed");
    if (!ctx.ops.count(a.op))
      throw ActionError("operation '" + a.op + "' not registered for context " + ctx.name);
    perContext[a.context].insert({a.op, a.element});
  }
  MultiContextSystem out = m;
  for (auto& [i, actions] : perContext) {
    Context& ctx = out.contexts[static_cast<std::size_t>(i)];
    const ManagementFn fn = ctx.mng ? ctx.mng : make_builtin_mng();
    ctx.kb = fn(actions, ctx.kb);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repair predicates

inline bool consistent_with(const MultiContextSystem& m,
                            const std::vector<IntegrityConstraint>& ics, RepairMode mode) {
  return mode == RepairMode::Weak ? weak_satisfies(m, ics).holds
                                  : strong_satisfies(m, ics).holds;
}

/// U is a weak repair iff the updated system satisfies the constraints in
/// the chosen mode. The empty set is a (trivial) weak repair of an already
/// consistent system.
inline bool is_weak_repair(const MultiContextSystem& m,
                           const std::vector<IntegrityConstraint>& ics, const UpdateSet& u,
                           RepairMode mode = RepairMode::Weak) {
  return consistent_with(apply_updates(m, u), ics, mode);
}

namespace detail {

template <typename Check>
inline bool some_proper_subset_repairs(const UpdateSet& u, const Check& isWeakRepair) {
  std::vector<UpdateAction> actions(u.begin(), u.end());
  const std::size_t n = actions.size();
  if (n > 20) throw CapabilityError("minimality check over more than 20 actions");
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    UpdateSet sub;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::uint64_t{1} << k)) sub.insert(actions[k]);
    if (isWeakRepair(sub)) return true;
  }
  return false;
}

}  // namespace detail

/// U is a repair iff it is a weak repair and no proper subset of it is.
inline bool is_repair(const MultiContextSystem& m,
                      const std::vector<IntegrityConstraint>& ics, const UpdateSet& u,
                      RepairMode mode = RepairMode::Weak) {
  if (!is_weak_repair(m, ics, u, mode)) return false;
  return !detail::some_proper_subset_repairs(
      u, [&](const UpdateSet& sub) { return is_weak_repair(m, ics, sub, mode); });
}

// ---------------------------------------------------------------------------
// Repair enumeration

enum class RepairKind { WeakRepair, Repair };

struct RepairResult {
  UpdateSet actions;
  RepairKind kind = RepairKind::Repair;

  auto operator<=>(const RepairResult&) const = default;
};

enum class RepairSearchStatus {
  AlreadyConsistent,  // the empty update set suffices
  Complete,           // all minimal repairs within maxSize were found
  NoneExist,          // whole candidate universe searched, nothing repairs
  BudgetExhausted,    // nothing found up to maxSize; larger repairs may exist
};

struct RepairEnumeration {
  std::vector<RepairResult> repairs;  // canonical order, smallest first
  RepairSearchStatus status = RepairSearchStatus::Complete;
};

struct RepairOptions {
  std::size_t maxSize = 2;
  RepairMode mode = RepairMode::Weak;
  /// When set, only the listed operations per context index enter the
  /// candidate universe; contexts absent from the map contribute nothing.
  std::optional<std::map<int, std::set<std::string>>> allowedOps;
};

namespace detail {

/// Active domain: every constant of any kb, bridge-rule head or constraint.
inline std::set<std::string> active_domain(const MultiContextSystem& m,
                                           const std::vector<IntegrityConstraint>& ics) {
  std::set<std::string> dom;
  for (const auto& ctx : m.contexts) {
    for (const auto& e : ctx.kb)
      if (!e.ordinary) collect_constants(e.atom, dom);
    for (const auto& r : ctx.rules)
      if (!r.head.element.ordinary) collect_constants(r.head.element.atom, dom);
  }
  for (const auto& c : ic_constants(ics)) dom.insert(c);
  return dom;
}

/// Ground atoms of the context's kb predicates over the active domain.
inline std::set<Atom> candidate_atoms(const Context& ctx,
                                      const std::set<std::string>& dom) {
  std::map<std::string, std::set<int>> preds = ctx.logic->signature().kbPredicates;
  if (preds.empty()) {  // fall back to what the context visibly stores/receives
    for (const auto& e : ctx.kb)
      if (!e.ordinary) preds[e.atom.predicate].insert(e.atom.arity());
    for (const auto& r : ctx.rules)
      if (!r.head.element.ordinary)
        preds[r.head.element.atom.predicate].insert(r.head.element.atom.arity());
  }
  std::set<Atom> out;
  for (const auto& [pred, arities] : preds)
    for (int arity : arities) {
      std::vector<Atom> partial{make_atom(pred)};
      for (int k = 0; k < arity; ++k) {
        std::vector<Atom> next;
        for (const Atom& a : partial)
          for (const auto& c : dom) {
            Atom b = a;
            b.args.push_back(Term::constant(c));
            next.push_back(std::move(b));
          }
        partial = std::move(next);
        if (partial.size() > 100000)
          throw CapabilityError("candidate universe for predicate " + pred +
                                " exceeds 100000 atoms");
      }
      out.insert(partial.begin(), partial.end());
    }
  return out;
}

inline std::vector<UpdateAction> candidate_universe(const MultiContextSystem& m,
                                                    const std::vector<IntegrityConstraint>& ics,
                                                    const RepairOptions& opts) {
  std::set<std::string> dom = active_domain(m, ics);
  std::set<UpdateAction> universe;
  for (int i = 0; i < m.size(); ++i) {
    const Context& ctx = m.contexts[static_cast<std::size_t>(i)];
    if (!ctx.managed()) continue;
    std::set<std::string> ops = ctx.ops;
    if (opts.allowedOps) {
      auto it = opts.allowedOps->find(i);
      if (it == opts.allowedOps->end()) continue;
      std::set<std::string> filtered;
      for (const auto& o : it->second)
        if (ops.count(o)) filtered.insert(o);
      ops = std::move(filtered);
    }
    if (ops.empty()) continue;
    std::set<Atom> atoms = candidate_atoms(ctx, dom);
    for (const auto& op : ops)
      for (const Atom& a : atoms)
        universe.insert({i, op, KBElement::relational(a)});
  }
  return {universe.begin(), universe.end()};
}

}  // namespace detail

/// All subset-minimal repairs of size <= maxSize, smallest first, same-size
/// repairs in canonical action order. Breadth-first over the candidate
/// universe with domination pruning (supersets of an emitted repair are
/// never tested), so every emission is subset-minimal by construction.
inline RepairEnumeration enumerate_repairs(const MultiContextSystem& m,
                                           const std::vector<IntegrityConstraint>& ics,
                                           const RepairOptions& opts = {}) {
  RepairEnumeration out;
  if (consistent_with(m, ics, opts.mode)) {
    out.status = RepairSearchStatus::AlreadyConsistent;
    return out;
  }
  std::vector<UpdateAction> universe = detail::candidate_universe(m, ics, opts);
  const std::size_t n = universe.size();
  if (n == 0) {
    out.status = RepairSearchStatus::NoneExist;
    return out;
  }

  std::vector<std::vector<std::size_t>> found;  // index sets of emitted repairs
  auto dominated = [&](const std::vector<std::size_t>& comb) {
    for (const auto& f : found) {
      bool subset = true;
      for (std::size_t idx : f)
        if (!std::binary_search(comb.begin(), comb.end(), idx)) {
          subset = false;
          break;
        }
      if (subset) return true;
    }
    return false;
  };

  const std::size_t maxK = std::min(opts.maxSize, n);
  for (std::size_t k = 1; k <= maxK; ++k) {
    std::vector<std::size_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    bool done = false;
    while (!done) {
      if (!dominated(comb)) {
        UpdateSet u;
        for (std::size_t idx : comb) u.insert(universe[idx]);
        if (is_weak_repair(m, ics, u, opts.mode)) {
          found.push_back(comb);
          out.repairs.push_back({std::move(u), RepairKind::Repair});
        }
      }
      // next k-combination (lexicographic)
      std::size_t i = k;
      done = true;
      while (i > 0) {
        --i;
        if (comb[i] != i + n - k) {
          ++comb[i];
          for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
          done = false;
          break;
        }
      }
    }
  }
  if (out.repairs.empty())
    out.status = maxK >= n ? RepairSearchStatus::NoneExist
                           : RepairSearchStatus::BudgetExhausted;
  else
    out.status = RepairSearchStatus::Complete;
  return out;
}

}  // namespace mcs
