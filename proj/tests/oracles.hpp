#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "remodel/model.hpp"
#include "remodel/planner.hpp"
#include "remodel/state.hpp"

namespace remodel::testing {

// One-action brute-force check of a pa-value against an observed
// presence pair: a single-atom world, the atom's truth set from the
// pre-presence; the value is consistent when the action applies and the
// post-presence matches. Independent of the production Table-2 code.
inline bool pa_value_consistent_by_simulation(const PaValue& v, PresenceTuple pt) {
  bool atom = pt.pre == Presence::Pos;
  if (v.pre == Mode::Plus && !atom) return false;
  if (v.pre == Mode::Minus && atom) return false;
  if (v.eff == Mode::Plus) atom = true;
  if (v.eff == Mode::Minus) atom = false;
  return atom == (pt.post == Presence::Pos);
}

// Exhaustive breadth-first search over explicit atom-id sets, computed
// straight from the action views. Used as the optimality oracle; shares
// nothing with the production search.
struct OracleResult {
  bool solved = false;
  bool exhausted = false;
  int length = -1;
  long long states = 0;
};

inline OracleResult oracle_bfs(const DomainModel& model, const GroundContext& ctx,
                               const BitVec& init, const GoalCondition& goal,
                               long long state_limit = 200000) {
  auto as_set = [&](const BitVec& s) {
    std::set<int> out;
    for (int a = 0; a < ctx.atom_count(); ++a) {
      if (s.test(a)) out.insert(a);
    }
    return out;
  };
  auto satisfied = [&](const std::set<int>& s) {
    for (int a : goal.positive) {
      if (!s.count(a)) return false;
    }
    for (int a : goal.negative) {
      if (s.count(a)) return false;
    }
    return true;
  };

  std::vector<ActionView> views;
  views.reserve(static_cast<std::size_t>(ctx.ground_action_count()));
  for (int g = 0; g < ctx.ground_action_count(); ++g)
    views.push_back(build_action_view(model, ctx, g));

  std::set<std::set<int>> seen;
  std::deque<std::pair<std::set<int>, int>> frontier;
  const std::set<int> start = as_set(init);
  OracleResult result;
  if (satisfied(start)) {
    result.solved = true;
    result.length = 0;
    result.states = 1;
    return result;
  }
  seen.insert(start);
  frontier.emplace_back(start, 0);
  while (!frontier.empty()) {
    if (static_cast<long long>(seen.size()) > state_limit) {
      result.exhausted = true;
      return result;
    }
    auto [state, depth] = frontier.front();
    frontier.pop_front();
    for (const ActionView& view : views) {
      bool ok = true;
      for (const auto& [pal, atom] : view.pre_pos) {
        (void)pal;
        if (!state.count(atom)) ok = false;
      }
      for (const auto& [pal, atom] : view.pre_neg) {
        (void)pal;
        if (state.count(atom)) ok = false;
      }
      if (!ok) continue;
      std::set<int> succ = state;
      for (const auto& [pal, atom] : view.del) {
        (void)pal;
        succ.erase(atom);
      }
      for (const auto& [pal, atom] : view.add) {
        (void)pal;
        succ.insert(atom);
      }
      if (!seen.insert(succ).second) continue;
      if (satisfied(succ)) {
        result.solved = true;
        result.length = depth + 1;
        result.states = static_cast<long long>(seen.size());
        return result;
      }
      frontier.emplace_back(std::move(succ), depth + 1);
    }
  }
  result.states = static_cast<long long>(seen.size());
  return result;  // exhaustively unsolvable
}

}  // namespace remodel::testing
