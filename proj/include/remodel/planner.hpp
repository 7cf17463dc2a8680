#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "remodel/pddl.hpp"
#include "remodel/state.hpp"

namespace remodel {

struct Plan {
  std::vector<int> actions;  // ground action ids, in execution order

  int length() const { return static_cast<int>(actions.size()); }
  bool operator==(const Plan&) const = default;
};

enum class SearchStatus { Solved, Unsolvable, Exhausted };

struct PlanResult {
  SearchStatus status = SearchStatus::Unsolvable;
  Plan plan;
  long long expanded = 0;
};

// A concrete model compiled against a ground context: per ground action
// precondition/effect masks, an initial state and a goal.
class GroundTask {
 public:
  GroundTask(const DomainModel& model, const ProblemInstance& problem);
  GroundTask(const DomainModel& model, std::shared_ptr<const GroundContext> ctx,
             BitVec init, GoalCondition goal);

  const GroundContext& ctx() const { return *ctx_; }
  const std::shared_ptr<const GroundContext>& ctx_ptr() const { return ctx_; }
  const BitVec& init() const { return init_; }
  const GoalCondition& goal() const { return goal_; }

  int action_count() const { return static_cast<int>(compiled_.size()); }
  bool applicable(const BitVec& state, int gaction) const;
  std::optional<BitVec> successor(const BitVec& state, int gaction) const;
  bool goal_satisfied(const BitVec& state) const;

 private:
  struct Compiled {
    BitVec pre_pos;
    BitVec pre_neg;
    BitVec add;
    BitVec del;  // with added atoms removed: delete-before-add
  };

  std::shared_ptr<const GroundContext> ctx_;
  std::vector<Compiled> compiled_;
  BitVec init_;
  GoalCondition goal_;
  BitVec goal_pos_;
  BitVec goal_neg_;

  void compile(const DomainModel& model);
};

GroundTask ground(const DomainModel& model, const ProblemInstance& problem);

std::optional<BitVec> apply(const GroundTask& task, const BitVec& state, int gaction);

inline constexpr long long kDefaultExpansionCap = 1000000;

// Minimum-length plan by breadth-first search with duplicate detection.
// Ties break toward the lexicographically least action sequence under
// canonical ground action order. The expansion cap yields Exhausted,
// never a false Unsolvable.
PlanResult optimal_plan(const GroundTask& task, long long expansion_cap = kDefaultExpansionCap);

// Breadth-first sweep from one start state; answers shortest plans to
// exact target states. Used for trajectory comparisons.
class BfsSweep {
 public:
  BfsSweep(const GroundTask& task, const BitVec& start, long long expansion_cap);

  bool exhausted() const { return exhausted_; }
  // nullopt: not reached (definitive only when !exhausted()).
  std::optional<Plan> plan_to(const BitVec& target) const;

 private:
  std::vector<BitVec> states_;
  std::unordered_map<BitVec, int, BitVecHash> index_;
  std::vector<std::pair<int, int>> parent_;  // (predecessor index, ground action)
  bool exhausted_ = false;
};

bool validate_trace(const DomainModel& model, const ObservationTrace& trace);

}  // namespace remodel
