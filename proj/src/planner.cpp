#include "remodel/planner.hpp"

#include <algorithm>
#include <deque>

namespace remodel {

GroundTask::GroundTask(const DomainModel& model, const ProblemInstance& problem)
    : GroundTask(model, problem.ctx, problem.init, problem.goal) {}

GroundTask::GroundTask(const DomainModel& model, std::shared_ptr<const GroundContext> ctx,
                       BitVec init, GoalCondition goal)
    : ctx_(std::move(ctx)), init_(std::move(init)), goal_(std::move(goal)) {
  if (!model.concrete())
    throw AbstractModelError("grounding requires a concrete model");
  if (!(model.vocab() == ctx_->vocab()))
    throw VocabularyError("model and context vocabularies differ");
  compile(model);
  goal_pos_ = ctx_->empty_state();
  goal_neg_ = ctx_->empty_state();
  for (int id : goal_.positive) goal_pos_.set(id, true);
  for (int id : goal_.negative) goal_neg_.set(id, true);
}

void GroundTask::compile(const DomainModel& model) {
  const int n = ctx_->ground_action_count();
  compiled_.reserve(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    Compiled c{ctx_->empty_state(), ctx_->empty_state(), ctx_->empty_state(), ctx_->empty_state()};
    const ActionView view = build_action_view(model, *ctx_, g);
    for (const auto& [pal, atom] : view.pre_pos) {
      (void)pal;
      c.pre_pos.set(atom, true);
    }
    for (const auto& [pal, atom] : view.pre_neg) {
      (void)pal;
      c.pre_neg.set(atom, true);
    }
    for (const auto& [pal, atom] : view.add) {
      (void)pal;
      c.add.set(atom, true);
    }
    for (const auto& [pal, atom] : view.del) {
      (void)pal;
      c.del.set(atom, true);
    }
    // Delete-before-add: an atom both added and deleted stays true.
    for (int atom : c.add.set_bits()) c.del.set(atom, false);
    compiled_.push_back(std::move(c));
  }
}

bool GroundTask::applicable(const BitVec& state, int gaction) const {
  const Compiled& c = compiled_[static_cast<std::size_t>(gaction)];
  return state.contains_all(c.pre_pos) && state.disjoint_with(c.pre_neg);
}

std::optional<BitVec> GroundTask::successor(const BitVec& state, int gaction) const {
  if (!applicable(state, gaction)) return std::nullopt;
  const Compiled& c = compiled_[static_cast<std::size_t>(gaction)];
  return state.apply_effects(c.del, c.add);
}

bool GroundTask::goal_satisfied(const BitVec& state) const {
  return state.contains_all(goal_pos_) && state.disjoint_with(goal_neg_);
}

GroundTask ground(const DomainModel& model, const ProblemInstance& problem) {
  return GroundTask(model, problem);
}

std::optional<BitVec> apply(const GroundTask& task, const BitVec& state, int gaction) {
  return task.successor(state, gaction);
}

namespace {

Plan extract_plan(const std::vector<std::pair<int, int>>& parent, int index) {
  Plan plan;
  while (index > 0 || parent[static_cast<std::size_t>(index)].first >= 0) {
    const auto& [prev, ga] = parent[static_cast<std::size_t>(index)];
    if (prev < 0) break;
    plan.actions.push_back(ga);
    index = prev;
  }
  std::reverse(plan.actions.begin(), plan.actions.end());
  return plan;
}

}  // namespace

PlanResult optimal_plan(const GroundTask& task, long long expansion_cap) {
  PlanResult result;
  if (task.goal_satisfied(task.init())) {
    result.status = SearchStatus::Solved;
    return result;
  }
  std::vector<BitVec> states{task.init()};
  std::unordered_map<BitVec, int, BitVecHash> index{{task.init(), 0}};
  std::vector<std::pair<int, int>> parent{{-1, -1}};
  std::deque<int> frontier{0};
  const int n_actions = task.action_count();

  while (!frontier.empty()) {
    if (result.expanded >= expansion_cap) {
      result.status = SearchStatus::Exhausted;
      return result;
    }
    const int cur = frontier.front();
    frontier.pop_front();
    ++result.expanded;
    const BitVec state = states[static_cast<std::size_t>(cur)];
    for (int g = 0; g < n_actions; ++g) {
      auto succ = task.successor(state, g);
      if (!succ) continue;
      auto [it, inserted] = index.try_emplace(*succ, static_cast<int>(states.size()));
      if (!inserted) continue;
      states.push_back(std::move(*succ));
      parent.emplace_back(cur, g);
      if (task.goal_satisfied(states.back())) {
        result.status = SearchStatus::Solved;
        result.plan = extract_plan(parent, static_cast<int>(states.size()) - 1);
        return result;
      }
      frontier.push_back(static_cast<int>(states.size()) - 1);
    }
  }
  result.status = SearchStatus::Unsolvable;
  return result;
}

BfsSweep::BfsSweep(const GroundTask& task, const BitVec& start, long long expansion_cap) {
  states_.push_back(start);
  index_.emplace(start, 0);
  parent_.emplace_back(-1, -1);
  std::deque<int> frontier{0};
  long long expanded = 0;
  const int n_actions = task.action_count();
  while (!frontier.empty()) {
    if (expanded >= expansion_cap) {
      exhausted_ = true;
      return;
    }
    const int cur = frontier.front();
    frontier.pop_front();
    ++expanded;
    const BitVec state = states_[static_cast<std::size_t>(cur)];
    for (int g = 0; g < n_actions; ++g) {
      auto succ = task.successor(state, g);
      if (!succ) continue;
      auto [it, inserted] = index_.try_emplace(*succ, static_cast<int>(states_.size()));
      if (!inserted) continue;
      states_.push_back(std::move(*succ));
      parent_.emplace_back(cur, g);
      frontier.push_back(static_cast<int>(states_.size()) - 1);
    }
  }
}

std::optional<Plan> BfsSweep::plan_to(const BitVec& target) const {
  auto it = index_.find(target);
  if (it == index_.end()) return std::nullopt;
  return extract_plan(parent_, it->second);
}

bool validate_trace(const DomainModel& model, const ObservationTrace& trace) {
  if (!(model.vocab() == trace.ctx->vocab()))
    throw IncomparableModelsError("trace vocabulary differs from the model");
  for (int i = 0; i < trace.triplet_count(); ++i) {
    if (!triplet_consistent(model, *trace.ctx, trace.triplet(i))) return false;
  }
  return true;
}

}  // namespace remodel
