#include "remodel/agent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "remodel/rng.hpp"

namespace remodel {

const char* drift_method_name(DriftMethod m) {
  switch (m) {
    case DriftMethod::Drop: return "drop";
    case DriftMethod::Add: return "add";
    case DriftMethod::Mixed: return "mixed";
  }
  return "mixed";
}

DriftMethod drift_method_from_name(const std::string& name) {
  if (name == "drop") return DriftMethod::Drop;
  if (name == "add") return DriftMethod::Add;
  if (name == "mixed") return DriftMethod::Mixed;
  throw Error("unknown drift method: " + name);
}

AgentSim::AgentSim(DomainModel hidden, std::shared_ptr<const GroundContext> ctx,
                   AgentMode mode, std::vector<BitVec> seed_states)
    : ctx_(std::move(ctx)), hidden_(std::move(hidden)), mode_(mode), seeds_(std::move(seed_states)) {
  if (!hidden_.concrete())
    throw AbstractModelError("the agent's hidden model must be concrete");
  if (!(hidden_.vocab() == ctx_->vocab()))
    throw VocabularyError("hidden model and context vocabularies differ");
}

QueryResponse AgentSim::answer(const Query& q) const {
  if (q.start.size() != ctx_->atom_count())
    throw QueryFormatError("query state is not over the agent's ground universe");
  for (int ga : q.plan) {
    if (ga < 0 || ga >= ctx_->ground_action_count())
      throw QueryFormatError("query plan references an unknown ground action");
  }
  QueryResponse response;
  response.final_state = q.start;
  for (int ga : q.plan) {
    auto succ = apply_action(hidden_, *ctx_, response.final_state, ga);
    if (!succ) break;
    response.final_state = std::move(*succ);
    ++response.executed;
  }
  return response;
}

ObservationTrace AgentSim::generate_trace(const ProblemInstance& problem,
                                          long long expansion_cap, int max_triplets) const {
  if (mode_ != AgentMode::Optimal)
    throw Error("trace generation requires the optimal planning mode");
  if (problem.ctx != ctx_)
    throw VocabularyError("problem was grounded over different objects than the agent");
  GroundTask task(hidden_, problem);
  PlanResult result = optimal_plan(task, expansion_cap);
  if (result.status == SearchStatus::Unsolvable)
    throw NoTraceError("problem unsolvable under the agent's model");
  if (result.status == SearchStatus::Exhausted)
    throw NoTraceError("planner hit the expansion cap before solving");

  ObservationTrace trace;
  trace.ctx = ctx_;
  trace.states.push_back(problem.init);
  for (int ga : result.plan.actions) {
    if (max_triplets >= 0 && trace.triplet_count() >= max_triplets) break;
    auto succ = task.successor(trace.states.back(), ga);
    trace.states.push_back(std::move(*succ));
    trace.actions.push_back(ga);
  }
  return trace;
}

int drift_flip_count(const DomainModel& m, double amount) {
  return static_cast<int>(std::llround(amount * m.vocab().n_pals()));
}

namespace {

std::vector<Mode> mode_options(Mode current, Mode partner, DriftMethod method, bool pal_is_pre) {
  std::vector<Mode> out;
  auto legal_with_partner = [&](Mode m) {
    return pal_is_pre ? pa_value_legal(m, partner) : pa_value_legal(partner, m);
  };
  switch (method) {
    case DriftMethod::Drop:
      out.push_back(Mode::Absent);
      break;
    case DriftMethod::Add:
      for (Mode m : {Mode::Plus, Mode::Minus}) {
        if (legal_with_partner(m)) out.push_back(m);
      }
      break;
    case DriftMethod::Mixed:
      for (Mode m : {Mode::Plus, Mode::Minus, Mode::Absent}) {
        if (m != current && legal_with_partner(m)) out.push_back(m);
      }
      break;
  }
  return out;
}

}  // namespace

DomainModel inject_drift(const DomainModel& m, const DriftSpec& spec) {
  if (!m.concrete()) throw AbstractModelError("drift injection needs a concrete model");
  if (spec.amount < 0.0 || spec.amount > 1.0)
    throw InfeasibleDriftError("drift amount must lie in [0,1]");
  const int flips = drift_flip_count(m, spec.amount);

  std::vector<int> candidates;
  for (int pal = 0; pal < m.vocab().n_pals(); ++pal) {
    const Mode mode = m.mode(pal);
    const bool present = mode == Mode::Plus || mode == Mode::Minus;
    switch (spec.method) {
      case DriftMethod::Drop:
        if (present) candidates.push_back(pal);
        break;
      case DriftMethod::Add:
        if (!present) candidates.push_back(pal);
        break;
      case DriftMethod::Mixed:
        candidates.push_back(pal);
        break;
    }
  }
  if (flips > static_cast<int>(candidates.size()))
    throw InfeasibleDriftError("requested " + std::to_string(flips) + " flips but only " +
                               std::to_string(candidates.size()) + " pal-tuples are eligible for " +
                               drift_method_name(spec.method));

  Rng rng(spec.seed);
  rng.shuffle_prefix(candidates, static_cast<std::size_t>(flips));
  std::set<int> selected(candidates.begin(), candidates.begin() + flips);

  std::vector<Mode> modes = m.modes();
  // Group by pa-tuple so that joint flips stay inside the legal range.
  std::set<int> pas;
  for (int pal : selected) pas.insert(Vocabulary::pa_of(pal));
  for (int pa : pas) {
    const int pre_pal = 2 * pa;
    const int eff_pal = 2 * pa + 1;
    const bool flip_pre = selected.count(pre_pal) > 0;
    const bool flip_eff = selected.count(eff_pal) > 0;
    const Mode cur_pre = modes[static_cast<std::size_t>(pre_pal)];
    const Mode cur_eff = modes[static_cast<std::size_t>(eff_pal)];
    if (flip_pre && flip_eff) {
      std::vector<PaValue> targets;
      for (const PaValue& v : legal_pa_values()) {
        if (v.pre == cur_pre || v.eff == cur_eff) continue;
        switch (spec.method) {
          case DriftMethod::Drop:
            if (v.pre == Mode::Absent && v.eff == Mode::Absent) targets.push_back(v);
            break;
          case DriftMethod::Add:
            if (v.pre != Mode::Absent && v.eff != Mode::Absent) targets.push_back(v);
            break;
          case DriftMethod::Mixed:
            targets.push_back(v);
            break;
        }
      }
      if (targets.empty())
        throw InfeasibleDriftError("no joint flip available at pa " + std::to_string(pa));
      const PaValue v = targets[static_cast<std::size_t>(rng.index(targets.size()))];
      modes[static_cast<std::size_t>(pre_pal)] = v.pre;
      modes[static_cast<std::size_t>(eff_pal)] = v.eff;
    } else if (flip_pre) {
      auto options = mode_options(cur_pre, cur_eff, spec.method, /*pal_is_pre=*/true);
      modes[static_cast<std::size_t>(pre_pal)] = options[static_cast<std::size_t>(rng.index(options.size()))];
    } else {
      auto options = mode_options(cur_eff, cur_pre, spec.method, /*pal_is_pre=*/false);
      modes[static_cast<std::size_t>(eff_pal)] = options[static_cast<std::size_t>(rng.index(options.size()))];
    }
  }
  return m.with_modes(std::move(modes));
}

std::vector<WalkSample> AgentSim::random_walks(int n, std::uint64_t seed) const {
  std::vector<WalkSample> out;
  if (seeds_.empty() || n <= 0) return out;

  // Dummy goal: the task is only used for applicability and successors.
  GroundTask task(hidden_, ctx_, seeds_[0], GoalCondition{});
  Rng rng(seed);
  std::set<BitVec> seen;
  const long long max_walks = 30LL * n + 10;
  constexpr int kMaxWalkLength = 24;

  for (long long walk = 0; walk < max_walks && static_cast<int>(out.size()) < n; ++walk) {
    WalkSample sample;
    sample.seed_index = static_cast<int>(walk % static_cast<long long>(seeds_.size()));
    BitVec state = seeds_[static_cast<std::size_t>(sample.seed_index)];
    const int length = walk == 0 ? 0 : 1 + static_cast<int>(rng.below(kMaxWalkLength));
    for (int step = 0; step < length; ++step) {
      std::vector<int> applicable;
      for (int g = 0; g < task.action_count(); ++g) {
        if (task.applicable(state, g)) applicable.push_back(g);
      }
      if (applicable.empty()) break;
      const int ga = applicable[static_cast<std::size_t>(rng.index(applicable.size()))];
      state = *task.successor(state, ga);
      sample.path.push_back(ga);
    }
    if (!seen.insert(state).second) continue;
    sample.state = std::move(state);
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<BitVec> sample_random_states(const AgentSim& agent, int n, std::uint64_t seed) {
  std::vector<BitVec> out;
  std::set<BitVec> seen;
  for (const WalkSample& w : random_walk_states(agent, n, seed)) {
    if (seen.insert(w.state).second) out.push_back(w.state);
  }
  Rng rng(seed ^ 0xabcdef1234567891ull);
  const int atoms = agent.context().atom_count();
  long long attempts = 0;
  while (static_cast<int>(out.size()) < n && attempts < 2000LL * n) {
    ++attempts;
    BitVec s(atoms);
    for (int a = 0; a < atoms; ++a) {
      if (rng.coin()) s.set(a, true);
    }
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace remodel
