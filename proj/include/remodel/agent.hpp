#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "remodel/model.hpp"
#include "remodel/pddl.hpp"
#include "remodel/planner.hpp"
#include "remodel/state.hpp"

namespace remodel {

struct Query {
  BitVec start;
  std::vector<int> plan;  // ground action ids

  bool operator==(const Query&) const = default;
};

struct QueryResponse {
  int executed = 0;  // length of the successfully executed prefix
  BitVec final_state;

  bool operator==(const QueryResponse&) const = default;
};

enum class DriftMethod { Drop, Add, Mixed };

const char* drift_method_name(DriftMethod m);
DriftMethod drift_method_from_name(const std::string& name);

struct DriftSpec {
  double amount = 0.0;  // fraction of the pal universe, in [0,1]
  DriftMethod method = DriftMethod::Mixed;
  std::uint64_t seed = 0;
};

enum class AgentMode { Optimal, Satisficing };

// Simulated black-box agent. The hidden model never leaves this class;
// callers only see query responses and generated traces. Immutable, so
// one agent can serve any number of queries.
class AgentSim {
 public:
  AgentSim(DomainModel hidden, std::shared_ptr<const GroundContext> ctx,
           AgentMode mode, std::vector<BitVec> seed_states);

  const GroundContext& context() const { return *ctx_; }
  const std::shared_ptr<const GroundContext>& ctx_ptr() const { return ctx_; }
  AgentMode mode() const { return mode_; }
  const std::vector<BitVec>& seed_states() const { return seeds_; }

  // Executes the plan prefix under the hidden model, stopping at the
  // first inapplicable action.
  QueryResponse answer(const Query& q) const;

  // Alternating state/action trace of an optimal plan for the problem.
  // max_triplets >= 0 truncates the trace (prefixes stay optimal).
  ObservationTrace generate_trace(const ProblemInstance& problem,
                                  long long expansion_cap = kDefaultExpansionCap,
                                  int max_triplets = -1) const;

  // Seeded random walks under the hidden model, one end state per walk.
  // Walk 0 has length zero, so the first sample is the first seed state.
  std::vector<struct WalkSample> random_walks(int n, std::uint64_t seed) const;

 private:
  std::shared_ptr<const GroundContext> ctx_;
  DomainModel hidden_;
  AgentMode mode_;
  std::vector<BitVec> seeds_;
};

int drift_flip_count(const DomainModel& m, double amount);

// A concrete model differing from m in exactly round(amount * nPals)
// pal-tuples. Drop flips present modes to absent, Add flips absent modes
// to a sign, Mixed may do either; pa-value legality is preserved.
DomainModel inject_drift(const DomainModel& m, const DriftSpec& spec);

struct WalkSample {
  BitVec state;
  int seed_index = 0;
  std::vector<int> path;  // ground actions from the seed state
};

inline std::vector<WalkSample> random_walk_states(const AgentSim& agent, int n,
                                                  std::uint64_t seed) {
  return agent.random_walks(n, seed);
}

inline QueryResponse answer_query(const AgentSim& agent, const Query& q) {
  return agent.answer(q);
}

// n distinct states: walk end states first, then uniform random atom
// subsets as padding.
std::vector<BitVec> sample_random_states(const AgentSim& agent, int n, std::uint64_t seed);

}  // namespace remodel
