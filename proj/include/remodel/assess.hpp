#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "remodel/agent.hpp"
#include "remodel/model.hpp"
#include "remodel/planner.hpp"
#include "remodel/state.hpp"

namespace remodel {

// Per pa-tuple, the set of legal pa-values consistent with every observed
// transition of its action. Unobserved pa-tuples keep the full 7-value set.
class ConstraintSet {
 public:
  explicit ConstraintSet(int n_pas)
      : masks_(static_cast<std::size_t>(n_pas), kAllPaValuesMask) {}

  std::uint8_t mask(int pa) const { return masks_[static_cast<std::size_t>(pa)]; }

  bool allows(int pa, const PaValue& v) const {
    const int i = pa_value_index(v);
    return i >= 0 && (mask(pa) & (1u << i)) != 0;
  }

  // Intersect; reports the offending pa on an empty result.
  void restrict(int pa, std::uint8_t allowed, const Vocabulary& vocab);

  // Fold one executed triplet: every pa of the action is constrained by
  // its atom's presence in the pre/post states.
  void fold_triplet(const GroundContext& ctx, const ActionTriplet& t);

  // Modes a pal may take given the partner pal's current mode
  // (Unknown partner leaves the partner coordinate unconstrained).
  std::vector<Mode> allowed_modes(int pal, Mode partner) const;

  // The pal's coordinate when it is unique across all allowed values.
  std::optional<Mode> forced_mode(int pal) const;

  // True when the pa's known coordinates match some allowed value.
  bool joint_consistent(int pa, Mode pre, Mode eff) const;

 private:
  std::vector<std::uint8_t> masks_;
};

ConstraintSet infer_pa_constraints(const std::vector<ObservationTrace>& observations,
                                   const GroundContext& ctx);

enum class AffectedWhy { ExpandedEvidence, ReducedEvidence };

struct AffectedEntry {
  int pal = -1;
  AffectedWhy why = AffectedWhy::ExpandedEvidence;
};

struct AffectedSet {
  std::vector<AffectedEntry> entries;  // canonical pal order

  bool contains(int pal) const;
  std::vector<int> pals() const;
  int size() const { return static_cast<int>(entries.size()); }
};

struct ExpandedDetection {
  std::vector<int> flagged;                 // pals whose mode needs investigation
  std::vector<std::pair<int, Mode>> fixed;  // modes already determined by the traces
};

// Pa-tuples whose value in m_init is inconsistent with the observations.
ExpandedDetection detect_expanded(const DomainModel& m_init, const ConstraintSet& constraints);

struct ReducedDetection {
  std::vector<int> flagged;
  std::vector<std::string> warnings;  // endpoint pairs skipped at the expansion cap
};

// Compares optimal plans under m_init against the observed (optimal)
// trajectories between every pair of trace states; strictly shorter
// plans implicate the first diverging action.
ReducedDetection detect_reduced(const DomainModel& m_init,
                                const std::vector<ObservationTrace>& observations,
                                long long expansion_cap = kDefaultExpansionCap);

// <s_pre without gamma's atom, <observed grounding of gamma's action>>.
// nullopt when the action never occurs in the observations.
std::optional<Query> make_precondition_query(int pal,
                                             const std::vector<ObservationTrace>& observations);

// A single-action query on which the two models predict different
// responses: scans the random states in order, then single polarity
// edits of gamma's atom, then states with the shared known precondition
// literals forced. nullopt when nothing distinguishes.
std::optional<Query> generate_distinguishing_query(const DomainModel& mi, const DomainModel& mj,
                                                   int pal, const std::vector<BitVec>& states,
                                                   const GroundContext& ctx);

// Consistency of a candidate with a query-response. Exact simulation for
// concrete candidates; for abstract candidates (single-action plans) the
// response must be reproducible under some legal completion of the
// unknown modes.
bool response_consistent(const DomainModel& candidate, const GroundContext& ctx, const Query& q,
                         const QueryResponse& r);

// Candidates whose own response to q equals the agent's. Throws
// ContradictionError when nothing survives.
std::vector<DomainModel> sieve_models(const std::vector<DomainModel>& candidates,
                                      const GroundContext& ctx, const Query& q,
                                      const QueryResponse& r);

struct LoggedQuery {
  Query query;
  QueryResponse response;
};

struct AssessmentReport {
  std::vector<DomainModel> learned;
  AffectedSet gamma_delta;
  std::vector<LoggedQuery> query_log;
  int query_count = 0;
  std::optional<double> accuracy;  // filled in when ground truth is at hand
  // Consensus modes after each query; Unknown where survivors disagree.
  std::vector<std::vector<Mode>> snapshots;
  std::vector<std::string> warnings;
};

struct AssessOptions {
  long long expansion_cap = kDefaultExpansionCap;
  int max_bootstrap_states = 4;
  int max_refine_rounds = 16;
  bool with_snapshots = true;
};

// Differential assessment: detect potentially affected pal-tuples from
// the observations, resolve their modes through queries, return every
// surviving model plus the dialog.
AssessmentReport daaisy(const DomainModel& m_init,
                        const std::vector<ObservationTrace>& observations, const AgentSim& agent,
                        const std::vector<BitVec>& random_states, const AssessOptions& options = {});

// Exhaustive interrogation over the full pal universe, starting from the
// all-unknown model and no observations.
AssessmentReport aia_baseline(const AgentSim& agent, const std::vector<BitVec>& random_states,
                              const AssessOptions& options = {});

// 1 - diff/nPals, both models concrete.
double accuracy(const DomainModel& m, const DomainModel& m_star);

// Every learned model must replay every trace and every logged query
// exactly.
bool verify_report(const AssessmentReport& report,
                   const std::vector<ObservationTrace>& observations, const GroundContext& ctx);

}  // namespace remodel
