#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "remodel/assess.hpp"

namespace remodel {

struct ExperimentConfig {
  std::string domain_path;
  std::vector<std::string> problem_paths;
  std::vector<double> drift_levels;
  std::vector<DriftMethod> drift_methods;
  int trials = 1;
  int trace_triplets = 10;
  int s_size = 30;
  std::uint64_t master_seed = 1;
  long long expansion_cap = kDefaultExpansionCap;
  std::string domain_name;  // defaults to the domain file stem
};

ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string domain;
  double level = 0.0;
  std::string method;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string strategy;  // daaisy | aia
  int queries = 0;
  double accuracy = 0.0;
  int gamma_size = 0;
  int matched_queries = -1;  // aia only: queries to reach daaisy's accuracy
  double millis = 0.0;
  std::string status;  // ok | infeasible | error:<kind>
};

struct BenchOutput {
  std::vector<ResultRow> rows;
  std::string summary_json;
};

BenchOutput run_bench(const ExperimentConfig& config);

// Deterministic: excludes wall-clock columns.
std::string rows_to_csv(const std::vector<ResultRow>& rows);
// Wall-clock companion file; informational only.
std::string timings_to_csv(const std::vector<ResultRow>& rows);

// Ground truth, agent and the single observation trace shared by every
// trial of one domain.
struct DomainSetup {
  std::string name;
  DomainModel truth;
  std::shared_ptr<const GroundContext> ctx;
  std::shared_ptr<AgentSim> agent;
  std::vector<ObservationTrace> observations;
  std::vector<std::string> warnings;
};

// Scans the problems in order for one whose optimal plan provides the
// requested number of triplets; the trace is truncated to that length.
DomainSetup prepare_domain(const std::string& domain_path,
                           const std::vector<std::string>& problem_paths, int trace_triplets,
                           long long expansion_cap, const std::string& name = "");

struct TrialResult {
  DomainModel m_init;
  AssessmentReport daaisy;
  AssessmentReport aia;  // empty when AIA was not requested
  double init_accuracy = 0.0;
  double daaisy_accuracy = 0.0;
  double aia_accuracy = 0.0;
  int aia_matched = -1;
  double daaisy_millis = 0.0;
  double aia_millis = 0.0;
  std::vector<BitVec> random_states;
};

TrialResult run_trial(const DomainSetup& setup, const DriftSpec& drift, int s_size,
                      std::uint64_t state_seed, const AssessOptions& options, bool run_aia);

// First query count at which the snapshot sequence reaches the target
// accuracy (unknown modes count as differing); query_count if only the
// final model does.
int matched_queries(const AssessmentReport& report, const DomainModel& truth,
                    double target_accuracy);

// Deterministic per-trial seed stream.
std::uint64_t trial_seed(std::uint64_t master, const std::string& domain, double level,
                         const std::string& method, int trial);

// learned_model*.pddl, report.txt and query_log.sexp under out_dir.
void write_assessment_outputs(const std::string& out_dir, const AssessmentReport& report,
                              const GroundContext& ctx);

std::string report_text(const AssessmentReport& report, const GroundContext& ctx);
std::string query_log_sexp(const AssessmentReport& report, const GroundContext& ctx);

}  // namespace remodel
