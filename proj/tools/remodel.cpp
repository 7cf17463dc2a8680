// Command-line front end: single assessments, drift sweeps, model diffs,
// trace generation and drift injection over PDDL domains.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "remodel/assess.hpp"
#include "remodel/bench.hpp"
#include "remodel/pddl.hpp"
#include "remodel/rng.hpp"

namespace fs = std::filesystem;
using namespace remodel;

namespace {

// Bare names fall back to the corpus directory from REMODEL_CORPUS:
// <corpus>/<name>, <corpus>/<name>.pddl, <corpus>/<name>/domain.pddl.
std::string resolve_input(const std::string& given) {
  if (fs::is_regular_file(given)) return given;
  const char* corpus = std::getenv("REMODEL_CORPUS");
  if (corpus) {
    const std::string candidates[] = {std::string(corpus) + "/" + given,
                                      std::string(corpus) + "/" + given + ".pddl",
                                      std::string(corpus) + "/" + given + "/domain.pddl"};
    for (const std::string& candidate : candidates) {
      if (fs::is_regular_file(candidate)) return candidate;
    }
  }
  return given;  // let the reader report the miss
}

std::string resolve_near(const fs::path& base, const std::string& given) {
  if (fs::path(given).is_absolute() || fs::is_regular_file(given)) return given;
  const fs::path joined = base / given;
  if (fs::is_regular_file(joined)) return joined.string();
  return resolve_input(given);
}

DomainModel transplant(const DomainModel& parsed, const DomainModel& reference) {
  if (!(parsed.vocab() == reference.vocab()))
    throw IncomparableModelsError("model file uses a different vocabulary");
  return DomainModel(reference.vocab_ptr(), parsed.modes());
}

int fail_with(const Error& e) {
  nlohmann::ordered_json record;
  record["error"] = dynamic_cast<const IoError*>(&e)              ? "io"
                    : dynamic_cast<const ParseError*>(&e)         ? "parse"
                    : dynamic_cast<const InfeasibleDriftError*>(&e) ? "infeasible-drift"
                                                                  : "domain";
  record["message"] = e.what();
  std::cerr << record.dump() << "\n";
  return dynamic_cast<const IoError*>(&e) ? 2 : 3;
}

struct AssessArgs {
  std::string domain;
  std::vector<std::string> problems;
  std::string trace_file;
  bool generate_trace = false;
  std::string init_model;
  double drift_amount = -1.0;
  std::string drift_method = "mixed";
  std::uint64_t seed = 1;
  int s_size = 30;
  int triplets = 10;
  long long expansion_cap = kDefaultExpansionCap;
  std::string out_dir = "out";
};

int cmd_assess(const AssessArgs& args) {
  DomainModel truth = parse_domain(read_file(resolve_input(args.domain)));

  std::shared_ptr<AgentSim> agent;
  std::vector<ObservationTrace> observations;
  if (!args.trace_file.empty()) {
    ObservationTrace trace = read_trace(read_file(args.trace_file), truth.vocab_ptr());
    agent = std::make_shared<AgentSim>(truth, trace.ctx, AgentMode::Optimal,
                                       std::vector<BitVec>{trace.states.front()});
    observations.push_back(std::move(trace));
  } else {
    if (!args.generate_trace)
      throw Error("assess needs either --trace or --generate-trace");
    if (args.problems.empty())
      throw Error("assess needs --problem files when generating a trace");
    std::vector<std::string> resolved;
    for (const auto& p : args.problems) resolved.push_back(resolve_input(p));
    DomainSetup setup = prepare_domain(resolve_input(args.domain), resolved, args.triplets,
                                       args.expansion_cap);
    agent = setup.agent;
    observations = setup.observations;
  }

  DomainModel m_init = [&]() {
    if (!args.init_model.empty())
      return transplant(parse_domain(read_file(resolve_input(args.init_model))), truth);
    if (args.drift_amount < 0.0)
      throw Error("assess needs either --init-model or --drift-amount");
    return inject_drift(truth, DriftSpec{args.drift_amount,
                                         drift_method_from_name(args.drift_method), args.seed});
  }();

  AssessOptions options;
  options.expansion_cap = args.expansion_cap;
  const auto states = sample_random_states(*agent, args.s_size, derive_seed(args.seed, "states"));
  AssessmentReport report = daaisy(m_init, observations, *agent, states, options);
  report.accuracy = accuracy(report.learned.front(), truth);

  write_assessment_outputs(args.out_dir, report, agent->context());
  write_file((fs::path(args.out_dir) / "initial_model.pddl").string(), print_domain(m_init));
  write_file((fs::path(args.out_dir) / "trace.sexp").string(),
             write_trace(observations.front()));

  std::cout << "learned models: " << report.learned.size() << "\n"
            << "queries: " << report.query_count << "\n"
            << "affected pal-tuples: " << report.gamma_delta.size() << "\n"
            << "accuracy: " << *report.accuracy << "\n"
            << "outputs in: " << args.out_dir << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig config = load_config(config_path);
  const fs::path base = fs::path(config_path).parent_path();
  config.domain_path = resolve_near(base, config.domain_path);
  for (auto& p : config.problem_paths) p = resolve_near(base, p);

  const BenchOutput output = run_bench(config);
  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "results.csv").string(), rows_to_csv(output.rows));
  write_file((fs::path(out_dir) / "timings.csv").string(), timings_to_csv(output.rows));
  write_file((fs::path(out_dir) / "summary.json").string(), output.summary_json);
  std::cout << output.rows.size() << " result rows written to " << out_dir << "\n";
  return 0;
}

int cmd_diff(const std::string& file_a, const std::string& file_b) {
  DomainModel a = parse_domain(read_file(resolve_input(file_a)));
  DomainModel b = transplant(parse_domain(read_file(resolve_input(file_b))), a);
  int delta = 0;
  for (int pal = 0; pal < a.vocab().n_pals(); ++pal) {
    if (a.mode(pal) == b.mode(pal)) continue;
    ++delta;
    std::cout << a.vocab().pal_text(pal) << ": " << mode_char(a.mode(pal)) << " -> "
              << mode_char(b.mode(pal)) << "\n";
  }
  std::cout << "delta: " << delta << "\n";
  return 0;
}

int cmd_trace(const std::string& domain, const std::string& problem, const std::string& out,
              int triplets, long long cap) {
  DomainModel truth = parse_domain(read_file(resolve_input(domain)));
  ProblemInstance instance = parse_problem(read_file(resolve_input(problem)), truth);
  AgentSim agent(truth, instance.ctx, AgentMode::Optimal, {instance.init});
  const ObservationTrace trace = agent.generate_trace(instance, cap, triplets);
  const std::string text = write_trace(trace);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

int cmd_drift(const std::string& domain, double amount, const std::string& method,
              std::uint64_t seed, const std::string& out) {
  DomainModel truth = parse_domain(read_file(resolve_input(domain)));
  DomainModel drifted =
      inject_drift(truth, DriftSpec{amount, drift_method_from_name(method), seed});
  const std::string text = print_domain(drifted);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
  std::cerr << "flipped pal-tuples: " << model_diff(truth, drifted) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differential assessment of drifted planning agents"};
  app.require_subcommand(1);

  AssessArgs assess_args;
  auto* assess_cmd = app.add_subcommand("assess", "assess one drifted agent");
  assess_cmd->add_option("--domain", assess_args.domain, "ground-truth domain (the agent)")
      ->required();
  assess_cmd->add_option("--problem", assess_args.problems, "problem file(s)");
  assess_cmd->add_option("--trace", assess_args.trace_file, "observation trace file");
  assess_cmd->add_flag("--generate-trace", assess_args.generate_trace,
                       "generate the trace from the agent");
  assess_cmd->add_option("--init-model", assess_args.init_model, "previously known model file");
  assess_cmd->add_option("--drift-amount", assess_args.drift_amount,
                         "synthesize the initial model at this drift level");
  assess_cmd->add_option("--drift-method", assess_args.drift_method, "drop|add|mixed");
  assess_cmd->add_option("--seed", assess_args.seed, "trial seed");
  assess_cmd->add_option("--s-size", assess_args.s_size, "random state pool size");
  assess_cmd->add_option("--triplets", assess_args.triplets, "trace triplet count");
  assess_cmd->add_option("--expansion-cap", assess_args.expansion_cap, "planner expansion cap");
  assess_cmd->add_option("--out-dir", assess_args.out_dir, "output directory");

  std::string config_path;
  std::string bench_out = "bench-out";
  auto* bench_cmd = app.add_subcommand("bench", "drift sweep over one domain");
  bench_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  bench_cmd->add_option("--out-dir", bench_out, "output directory");

  std::string diff_a;
  std::string diff_b;
  auto* diff_cmd = app.add_subcommand("diff", "pal-tuple diff of two domain files");
  diff_cmd->add_option("a", diff_a, "first domain file")->required();
  diff_cmd->add_option("b", diff_b, "second domain file")->required();

  std::string trace_domain;
  std::string trace_problem;
  std::string trace_out;
  int trace_triplets = -1;
  long long trace_cap = kDefaultExpansionCap;
  auto* trace_cmd = app.add_subcommand("trace", "generate an optimal observation trace");
  trace_cmd->add_option("--domain", trace_domain)->required();
  trace_cmd->add_option("--problem", trace_problem)->required();
  trace_cmd->add_option("--out", trace_out, "output file ('-' for stdout)");
  trace_cmd->add_option("--triplets", trace_triplets, "truncate to this many triplets");
  trace_cmd->add_option("--expansion-cap", trace_cap);

  std::string drift_domain;
  double drift_amount = 0.0;
  std::string drift_method = "mixed";
  std::uint64_t drift_seed = 1;
  std::string drift_out;
  auto* drift_cmd = app.add_subcommand("drift", "inject drift into a domain model");
  drift_cmd->add_option("--domain", drift_domain)->required();
  drift_cmd->add_option("--drift-amount", drift_amount)->required();
  drift_cmd->add_option("--drift-method", drift_method, "drop|add|mixed");
  drift_cmd->add_option("--seed", drift_seed);
  drift_cmd->add_option("--out", drift_out, "output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (assess_cmd->parsed()) return cmd_assess(assess_args);
    if (bench_cmd->parsed()) return cmd_bench(config_path, bench_out);
    if (diff_cmd->parsed()) return cmd_diff(diff_a, diff_b);
    if (trace_cmd->parsed())
      return cmd_trace(trace_domain, trace_problem, trace_out, trace_triplets, trace_cap);
    if (drift_cmd->parsed())
      return cmd_drift(drift_domain, drift_amount, drift_method, drift_seed, drift_out);
  } catch (const Error& e) {
    return fail_with(e);
  }
  return 1;
}
