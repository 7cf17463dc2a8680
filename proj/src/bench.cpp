#include "remodel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "remodel/pddl.hpp"
#include "remodel/rng.hpp"

namespace remodel {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string stem_of(const std::string& path) {
  const std::filesystem::path p(path);
  std::string stem = p.stem().string();
  // Corpus layout: benchmarks/<name>/domain.pddl
  if (stem == "domain" && p.has_parent_path()) stem = p.parent_path().filename().string();
  return stem;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  ExperimentConfig cfg;
  cfg.domain_path = j.at("domain").get<std::string>();
  for (const auto& p : j.at("problems")) cfg.problem_paths.push_back(p.get<std::string>());
  for (const auto& l : j.at("drift_levels")) cfg.drift_levels.push_back(l.get<double>());
  for (const auto& m : j.at("drift_methods"))
    cfg.drift_methods.push_back(drift_method_from_name(m.get<std::string>()));
  cfg.trials = j.value("trials", 1);
  cfg.trace_triplets = j.value("trace_triplets", 10);
  cfg.s_size = j.value("s_size", 30);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.expansion_cap = j.value("expansion_cap", kDefaultExpansionCap);
  cfg.domain_name = j.value("domain_name", std::string{});
  if (cfg.trials < 1) throw Error("config: trials must be >= 1");
  for (double level : cfg.drift_levels) {
    if (level <= 0.0 || level > 1.0) throw Error("config: drift levels must lie in (0,1]");
  }
  return cfg;
}

DomainSetup prepare_domain(const std::string& domain_path,
                           const std::vector<std::string>& problem_paths, int trace_triplets,
                           long long expansion_cap, const std::string& name) {
  DomainModel truth = parse_domain(read_file(domain_path));
  std::optional<DomainSetup> best;
  int best_len = -1;
  for (const auto& ppath : problem_paths) {
    ProblemInstance problem = parse_problem(read_file(ppath), truth);
    auto agent = std::make_shared<AgentSim>(truth, problem.ctx, AgentMode::Optimal,
                                            std::vector<BitVec>{problem.init});
    ObservationTrace trace;
    try {
      trace = agent->generate_trace(problem, expansion_cap, trace_triplets);
    } catch (const NoTraceError&) {
      continue;
    }
    if (trace.triplet_count() > best_len) {
      best_len = trace.triplet_count();
      DomainSetup setup{name.empty() ? stem_of(domain_path) : name,
                        truth,
                        problem.ctx,
                        std::move(agent),
                        {std::move(trace)},
                        {}};
      best.emplace(std::move(setup));
    }
    if (best_len >= trace_triplets) break;
  }
  if (!best) throw NoTraceError("no bundled problem yields a trace for " + domain_path);
  if (best_len < trace_triplets)
    best->warnings.push_back("no problem reaches " + std::to_string(trace_triplets) +
                             " triplets; using " + std::to_string(best_len));
  return std::move(*best);
}

int matched_queries(const AssessmentReport& report, const DomainModel& truth,
                    double target_accuracy) {
  const int n = truth.vocab().n_pals();
  auto snapshot_accuracy = [&](const std::vector<Mode>& modes) {
    int diff = 0;
    for (int pal = 0; pal < n; ++pal) {
      if (modes[static_cast<std::size_t>(pal)] != truth.mode(pal)) ++diff;
    }
    return 1.0 - static_cast<double>(diff) / static_cast<double>(n);
  };
  for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
    if (snapshot_accuracy(report.snapshots[k]) >= target_accuracy - 1e-12)
      return static_cast<int>(k) + 1;
  }
  return report.query_count;
}

std::uint64_t trial_seed(std::uint64_t master, const std::string& domain, double level,
                         const std::string& method, int trial) {
  std::ostringstream os;
  os << domain << '|' << fmt("%.6f", level) << '|' << method << '|' << trial;
  return derive_seed(master, os.str());
}

TrialResult run_trial(const DomainSetup& setup, const DriftSpec& drift, int s_size,
                      std::uint64_t state_seed, const AssessOptions& options, bool run_aia) {
  DomainModel m_init = inject_drift(setup.truth, drift);
  std::vector<BitVec> states = sample_random_states(*setup.agent, s_size, state_seed);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  AssessmentReport daaisy_report = daaisy(m_init, setup.observations, *setup.agent, states, options);
  const auto t1 = clock::now();
  daaisy_report.accuracy = accuracy(daaisy_report.learned.front(), setup.truth);

  TrialResult result{std::move(m_init),
                     std::move(daaisy_report),
                     AssessmentReport{},
                     0.0,
                     0.0,
                     0.0,
                     -1,
                     0.0,
                     0.0,
                     std::move(states)};
  result.init_accuracy = accuracy(result.m_init, setup.truth);
  result.daaisy_accuracy = *result.daaisy.accuracy;
  result.daaisy_millis = std::chrono::duration<double, std::milli>(t1 - t0).count();

  if (run_aia) {
    const auto t2 = clock::now();
    result.aia = aia_baseline(*setup.agent, result.random_states, options);
    const auto t3 = clock::now();
    result.aia.accuracy = accuracy(result.aia.learned.front(), setup.truth);
    result.aia_accuracy = *result.aia.accuracy;
    result.aia_matched = matched_queries(result.aia, setup.truth, result.daaisy_accuracy);
    result.aia_millis = std::chrono::duration<double, std::milli>(t3 - t2).count();
  }
  return result;
}

BenchOutput run_bench(const ExperimentConfig& config) {
  DomainSetup setup = prepare_domain(config.domain_path, config.problem_paths,
                                     config.trace_triplets, config.expansion_cap,
                                     config.domain_name);
  AssessOptions options;
  options.expansion_cap = config.expansion_cap;

  BenchOutput out;
  for (double level : config.drift_levels) {
    for (DriftMethod method : config.drift_methods) {
      for (int trial = 0; trial < config.trials; ++trial) {
        const std::string method_name = drift_method_name(method);
        const std::uint64_t seed =
            trial_seed(config.master_seed, setup.name, level, method_name, trial);
        ResultRow base;
        base.domain = setup.name;
        base.level = level;
        base.method = method_name;
        base.trial = trial;
        base.seed = seed;
        try {
          const TrialResult r = run_trial(setup, DriftSpec{level, method, seed}, config.s_size,
                                          derive_seed(seed, "states"), options, true);
          ResultRow d = base;
          d.strategy = "daaisy";
          d.queries = r.daaisy.query_count;
          d.accuracy = r.daaisy_accuracy;
          d.gamma_size = r.daaisy.gamma_delta.size();
          d.millis = r.daaisy_millis;
          d.status = "ok";
          out.rows.push_back(std::move(d));
          ResultRow a = base;
          a.strategy = "aia";
          a.queries = r.aia.query_count;
          a.accuracy = r.aia_accuracy;
          a.gamma_size = r.aia.gamma_delta.size();
          a.matched_queries = r.aia_matched;
          a.millis = r.aia_millis;
          a.status = "ok";
          out.rows.push_back(std::move(a));
        } catch (const InfeasibleDriftError&) {
          ResultRow row = base;
          row.strategy = "-";
          row.status = "infeasible";
          out.rows.push_back(std::move(row));
        } catch (const Error& e) {
          ResultRow row = base;
          row.strategy = "-";
          std::string what = e.what();
          std::replace(what.begin(), what.end(), ',', ';');
          std::replace(what.begin(), what.end(), '\n', ' ');
          row.status = "error:" + what;
          out.rows.push_back(std::move(row));
        }
      }
    }
  }

  // Summary: means and deviations recomputed from the rows.
  nlohmann::ordered_json summary;
  summary["domain"] = setup.name;
  summary["n_pals"] = setup.truth.vocab().n_pals();
  summary["trace_triplets"] = setup.observations.front().triplet_count();
  summary["master_seed"] = config.master_seed;
  summary["cells"] = nlohmann::ordered_json::array();
  for (double level : config.drift_levels) {
    for (DriftMethod method : config.drift_methods) {
      for (const char* strategy : {"daaisy", "aia"}) {
        std::vector<double> queries;
        std::vector<double> accs;
        for (const auto& row : out.rows) {
          if (row.status != "ok" || row.strategy != strategy) continue;
          if (row.level != level || row.method != drift_method_name(method)) continue;
          queries.push_back(row.queries);
          accs.push_back(row.accuracy);
        }
        if (queries.empty()) continue;
        auto mean = [](const std::vector<double>& xs) {
          double s = 0;
          for (double x : xs) s += x;
          return s / static_cast<double>(xs.size());
        };
        auto stddev = [&](const std::vector<double>& xs) {
          const double m = mean(xs);
          double s = 0;
          for (double x : xs) s += (x - m) * (x - m);
          return std::sqrt(s / static_cast<double>(xs.size()));
        };
        nlohmann::ordered_json cell;
        cell["level"] = level;
        cell["method"] = drift_method_name(method);
        cell["strategy"] = strategy;
        cell["trials"] = queries.size();
        cell["mean_queries"] = mean(queries);
        cell["std_queries"] = stddev(queries);
        cell["mean_accuracy"] = mean(accs);
        cell["std_accuracy"] = stddev(accs);
        summary["cells"].push_back(std::move(cell));
      }
    }
  }
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "domain,level,method,trial,seed,strategy,queries,accuracy,gamma_size,matched_queries,status\n";
  for (const auto& r : rows) {
    os << r.domain << ',' << fmt("%.4f", r.level) << ',' << r.method << ',' << r.trial << ','
       << r.seed << ',' << r.strategy << ',' << r.queries << ',' << fmt("%.6f", r.accuracy) << ','
       << r.gamma_size << ',' << r.matched_queries << ',' << r.status << '\n';
  }
  return os.str();
}

std::string timings_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "domain,level,method,trial,strategy,millis\n";
  for (const auto& r : rows) {
    os << r.domain << ',' << fmt("%.4f", r.level) << ',' << r.method << ',' << r.trial << ','
       << r.strategy << ',' << fmt("%.3f", r.millis) << '\n';
  }
  return os.str();
}

std::string report_text(const AssessmentReport& report, const GroundContext& ctx) {
  std::ostringstream os;
  os << "learned_models: " << report.learned.size() << '\n';
  os << "query_count: " << report.query_count << '\n';
  os << "gamma_delta_size: " << report.gamma_delta.size() << '\n';
  if (report.accuracy) os << "accuracy: " << fmt("%.6f", *report.accuracy) << '\n';
  os << "(gamma-delta";
  for (const auto& e : report.gamma_delta.entries) {
    os << "\n  (" << ctx.vocab().pal_text(e.pal) << " . "
       << (e.why == AffectedWhy::ExpandedEvidence ? "expanded" : "reduced") << ')';
  }
  os << ")\n";
  for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::string query_log_sexp(const AssessmentReport& report, const GroundContext& ctx) {
  std::ostringstream os;
  os << "(query-log\n";
  for (std::size_t i = 0; i < report.query_log.size(); ++i) {
    const auto& lq = report.query_log[i];
    os << " (query (id " << i + 1 << ")\n  (start " << ctx.state_text(lq.query.start) << ")\n";
    os << "  (plan";
    for (int ga : lq.query.plan) os << ' ' << ctx.ground_action_text(ga);
    os << ")\n  (response (executed " << lq.response.executed << ") (state "
       << ctx.state_text(lq.response.final_state) << ")))\n";
  }
  os << ")\n";
  return os.str();
}

void write_assessment_outputs(const std::string& out_dir, const AssessmentReport& report,
                              const GroundContext& ctx) {
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const std::string& f) {
    return (std::filesystem::path(out_dir) / f).string();
  };
  for (std::size_t i = 0; i < report.learned.size(); ++i) {
    const std::string fname =
        i == 0 ? "learned_model.pddl" : "learned_model_" + std::to_string(i + 1) + ".pddl";
    write_file(path(fname), print_domain(report.learned[i]));
  }
  write_file(path("report.txt"), report_text(report, ctx));
  write_file(path("query_log.sexp"), query_log_sexp(report, ctx));
}

}  // namespace remodel
