#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "remodel/agent.hpp"
#include "remodel/assess.hpp"
#include "remodel/pddl.hpp"
#include "remodel/planner.hpp"

namespace remodel::testing {

inline std::string bench_path(const std::string& rel) {
  return std::string(REMODEL_BENCHMARKS_DIR) + "/" + rel;
}

inline DomainModel load_domain(const std::string& rel) {
  return parse_domain(read_file(bench_path(rel)));
}

inline ProblemInstance load_problem(const std::string& rel, const DomainModel& m) {
  return parse_problem(read_file(bench_path(rel)), m);
}

// Same modes transplanted onto another structurally equal vocabulary, so
// models parsed from separate files become comparable.
inline DomainModel onto(const DomainModel& parsed, const DomainModel& reference) {
  return DomainModel(reference.vocab_ptr(), parsed.modes());
}

inline int find_pal(const Vocabulary& vocab, const std::string& action,
                    const std::string& predicate, const std::vector<int>& binding,
                    Location loc) {
  PalTuple pal;
  pal.action = vocab.action_index(action);
  pal.atom.predicate = vocab.predicate_index(predicate);
  pal.atom.binding = binding;
  pal.location = loc;
  return vocab.pal_index(pal);
}

inline BitVec state_of(const GroundContext& ctx, const std::vector<std::string>& atoms) {
  BitVec s = ctx.empty_state();
  for (const auto& text : atoms) {
    // "(pred obj...)" without parens: "pred obj obj"
    std::istringstream is(text);
    std::string pred;
    is >> pred;
    GroundAtom atom;
    atom.predicate = ctx.vocab().predicate_index(pred);
    std::string obj;
    while (is >> obj) atom.objects.push_back(ctx.object_id(obj));
    s.set(ctx.atom_id(atom), true);
  }
  return s;
}

}  // namespace remodel::testing
