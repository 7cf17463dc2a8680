#pragma once

#include <memory>
#include <string>
#include <vector>

#include "remodel/model.hpp"
#include "remodel/state.hpp"

namespace remodel {

struct ProblemInstance {
  std::string name;
  std::shared_ptr<const GroundContext> ctx;
  BitVec init;
  GoalCondition goal;
};

// Typed-STRIPS subset: :strips, :typing, :negative-preconditions. Any
// other requirement or construct is rejected, never silently dropped.
// Identifiers are normalized to lower case.
DomainModel parse_domain(const std::string& text);

// Canonical PDDL text; parse_domain(print_domain(m)) == m and repeated
// prints are byte-identical. Rejects abstract models.
std::string print_domain(const DomainModel& m);

ProblemInstance parse_problem(const std::string& text, const DomainModel& m);

// Trace files are s-expression records: one (objects ...) header, then
// alternating (state ...) / (action ...) records, first and last a state.
ObservationTrace read_trace(const std::string& text,
                            const std::shared_ptr<const Vocabulary>& vocab);
ObservationTrace read_trace(const std::string& text,
                            const std::shared_ptr<const GroundContext>& ctx);
std::string write_trace(const ObservationTrace& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace remodel
