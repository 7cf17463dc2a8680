#include <doctest.h>

#include <algorithm>
#include <cctype>

#include "helpers.hpp"
#include "remodel/agent.hpp"
#include "remodel/pddl.hpp"

using namespace remodel;
using namespace remodel::testing;

namespace {

const char* kCorpus[] = {"gripper/domain.pddl",      "blocksworld/domain.pddl",
                         "miconic/domain.pddl",      "satellite/domain.pddl",
                         "ferry/domain.pddl",        "rover-sample/domain.pddl"};

}  // namespace

TEST_CASE("gripper parses to twenty pal-tuples") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  CHECK(m.vocab().n_pals() == 20);
  CHECK(m.concrete());
}

TEST_CASE("corpus pal universe sizes") {
  CHECK(load_domain("blocksworld/domain.pddl").vocab().n_pals() == 64);
  CHECK(load_domain("miconic/domain.pddl").vocab().n_pals() == 48);
  CHECK(load_domain("satellite/domain.pddl").vocab().n_pals() == 50);
}

TEST_CASE("rover initial model encodes the battery literals") {
  const DomainModel init = load_domain("rover-sample/domain_init.pddl");
  const Vocabulary& vocab = init.vocab();
  const int pre = find_pal(vocab, "sample_rock", "battery_half", {0}, Location::Pre);
  const int eff = find_pal(vocab, "sample_rock", "battery_half", {0}, Location::Eff);
  REQUIRE(pre >= 0);
  CHECK(init.mode(pre) == Mode::Plus);
  CHECK(init.mode(eff) == Mode::Minus);
}

TEST_CASE("an empty action maps every pal-tuple to absent") {
  const DomainModel m = parse_domain(
      "(define (domain d) (:requirements :strips :typing)"
      " (:predicates (p ?x - t)) (:action noop :parameters (?x - t)"
      " :precondition (and) :effect (and)))");
  for (int pal = 0; pal < m.vocab().n_pals(); ++pal) CHECK(m.mode(pal) == Mode::Absent);
  const std::string text = print_domain(m);
  CHECK(text.find(":precondition (and)") != std::string::npos);
  CHECK(text.find(":effect (and)") != std::string::npos);
}

TEST_CASE("round trips over the bundled corpus") {
  for (const char* rel : kCorpus) {
    CAPTURE(rel);
    const DomainModel m = load_domain(rel);
    const std::string printed = print_domain(m);
    CHECK(printed == print_domain(m));  // byte determinism
    const DomainModel reparsed = parse_domain(printed);
    CHECK(reparsed.vocab() == m.vocab());
    CHECK(onto(reparsed, m) == m);
    CHECK(print_domain(reparsed) == printed);
  }
}

TEST_CASE("round trips normalize implicit typing and hierarchies") {
  // No :types section at all.
  const DomainModel bare = parse_domain(
      "(define (domain d) (:predicates (p ?x - t))"
      " (:action a :parameters (?x - t) :precondition (and (p ?x)) :effect (and)))");
  const DomainModel bare2 = parse_domain(print_domain(bare));
  CHECK(bare2.vocab() == bare.vocab());
  CHECK(onto(bare2, bare) == bare);

  // A parent chain whose names sort against the grouping.
  const DomainModel chain = parse_domain(
      "(define (domain d) (:requirements :strips :typing)"
      " (:types a b - a)"
      " (:predicates (p ?x - b) (q ?y - a))"
      " (:action act :parameters (?x - b) :precondition (and (p ?x) (q ?x))"
      " :effect (and)))");
  const DomainModel chain2 = parse_domain(print_domain(chain));
  CHECK(chain2.vocab() == chain.vocab());
  CHECK(onto(chain2, chain) == chain);
}

TEST_CASE("whitespace and identifier case do not matter") {
  std::string text = read_file(bench_path("gripper/domain.pddl"));
  std::string mangled;
  for (char c : text) {
    mangled.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (c == '(') mangled += "  \n\t ";
  }
  mangled += "\n; trailing comment\n";
  const DomainModel a = parse_domain(text);
  const DomainModel b = parse_domain(mangled);
  CHECK(a.vocab() == b.vocab());
  CHECK(onto(b, a) == a);
}

TEST_CASE("unsupported constructs are rejected by name") {
  try {
    parse_domain("(define (domain d) (:requirements :strips :adl))");
    FAIL("expected an unsupported-feature error");
  } catch (const UnsupportedFeatureError& e) {
    CHECK(e.keyword() == ":adl");
  }
  CHECK_THROWS_AS(parse_domain("(define (domain d) (:functions (cost)))"),
                  UnsupportedFeatureError);
  CHECK_THROWS_AS(
      parse_domain("(define (domain d) (:predicates (p)) (:action a :parameters ()"
                   " :precondition (or (p)) :effect (and)))"),
      UnsupportedFeatureError);
}

TEST_CASE("syntax errors carry their position") {
  try {
    parse_domain("(define (domain d)\n  (:predicates (p))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
    CHECK(e.col() >= 1);
  }
}

TEST_CASE("conflicting signs for one literal are rejected") {
  CHECK_THROWS_AS(
      parse_domain("(define (domain d) (:predicates (p ?x - t))"
                   " (:action a :parameters (?x - t)"
                   " :precondition (and (p ?x) (not (p ?x))) :effect (and)))"),
      IllegalModeError);
}

TEST_CASE("problem parsing and vocabulary errors") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = load_problem("gripper/p01.pddl", m);
  CHECK(p.ctx->object_count() == 8);
  CHECK(p.init.count() == 7);  // robby, four balls, two free grippers
  CHECK(p.goal.positive.size() == 4);
  CHECK(p.goal.negative.empty());

  CHECK_THROWS_AS(parse_problem("(define (problem x) (:domain gripper)"
                                "(:objects b - ball) (:init (at b nowhere)) (:goal (and)))",
                                m),
                  VocabularyError);
  CHECK_THROWS_AS(parse_problem("(define (problem x) (:domain gripper)"
                                "(:objects b - ball) (:init (flying b)) (:goal (and)))",
                                m),
                  VocabularyError);
}

TEST_CASE("goal literals may be negative") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = parse_problem(
      "(define (problem x) (:domain gripper)"
      " (:objects rooma roomb - room b1 - ball g - gripper)"
      " (:init (at-robby rooma) (at b1 rooma) (free g))"
      " (:goal (and (at b1 roomb) (not (at-robby roomb)))))",
      m);
  CHECK(p.goal.positive.size() == 1);
  CHECK(p.goal.negative.size() == 1);
}

TEST_CASE("trace round trip and alternation checks") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = load_problem("gripper/p01.pddl", m);
  AgentSim agent(m, p.ctx, AgentMode::Optimal, {p.init});
  const ObservationTrace trace = agent.generate_trace(p, kDefaultExpansionCap, 10);
  REQUIRE(trace.triplet_count() == 10);
  CHECK(trace.states.size() == 11);

  const std::string text = write_trace(trace);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 11 + 10);  // objects + records
  const ObservationTrace back = read_trace(text, m.vocab_ptr());
  CHECK(back.states == trace.states);
  CHECK(back.actions == trace.actions);
  CHECK(write_trace(back) == text);

  const ObservationTrace same_ctx = read_trace(text, p.ctx);
  CHECK(same_ctx.ctx == p.ctx);

  // One triplet: two states, one action.
  ObservationTrace small = trace;
  small.states.assign(trace.states.begin(), trace.states.begin() + 2);
  small.actions.assign(trace.actions.begin(), trace.actions.begin() + 1);
  const std::string small_text = write_trace(small);
  CHECK(std::count(small_text.begin(), small_text.end(), '(') >= 3);

  const std::string objects_header = small_text.substr(0, small_text.find('\n') + 1);
  CHECK_THROWS_AS(read_trace(objects_header + "(action (move rooma roomb))\n", m.vocab_ptr()),
                  ParseError);
  CHECK_THROWS_AS(
      read_trace(objects_header + "(state)\n(action (move rooma roomb))\n(action (move roomb rooma))\n(state)\n",
                 m.vocab_ptr()),
      ParseError);
}

TEST_CASE("trace objects must match an imposed context") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p01 = load_problem("gripper/p01.pddl", m);
  const ProblemInstance p02 = load_problem("gripper/p02.pddl", m);
  AgentSim agent(m, p02.ctx, AgentMode::Optimal, {p02.init});
  const std::string text = write_trace(agent.generate_trace(p02));
  CHECK_THROWS_AS(read_trace(text, p01.ctx), VocabularyError);
}
