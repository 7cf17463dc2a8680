#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "remodel/agent.hpp"
#include "remodel/planner.hpp"
#include "remodel/rng.hpp"

using namespace remodel;
using namespace remodel::testing;

TEST_CASE("grounding enumerates type-correct bindings") {
  const DomainModel pairs = parse_domain(
      "(define (domain d) (:requirements :strips :typing)"
      " (:predicates (linked ?a - t ?b - t))"
      " (:action link :parameters (?a - t ?b - t)"
      " :precondition (and) :effect (and (linked ?a ?b))))");
  const ProblemInstance p = parse_problem(
      "(define (problem x) (:domain d) (:objects o1 o2 o3 - t) (:init) (:goal (and)))", pairs);
  CHECK(p.ctx->ground_action_count() == 9);

  const DomainModel gripper = load_domain("gripper/domain.pddl");
  const ProblemInstance g = load_problem("gripper/p02.pddl", gripper);
  CHECK(g.ctx->ground_actions_of(g.ctx->vocab().action_index("pick")).size() == 8);

  // No object of the required type: no groundings.
  const ProblemInstance empty = parse_problem(
      "(define (problem x) (:domain gripper) (:objects rooma - room) "
      "(:init (at-robby rooma)) (:goal (and)))",
      gripper);
  CHECK(empty.ctx->ground_actions_of(empty.ctx->vocab().action_index("pick")).empty());
}

TEST_CASE("grounding needs a concrete model") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = load_problem("gripper/p02.pddl", m);
  CHECK_THROWS_AS(GroundTask(m.with_mode(0, Mode::Unknown), p), AbstractModelError);
  CHECK_THROWS_AS(print_domain(m.with_mode(0, Mode::Unknown)), AbstractModelError);
}

TEST_CASE("objects of undeclared types are rejected") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  CHECK_THROWS_AS(parse_problem("(define (problem x) (:domain gripper)"
                                " (:objects mars - planet) (:init) (:goal (and)))",
                                m),
                  GroundingError);
}

TEST_CASE("apply enforces effects and the frame") {
  const DomainModel noop = parse_domain(
      "(define (domain d) (:requirements :strips :typing) (:predicates (p ?x - t))"
      " (:action idle :parameters (?x - t) :precondition (and) :effect (and)))");
  const ProblemInstance p0 = parse_problem(
      "(define (problem x) (:domain d) (:objects o - t) (:init (p o)) (:goal (and)))", noop);
  GroundTask t0(noop, p0);
  auto same = apply(t0, p0.init, 0);
  REQUIRE(same.has_value());
  CHECK(*same == p0.init);

  const DomainModel drift = load_domain("rover-sample/domain.pddl");
  const ProblemInstance rp = load_problem("rover-sample/p01.pddl", drift);
  const GroundContext& ctx = *rp.ctx;
  GroundTask task(drift, rp);
  const int sample = ctx.find_ground_action(
      ctx.vocab().action_index("sample_rock"),
      {ctx.object_id("rover1"), ctx.object_id("storage1"), ctx.object_id("waypoint1")});

  const BitVec charged = state_of(ctx, {"equipped_rock_analysis rover1", "battery_full rover1",
                                        "at rover1 waypoint1"});
  auto post = apply(task, charged, sample);
  REQUIRE(post.has_value());
  CHECK(post->test(ctx.atom_id({ctx.vocab().predicate_index("battery_half"),
                                {ctx.object_id("rover1")}})));
  CHECK_FALSE(post->test(ctx.atom_id({ctx.vocab().predicate_index("battery_full"),
                                      {ctx.object_id("rover1")}})));
  CHECK(charged.test(ctx.atom_id({ctx.vocab().predicate_index("battery_full"),
                                  {ctx.object_id("rover1")}})));  // input untouched

  // Half-charged battery is no longer enough.
  CHECK_FALSE(apply(task, rp.init, sample).has_value());
}

TEST_CASE("optimal plan lengths") {
  const DomainModel gripper = load_domain("gripper/domain.pddl");

  const ProblemInstance solved = parse_problem(
      "(define (problem x) (:domain gripper)"
      " (:objects rooma roomb - room b1 - ball g - gripper)"
      " (:init (at-robby rooma) (at b1 rooma) (free g)) (:goal (and (at b1 rooma))))",
      gripper);
  CHECK(optimal_plan(GroundTask(gripper, solved)).plan.length() == 0);

  const ProblemInstance one_ball = parse_problem(
      "(define (problem x) (:domain gripper)"
      " (:objects rooma roomb - room b1 - ball g - gripper)"
      " (:init (at-robby rooma) (at b1 rooma) (free g)) (:goal (and (at b1 roomb))))",
      gripper);
  GroundTask task(gripper, one_ball);
  const PlanResult r = optimal_plan(task);
  REQUIRE(r.status == SearchStatus::Solved);
  CHECK(r.plan.length() == 3);  // pick, move, drop
  const OracleResult oracle = oracle_bfs(gripper, *one_ball.ctx, one_ball.init, one_ball.goal);
  CHECK(oracle.length == 3);

  // An atom no action ever adds.
  const DomainModel weak = gripper.with_mode(
      find_pal(gripper.vocab(), "drop", "at", {0, 1}, Location::Eff), Mode::Absent);
  const PlanResult u = optimal_plan(GroundTask(weak, one_ball));
  CHECK(u.status == SearchStatus::Unsolvable);

  const PlanResult capped = optimal_plan(task, 1);
  CHECK(capped.status == SearchStatus::Exhausted);
}

TEST_CASE("search agrees with the exhaustive oracle on random tasks") {
  struct Case {
    const char* domain;
    const char* problem;
  };
  const Case cases[] = {{"gripper/domain.pddl", "gripper/p02.pddl"},
                        {"blocksworld/domain.pddl", "blocksworld/p02.pddl"},
                        {"miconic/domain.pddl", "miconic/p02.pddl"}};
  for (const Case& c : cases) {
    CAPTURE(c.domain);
    const DomainModel m = load_domain(c.domain);
    const ProblemInstance p = load_problem(c.problem, m);
    AgentSim agent(m, p.ctx, AgentMode::Optimal, {p.init});
    const auto walks = random_walk_states(agent, 12, 777);
    Rng rng(31);
    for (const auto& from : walks) {
      // Goal: a random slice of another reachable state.
      const auto& target = walks[static_cast<std::size_t>(rng.index(walks.size()))].state;
      GoalCondition goal;
      for (int atom = 0; atom < p.ctx->atom_count(); ++atom) {
        if (target.test(atom) && rng.coin()) goal.positive.push_back(atom);
        if (!target.test(atom) && rng.below(4) == 0) goal.negative.push_back(atom);
      }
      GroundTask task(m, p.ctx, from.state, goal);
      const PlanResult mine = optimal_plan(task);
      const OracleResult expected = oracle_bfs(m, *p.ctx, from.state, goal);
      REQUIRE_FALSE(expected.exhausted);
      REQUIRE(mine.status != SearchStatus::Exhausted);
      CHECK((mine.status == SearchStatus::Solved) == expected.solved);
      if (expected.solved) CHECK(mine.plan.length() == expected.length);
    }
  }
}

TEST_CASE("every contiguous slice of an optimal plan is optimal") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = load_problem("gripper/p01.pddl", m);
  AgentSim agent(m, p.ctx, AgentMode::Optimal, {p.init});
  const ObservationTrace trace = agent.generate_trace(p);
  GroundTask task(m, p.ctx, p.init, GoalCondition{});
  for (int i = 0; i <= trace.triplet_count(); i += 3) {
    BfsSweep sweep(task, trace.states[static_cast<std::size_t>(i)], kDefaultExpansionCap);
    for (int j = i; j <= trace.triplet_count(); j += 2) {
      auto plan = sweep.plan_to(trace.states[static_cast<std::size_t>(j)]);
      REQUIRE(plan.has_value());
      CHECK(plan->length() == j - i);
    }
  }
}

TEST_CASE("planning is deterministic") {
  const DomainModel m = load_domain("blocksworld/domain.pddl");
  const ProblemInstance p = load_problem("blocksworld/p02.pddl", m);
  GroundTask task(m, p);
  const PlanResult a = optimal_plan(task);
  const PlanResult b = optimal_plan(task);
  REQUIRE(a.status == SearchStatus::Solved);
  CHECK(a.plan.length() == 6);  // three-block tower rebuild
  CHECK(a.plan == b.plan);
}

TEST_CASE("trace validation") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const ProblemInstance p = load_problem("gripper/p02.pddl", m);
  AgentSim agent(m, p.ctx, AgentMode::Optimal, {p.init});
  ObservationTrace trace = agent.generate_trace(p);
  CHECK(validate_trace(m, trace));

  ObservationTrace empty;
  empty.ctx = p.ctx;
  empty.states.push_back(p.init);
  CHECK(validate_trace(m, empty));

  // Flip one effect: the post-state no longer matches.
  const DomainModel tampered = m.with_mode(
      find_pal(m.vocab(), "move", "at-robby", {1}, Location::Eff), Mode::Absent);
  CHECK_FALSE(validate_trace(tampered, trace));
}
