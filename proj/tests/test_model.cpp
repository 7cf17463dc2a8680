#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"
#include "remodel/model.hpp"
#include "remodel/rng.hpp"

using namespace remodel;
using namespace remodel::testing;

TEST_CASE("lifted instantiation of a two-waypoint predicate") {
  std::vector<PredicateSignature> preds{{"can_traverse", {"rover", "waypoint", "waypoint"}}};
  std::vector<ActionSignature> actions{
      {"navigate", {"rover", "waypoint", "waypoint"}, {"rover", "src", "dest"}}};
  const auto pals = enumerate_pal_tuples(preds, actions, {});
  // (r,src,dest) (r,dest,src) (r,src,src) (r,dest,dest), each in pre and eff
  CHECK(pals.size() == 8);
  std::set<std::vector<int>> bindings;
  for (const auto& pal : pals) bindings.insert(pal.atom.binding);
  CHECK(bindings == std::set<std::vector<int>>{{0, 1, 1}, {0, 1, 2}, {0, 2, 1}, {0, 2, 2}});
}

TEST_CASE("zero-arity predicate yields one lifted atom") {
  std::vector<PredicateSignature> preds{{"flag", {}}};
  std::vector<ActionSignature> actions{{"act", {"t"}, {"x"}}};
  const auto pals = enumerate_pal_tuples(preds, actions, {});
  CHECK(pals.size() == 2);
  CHECK(pals[0].location == Location::Pre);
  CHECK(pals[1].location == Location::Eff);
}

TEST_CASE("pal enumeration order is reproducible and input-order independent") {
  std::vector<PredicateSignature> preds{{"b", {"t"}}, {"a", {"t", "t"}}};
  std::vector<ActionSignature> actions{{"go", {"t", "t"}, {"x", "y"}}, {"do", {"t"}, {"z"}}};
  const auto first = enumerate_pal_tuples(preds, actions, {});
  std::reverse(preds.begin(), preds.end());
  std::reverse(actions.begin(), actions.end());
  const auto second = enumerate_pal_tuples(preds, actions, {});
  CHECK(first == second);
}

TEST_CASE("typed enumeration skips incompatible bindings, subtypes allowed") {
  std::map<std::string, std::string> types{{"car", "vehicle"}};
  std::vector<PredicateSignature> preds{{"parked", {"vehicle"}}};
  std::vector<ActionSignature> actions{{"park", {"car", "spot"}, {"c", "s"}}};
  const auto pals = enumerate_pal_tuples(preds, actions, types);
  CHECK(pals.size() == 2);  // only ?c is vehicle-compatible
  CHECK(pals[0].atom.binding == std::vector<int>{0});
}

TEST_CASE("vocabulary validation") {
  CHECK_THROWS_AS(Vocabulary({{"p", {}}, {"p", {}}}, {}, {}), VocabularyError);
  CHECK_THROWS_AS(Vocabulary({}, {{"a", {"t", "t"}, {"x", "x"}}}, {}), VocabularyError);
  CHECK_THROWS_AS(Vocabulary({}, {}, {{"a", "b"}, {"b", "a"}}), VocabularyError);
}

TEST_CASE("the seven legal pa-values") {
  CHECK(legal_pa_values().size() == 7);
  CHECK_FALSE(pa_value_legal(Mode::Plus, Mode::Plus));
  CHECK_FALSE(pa_value_legal(Mode::Minus, Mode::Minus));
  CHECK(pa_value_legal(Mode::Plus, Mode::Minus));
  CHECK(pa_value_legal(Mode::Unknown, Mode::Plus));
  for (const PaValue& v : legal_pa_values()) CHECK(pa_value_legal(v.pre, v.eff));
}

TEST_CASE("consistent pa-values for each presence pair") {
  auto values = [](Presence pre, Presence post) {
    return consistent_pa_values({pre, post});
  };
  const auto pn = values(Presence::Pos, Presence::Neg);
  REQUIRE(pn.size() == 2);
  CHECK(pn[0] == PaValue{Mode::Plus, Mode::Minus});
  CHECK(pn[1] == PaValue{Mode::Absent, Mode::Minus});

  const auto pp = values(Presence::Pos, Presence::Pos);
  REQUIRE(pp.size() == 3);
  CHECK(pp[0] == PaValue{Mode::Plus, Mode::Absent});
  CHECK(pp[1] == PaValue{Mode::Absent, Mode::Plus});
  CHECK(pp[2] == PaValue{Mode::Absent, Mode::Absent});

  const auto np = values(Presence::Neg, Presence::Pos);
  REQUIRE(np.size() == 2);
  CHECK(np[0] == PaValue{Mode::Minus, Mode::Plus});
  CHECK(np[1] == PaValue{Mode::Absent, Mode::Plus});

  const auto nn = values(Presence::Neg, Presence::Neg);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0] == PaValue{Mode::Minus, Mode::Absent});
  CHECK(nn[1] == PaValue{Mode::Absent, Mode::Minus});
  CHECK(nn[2] == PaValue{Mode::Absent, Mode::Absent});
}

TEST_CASE("consistency table equals one-action brute-force simulation") {
  for (Presence pre : {Presence::Pos, Presence::Neg}) {
    for (Presence post : {Presence::Pos, Presence::Neg}) {
      const PresenceTuple pt{pre, post};
      const std::uint8_t mask = consistent_pa_mask(pt);
      for (int i = 0; i < 7; ++i) {
        const bool in_table = (mask >> i) & 1;
        const bool simulated =
            pa_value_consistent_by_simulation(legal_pa_values()[static_cast<std::size_t>(i)], pt);
        CHECK(in_table == simulated);
      }
    }
  }
}

TEST_CASE("model diff on the rover pair") {
  const DomainModel drift = load_domain("rover-sample/domain.pddl");
  const DomainModel init = onto(load_domain("rover-sample/domain_init.pddl"), drift);
  CHECK(model_diff(drift, drift) == 0);
  CHECK(model_diff(init, drift) == 5);
  CHECK(model_diff(drift, init) == 5);

  const int pal = find_pal(drift.vocab(), "recharge", "battery_full", {0}, Location::Eff);
  REQUIRE(pal >= 0);
  CHECK(model_diff(drift.with_mode(pal, Mode::Absent), drift) == 1);
}

TEST_CASE("model diff is a metric-like difference") {
  const DomainModel base = load_domain("gripper/domain.pddl");
  Rng rng(99);
  auto random_model = [&]() {
    std::vector<Mode> modes(static_cast<std::size_t>(base.vocab().n_pals()));
    for (int pa = 0; pa < base.vocab().n_pas(); ++pa) {
      const PaValue v = legal_pa_values()[static_cast<std::size_t>(rng.index(7))];
      modes[static_cast<std::size_t>(2 * pa)] = v.pre;
      modes[static_cast<std::size_t>(2 * pa + 1)] = v.eff;
    }
    return base.with_modes(std::move(modes));
  };
  for (int round = 0; round < 50; ++round) {
    const DomainModel a = random_model();
    const DomainModel b = random_model();
    const DomainModel c = random_model();
    CHECK(model_diff(a, a) == 0);
    CHECK(model_diff(a, b) == model_diff(b, a));
    CHECK(model_diff(a, c) <= model_diff(a, b) + model_diff(b, c));
  }
}

TEST_CASE("model diff rejects mismatched vocabularies") {
  const DomainModel a = load_domain("gripper/domain.pddl");
  const DomainModel b = load_domain("ferry/domain.pddl");
  CHECK_THROWS_AS(model_diff(a, b), IncomparableModelsError);
}

TEST_CASE("abstraction relation") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  CHECK(is_abstraction(m, m));
  const DomainModel one_unknown = m.with_mode(3, Mode::Unknown);
  CHECK(is_abstraction(one_unknown, m));
  const int move_pre = find_pal(m.vocab(), "move", "at-robby", {0}, Location::Pre);
  REQUIRE(m.mode(move_pre) == Mode::Plus);
  CHECK_FALSE(is_abstraction(m.with_mode(move_pre, Mode::Absent), m));

  Rng rng(5);
  DomainModel blanked = m;
  for (int round = 0; round < 20; ++round) {
    blanked = blanked.with_mode(rng.index(static_cast<std::size_t>(m.vocab().n_pals())),
                                Mode::Unknown);
    CHECK(is_abstraction(blanked, m));
    CHECK(is_abstraction(blanked, one_unknown) ==
          (blanked.mode(3) == Mode::Unknown));  // transitivity needs pal 3 blanked
  }
}

TEST_CASE("presence of an atom across a triplet") {
  const DomainModel drift = load_domain("rover-sample/domain.pddl");
  const ProblemInstance problem = load_problem("rover-sample/p01.pddl", drift);
  const GroundContext& ctx = *problem.ctx;

  const BitVec pre = state_of(ctx, {"equipped_rock_analysis rover1", "battery_full rover1",
                                    "at rover1 waypoint1"});
  const int ga = ctx.find_ground_action(ctx.vocab().action_index("sample_rock"),
                                        {ctx.object_id("rover1"), ctx.object_id("storage1"),
                                         ctx.object_id("waypoint1")});
  REQUIRE(ga >= 0);
  auto post = apply_action(drift, ctx, pre, ga);
  REQUIRE(post.has_value());
  const ActionTriplet t{pre, ga, *post};

  const int at_atom = ctx.atom_id({ctx.vocab().predicate_index("at"),
                                   {ctx.object_id("rover1"), ctx.object_id("waypoint1")}});
  const int full_atom = ctx.atom_id({ctx.vocab().predicate_index("battery_full"),
                                     {ctx.object_id("rover1")}});
  const int reserve_atom = ctx.atom_id({ctx.vocab().predicate_index("battery_reserve"),
                                        {ctx.object_id("rover1")}});
  CHECK(presence_tuple(t, at_atom) == PresenceTuple{Presence::Pos, Presence::Pos});
  CHECK(presence_tuple(t, full_atom) == PresenceTuple{Presence::Pos, Presence::Neg});
  CHECK(presence_tuple(t, reserve_atom) == PresenceTuple{Presence::Neg, Presence::Neg});

  GroundAtom unknown_object{ctx.vocab().predicate_index("at"), {ctx.object_id("rover1"), 99}};
  CHECK_THROWS_AS(ctx.atom_id(unknown_object), GroundingError);
}

TEST_CASE("triplet consistency against both rover models") {
  const DomainModel drift = load_domain("rover-sample/domain.pddl");
  const DomainModel init = onto(load_domain("rover-sample/domain_init.pddl"), drift);
  const ProblemInstance problem = load_problem("rover-sample/p01.pddl", drift);
  const GroundContext& ctx = *problem.ctx;

  const BitVec pre = state_of(ctx, {"equipped_rock_analysis rover1", "battery_full rover1",
                                    "at rover1 waypoint1"});
  const int ga = ctx.find_ground_action(ctx.vocab().action_index("sample_rock"),
                                        {ctx.object_id("rover1"), ctx.object_id("storage1"),
                                         ctx.object_id("waypoint1")});
  auto post = apply_action(drift, ctx, pre, ga);
  REQUIRE(post.has_value());
  const ActionTriplet t{pre, ga, *post};

  CHECK(triplet_consistent(drift, ctx, t));
  CHECK_FALSE(triplet_consistent(init, ctx, t));  // wrong battery effects

  // Unsatisfied positive precondition.
  BitVec no_battery = pre;
  no_battery.set(ctx.atom_id({ctx.vocab().predicate_index("battery_full"),
                              {ctx.object_id("rover1")}}),
                 false);
  CHECK_FALSE(triplet_consistent(drift, ctx, ActionTriplet{no_battery, ga, *post}));

  CHECK_THROWS_AS(triplet_consistent(drift.with_mode(0, Mode::Unknown), ctx, t),
                  AbstractModelError);
}

TEST_CASE("mode maps must stay inside the legal pa range") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const int pre_pal = find_pal(m.vocab(), "pick", "carry", {0, 2}, Location::Pre);
  REQUIRE(pre_pal >= 0);
  REQUIRE(m.mode(pre_pal + 1) == Mode::Plus);  // carry is an add effect of pick
  CHECK_THROWS_AS(m.with_mode(pre_pal, Mode::Plus), IllegalModeError);
}

TEST_CASE("pal dump lists every pal-tuple once in canonical order") {
  const DomainModel m = load_domain("gripper/domain.pddl");
  const std::string dump = dump_pal_modes(m);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == m.vocab().n_pals());
  CHECK(dump == dump_pal_modes(m));
  CHECK(dump.find("move at-robby(?from) pre +") != std::string::npos);
}
