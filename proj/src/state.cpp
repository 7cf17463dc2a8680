#include "remodel/state.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace remodel {

int BitVec::count() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<int> BitVec::set_bits() const {
  std::vector<int> out;
  for (int i = 0; i < bits_; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

GroundContext::GroundContext(std::shared_ptr<const Vocabulary> vocab,
                             std::vector<std::pair<std::string, std::string>> objects)
    : vocab_(std::move(vocab)), objects_(std::move(objects)) {
  std::sort(objects_.begin(), objects_.end());
  std::set<std::string> names;
  for (const auto& [name, type] : objects_) {
    if (!names.insert(name).second)
      throw GroundingError("duplicate object: " + name);
    if (!vocab_->type_known(type))
      throw GroundingError("object " + name + " has undeclared type: " + type);
  }

  // Atom universe: predicates in canonical order, argument tuples in
  // object-id lexicographic order.
  const auto& preds = vocab_->predicates();
  for (int pi = 0; pi < static_cast<int>(preds.size()); ++pi) {
    const auto& pred = preds[static_cast<std::size_t>(pi)];
    const std::size_t arity = pred.parameter_types.size();
    std::vector<std::vector<int>> choices(arity);
    bool feasible = true;
    for (std::size_t pos = 0; pos < arity; ++pos) {
      for (int oid = 0; oid < object_count(); ++oid) {
        if (vocab_->is_subtype(object_type(oid), pred.parameter_types[pos]))
          choices[pos].push_back(oid);
      }
      if (choices[pos].empty()) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    std::vector<std::size_t> odo(arity, 0);
    while (true) {
      GroundAtom atom;
      atom.predicate = pi;
      atom.objects.reserve(arity);
      for (std::size_t pos = 0; pos < arity; ++pos)
        atom.objects.push_back(choices[pos][odo[pos]]);
      atom_index_[atom] = static_cast<int>(atoms_.size());
      atoms_.push_back(std::move(atom));
      std::size_t pos = arity;
      bool done = (arity == 0);
      while (pos > 0) {
        --pos;
        if (++odo[pos] < choices[pos].size()) break;
        odo[pos] = 0;
        if (pos == 0) done = true;
      }
      if (done) break;
    }
  }

  // Ground actions, same enumeration scheme.
  const auto& acts = vocab_->actions();
  action_gactions_.assign(acts.size(), {});
  for (int ai = 0; ai < static_cast<int>(acts.size()); ++ai) {
    const auto& act = acts[static_cast<std::size_t>(ai)];
    const std::size_t arity = act.parameter_types.size();
    std::vector<std::vector<int>> choices(arity);
    bool feasible = true;
    for (std::size_t pos = 0; pos < arity; ++pos) {
      for (int oid = 0; oid < object_count(); ++oid) {
        if (vocab_->is_subtype(object_type(oid), act.parameter_types[pos]))
          choices[pos].push_back(oid);
      }
      if (choices[pos].empty()) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    std::vector<std::size_t> odo(arity, 0);
    while (true) {
      GroundAction ga;
      ga.action = ai;
      ga.objects.reserve(arity);
      for (std::size_t pos = 0; pos < arity; ++pos)
        ga.objects.push_back(choices[pos][odo[pos]]);
      gaction_index_[{ai, ga.objects}] = static_cast<int>(gactions_.size());
      action_gactions_[static_cast<std::size_t>(ai)].push_back(static_cast<int>(gactions_.size()));
      gactions_.push_back(std::move(ga));
      std::size_t pos = arity;
      bool done = (arity == 0);
      while (pos > 0) {
        --pos;
        if (++odo[pos] < choices[pos].size()) break;
        odo[pos] = 0;
        if (pos == 0) done = true;
      }
      if (done) break;
    }
  }
}

int GroundContext::object_id(const std::string& name) const {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), name,
                             [](const auto& a, const std::string& b) { return a.first < b; });
  if (it == objects_.end() || it->first != name) return -1;
  return static_cast<int>(it - objects_.begin());
}

int GroundContext::atom_id(const GroundAtom& atom) const {
  const int id = find_atom(atom);
  if (id < 0) {
    std::string name = atom.predicate >= 0 &&
                               atom.predicate < static_cast<int>(vocab_->predicates().size())
                           ? vocab_->predicates()[static_cast<std::size_t>(atom.predicate)].name
                           : "<bad predicate>";
    throw GroundingError("atom outside the ground universe: " + name);
  }
  return id;
}

int GroundContext::find_atom(const GroundAtom& atom) const {
  auto it = atom_index_.find(atom);
  return it == atom_index_.end() ? -1 : it->second;
}

std::string GroundContext::atom_text(int id) const {
  const GroundAtom& a = atom(id);
  std::ostringstream os;
  os << '(' << vocab_->predicates()[static_cast<std::size_t>(a.predicate)].name;
  for (int oid : a.objects) os << ' ' << object_name(oid);
  os << ')';
  return os.str();
}

int GroundContext::find_ground_action(int action, const std::vector<int>& objects) const {
  auto it = gaction_index_.find({action, objects});
  return it == gaction_index_.end() ? -1 : it->second;
}

std::string GroundContext::ground_action_text(int id) const {
  const GroundAction& ga = ground_action(id);
  std::ostringstream os;
  os << '(' << vocab_->actions()[static_cast<std::size_t>(ga.action)].name;
  for (int oid : ga.objects) os << ' ' << object_name(oid);
  os << ')';
  return os.str();
}

const std::vector<int>& GroundContext::ground_actions_of(int action) const {
  return action_gactions_.at(static_cast<std::size_t>(action));
}

int GroundContext::pal_atom(int pal, int gaction) const {
  const PalTuple& p = vocab_->pal_tuples()[static_cast<std::size_t>(pal)];
  const GroundAction& ga = ground_action(gaction);
  GroundAtom atom;
  atom.predicate = p.atom.predicate;
  atom.objects.reserve(p.atom.binding.size());
  for (int par : p.atom.binding)
    atom.objects.push_back(ga.objects[static_cast<std::size_t>(par)]);
  return atom_id(atom);
}

bool GroundContext::injective(int gaction) const {
  const GroundAction& ga = ground_action(gaction);
  for (std::size_t i = 0; i < ga.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < ga.objects.size(); ++j) {
      if (ga.objects[i] == ga.objects[j]) return false;
    }
  }
  return true;
}

std::string GroundContext::state_text(const BitVec& s) const {
  std::ostringstream os;
  bool first = true;
  for (int id = 0; id < atom_count(); ++id) {
    if (!s.test(id)) continue;
    if (!first) os << ' ';
    os << atom_text(id);
    first = false;
  }
  return os.str();
}

PresenceTuple presence_tuple(const ActionTriplet& triplet, int atom_id) {
  return PresenceTuple{triplet.pre.test(atom_id) ? Presence::Pos : Presence::Neg,
                       triplet.post.test(atom_id) ? Presence::Pos : Presence::Neg};
}

ActionView build_action_view(const DomainModel& model, const GroundContext& ctx, int gaction) {
  ActionView view;
  const int action = ctx.ground_action(gaction).action;
  for (int pal : ctx.vocab().pals_of_action(action)) {
    const Mode m = model.mode(pal);
    if (m == Mode::Absent) continue;
    const int atom = ctx.pal_atom(pal, gaction);
    const bool pre = Vocabulary::location_of(pal) == Location::Pre;
    switch (m) {
      case Mode::Plus:
        (pre ? view.pre_pos : view.add).emplace_back(pal, atom);
        break;
      case Mode::Minus:
        (pre ? view.pre_neg : view.del).emplace_back(pal, atom);
        break;
      case Mode::Unknown:
        (pre ? view.unknown_pre : view.unknown_eff).emplace_back(pal, atom);
        break;
      case Mode::Absent:
        break;
    }
  }
  return view;
}

bool view_applicable(const ActionView& view, const BitVec& state) {
  for (const auto& [pal, atom] : view.pre_pos) {
    (void)pal;
    if (!state.test(atom)) return false;
  }
  for (const auto& [pal, atom] : view.pre_neg) {
    (void)pal;
    if (state.test(atom)) return false;
  }
  return true;
}

std::optional<BitVec> apply_action(const DomainModel& model, const GroundContext& ctx,
                                   const BitVec& state, int gaction) {
  const ActionView view = build_action_view(model, ctx, gaction);
  if (!view.unknown_pre.empty() || !view.unknown_eff.empty())
    throw AbstractModelError("cannot execute an action with unknown modes: " +
                             ctx.ground_action_text(gaction));
  if (!view_applicable(view, state)) return std::nullopt;
  BitVec out = state;
  for (const auto& [pal, atom] : view.del) {
    (void)pal;
    out.set(atom, false);
  }
  for (const auto& [pal, atom] : view.add) {
    (void)pal;
    out.set(atom, true);
  }
  return out;
}

bool triplet_consistent(const DomainModel& model, const GroundContext& ctx,
                        const ActionTriplet& triplet) {
  if (!model.concrete())
    throw AbstractModelError("triplet consistency needs a concrete model");
  auto succ = apply_action(model, ctx, triplet.pre, triplet.gaction);
  return succ.has_value() && *succ == triplet.post;
}

}  // namespace remodel
