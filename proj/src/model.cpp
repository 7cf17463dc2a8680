#include "remodel/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace remodel {

char mode_char(Mode m) {
  switch (m) {
    case Mode::Plus: return '+';
    case Mode::Minus: return '-';
    case Mode::Absent: return '0';
    case Mode::Unknown: return '?';
  }
  return '?';
}

bool pa_value_legal(Mode pre, Mode eff) {
  if (pre == Mode::Plus && eff == Mode::Plus) return false;
  if (pre == Mode::Minus && eff == Mode::Minus) return false;
  return true;
}

const std::array<PaValue, 7>& legal_pa_values() {
  static const std::array<PaValue, 7> values = {{
      {Mode::Plus, Mode::Minus},
      {Mode::Plus, Mode::Absent},
      {Mode::Minus, Mode::Plus},
      {Mode::Minus, Mode::Absent},
      {Mode::Absent, Mode::Plus},
      {Mode::Absent, Mode::Minus},
      {Mode::Absent, Mode::Absent},
  }};
  return values;
}

int pa_value_index(const PaValue& v) {
  const auto& all = legal_pa_values();
  for (int i = 0; i < 7; ++i) {
    if (all[static_cast<std::size_t>(i)] == v) return i;
  }
  return -1;
}

std::uint8_t consistent_pa_mask(PresenceTuple pt) {
  // An atom true in a state rules out requiring/producing it negatively,
  // and vice versa; an effect must be reflected in the post-state, and a
  // persisting atom rules out the opposite-sign effect.
  std::uint8_t mask = 0;
  const auto& all = legal_pa_values();
  for (int i = 0; i < 7; ++i) {
    const PaValue v = all[static_cast<std::size_t>(i)];
    const bool pre_true = pt.pre == Presence::Pos;
    const bool post_true = pt.post == Presence::Pos;
    if (v.pre == Mode::Plus && !pre_true) continue;
    if (v.pre == Mode::Minus && pre_true) continue;
    bool predicted_post = pre_true;
    if (v.eff == Mode::Plus) predicted_post = true;
    if (v.eff == Mode::Minus) predicted_post = false;
    if (predicted_post != post_true) continue;
    mask = static_cast<std::uint8_t>(mask | (1u << i));
  }
  return mask;
}

std::vector<PaValue> consistent_pa_values(PresenceTuple pt) {
  std::vector<PaValue> out;
  const std::uint8_t mask = consistent_pa_mask(pt);
  for (int i = 0; i < 7; ++i) {
    if (mask & (1u << i)) out.push_back(legal_pa_values()[static_cast<std::size_t>(i)]);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<PredicateSignature> predicates,
                       std::vector<ActionSignature> actions,
                       std::map<std::string, std::string> type_parents)
    : predicates_(std::move(predicates)),
      actions_(std::move(actions)),
      type_parents_(std::move(type_parents)) {
  std::sort(predicates_.begin(), predicates_.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(actions_.begin(), actions_.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  known_types_.insert("object");
  for (const auto& [child, parent] : type_parents_) {
    known_types_.insert(child);
    known_types_.insert(parent);
  }
  for (const auto& p : predicates_)
    known_types_.insert(p.parameter_types.begin(), p.parameter_types.end());
  for (const auto& a : actions_)
    known_types_.insert(a.parameter_types.begin(), a.parameter_types.end());
  validate();
  enumerate();
}

void Vocabulary::validate() const {
  std::set<std::string> seen;
  for (const auto& p : predicates_) {
    if (p.name.empty()) throw VocabularyError("predicate with empty name");
    if (!seen.insert(p.name).second)
      throw VocabularyError("duplicate predicate: " + p.name);
  }
  seen.clear();
  for (const auto& a : actions_) {
    if (a.name.empty()) throw VocabularyError("action with empty name");
    if (!seen.insert(a.name).second)
      throw VocabularyError("duplicate action: " + a.name);
    if (a.parameter_names.size() != a.parameter_types.size())
      throw VocabularyError("action " + a.name + ": parameter name/type mismatch");
    std::set<std::string> params;
    for (const auto& n : a.parameter_names) {
      if (!params.insert(n).second)
        throw VocabularyError("action " + a.name + ": duplicate parameter " + n);
    }
  }
  // The hierarchy must be acyclic.
  for (const auto& [child, parent] : type_parents_) {
    (void)parent;
    std::set<std::string> chain;
    std::string cur = child;
    while (true) {
      if (!chain.insert(cur).second)
        throw VocabularyError("type hierarchy cycle at: " + cur);
      auto it = type_parents_.find(cur);
      if (it == type_parents_.end() || it->second == cur) break;
      cur = it->second;
    }
  }
}

bool Vocabulary::is_subtype(const std::string& type, const std::string& ancestor) const {
  if (type == ancestor) return true;
  std::string cur = type;
  for (std::size_t guard = 0; guard <= type_parents_.size(); ++guard) {
    auto it = type_parents_.find(cur);
    if (it == type_parents_.end() || it->second == cur) return false;
    cur = it->second;
    if (cur == ancestor) return true;
  }
  return false;
}

void Vocabulary::enumerate() {
  action_pals_.assign(actions_.size(), {});
  for (int ai = 0; ai < static_cast<int>(actions_.size()); ++ai) {
    const ActionSignature& act = actions_[static_cast<std::size_t>(ai)];
    for (int pi = 0; pi < static_cast<int>(predicates_.size()); ++pi) {
      const PredicateSignature& pred = predicates_[static_cast<std::size_t>(pi)];
      const std::size_t arity = pred.parameter_types.size();
      // Compatible action parameters per predicate argument position.
      std::vector<std::vector<int>> choices(arity);
      bool feasible = true;
      for (std::size_t pos = 0; pos < arity; ++pos) {
        for (int par = 0; par < static_cast<int>(act.parameter_names.size()); ++par) {
          if (is_subtype(act.parameter_types[static_cast<std::size_t>(par)],
                         pred.parameter_types[pos])) {
            choices[pos].push_back(par);
          }
        }
        if (choices[pos].empty()) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      std::vector<std::size_t> odo(arity, 0);
      while (true) {
        LiftedAtom atom;
        atom.predicate = pi;
        atom.binding.reserve(arity);
        for (std::size_t pos = 0; pos < arity; ++pos)
          atom.binding.push_back(choices[pos][odo[pos]]);
        for (Location loc : {Location::Pre, Location::Eff}) {
          PalTuple pal{ai, atom, loc};
          pal_index_[pal] = static_cast<int>(pals_.size());
          action_pals_[static_cast<std::size_t>(ai)].push_back(static_cast<int>(pals_.size()));
          pals_.push_back(std::move(pal));
        }
        // Advance the odometer (last position fastest -> lexicographic).
        std::size_t pos = arity;
        while (pos > 0) {
          --pos;
          if (++odo[pos] < choices[pos].size()) break;
          odo[pos] = 0;
          if (pos == 0) {
            pos = arity + 1;  // overflow sentinel
            break;
          }
        }
        if (arity == 0 || pos == arity + 1) break;
      }
    }
  }
}

int Vocabulary::predicate_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(predicates_.size()); ++i) {
    if (predicates_[static_cast<std::size_t>(i)].name == name) return i;
  }
  return -1;
}

int Vocabulary::action_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(actions_.size()); ++i) {
    if (actions_[static_cast<std::size_t>(i)].name == name) return i;
  }
  return -1;
}

int Vocabulary::pal_index(const PalTuple& pal) const {
  auto it = pal_index_.find(pal);
  return it == pal_index_.end() ? -1 : it->second;
}

const std::vector<int>& Vocabulary::pals_of_action(int action) const {
  return action_pals_.at(static_cast<std::size_t>(action));
}

std::string Vocabulary::pal_text(int pal) const {
  const PalTuple& p = pals_.at(static_cast<std::size_t>(pal));
  const ActionSignature& act = actions_[static_cast<std::size_t>(p.action)];
  const PredicateSignature& pred = predicates_[static_cast<std::size_t>(p.atom.predicate)];
  std::ostringstream os;
  os << act.name << ' ' << pred.name << '(';
  for (std::size_t i = 0; i < p.atom.binding.size(); ++i) {
    if (i) os << ' ';
    os << '?' << act.parameter_names[static_cast<std::size_t>(p.atom.binding[i])];
  }
  os << ") " << (p.location == Location::Pre ? "pre" : "eff");
  return os.str();
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return predicates_ == other.predicates_ && actions_ == other.actions_ &&
         type_parents_ == other.type_parents_;
}

std::vector<PalTuple> enumerate_pal_tuples(
    const std::vector<PredicateSignature>& predicates,
    const std::vector<ActionSignature>& actions,
    const std::map<std::string, std::string>& type_parents) {
  Vocabulary vocab(predicates, actions, type_parents);
  return vocab.pal_tuples();
}

DomainModel::DomainModel(std::shared_ptr<const Vocabulary> vocab, std::vector<Mode> modes)
    : vocab_(std::move(vocab)), modes_(std::move(modes)) {
  if (!vocab_) throw VocabularyError("model without vocabulary");
  if (static_cast<int>(modes_.size()) != vocab_->n_pals())
    throw VocabularyError("mode map is not total over the pal universe");
  for (int pa = 0; pa < vocab_->n_pas(); ++pa) {
    const Mode pre = modes_[static_cast<std::size_t>(2 * pa)];
    const Mode eff = modes_[static_cast<std::size_t>(2 * pa + 1)];
    if (!pa_value_legal(pre, eff))
      throw IllegalModeError("illegal pa-value at: " + vocab_->pal_text(2 * pa));
  }
}

bool DomainModel::concrete() const {
  for (Mode m : modes_) {
    if (m == Mode::Unknown) return false;
  }
  return true;
}

DomainModel DomainModel::with_mode(int pal, Mode m) const {
  std::vector<Mode> modes = modes_;
  modes[static_cast<std::size_t>(pal)] = m;
  return DomainModel(vocab_, std::move(modes));
}

DomainModel DomainModel::with_modes(std::vector<Mode> modes) const {
  return DomainModel(vocab_, std::move(modes));
}

bool DomainModel::operator==(const DomainModel& other) const {
  return (vocab_ == other.vocab_ || *vocab_ == *other.vocab_) && modes_ == other.modes_;
}

void require_same_vocabulary(const DomainModel& a, const DomainModel& b) {
  if (a.vocab_ptr() == b.vocab_ptr()) return;
  if (!(a.vocab() == b.vocab()))
    throw IncomparableModelsError("models are defined over different vocabularies");
}

int model_diff(const DomainModel& a, const DomainModel& b) {
  require_same_vocabulary(a, b);
  int count = 0;
  for (int pal = 0; pal < a.vocab().n_pals(); ++pal) {
    if (a.mode(pal) != b.mode(pal)) ++count;
  }
  return count;
}

bool is_abstraction(const DomainModel& m2, const DomainModel& m1) {
  require_same_vocabulary(m2, m1);
  for (int pal = 0; pal < m2.vocab().n_pals(); ++pal) {
    if (m2.mode(pal) != Mode::Unknown && m2.mode(pal) != m1.mode(pal)) return false;
  }
  return true;
}

std::string dump_pal_modes(const DomainModel& m) {
  std::ostringstream os;
  for (int pal = 0; pal < m.vocab().n_pals(); ++pal) {
    os << m.vocab().pal_text(pal) << ' ' << mode_char(m.mode(pal)) << '\n';
  }
  return os.str();
}

}  // namespace remodel
