#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "remodel/errors.hpp"

namespace remodel {

// Mode of one pal-tuple: positive literal, negative literal, absent, or
// (in abstract models only) not yet known.
enum class Mode : std::uint8_t { Plus, Minus, Absent, Unknown };

enum class Location : std::uint8_t { Pre, Eff };

enum class Presence : std::uint8_t { Pos, Neg };

char mode_char(Mode m);

// Joint <m_pre, m_eff> value of a pa-tuple. <+,+> and <-,-> are outside
// the range: an atom cannot be required and produced with the same sign.
struct PaValue {
  Mode pre = Mode::Absent;
  Mode eff = Mode::Absent;

  bool operator==(const PaValue&) const = default;
};

bool pa_value_legal(Mode pre, Mode eff);

// The 7 legal concrete pa-values in canonical order.
const std::array<PaValue, 7>& legal_pa_values();

// Index into legal_pa_values(), or -1 when not a legal concrete value.
int pa_value_index(const PaValue& v);

struct PresenceTuple {
  Presence pre = Presence::Pos;
  Presence post = Presence::Pos;

  bool operator==(const PresenceTuple&) const = default;
};

// The pa-values consistent with observing the given pre/post presence of
// an atom across one action triplet.
std::vector<PaValue> consistent_pa_values(PresenceTuple pt);

// Same set as a bitmask over legal_pa_values() indices.
std::uint8_t consistent_pa_mask(PresenceTuple pt);

constexpr std::uint8_t kAllPaValuesMask = 0x7f;

struct PredicateSignature {
  std::string name;
  std::vector<std::string> parameter_types;

  bool operator==(const PredicateSignature&) const = default;
};

struct ActionSignature {
  std::string name;
  std::vector<std::string> parameter_types;
  std::vector<std::string> parameter_names;

  bool operator==(const ActionSignature&) const = default;
};

// A predicate whose argument positions are bound to action parameters.
struct LiftedAtom {
  int predicate = -1;
  std::vector<int> binding;  // predicate arg position -> action parameter index

  auto operator<=>(const LiftedAtom&) const = default;
};

struct PalTuple {
  int action = -1;
  LiftedAtom atom;
  Location location = Location::Pre;

  auto operator<=>(const PalTuple&) const = default;
};

// Predicates, actions and the type hierarchy of a domain, together with
// the enumerated pal-tuple universe in canonical order. Immutable; meant
// to be shared between all models over the same domain.
class Vocabulary {
 public:
  Vocabulary(std::vector<PredicateSignature> predicates,
             std::vector<ActionSignature> actions,
             std::map<std::string, std::string> type_parents);

  const std::vector<PredicateSignature>& predicates() const { return predicates_; }
  const std::vector<ActionSignature>& actions() const { return actions_; }
  const std::map<std::string, std::string>& type_parents() const { return type_parents_; }

  int predicate_index(const std::string& name) const;  // -1 when absent
  int action_index(const std::string& name) const;

  bool is_subtype(const std::string& type, const std::string& ancestor) const;

  // Mentioned anywhere: parameter types, hierarchy entries, or "object".
  bool type_known(const std::string& type) const { return known_types_.count(type) > 0; }

  // Canonical pal order: action name, predicate name, binding, location.
  // Pre/eff of one pa-tuple are adjacent, so pal 2k/2k+1 <-> pa k.
  const std::vector<PalTuple>& pal_tuples() const { return pals_; }
  int n_pals() const { return static_cast<int>(pals_.size()); }
  int n_pas() const { return n_pals() / 2; }

  int pal_index(const PalTuple& pal) const;  // -1 when absent
  static int pa_of(int pal) { return pal / 2; }
  static int partner(int pal) { return pal ^ 1; }
  static Location location_of(int pal) {
    return (pal & 1) ? Location::Eff : Location::Pre;
  }

  // All pal indices belonging to one action, in canonical order.
  const std::vector<int>& pals_of_action(int action) const;

  std::string pal_text(int pal) const;

  bool operator==(const Vocabulary& other) const;

 private:
  std::vector<PredicateSignature> predicates_;
  std::vector<ActionSignature> actions_;
  std::map<std::string, std::string> type_parents_;
  std::set<std::string> known_types_;
  std::vector<PalTuple> pals_;
  std::map<PalTuple, int> pal_index_;
  std::vector<std::vector<int>> action_pals_;

  void validate() const;
  void enumerate();
};

// Every type-compatible <lifted atom, action, location> exactly once, in
// canonical order.
std::vector<PalTuple> enumerate_pal_tuples(
    const std::vector<PredicateSignature>& predicates,
    const std::vector<ActionSignature>& actions,
    const std::map<std::string, std::string>& type_parents);

// A total mode assignment over a vocabulary's pal universe. Concrete when
// no mode is Unknown. Immutable value type; copies share the vocabulary.
class DomainModel {
 public:
  DomainModel(std::shared_ptr<const Vocabulary> vocab, std::vector<Mode> modes);

  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }

  Mode mode(int pal) const { return modes_[static_cast<std::size_t>(pal)]; }
  const std::vector<Mode>& modes() const { return modes_; }

  PaValue pa_value(int pa) const {
    return PaValue{modes_[static_cast<std::size_t>(2 * pa)],
                   modes_[static_cast<std::size_t>(2 * pa + 1)]};
  }

  bool concrete() const;

  DomainModel with_mode(int pal, Mode m) const;
  DomainModel with_modes(std::vector<Mode> modes) const;

  bool operator==(const DomainModel& other) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<Mode> modes_;
};

// Number of pal-tuples whose modes differ. Unknown is a mode of its own.
int model_diff(const DomainModel& a, const DomainModel& b);

// True iff every pal of m2 is Unknown or agrees with m1.
bool is_abstraction(const DomainModel& m2, const DomainModel& m1);

// One line per pal-tuple with its mode, in canonical order.
std::string dump_pal_modes(const DomainModel& m);

void require_same_vocabulary(const DomainModel& a, const DomainModel& b);

}  // namespace remodel
