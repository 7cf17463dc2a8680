#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "remodel/model.hpp"

namespace remodel {

// Fixed-width bit set used for closed-world states and literal masks.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(int bits) : bits_(bits), words_((static_cast<std::size_t>(bits) + 63) / 64, 0) {}

  int size() const { return bits_; }

  bool test(int i) const {
    return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
  }
  void set(int i, bool value = true) {
    const std::uint64_t bit = 1ull << (i & 63);
    if (value)
      words_[static_cast<std::size_t>(i) >> 6] |= bit;
    else
      words_[static_cast<std::size_t>(i) >> 6] &= ~bit;
  }

  bool contains_all(const BitVec& mask) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if ((words_[w] & mask.words_[w]) != mask.words_[w]) return false;
    }
    return true;
  }

  bool disjoint_with(const BitVec& mask) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & mask.words_[w]) return false;
    }
    return true;
  }

  // (this \ del) | add
  BitVec apply_effects(const BitVec& del, const BitVec& add) const {
    BitVec out(*this);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      out.words_[w] = (words_[w] & ~del.words_[w]) | add.words_[w];
    }
    return out;
  }

  int count() const;
  std::vector<int> set_bits() const;

  std::uint64_t hash() const {
    std::uint64_t h = 0x811c9dc5u;
    for (std::uint64_t w : words_) {
      h ^= w;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return h;
  }

  bool operator==(const BitVec&) const = default;
  bool operator<(const BitVec& other) const { return words_ < other.words_; }

 private:
  int bits_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitVecHash {
  std::size_t operator()(const BitVec& v) const { return static_cast<std::size_t>(v.hash()); }
};

struct GroundAtom {
  int predicate = -1;
  std::vector<int> objects;

  auto operator<=>(const GroundAtom&) const = default;
};

struct GoalCondition {
  std::vector<int> positive;  // atom ids that must hold
  std::vector<int> negative;  // atom ids that must not hold
};

// Objects of a task plus the enumerated ground atom universe and the
// type-correct ground action bindings, all in canonical order. Shared by
// every state, trace, plan and query over the same objects.
class GroundContext {
 public:
  struct GroundAction {
    int action = -1;
    std::vector<int> objects;  // parameter index -> object id
  };

  GroundContext(std::shared_ptr<const Vocabulary> vocab,
                std::vector<std::pair<std::string, std::string>> objects);

  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }

  int object_count() const { return static_cast<int>(objects_.size()); }
  const std::string& object_name(int id) const { return objects_[static_cast<std::size_t>(id)].first; }
  const std::string& object_type(int id) const { return objects_[static_cast<std::size_t>(id)].second; }
  const std::vector<std::pair<std::string, std::string>>& objects() const { return objects_; }
  int object_id(const std::string& name) const;  // -1 when absent

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  const GroundAtom& atom(int id) const { return atoms_[static_cast<std::size_t>(id)]; }
  int atom_id(const GroundAtom& atom) const;  // GroundingError when outside the universe
  int find_atom(const GroundAtom& atom) const;  // -1 when absent
  std::string atom_text(int id) const;

  int ground_action_count() const { return static_cast<int>(gactions_.size()); }
  const GroundAction& ground_action(int id) const { return gactions_[static_cast<std::size_t>(id)]; }
  int find_ground_action(int action, const std::vector<int>& objects) const;  // -1 when absent
  std::string ground_action_text(int id) const;
  const std::vector<int>& ground_actions_of(int action) const;

  // Ground atom id of a pal's lifted atom under a ground action binding.
  int pal_atom(int pal, int gaction) const;

  // No object repeated among the ground action's parameters.
  bool injective(int gaction) const;

  BitVec empty_state() const { return BitVec(atom_count()); }
  std::string state_text(const BitVec& s) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<std::pair<std::string, std::string>> objects_;
  std::vector<GroundAtom> atoms_;
  std::map<GroundAtom, int> atom_index_;
  std::vector<GroundAction> gactions_;
  std::map<std::pair<int, std::vector<int>>, int> gaction_index_;
  std::vector<std::vector<int>> action_gactions_;
};

struct ActionTriplet {
  BitVec pre;
  int gaction = -1;
  BitVec post;
};

// Alternating state/action sequence; states.size() == actions.size() + 1.
struct ObservationTrace {
  std::shared_ptr<const GroundContext> ctx;
  std::vector<BitVec> states;
  std::vector<int> actions;

  int triplet_count() const { return static_cast<int>(actions.size()); }
  ActionTriplet triplet(int i) const {
    return ActionTriplet{states[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
                         states[static_cast<std::size_t>(i) + 1]};
  }
};

PresenceTuple presence_tuple(const ActionTriplet& triplet, int atom_id);

// One ground action's literals under a model, including the pals whose
// mode is still unknown (for reasoning over abstract models).
struct ActionView {
  std::vector<std::pair<int, int>> pre_pos;  // (pal, atom)
  std::vector<std::pair<int, int>> pre_neg;
  std::vector<std::pair<int, int>> add;
  std::vector<std::pair<int, int>> del;
  std::vector<std::pair<int, int>> unknown_pre;
  std::vector<std::pair<int, int>> unknown_eff;
};

ActionView build_action_view(const DomainModel& model, const GroundContext& ctx, int gaction);

bool view_applicable(const ActionView& view, const BitVec& state);

// Successor under closed-world semantics, or nullopt when inapplicable.
// Delete-before-add: an atom both added and deleted ends up true.
// Requires every pal of the action to have a concrete mode.
std::optional<BitVec> apply_action(const DomainModel& model, const GroundContext& ctx,
                                   const BitVec& state, int gaction);

// Pre-state satisfies the preconditions and the post-state equals the
// closed-world application (effects enforced, frame atoms persist).
bool triplet_consistent(const DomainModel& model, const GroundContext& ctx,
                        const ActionTriplet& triplet);

}  // namespace remodel
