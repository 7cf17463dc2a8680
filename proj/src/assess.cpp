#include "remodel/assess.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace remodel {

void ConstraintSet::restrict(int pa, std::uint8_t allowed, const Vocabulary& vocab) {
  std::uint8_t& m = masks_[static_cast<std::size_t>(pa)];
  const std::uint8_t next = static_cast<std::uint8_t>(m & allowed);
  if (next == 0)
    throw InconsistentObservationsError("no pa-value remains consistent at: " +
                                        vocab.pal_text(2 * pa));
  m = next;
}

void ConstraintSet::fold_triplet(const GroundContext& ctx, const ActionTriplet& t) {
  const int action = ctx.ground_action(t.gaction).action;
  const auto& pals = ctx.vocab().pals_of_action(action);
  // Atoms shared by two pals of the action (repeated-object groundings)
  // carry no clean per-pa evidence; skip those pa-tuples.
  std::map<int, int> atom_uses;
  for (std::size_t k = 0; k < pals.size(); k += 2)
    atom_uses[ctx.pal_atom(pals[k], t.gaction)]++;
  for (std::size_t k = 0; k < pals.size(); k += 2) {
    const int atom = ctx.pal_atom(pals[k], t.gaction);
    if (atom_uses[atom] > 1) continue;
    restrict(Vocabulary::pa_of(pals[k]), consistent_pa_mask(presence_tuple(t, atom)),
             ctx.vocab());
  }
}

std::vector<Mode> ConstraintSet::allowed_modes(int pal, Mode partner) const {
  const int pa = Vocabulary::pa_of(pal);
  const bool is_pre = Vocabulary::location_of(pal) == Location::Pre;
  std::vector<Mode> out;
  for (int i = 0; i < 7; ++i) {
    if (!(mask(pa) & (1u << i))) continue;
    const PaValue v = legal_pa_values()[static_cast<std::size_t>(i)];
    const Mode mine = is_pre ? v.pre : v.eff;
    const Mode other = is_pre ? v.eff : v.pre;
    if (partner != Mode::Unknown && other != partner) continue;
    if (std::find(out.begin(), out.end(), mine) == out.end()) out.push_back(mine);
  }
  return out;
}

std::optional<Mode> ConstraintSet::forced_mode(int pal) const {
  const auto modes = allowed_modes(pal, Mode::Unknown);
  if (modes.size() == 1) return modes[0];
  return std::nullopt;
}

bool ConstraintSet::joint_consistent(int pa, Mode pre, Mode eff) const {
  for (int i = 0; i < 7; ++i) {
    if (!(mask(pa) & (1u << i))) continue;
    const PaValue v = legal_pa_values()[static_cast<std::size_t>(i)];
    if (pre != Mode::Unknown && v.pre != pre) continue;
    if (eff != Mode::Unknown && v.eff != eff) continue;
    return true;
  }
  return false;
}

ConstraintSet infer_pa_constraints(const std::vector<ObservationTrace>& observations,
                                   const GroundContext& ctx) {
  ConstraintSet out(ctx.vocab().n_pas());
  for (const auto& trace : observations) {
    if (!(trace.ctx->vocab() == ctx.vocab()))
      throw IncomparableModelsError("trace vocabulary differs from the assessed model");
    for (int i = 0; i < trace.triplet_count(); ++i)
      out.fold_triplet(ctx, trace.triplet(i));
  }
  return out;
}

bool AffectedSet::contains(int pal) const {
  for (const auto& e : entries) {
    if (e.pal == pal) return true;
  }
  return false;
}

std::vector<int> AffectedSet::pals() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.pal);
  return out;
}

ExpandedDetection detect_expanded(const DomainModel& m_init, const ConstraintSet& constraints) {
  ExpandedDetection out;
  const Vocabulary& vocab = m_init.vocab();
  for (int pa = 0; pa < vocab.n_pas(); ++pa) {
    if (constraints.allows(pa, m_init.pa_value(pa))) continue;
    for (int pal : {2 * pa, 2 * pa + 1}) {
      if (auto forced = constraints.forced_mode(pal)) {
        if (*forced == m_init.mode(pal)) continue;  // already right
        out.fixed.emplace_back(pal, *forced);
      } else {
        out.flagged.push_back(pal);
      }
    }
  }
  return out;
}

ReducedDetection detect_reduced(const DomainModel& m_init,
                                const std::vector<ObservationTrace>& observations,
                                long long expansion_cap) {
  ReducedDetection out;
  if (!m_init.concrete()) throw AbstractModelError("reduced-functionality detection needs a concrete model");
  std::set<int> flagged;
  for (const auto& trace : observations) {
    if (trace.triplet_count() == 0) continue;
    GroundTask task(m_init, trace.ctx, trace.states[0], GoalCondition{});
    const int n = trace.triplet_count();
    for (int i = 0; i < n; ++i) {
      BfsSweep sweep(task, trace.states[static_cast<std::size_t>(i)], expansion_cap);
      for (int j = i + 1; j <= n; ++j) {
        const BitVec& target = trace.states[static_cast<std::size_t>(j)];
        auto plan = sweep.plan_to(target);
        if (!plan) {
          if (sweep.exhausted())
            out.warnings.push_back("expansion cap hit between trace states " +
                                   std::to_string(i) + " and " + std::to_string(j));
          continue;
        }
        if (plan->length() >= j - i) continue;
        // The previous model does it in fewer steps: walk both trajectories
        // to the first divergence.
        BitVec sim = trace.states[static_cast<std::size_t>(i)];
        for (int t = 0; t < plan->length(); ++t) {
          const int a_init = plan->actions[static_cast<std::size_t>(t)];
          const int a_drift = trace.actions[static_cast<std::size_t>(i + t)];
          if (a_init != a_drift) {
            const int schema = trace.ctx->ground_action(a_init).action;
            for (int pal : m_init.vocab().pals_of_action(schema)) flagged.insert(pal);
            break;
          }
          auto succ = task.successor(sim, a_init);
          const BitVec& observed = trace.states[static_cast<std::size_t>(i + t + 1)];
          if (!succ || *succ != observed) {
            const int schema = trace.ctx->ground_action(a_init).action;
            for (int pal : m_init.vocab().pals_of_action(schema)) flagged.insert(pal);
            break;
          }
          sim = std::move(*succ);
        }
      }
    }
  }
  out.flagged.assign(flagged.begin(), flagged.end());
  return out;
}

std::optional<Query> make_precondition_query(int pal,
                                             const std::vector<ObservationTrace>& observations) {
  if (observations.empty()) return std::nullopt;
  const auto& ctx = *observations[0].ctx;
  const int action = ctx.vocab().pal_tuples()[static_cast<std::size_t>(pal)].action;
  const ActionTriplet* found = nullptr;
  ActionTriplet chosen;
  for (int pass = 0; pass < 2 && !found; ++pass) {
    for (const auto& trace : observations) {
      for (int i = 0; i < trace.triplet_count() && !found; ++i) {
        ActionTriplet t = trace.triplet(i);
        if (trace.ctx->ground_action(t.gaction).action != action) continue;
        if (pass == 0 && !trace.ctx->injective(t.gaction)) continue;
        chosen = t;
        found = &chosen;
      }
      if (found) break;
    }
  }
  if (!found) return std::nullopt;
  Query q;
  q.start = chosen.pre;
  q.start.set(ctx.pal_atom(pal, chosen.gaction), false);
  q.plan = {chosen.gaction};
  return q;
}

namespace {

struct DefinitePrediction {
  bool definite = false;   // applicability decided by known modes alone
  bool applicable = false;
  bool succ_definite = false;
  BitVec succ;
};

DefinitePrediction predict(const DomainModel& m, const GroundContext& ctx, const BitVec& s,
                           int gaction) {
  DefinitePrediction out;
  const ActionView view = build_action_view(m, ctx, gaction);
  if (!view_applicable(view, s)) {
    out.definite = true;
    out.applicable = false;
    return out;
  }
  if (!view.unknown_pre.empty()) return out;  // applicability open
  out.definite = true;
  out.applicable = true;
  out.succ = s;
  for (const auto& [pal, atom] : view.del) {
    (void)pal;
    out.succ.set(atom, false);
  }
  for (const auto& [pal, atom] : view.add) {
    (void)pal;
    out.succ.set(atom, true);
  }
  out.succ_definite = view.unknown_eff.empty();
  return out;
}

bool predictions_disagree(const DomainModel& mi, const DomainModel& mj, const GroundContext& ctx,
                          const BitVec& s, int gaction) {
  const DefinitePrediction a = predict(mi, ctx, s, gaction);
  const DefinitePrediction b = predict(mj, ctx, s, gaction);
  if (!a.definite || !b.definite) return false;
  if (a.applicable != b.applicable) return true;
  if (!a.applicable) return false;
  return a.succ_definite && b.succ_definite && !(a.succ == b.succ);
}

}  // namespace

std::optional<Query> generate_distinguishing_query(const DomainModel& mi, const DomainModel& mj,
                                                   int pal, const std::vector<BitVec>& states,
                                                   const GroundContext& ctx) {
  require_same_vocabulary(mi, mj);
  const Vocabulary& vocab = mi.vocab();
  const PalTuple& p = vocab.pal_tuples()[static_cast<std::size_t>(pal)];
  const auto& gactions = ctx.ground_actions_of(p.action);
  if (gactions.empty()) return std::nullopt;
  std::vector<BitVec> bases = states;
  if (bases.empty()) bases.push_back(ctx.empty_state());

  auto probe = [&](const BitVec& s, int ga) -> std::optional<Query> {
    if (predictions_disagree(mi, mj, ctx, s, ga)) return Query{s, {ga}};
    return std::nullopt;
  };

  for (const BitVec& s : bases) {
    for (int ga : gactions) {
      if (auto q = probe(s, ga)) return q;
    }
  }
  // Single polarity edits of gamma's atom.
  for (const BitVec& s : bases) {
    for (int ga : gactions) {
      const int atom = ctx.pal_atom(pal, ga);
      for (bool polarity : {false, true}) {
        if (s.test(atom) == polarity) continue;
        BitVec edited = s;
        edited.set(atom, polarity);
        if (auto q = probe(edited, ga)) return q;
      }
    }
  }
  // Force the preconditions the two models agree on, then try both
  // polarities of gamma's atom.
  for (const BitVec& s : bases) {
    for (int ga : gactions) {
      BitVec forced = s;
      for (int other : vocab.pals_of_action(p.action)) {
        if (Vocabulary::location_of(other) != Location::Pre) continue;
        if (mi.mode(other) != mj.mode(other)) continue;
        const int atom = ctx.pal_atom(other, ga);
        if (mi.mode(other) == Mode::Plus) forced.set(atom, true);
        if (mi.mode(other) == Mode::Minus) forced.set(atom, false);
      }
      const int atom = ctx.pal_atom(pal, ga);
      for (bool polarity : {false, true}) {
        BitVec edited = forced;
        edited.set(atom, polarity);
        if (auto q = probe(edited, ga)) return q;
      }
    }
  }
  return std::nullopt;
}

bool response_consistent(const DomainModel& candidate, const GroundContext& ctx, const Query& q,
                         const QueryResponse& r) {
  if (q.plan.empty()) return r.executed == 0 && r.final_state == q.start;
  if (q.plan.size() > 1) {
    // Multi-action plans: exact simulation (concrete models only).
    BitVec s = q.start;
    int executed = 0;
    for (int ga : q.plan) {
      auto succ = apply_action(candidate, ctx, s, ga);
      if (!succ) break;
      s = std::move(*succ);
      ++executed;
    }
    return executed == r.executed && s == r.final_state;
  }

  const int ga = q.plan[0];
  const ActionView view = build_action_view(candidate, ctx, ga);
  const bool known_violation = !view_applicable(view, q.start);

  if (r.executed == 0) {
    if (!(r.final_state == q.start)) return false;
    if (known_violation) return true;
    // Some completion of an unknown precondition must be able to fail.
    for (const auto& [pal, atom] : view.unknown_pre) {
      const Mode partner = candidate.mode(Vocabulary::partner(pal));
      const bool can_plus = pa_value_legal(Mode::Plus, partner);
      const bool can_minus = pa_value_legal(Mode::Minus, partner);
      if (!q.start.test(atom) && can_plus) return true;
      if (q.start.test(atom) && can_minus) return true;
    }
    return false;
  }

  if (r.executed != 1) return false;
  if (known_violation) return false;
  BitVec predicted = q.start;
  BitVec known_add = ctx.empty_state();
  for (const auto& [pal, atom] : view.del) {
    (void)pal;
    predicted.set(atom, false);
  }
  for (const auto& [pal, atom] : view.add) {
    (void)pal;
    predicted.set(atom, true);
    known_add.set(atom, true);
  }
  for (int atom = 0; atom < ctx.atom_count(); ++atom) {
    const bool pv = predicted.test(atom);
    const bool tv = r.final_state.test(atom);
    if (pv == tv) continue;
    bool explained = false;
    for (const auto& [pal, uatom] : view.unknown_eff) {
      if (uatom != atom) continue;
      const Mode partner = candidate.mode(Vocabulary::partner(pal));
      if (tv && pa_value_legal(partner, Mode::Plus)) explained = true;
      if (!tv && pa_value_legal(partner, Mode::Minus)) explained = true;
      if (explained) break;
    }
    if (tv && !pv && explained) continue;           // an unknown add
    if (!tv && pv && !known_add.test(atom) && explained) continue;  // an unknown delete
    return false;
  }
  return true;
}

std::vector<DomainModel> sieve_models(const std::vector<DomainModel>& candidates,
                                      const GroundContext& ctx, const Query& q,
                                      const QueryResponse& r) {
  std::vector<DomainModel> kept;
  for (const auto& m : candidates) {
    if (response_consistent(m, ctx, q, r)) kept.push_back(m);
  }
  if (kept.empty())
    throw ContradictionError("every candidate model is inconsistent with the agent's response");
  return kept;
}

double accuracy(const DomainModel& m, const DomainModel& m_star) {
  if (!m.concrete() || !m_star.concrete())
    throw AbstractModelError("accuracy is defined for concrete models");
  require_same_vocabulary(m, m_star);
  const int n = m.vocab().n_pals();
  if (n == 0) return 1.0;
  return 1.0 - static_cast<double>(model_diff(m, m_star)) / static_cast<double>(n);
}

namespace {

// Alg-1-style investigation loop with a constraint ledger (Table-2
// inferences folded over every executed transition), an exists-completion
// sieve over abstract candidates, and a final exact-replay refinement.
class Resolver {
 public:
  Resolver(std::shared_ptr<const GroundContext> ctx, const AgentSim& agent,
           std::vector<BitVec> random_states, std::vector<ObservationTrace> observations,
           ConstraintSet ledger, const DomainModel& base, AssessOptions opts)
      : ctx_(std::move(ctx)),
        vocab_(ctx_->vocab()),
        agent_(agent),
        states_(std::move(random_states)),
        obs_(std::move(observations)),
        ledger_(std::move(ledger)),
        opts_(opts) {
    survivors_.push_back(base.modes());
    processed_.assign(static_cast<std::size_t>(vocab_.n_pals()), 0);
  }

  void add_warnings(const std::vector<std::string>& ws) {
    warnings_.insert(warnings_.end(), ws.begin(), ws.end());
  }

  // Detection-time fixes, applied jointly so a pa whose two coordinates
  // are both determined never trips the legality check halfway.
  void fix_pa(int pa, std::optional<Mode> pre, std::optional<Mode> eff) {
    std::vector<std::vector<Mode>> kept;
    for (auto& modes : survivors_) {
      const Mode new_pre = pre ? *pre : modes[static_cast<std::size_t>(2 * pa)];
      const Mode new_eff = eff ? *eff : modes[static_cast<std::size_t>(2 * pa + 1)];
      if (!pa_value_legal(new_pre, new_eff)) continue;
      modes[static_cast<std::size_t>(2 * pa)] = new_pre;
      modes[static_cast<std::size_t>(2 * pa + 1)] = new_eff;
      kept.push_back(std::move(modes));
    }
    survivors_ = std::move(kept);
    dedupe_survivors();
    if (pre) mark_fixed(2 * pa);
    if (eff) mark_fixed(2 * pa + 1);
  }

  void open(int pal, AffectedWhy why) { open_internal(pal, why); }

  AssessmentReport run() {
    seed_anchors();
    drain();
    finale();
    return build_report();
  }

 private:
  std::shared_ptr<const GroundContext> ctx_;
  const Vocabulary& vocab_;
  const AgentSim& agent_;
  std::vector<BitVec> states_;
  std::vector<ObservationTrace> obs_;
  ConstraintSet ledger_;
  AssessOptions opts_;

  std::vector<std::vector<Mode>> survivors_;
  std::vector<char> processed_;
  std::set<int> pending_;
  std::map<int, AffectedWhy> gamma_;
  std::vector<LoggedQuery> log_;
  std::map<std::string, QueryResponse> cache_;
  std::map<int, std::pair<int, BitVec>> anchor_;  // action -> (gaction, pre-state)
  std::vector<std::vector<Mode>> snapshots_;
  std::vector<std::string> warnings_;

  DomainModel model_of(const std::vector<Mode>& modes) const {
    return DomainModel(ctx_->vocab_ptr(), modes);
  }

  std::string query_key(const Query& q) const {
    std::ostringstream os;
    os << ctx_->state_text(q.start) << '|';
    for (int ga : q.plan) os << ctx_->ground_action_text(ga);
    return os.str();
  }

  void seed_anchors() {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& trace : obs_) {
        for (int i = 0; i < trace.triplet_count(); ++i) {
          const ActionTriplet t = trace.triplet(i);
          const int action = ctx_->ground_action(t.gaction).action;
          if (anchor_.count(action)) continue;
          if (pass == 0 && !ctx_->injective(t.gaction)) continue;
          anchor_.emplace(action, std::make_pair(t.gaction, t.pre));
        }
      }
    }
  }

  void dedupe_survivors() {
    std::sort(survivors_.begin(), survivors_.end());
    survivors_.erase(std::unique(survivors_.begin(), survivors_.end()), survivors_.end());
    if (survivors_.empty())
      throw ContradictionError("no candidate model remains");
  }

  void open_internal(int pal, AffectedWhy why) {
    if (processed_[static_cast<std::size_t>(pal)]) return;
    pending_.insert(pal);
    gamma_.try_emplace(pal, why);
    for (auto& modes : survivors_) modes[static_cast<std::size_t>(pal)] = Mode::Unknown;
    dedupe_survivors();
  }

  void mark_fixed(int pal) {
    processed_[static_cast<std::size_t>(pal)] = 1;
    pending_.erase(pal);
    gamma_.erase(pal);  // inferred, not queried
  }

  void assign_all(int pal, Mode m) {
    mark_fixed(pal);
    const bool is_pre = Vocabulary::location_of(pal) == Location::Pre;
    std::vector<std::vector<Mode>> kept;
    for (auto& modes : survivors_) {
      const Mode partner = modes[static_cast<std::size_t>(Vocabulary::partner(pal))];
      const bool legal = is_pre ? pa_value_legal(m, partner) : pa_value_legal(partner, m);
      if (!legal) continue;  // refuted lineage
      modes[static_cast<std::size_t>(pal)] = m;
      kept.push_back(std::move(modes));
    }
    survivors_ = std::move(kept);
    dedupe_survivors();
  }

  int mode_spread(int pal) const {
    std::set<Mode> seen;
    for (const auto& modes : survivors_) seen.insert(modes[static_cast<std::size_t>(pal)]);
    return static_cast<int>(seen.size());
  }

  std::vector<Mode> consensus_modes() const {
    std::vector<Mode> out = survivors_.front();
    for (const auto& modes : survivors_) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] != modes[i]) out[i] = Mode::Unknown;
      }
    }
    return out;
  }

  QueryResponse ask(const Query& q) {
    const std::string key = query_key(q);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      sieve(q, it->second);
      return it->second;
    }
    const QueryResponse r = agent_.answer(q);
    cache_.emplace(key, r);
    log_.push_back({q, r});
    ingest(q, r);
    sieve(q, r);
    if (opts_.with_snapshots) snapshots_.push_back(consensus_modes());
    return r;
  }

  void ingest(const Query& q, const QueryResponse& r) {
    if (q.plan.size() != 1 || r.executed != 1) return;
    const int ga = q.plan[0];
    if (!ctx_->injective(ga)) return;
    ledger_.fold_triplet(*ctx_, ActionTriplet{q.start, ga, r.final_state});
    const int action = ctx_->ground_action(ga).action;
    anchor_.try_emplace(action, std::make_pair(ga, q.start));
    after_ledger_update(action);
  }

  // Newly narrowed constraints can re-open pal-tuples whose inherited
  // mode has become untenable, refute lineages, or fix modes outright.
  void after_ledger_update(int action) {
    const auto& pals = vocab_.pals_of_action(action);
    for (std::size_t k = 0; k < pals.size(); k += 2) {
      const int pa = Vocabulary::pa_of(pals[k]);
      std::set<int> reopen;
      std::vector<std::vector<Mode>> kept;
      for (auto& modes : survivors_) {
        const Mode pre = modes[static_cast<std::size_t>(pals[k])];
        const Mode eff = modes[static_cast<std::size_t>(pals[k + 1])];
        if (ledger_.joint_consistent(pa, pre, eff)) {
          kept.push_back(std::move(modes));
          continue;
        }
        const bool pre_open = !processed_[static_cast<std::size_t>(pals[k])];
        const bool eff_open = !processed_[static_cast<std::size_t>(pals[k + 1])];
        if (pre_open || eff_open) {
          if (pre_open) reopen.insert(pals[k]);
          if (eff_open) reopen.insert(pals[k + 1]);
          kept.push_back(std::move(modes));
        }
        // else: refuted lineage, dropped
      }
      survivors_ = std::move(kept);
      dedupe_survivors();
      for (int pal : reopen) open_internal(pal, AffectedWhy::ExpandedEvidence);
      for (int pal : {pals[k], pals[k + 1]}) {
        if (processed_[static_cast<std::size_t>(pal)]) continue;
        if (pending_.count(pal)) continue;  // will be investigated anyway
        if (auto forced = ledger_.forced_mode(pal)) {
          bool all_match = true;
          for (const auto& modes : survivors_) {
            if (modes[static_cast<std::size_t>(pal)] != *forced) all_match = false;
          }
          if (!all_match) assign_all(pal, *forced);
        }
      }
    }
  }

  void sieve(const Query& q, const QueryResponse& r) {
    std::vector<std::vector<Mode>> kept;
    for (auto& modes : survivors_) {
      if (response_consistent(model_of(modes), *ctx_, q, r)) kept.push_back(std::move(modes));
    }
    survivors_ = std::move(kept);
    if (survivors_.empty())
      throw ContradictionError("every candidate model is inconsistent with the agent's response");
    dedupe_survivors();
  }

  void expand(int pal) {
    std::vector<std::vector<Mode>> next;
    for (const auto& modes : survivors_) {
      const Mode partner = modes[static_cast<std::size_t>(Vocabulary::partner(pal))];
      for (Mode m : ledger_.allowed_modes(pal, partner)) {
        auto copy = modes;
        copy[static_cast<std::size_t>(pal)] = m;
        next.push_back(std::move(copy));
      }
    }
    survivors_ = std::move(next);
    dedupe_survivors();
  }

  void bootstrap(int action) {
    const auto& gas = ctx_->ground_actions_of(action);
    if (gas.empty()) return;
    int ga = gas[0];
    for (int g : gas) {
      if (ctx_->injective(g)) {
        ga = g;
        break;
      }
    }
    const auto& pals = vocab_.pals_of_action(action);
    std::vector<BitVec> bases = states_;
    if (bases.empty()) bases.push_back(ctx_->empty_state());
    int attempts = 0;
    std::set<std::string> tried;
    for (int phase = 0; phase < 2; ++phase) {
      for (const BitVec& base : bases) {
        if (anchor_.count(action)) return;
        if (attempts > opts_.max_bootstrap_states) return;
        BitVec s = base;
        for (std::size_t k = 0; k < pals.size(); k += 2) {
          const int atom = ctx_->pal_atom(pals[k], ga);
          const auto allowed = ledger_.allowed_modes(pals[k], Mode::Unknown);
          const bool has_plus = std::find(allowed.begin(), allowed.end(), Mode::Plus) != allowed.end();
          const bool has_minus = std::find(allowed.begin(), allowed.end(), Mode::Minus) != allowed.end();
          if (has_plus && !has_minus) s.set(atom, true);
          else if (has_minus && !has_plus) s.set(atom, false);
          else s.set(atom, phase == 0);
        }
        Query q{std::move(s), {ga}};
        const std::string key = query_key(q);
        if (tried.count(key) || cache_.count(key)) continue;
        tried.insert(key);
        ++attempts;
        ask(q);
      }
    }
  }

  std::optional<std::pair<int, int>> differing_pair(int pal) const {
    for (std::size_t i = 0; i < survivors_.size(); ++i) {
      for (std::size_t j = i + 1; j < survivors_.size(); ++j) {
        if (survivors_[i][static_cast<std::size_t>(pal)] !=
            survivors_[j][static_cast<std::size_t>(pal)])
          return std::make_pair(static_cast<int>(i), static_cast<int>(j));
      }
    }
    return std::nullopt;
  }

  void investigate(int pal) {
    processed_[static_cast<std::size_t>(pal)] = 1;
    const int action = vocab_.pal_tuples()[static_cast<std::size_t>(pal)].action;
    if (ctx_->ground_actions_of(action).empty()) {
      // Unexercisable action: nothing can ever reveal these modes.
      warnings_.push_back("action has no grounding, assuming absent: " + vocab_.pal_text(pal));
      assign_all(pal, Mode::Absent);
      return;
    }
    expand(pal);
    if (mode_spread(pal) <= 1) return;
    if (!anchor_.count(action)) bootstrap(action);
    if (mode_spread(pal) <= 1) return;
    auto it = anchor_.find(action);
    if (it != anchor_.end()) {
      const auto& [ga, s_pre] = it->second;
      const int atom = ctx_->pal_atom(pal, ga);
      // A false start separates a + mode from the rest, a true start a -
      // mode; lead with the polarity the remaining ambiguity needs.
      std::set<Mode> spread;
      for (const auto& modes : survivors_) spread.insert(modes[static_cast<std::size_t>(pal)]);
      std::vector<bool> polarities;
      if (spread.count(Mode::Plus)) polarities.push_back(false);
      if (spread.count(Mode::Minus)) polarities.push_back(true);
      if (polarities.empty()) polarities.push_back(false);
      if (polarities.size() == 1) polarities.push_back(!polarities.front());
      for (bool polarity : polarities) {
        if (mode_spread(pal) <= 1) break;
        Query q;
        q.start = s_pre;
        q.start.set(atom, polarity);
        q.plan = {ga};
        ask(q);
      }
    }
    int attempts = 0;
    while (mode_spread(pal) > 1 && attempts < 3) {
      auto pair = differing_pair(pal);
      if (!pair) break;
      auto q = generate_distinguishing_query(model_of(survivors_[static_cast<std::size_t>(pair->first)]),
                                             model_of(survivors_[static_cast<std::size_t>(pair->second)]),
                                             pal, states_, *ctx_);
      if (!q || cache_.count(query_key(*q))) break;
      ask(*q);
      ++attempts;
    }
    // Any spread left here is carried forward; the refinement pass
    // settles it once the other pals of the action are concrete.
  }

  void drain() {
    while (!pending_.empty()) {
      const int pal = *pending_.begin();
      pending_.erase(pending_.begin());
      investigate(pal);
    }
  }

  // First action whose replay diverges, or -1 when everything replays.
  int replay_mismatch(const DomainModel& m) const {
    for (const auto& trace : obs_) {
      for (int i = 0; i < trace.triplet_count(); ++i) {
        const ActionTriplet t = trace.triplet(i);
        if (!triplet_consistent(m, *ctx_, t))
          return ctx_->ground_action(t.gaction).action;
      }
    }
    for (const auto& lq : log_) {
      if (lq.query.plan.empty()) continue;
      if (!response_consistent(m, *ctx_, lq.query, lq.response))
        return ctx_->ground_action(lq.query.plan[0]).action;
    }
    return -1;
  }

  void finale() {
    for (int round = 0; round < opts_.max_refine_rounds; ++round) {
      std::set<int> reopen;
      std::vector<std::vector<Mode>> kept;
      for (auto& modes : survivors_) {
        const int bad_action = replay_mismatch(model_of(modes));
        if (bad_action < 0) {
          kept.push_back(std::move(modes));
          continue;
        }
        bool opened = false;
        for (int pal : vocab_.pals_of_action(bad_action)) {
          if (!processed_[static_cast<std::size_t>(pal)]) {
            reopen.insert(pal);
            opened = true;
          }
        }
        if (opened) kept.push_back(std::move(modes));
        // else: model refuted by its own replay, dropped
      }
      survivors_ = std::move(kept);
      if (survivors_.empty())
        throw ContradictionError("exact replay eliminated every learned model");
      dedupe_survivors();
      if (!reopen.empty()) {
        for (int pal : reopen) open_internal(pal, AffectedWhy::ExpandedEvidence);
        drain();
        continue;
      }
      if (survivors_.size() <= 1) return;
      // Multiplicity: distinguish the first two differing survivors.
      int diff_pal = -1;
      for (int pal = 0; pal < vocab_.n_pals() && diff_pal < 0; ++pal) {
        if (survivors_[0][static_cast<std::size_t>(pal)] !=
            survivors_[1][static_cast<std::size_t>(pal)])
          diff_pal = pal;
      }
      auto q = generate_distinguishing_query(model_of(survivors_[0]), model_of(survivors_[1]),
                                             diff_pal, states_, *ctx_);
      if (!q || cache_.count(query_key(*q))) {
        warnings_.push_back("indistinguishable candidate models retained");
        return;
      }
      ask(*q);
    }
    warnings_.push_back("refinement budget exhausted");
  }

  AssessmentReport build_report() {
    AssessmentReport rep;
    for (const auto& modes : survivors_) rep.learned.push_back(model_of(modes));
    for (const auto& [pal, why] : gamma_) rep.gamma_delta.entries.push_back({pal, why});
    rep.query_log = log_;
    rep.query_count = static_cast<int>(log_.size());
    rep.snapshots = snapshots_;
    rep.warnings = warnings_;
    return rep;
  }
};

void check_trace_context(const ObservationTrace& trace, const GroundContext& ctx) {
  if (trace.ctx.get() == &ctx) return;
  if (!(trace.ctx->vocab() == ctx.vocab()) || trace.ctx->objects() != ctx.objects())
    throw IncomparableModelsError("observation trace grounded over different objects");
}

}  // namespace

AssessmentReport daaisy(const DomainModel& m_init,
                        const std::vector<ObservationTrace>& observations, const AgentSim& agent,
                        const std::vector<BitVec>& random_states, const AssessOptions& options) {
  const auto& ctx = agent.ctx_ptr();
  if (!(m_init.vocab() == ctx->vocab()))
    throw IncomparableModelsError("initial model and agent vocabularies differ");
  if (!m_init.concrete()) throw AbstractModelError("the initial model must be concrete");
  for (const auto& o : observations) check_trace_context(o, *ctx);

  ConstraintSet ledger = infer_pa_constraints(observations, *ctx);
  const ExpandedDetection expanded = detect_expanded(m_init, ledger);
  const ReducedDetection reduced = detect_reduced(m_init, observations, options.expansion_cap);

  Resolver resolver(ctx, agent, random_states, observations, std::move(ledger), m_init, options);
  resolver.add_warnings(reduced.warnings);
  for (int pal : expanded.flagged) resolver.open(pal, AffectedWhy::ExpandedEvidence);
  for (int pal : reduced.flagged) resolver.open(pal, AffectedWhy::ReducedEvidence);
  std::map<int, std::pair<std::optional<Mode>, std::optional<Mode>>> fixes;
  for (const auto& [pal, mode] : expanded.fixed) {
    auto& slot = fixes[Vocabulary::pa_of(pal)];
    (Vocabulary::location_of(pal) == Location::Pre ? slot.first : slot.second) = mode;
  }
  for (const auto& [pa, pair] : fixes) resolver.fix_pa(pa, pair.first, pair.second);
  return resolver.run();
}

AssessmentReport aia_baseline(const AgentSim& agent, const std::vector<BitVec>& random_states,
                              const AssessOptions& options) {
  const auto& ctx = agent.ctx_ptr();
  const int n_pals = ctx->vocab().n_pals();
  DomainModel base(ctx->vocab_ptr(),
                   std::vector<Mode>(static_cast<std::size_t>(n_pals), Mode::Unknown));
  Resolver resolver(ctx, agent, random_states, {}, ConstraintSet(ctx->vocab().n_pas()), base,
                    options);
  for (int pal = 0; pal < n_pals; ++pal) resolver.open(pal, AffectedWhy::ExpandedEvidence);
  return resolver.run();
}

bool verify_report(const AssessmentReport& report,
                   const std::vector<ObservationTrace>& observations, const GroundContext& ctx) {
  for (const auto& m : report.learned) {
    if (!m.concrete()) return false;
    for (const auto& trace : observations) {
      if (!validate_trace(m, trace)) return false;
    }
    for (const auto& lq : report.query_log) {
      if (!response_consistent(m, ctx, lq.query, lq.response)) return false;
    }
  }
  return true;
}

}  // namespace remodel
