#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "flecs/grounding.hpp"
#include "flecs/problem.hpp"
#include "flecs/state.hpp"

namespace flecs {

// An ancestor goal set, kept sorted for canonical comparison/printing.
using AncestorSet = std::vector<Literal>;
// Collection of alternative ancestor sets for one fringe goal.
using AncestorSets = std::set<AncestorSet>;

AncestorSet make_ancestor_set(std::vector<Literal> lits);
std::string ancestor_sets_str(const AncestorSets& sets);

// Active pending goals and applicable operators for one pass.
struct Agenda {
  std::vector<Literal> pending;   // active P, fringe-entry order
  std::vector<OpRef> applicable;  // active A, selection order

  bool has(const Literal& l) const;
  bool has(const OpRef& op) const;
  bool operator==(const Agenda& o) const;
};

// The planner's search state: current state C, fringe goals G, selected
// operators O, ancestor function a, cause function c, and the head-plan.
// Value semantics: a copy is a snapshot; assignment restores. Internally
// everything is interned through the search's Grounder; the Literal/OpRef
// accessors convert on demand.
class PlannerState {
 public:
  static PlannerState initialize(const Problem& problem, Grounder& grounder);

  Grounder& grounder() const { return *grounder_; }

  // ---- value-typed views -------------------------------------------------
  State current() const;
  std::vector<Literal> fringe() const;
  bool on_fringe(const Literal& l) const;
  std::vector<OpRef> selected() const;
  bool is_selected(const OpRef& op) const;
  std::vector<OpRef> head() const;
  AncestorSets ancestors(const Literal& l) const;
  std::set<Literal> causes(const OpRef& op) const;
  std::uint64_t entry_seq(const Literal& l) const;

  bool is_terminal(const Problem& problem) const;

  // Steps 3–4: pending goals and applicable operators, restricted to active
  // members. Pure: depends only on (this, problem).
  Agenda refresh_agenda(const Problem& problem) const;

  // Step 6 updates (6d–6g). Caller must pass an active pending goal and a
  // relevant operator; anything else is a caller bug and throws.
  void subgoal_step(const Literal& goal, const OpRef& op);

  // Step 7 updates (7a–7e). Caller must pass an active applicable operator.
  void apply_step(const OpRef& op);

  // Canonical (C, O, G) signature for state-loop detection.
  std::string signature() const;

  // Debug-mode validator: throws std::logic_error on a violated bookkeeping
  // invariant.
  void check_invariants(const Problem& problem) const;

  bool operator==(const PlannerState& o) const;

  // ---- interned hot path ------------------------------------------------
  bool holds_atom(AtomId a) const { return bit(current_, a); }
  bool holds(LitId l) const { return bit(current_, atom_of_lit(l)) == lit_positive(l); }
  bool initially_holds(LitId l) const {
    return bit(initial_, atom_of_lit(l)) == lit_positive(l);
  }
  bool is_terminal_fast() const;

  struct AgendaIds {
    std::vector<LitId> pending;
    std::vector<OpId> applicable;
  };
  AgendaIds refresh_agenda_ids() const;
  void refresh_agenda_ids_into(AgendaIds& out) const;  // reuses out's storage

  // appends the canonical (C, O, G) bytes; returns an FNV hash of them
  std::uint64_t signature_into(std::string& out) const;

  void subgoal_step_ids(LitId goal, OpId op);
  void apply_step_ids(OpId op);

  const std::vector<LitId>& fringe_ids() const { return fringe_order_; }
  bool on_fringe_id(LitId l) const { return seq_of(l) >= 0; }
  const std::vector<OpId>& selected_ids() const { return selected_order_; }
  const std::vector<OpId>& head_ids() const { return head_; }
  const std::vector<SetId>& anc_ids(LitId l) const;
  const std::vector<LitId>& cause_ids(OpId op) const;
  std::int64_t seq_of(LitId l) const {
    return static_cast<std::size_t>(l) < entry_seq_.size() ? entry_seq_[l] : -1;
  }

  // Cheap snapshots for the search: a mark plus an undo journal. undo_to
  // restores the state to the marked point exactly; marks must be unwound
  // in LIFO order. Copy snapshots remain valid independently.
  struct Mark {
    std::size_t journal = 0;
    std::size_t spill = 0;
  };
  Mark mark() const { return {journal_.size(), spill_.size()}; }
  void undo_to(const Mark& m);
  // index in the goal statement, or npos for non-statement literals
  std::size_t statement_index(LitId l) const;
  bool is_top_goal(LitId l) const { return statement_index(l) != kNpos; }

  static constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

 private:
  // undo-journal entry kinds; each mutation appends its exact inverse data
  enum class J : std::uint8_t {
    kFringeEnter,    // a = lit (appended)
    kFringeLeave,    // a = lit, b = index, c = old seq
    kSelectPush,     // a = op
    kSelectErase,    // a = op, b = index
    kCauseInsert,    // a = op, b = lit
    kCauseClear,     // a = op (old vector in spill_)
    kAncInsert,      // a = lit, b = set id
    kAncErase,       // a = lit, b = set id
    kAncPresent,     // a = lit, b = old flag
    kStateBit,       // a = atom, b = old bit
    kRetireInsert,   // a = lit
    kHeadPush,
  };
  struct JournalEntry {
    J kind;
    std::int32_t a = 0;
    std::int32_t b = 0;
    std::int64_t c = 0;
  };

  static bool bit(const std::vector<std::uint8_t>& v, AtomId a) {
    return static_cast<std::size_t>(a) < v.size() && v[a] != 0;
  }
  static void set_bit(std::vector<std::uint8_t>& v, AtomId a, bool value) {
    if (static_cast<std::size_t>(a) >= v.size()) {
      if (!value) return;
      v.resize(a + 1, 0);
    }
    v[a] = value ? 1 : 0;
  }
  template <typename T>
  static T& slot(std::vector<T>& v, std::int32_t idx, const T& fill) {
    if (static_cast<std::size_t>(idx) >= v.size()) v.resize(idx + 1, fill);
    return v[idx];
  }

  void enter_fringe(LitId l);
  void leave_fringe(LitId l);
  bool deactivated_by_4a(LitId l) const;
  bool anc_entry_exists(LitId l) const {
    return static_cast<std::size_t>(l) < anc_present_.size() && anc_present_[l];
  }

  Grounder* grounder_ = nullptr;
  std::vector<std::uint8_t> current_;   // by AtomId
  std::vector<std::uint8_t> initial_;   // by AtomId
  std::vector<LitId> fringe_order_;     // entry order
  std::vector<std::int64_t> entry_seq_; // by LitId; -1 = off fringe
  std::uint64_t next_seq_ = 0;
  std::vector<OpId> selected_order_;    // selection order
  std::vector<std::uint8_t> selected_mask_;  // by OpId
  std::vector<std::vector<SetId>> anc_;      // by LitId, sorted set ids
  std::vector<std::uint8_t> anc_present_;    // by LitId
  std::vector<std::vector<LitId>> cause_;    // by OpId, sorted literal ids
  std::vector<OpId> head_;
  std::vector<LitId> goal_ids_;              // statement order, deduped
  std::vector<std::int32_t> statement_idx_;  // by LitId; -1 = not a goal
  // goals whose operator has been applied; ancestor sets may keep referring
  // to them (Table 2 step 7c cleans only the applied operator's precondition
  // entries, deeper chains retire naturally through the 4a satisfaction test)
  std::vector<LitId> retired_causes_;        // sorted
  std::vector<JournalEntry> journal_;
  std::vector<std::vector<LitId>> spill_;    // cleared cause sets
};

}  // namespace flecs
