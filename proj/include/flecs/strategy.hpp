#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flecs/planner_state.hpp"

namespace flecs {

enum class Toggle { kSub, kApp };
enum class Phase { kSubgoal, kApply };

inline const char* to_string(Toggle t) { return t == Toggle::kSub ? "sub" : "app"; }
inline const char* to_string(Phase p) {
  return p == Phase::kSubgoal ? "subgoal" : "apply";
}

// Read-only view of the planning situation handed to every policy.
struct DecisionView {
  const PlannerState& ps;
  const Agenda& agenda;
  const Problem& problem;
};

// Path-local consumable positions. The engine snapshots and restores the
// cursor together with the planner state, so schedules and scripts stay
// aligned with the current search path across backtracking.
struct StrategyCursor {
  std::uint64_t toggle_visits = 0;  // step-5a consultations on this path
  std::size_t script_pos = 0;       // prompts answered on this path
};

// ---------------------------------------------------------------------------
// Decision-site choice sources (scripts, interactive sessions).

enum class ChoiceSite { kPhase, kRelevant, kApplicable };

struct ChoiceContext {
  ChoiceSite site;
  int depth = 0;              // committed decisions on the current path
  std::size_t attempt = 0;    // alternatives already tried at this site
  const Literal* goal = nullptr;  // chosen goal at kRelevant sites
};

// Replies: kNone falls through to the default ranked order; kUndo unwinds to
// the previous prompt; kAuto hands the rest of the search to the defaults.
enum class ReplyKind { kPick, kNone, kUndo, kAuto, kAbort };

struct PhaseReply {
  ReplyKind kind = ReplyKind::kNone;
  Phase phase = Phase::kSubgoal;
};
struct OpReply {
  ReplyKind kind = ReplyKind::kNone;
  std::size_t index = 0;
};

class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  // Consulted only when both phases are live (the step-5d backtrack point).
  virtual PhaseReply phase_choice(const DecisionView& view,
                                  const ChoiceContext& ctx, Phase first,
                                  StrategyCursor& cursor) = 0;
  // Consulted only when at least two candidates remain (6c and step 7).
  virtual OpReply op_choice(const DecisionView& view, const ChoiceContext& ctx,
                            const std::vector<OpRef>& options,
                            const std::vector<bool>& tried,
                            StrategyCursor& cursor) = 0;
  // Called once per pass through the loop, before any decision.
  virtual void on_iteration(const DecisionView& view) { (void)view; }
  // Optional step-5a override; nullopt defers to the strategy's toggle policy.
  virtual std::optional<Toggle> toggle_override(const DecisionView& view) {
    (void)view;
    return std::nullopt;
  }
};

// Positional choice script: one token per line, "sub", "app", or a ground
// operator rendering "name(c1,c2)". Entries are consumed one per prompt; a
// token that matches no current option is consumed without effect.
class ScriptSource : public ChoiceSource {
 public:
  explicit ScriptSource(std::vector<std::string> entries)
      : entries_(std::move(entries)) {}
  static ScriptSource from_text(const std::string& text);

  PhaseReply phase_choice(const DecisionView&, const ChoiceContext&, Phase,
                          StrategyCursor& cursor) override;
  OpReply op_choice(const DecisionView&, const ChoiceContext&,
                    const std::vector<OpRef>& options,
                    const std::vector<bool>& tried,
                    StrategyCursor& cursor) override;

  const std::vector<std::string>& entries() const { return entries_; }

 private:
  std::vector<std::string> entries_;
};

// ---------------------------------------------------------------------------
// Strategy: the bundle of choice policies.

struct TogglePolicy {
  enum class Kind { kSaba, kSavta, kSchedule } kind = Kind::kSaba;
  std::vector<Toggle> schedule;  // nonempty for kSchedule; last value persists
};

struct Strategy {
  std::string name = "saba";
  TogglePolicy toggle;
  // Optional decision-site overrides (choice scripts, interactive prompts).
  std::shared_ptr<ChoiceSource> choices;
  // When set, the trace's per-iteration toggle event reports the resolved
  // phase rather than the 5a preference (scripts/interactive pin phases
  // directly, so the preference is not separately meaningful).
  bool toggle_event_is_resolved = false;

  // Step 5a.
  Toggle decide_toggle(const DecisionView& view, StrategyCursor& cursor) const;

  static Strategy saba();
  static Strategy savta();
  static Strategy schedule(std::vector<Toggle> values);
  static Strategy script(std::shared_ptr<ChoiceSource> source,
                         std::string name = "script");
};

// Parses a schedule file: one "sub"/"app" token per line, '#' comments.
std::vector<Toggle> parse_toggle_schedule(const std::string& text);

// ---------------------------------------------------------------------------
// Default decision policies (pure functions of the view). Each exists in an
// interned form (the search hot path) and a value-typed form that converts
// and delegates.

// Step 6: means-ends goal selection. Prefers a goal unsatisfied in C; ties
// break on goal-statement order, then fringe-entry order. Not a backtrack
// point.
Literal select_goal(const DecisionView& view,
                    const std::vector<Literal>& candidates);
LitId select_goal_id(const PlannerState& ps, const std::vector<LitId>& candidates);

// Step 6c: ascending conspiracy score (= preconditions unsatisfied in C),
// then fewer total preconditions, then schema file order, then lexicographic
// bindings.
std::vector<OpRef> rank_relevant(const DecisionView& view,
                                 std::vector<OpRef> candidates);
std::vector<OpId> rank_relevant_ids(const PlannerState& ps,
                                    std::vector<OpId> candidates);
int conspiracy_score(const DecisionView& view, const GroundOperator& op);
int conspiracy_score_id(const PlannerState& ps, OpId op);

// Step 7: ascending threat score — how many other selected operators the
// candidate deletes preconditions of, plus how many delete its effects.
std::vector<OpRef> rank_applicable(const DecisionView& view,
                                   std::vector<OpRef> candidates);
std::vector<OpId> rank_applicable_ids(const PlannerState& ps,
                                      std::vector<OpId> candidates);
int threat_score(const DecisionView& view, const GroundOperator& op);
int threat_score_id(const PlannerState& ps, OpId op);

// §4.1 independence: partition of candidates under the transitive closure of
// "interacts"; operators in different classes need only one relative order.
std::vector<std::vector<OpRef>> independence_partition(
    const DecisionView& view, const std::vector<OpRef>& candidates);
std::vector<std::vector<OpId>> independence_partition_ids(
    const PlannerState& ps, const std::vector<OpId>& candidates);

}  // namespace flecs
