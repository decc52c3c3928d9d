#include "flecs/search.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace flecs {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kSolved: return "solved";
    case Outcome::kExhausted: return "exhausted";
    case Outcome::kBudgetExceeded: return "budget-exceeded";
    case Outcome::kTimedOut: return "time-out";
    case Outcome::kAborted: return "aborted";
  }
  return "?";
}

PhaseChoice choose_phase(const DecisionView& view, Toggle toggle) {
  const bool no_app = view.agenda.applicable.empty();
  const bool no_pend = view.agenda.pending.empty();
  if (no_app && no_pend)
    throw std::logic_error("choose_phase: empty agenda");
  if (no_app) return {Phase::kSubgoal, false};
  if (no_pend) return {Phase::kApply, false};
  // 5d with the §4.2 exception: under toggle=sub, subgoal first only while
  // some active pending goal is unsatisfied in the current state.
  bool some_unsat = false;
  for (const auto& p : view.agenda.pending)
    if (!satisfies(view.ps.current(), p)) {
      some_unsat = true;
      break;
    }
  Phase first = (toggle == Toggle::kSub && some_unsat) ? Phase::kSubgoal
                                                       : Phase::kApply;
  return {first, true};
}

namespace {

enum class StepResult { kSolved, kFailed, kCutoff, kUndo, kStop };

class Engine {
 public:
  Engine(const Domain& domain, const Problem& problem, const SearchConfig& config)
      : problem_(problem),
        config_(config),
        grounder_(domain, problem),
        fallback_(Strategy::saba()),
        strategy_(config.strategy ? config.strategy : &fallback_),
        tracing_(config.trace_sink || config.record_trace) {}

  SearchResult run() {
    start_ = std::chrono::steady_clock::now();
    ps_ = PlannerState::initialize(problem_, grounder_);
    if (config_.validate_each_step) ps_.check_invariants(problem_);
    const PlannerState::Mark root_mark = ps_.mark();
    const StrategyCursor root_cursor = cursor_;
    bound_ = std::max(1, config_.depth_init);

    for (;;) {
      if (tracing_) emit(TraceKind::kDeepen, std::to_string(bound_));
      StepResult r = dfs(0);
      if (r == StepResult::kSolved || r == StepResult::kStop) break;
      if (r == StepResult::kFailed) {
        outcome_ = Outcome::kExhausted;  // round completed with no cutoff
        break;
      }
      // kUndo at the root: nothing committed; re-prompt from the top.
      // kCutoff: deepen and retry.
      if (r == StepResult::kCutoff) {
        bound_ += std::max(1, config_.depth_increment);
        ++stats_.deepening_rounds;
      }
      ps_.undo_to(root_mark);
      cursor_ = root_cursor;
      path_sig_stack_.clear();
    }

    SearchResult out;
    out.outcome = outcome_;
    out.plan = plan_;
    out.stats = stats_;
    out.trace = std::move(trace_);
    return out;
  }

 private:
  StepResult dfs(int depth) {
    stats_.peak_depth =
        std::max<std::uint64_t>(stats_.peak_depth, static_cast<std::uint64_t>(depth));
    if (ps_.is_terminal_fast()) {
      outcome_ = Outcome::kSolved;
      plan_ = ps_.head();
      return StepResult::kSolved;
    }
    if (config_.node_budget && stats_.nodes_expanded >= config_.node_budget) {
      outcome_ = Outcome::kBudgetExceeded;
      return StepResult::kStop;
    }
    if (config_.time_limit &&
        std::chrono::steady_clock::now() - start_ >= *config_.time_limit) {
      outcome_ = Outcome::kTimedOut;
      return StepResult::kStop;
    }
    if (depth >= bound_) return StepResult::kCutoff;

    if (agenda_pool_.size() <= static_cast<std::size_t>(depth))
      agenda_pool_.resize(depth + 1);
    PlannerState::AgendaIds& agenda = agenda_pool_[depth];
    ps_.refresh_agenda_ids_into(agenda);

    // value-typed view for choice sources (scripts, interactive sessions)
    Agenda pub;
    const bool has_choices = strategy_->choices != nullptr;
    if (has_choices) {
      for (LitId l : agenda.pending) pub.pending.push_back(grounder_.lit_of(l));
      for (OpId op : agenda.applicable)
        pub.applicable.push_back(grounder_.op_of(op));
    }
    DecisionView view{ps_, pub, problem_};
    if (has_choices) strategy_->choices->on_iteration(view);

    Toggle pref = strategy_->decide_toggle(view, cursor_);  // step 5a
    if (has_choices) {
      if (auto forced = strategy_->choices->toggle_override(view))
        pref = *forced;
    }

    if (agenda.pending.empty() && agenda.applicable.empty())
      return StepResult::kFailed;  // dead end; backtrack

    // steps 5b–5d
    Phase first;
    bool alternative;
    if (agenda.applicable.empty()) {
      first = Phase::kSubgoal;
      alternative = false;
    } else if (agenda.pending.empty()) {
      first = Phase::kApply;
      alternative = false;
    } else {
      bool some_unsat = false;
      for (LitId p : agenda.pending)
        if (!ps_.holds(p)) {
          some_unsat = true;
          break;
        }
      first = (pref == Toggle::kSub && some_unsat) ? Phase::kSubgoal
                                                   : Phase::kApply;
      alternative = true;
    }

    if (!alternative) {
      if (tracing_) {
        emit_toggle(pref, first);
        emit(TraceKind::kPhase, std::string(to_string(first)) + "\tforced");
      }
      return first == Phase::kSubgoal ? do_subgoal(view, agenda, depth)
                                      : do_apply(view, agenda, depth);
    }

    // Step-5d backtrack point.
    const Phase order[2] = {first, first == Phase::kSubgoal ? Phase::kApply
                                                            : Phase::kSubgoal};
    bool tried[2] = {false, false};
    bool saw_cutoff = false;
    std::size_t attempt = 0;
    const StrategyCursor site_cursor = cursor_;  // pre-consult position
    for (;;) {
      int idx = -1;
      if (has_choices) {
        ChoiceContext ctx{ChoiceSite::kPhase, depth, attempt, nullptr};
        PhaseReply reply =
            strategy_->choices->phase_choice(view, ctx, order[0], cursor_);
        if (reply.kind == ReplyKind::kAbort) {
          outcome_ = Outcome::kAborted;
          return StepResult::kStop;
        }
        if (reply.kind == ReplyKind::kUndo) return StepResult::kUndo;
        if (reply.kind == ReplyKind::kPick) {
          int want = reply.phase == order[0] ? 0 : 1;
          if (!tried[want]) idx = want;
        }
      }
      if (idx < 0) idx = !tried[0] ? 0 : (!tried[1] ? 1 : -1);
      if (idx < 0) break;

      if (tracing_) {
        if (attempt == 0) emit_toggle(pref, order[idx]);
        emit(TraceKind::kPhase, std::string(to_string(order[idx])) + "\tchosen");
      }
      StepResult r = order[idx] == Phase::kSubgoal
                         ? do_subgoal(view, agenda, depth)
                         : do_apply(view, agenda, depth);
      if (r == StepResult::kSolved || r == StepResult::kStop) return r;
      cursor_ = site_cursor;  // prompts re-record from this site's position
      if (r == StepResult::kUndo) continue;  // re-prompt this phase choice
      tried[idx] = true;
      ++attempt;
      if (r == StepResult::kCutoff) saw_cutoff = true;
    }
    return saw_cutoff ? StepResult::kCutoff : StepResult::kFailed;
  }

  // Step 6. The goal choice is not a backtrack point: goals with no relevant
  // operators are dropped locally (6b); once a goal with candidates is
  // chosen, exhausting its candidates fails the branch.
  StepResult do_subgoal(const DecisionView& view,
                        const PlannerState::AgendaIds& agenda, int depth) {
    std::vector<LitId> local = agenda.pending;
    for (;;) {
      if (local.empty()) return StepResult::kFailed;  // 6b-ii
      LitId goal = select_goal_id(ps_, local);
      const std::vector<OpId>& relevant = grounder_.relevant_ops(goal);
      std::vector<OpId> options;
      options.reserve(relevant.size());
      for (OpId op : relevant) {
        if (config_.goal_loop_pruning && is_goal_loop(goal, op)) {
          if (tracing_)
            emit(TraceKind::kPrune, "goal-loop\t" + grounder_.op_of(op)->display);
          continue;
        }
        options.push_back(op);
      }
      if (options.empty()) {
        local.erase(std::find(local.begin(), local.end(), goal));
        continue;
      }
      options = rank_relevant_ids(ps_, std::move(options));
      if (tracing_) emit(TraceKind::kSubgoal, grounder_.lit_of(goal).str());
      return try_operators(view, ChoiceSite::kRelevant, goal, options, depth);
    }
  }

  // Step 7.
  StepResult do_apply(const DecisionView& view,
                      const PlannerState::AgendaIds& agenda, int depth) {
    std::vector<OpId> options = rank_applicable_ids(ps_, agenda.applicable);
    if (config_.independence_pruning && options.size() > 1) {
      auto classes = independence_partition_ids(ps_, options);
      if (classes.size() > 1) {
        // one interleaving across classes: alternatives restricted to the
        // class of the top-ranked candidate
        const std::vector<OpId>* keep = nullptr;
        for (const auto& cls : classes) {
          if (std::find(cls.begin(), cls.end(), options[0]) != cls.end()) {
            keep = &cls;
            break;
          }
        }
        std::vector<OpId> restricted;
        for (OpId op : options)
          if (std::find(keep->begin(), keep->end(), op) != keep->end())
            restricted.push_back(op);
        if (tracing_ && restricted.size() < options.size())
          emit(TraceKind::kPrune,
               "independence\t" +
                   std::to_string(options.size() - restricted.size()) +
                   " orderings deferred");
        options = std::move(restricted);
      }
    }
    return try_operators(view, ChoiceSite::kApplicable, -1, options, depth);
  }

  // Shared alternative loop for the 6c and step-7 backtrack points.
  StepResult try_operators(const DecisionView& view, ChoiceSite site,
                           LitId goal, const std::vector<OpId>& options,
                           int depth) {
    std::vector<bool> tried(options.size(), false);
    bool saw_cutoff = false;
    std::size_t attempt = 0;
    const StrategyCursor site_cursor = cursor_;  // pre-consult position

    // value-typed option list for choice sources, built once per site
    const bool consult =
        strategy_->choices != nullptr && options.size() >= 2;
    std::vector<OpRef> option_refs;
    Literal goal_lit;
    if (consult) {
      for (OpId op : options) option_refs.push_back(grounder_.op_of(op));
      if (site == ChoiceSite::kRelevant) goal_lit = grounder_.lit_of(goal);
    }

    for (;;) {
      int idx = -1;
      if (consult) {
        ChoiceContext ctx{site, depth, attempt,
                          site == ChoiceSite::kRelevant ? &goal_lit : nullptr};
        OpReply reply =
            strategy_->choices->op_choice(view, ctx, option_refs, tried, cursor_);
        if (reply.kind == ReplyKind::kAbort) {
          outcome_ = Outcome::kAborted;
          return StepResult::kStop;
        }
        if (reply.kind == ReplyKind::kUndo) return StepResult::kUndo;
        if (reply.kind == ReplyKind::kPick && reply.index < options.size() &&
            !tried[reply.index])
          idx = static_cast<int>(reply.index);
      }
      if (idx < 0) {
        for (std::size_t i = 0; i < options.size(); ++i)
          if (!tried[i]) {
            idx = static_cast<int>(i);
            break;
          }
      }
      if (idx < 0) break;  // alternatives exhausted
      OpId op = options[idx];

      PlannerState::Mark snapshot = ps_.mark();
      bool pushed_sig = false;
      if (site == ChoiceSite::kRelevant) {
        ps_.subgoal_step_ids(goal, op);
        ++stats_.subgoal_steps;
        ++stats_.nodes_expanded;
        if (tracing_)
          emit(TraceKind::kSelectOp, grounder_.op_of(op)->display);
      } else {
        ps_.apply_step_ids(op);
        if (config_.state_loop_pruning) {
          sig_buf_.clear();
          std::uint64_t h = ps_.signature_into(sig_buf_);
          bool repeated = false;
          for (const auto& [ph, psig] : path_sig_stack_)
            if (ph == h && psig == sig_buf_) {
              repeated = true;
              break;
            }
          if (repeated) {
            if (tracing_)
              emit(TraceKind::kPrune,
                   "state-loop\t" + grounder_.op_of(op)->display);
            ps_.undo_to(snapshot);
            cursor_ = site_cursor;
            tried[idx] = true;
            ++attempt;
            continue;
          }
          path_sig_stack_.emplace_back(h, sig_buf_);
          pushed_sig = true;
        }
        ++stats_.apply_steps;
        ++stats_.nodes_expanded;
        if (tracing_) emit(TraceKind::kApply, grounder_.op_of(op)->display);
      }
      if (config_.validate_each_step) ps_.check_invariants(problem_);

      StepResult r = dfs(depth + 1);

      if (pushed_sig) path_sig_stack_.pop_back();
      if (r == StepResult::kSolved || r == StepResult::kStop) return r;
      ps_.undo_to(snapshot);
      cursor_ = site_cursor;
      if (r == StepResult::kUndo) {
        // unwind to the nearest prompting site; auto sites pass it along
        if (!consult) return StepResult::kUndo;
        continue;  // re-prompt, nothing marked tried
      }
      if (tracing_)
        emit(TraceKind::kBacktrack,
             (site == ChoiceSite::kRelevant ? std::string("undo-subgoal\t")
                                            : std::string("undo-apply\t")) +
                 grounder_.op_of(op)->display);
      ++stats_.backtracks;
      tried[idx] = true;
      ++attempt;
      if (r == StepResult::kCutoff) saw_cutoff = true;
    }
    return saw_cutoff ? StepResult::kCutoff : StepResult::kFailed;
  }

  // Goal-loop check for a 6c candidate: some unsatisfied precondition equals
  // the chosen goal or a literal of one of its ancestor sets.
  bool is_goal_loop(LitId goal, OpId op) const {
    for (LitId p : grounder_.op_ids(op).pre) {
      if (ps_.holds(p)) continue;
      if (p == goal) return true;
      for (SetId s : ps_.anc_ids(goal)) {
        const auto& lits = grounder_.set_of(s);
        if (std::binary_search(lits.begin(), lits.end(), p)) return true;
      }
    }
    return false;
  }

  void emit(TraceKind kind, std::string payload) {
    TraceEvent ev{++seq_, kind, std::move(payload)};
    if (config_.trace_sink) config_.trace_sink(ev);
    if (config_.record_trace) trace_.push_back(ev);
  }

  void emit_toggle(Toggle pref, Phase resolved) {
    if (strategy_->toggle_event_is_resolved)
      emit(TraceKind::kToggle, resolved == Phase::kSubgoal ? "sub" : "app");
    else
      emit(TraceKind::kToggle, to_string(pref));
  }

  const Problem& problem_;
  const SearchConfig& config_;
  Grounder grounder_;
  Strategy fallback_;
  const Strategy* strategy_;
  bool tracing_;
  PlannerState ps_;
  StrategyCursor cursor_;
  int bound_ = 1;
  SearchStats stats_;
  Outcome outcome_ = Outcome::kExhausted;
  std::vector<OpRef> plan_;
  std::vector<std::pair<std::uint64_t, std::string>> path_sig_stack_;
  std::string sig_buf_;
  std::deque<PlannerState::AgendaIds> agenda_pool_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t seq_ = 0;
  std::vector<TraceEvent> trace_;
};

}  // namespace

SearchResult search(const Domain& domain, const Problem& problem,
                    const SearchConfig& config) {
  Engine engine(domain, problem, config);
  return engine.run();
}

}  // namespace flecs
