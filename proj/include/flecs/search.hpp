#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flecs/grounding.hpp"
#include "flecs/planner_state.hpp"
#include "flecs/strategy.hpp"
#include "flecs/trace.hpp"

namespace flecs {

enum class Outcome { kSolved, kExhausted, kBudgetExceeded, kTimedOut, kAborted };

const char* to_string(Outcome o);

struct SearchStats {
  std::uint64_t nodes_expanded = 0;   // committed subgoal/apply steps
  std::uint64_t backtracks = 0;       // committed steps undone after failure
  std::uint64_t subgoal_steps = 0;
  std::uint64_t apply_steps = 0;
  std::uint64_t deepening_rounds = 0; // rounds after the first
  std::uint64_t peak_depth = 0;
};

struct SearchConfig {
  int depth_init = 8;
  int depth_increment = 8;
  std::uint64_t node_budget = 0;  // 0 = unbounded
  std::optional<std::chrono::milliseconds> time_limit;
  bool goal_loop_pruning = true;
  bool state_loop_pruning = true;
  bool independence_pruning = true;
  bool validate_each_step = false;  // debug-mode invariant walk
  const Strategy* strategy = nullptr;
  TraceSink trace_sink;     // optional event consumer
  bool record_trace = false;  // also collect events into the result
};

struct SearchResult {
  Outcome outcome = Outcome::kExhausted;
  std::vector<OpRef> plan;   // the head-plan on success
  SearchStats stats;
  std::vector<TraceEvent> trace;  // populated when record_trace
};

// Depth-first backtracking search over the three backtrack points (phase
// choice, relevant-operator choice, applicable-operator choice), with
// iterative deepening on the number of committed decisions per path.
SearchResult search(const Domain& domain, const Problem& problem,
                    const SearchConfig& config);

// Step-5 phase resolution, exposed for tests: the preferred branch under the
// toggle (with the all-pending-satisfied exception) and whether the other
// branch is live too (the step-5d backtrack point).
struct PhaseChoice {
  Phase phase;
  bool alternative_exists;
};
PhaseChoice choose_phase(const DecisionView& view, Toggle toggle);

}  // namespace flecs
