#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flecs/grounding.hpp"
#include "flecs/problem.hpp"

namespace flecs {

// Independent ground truth for the planner: stepwise plan validation,
// blind breadth-first solving, and total-to-partial-order conversion.
// Shares only the representation layer (instantiate/apply_effects/satisfies)
// with the search engine.

struct ValidationReport {
  bool valid = false;
  std::optional<std::size_t> failing_step;  // 1-based index of the first bad step
  std::optional<Literal> missing;           // its unsatisfied precondition
  bool goal_satisfied = false;
  State final_state;

  std::string message() const;
};

ValidationReport validate_plan(const Domain& domain, const Problem& problem,
                               const std::vector<OpRef>& plan);

// Every ground operator of the problem: plain nested enumeration over
// type-compatible objects, schema file order then lexicographic bindings.
std::vector<OpRef> all_ground_operators(const Domain& domain,
                                        const Problem& problem);

enum class BruteStatus { kSolved, kNoPlan, kBudgetExceeded };

struct BruteResult {
  BruteStatus status = BruteStatus::kNoPlan;
  std::vector<OpRef> plan;   // a shortest plan when kSolved
  std::uint64_t states_expanded = 0;
};

// Breadth-first search over operator sequences with duplicate-state
// elimination. Returns a shortest valid plan of length ≤ max_length, kNoPlan
// if none exists within that bound, or kBudgetExceeded when the state budget
// is exhausted first. Deliberately naive; no heuristics.
BruteResult brute_force_solve(const Domain& domain, const Problem& problem,
                              std::size_t max_length,
                              std::uint64_t state_budget = 1000000);

struct PartialOrderPlan {
  std::vector<OpRef> steps;
  // Rule-derived ordering constraints (i before j), 0-based step indices:
  // producer links, threats against consumed preconditions, and clobber
  // edges against later establishers.
  std::set<std::pair<std::size_t, std::size_t>> orderings;

  // Transitive reduction of the orderings (what gets rendered).
  std::set<std::pair<std::size_t, std::size_t>> reduced() const;
  // Transitive closure query.
  bool precedes(std::size_t i, std::size_t j) const;
  std::string render() const;
};

// Converts a valid total-order plan into a partial order whose every linear
// extension is itself a valid plan. Throws std::runtime_error if the input
// plan does not validate.
PartialOrderPlan to_partial_order(const Domain& domain, const Problem& problem,
                                  const std::vector<OpRef>& plan);

}  // namespace flecs
