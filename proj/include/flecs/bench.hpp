#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "flecs/domain.hpp"
#include "flecs/problem.hpp"
#include "flecs/search.hpp"

namespace flecs {

enum class Family { kDms1, kUseOnce, kRollers, kFixture };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Domain families.

// D^mS^1: m zero-parameter operators a1..am with pre {i_k}, add {g_k},
// del {i_j | j < k}. Valid plans are ascending in operator index.
Domain gen_dms1(int m);
// Single-brush painting rendition of the same structure, emitted alongside
// the artificial domain for documentation.
Domain gen_dms1_metaphor(int m);

// D^1-use-once: n one-parameter operators a_k(?p) with pre {i_k},
// add {(done ?p)}, del {i_k}. Any operator achieves any goal, once.
Domain gen_use_once(int n);
// Multi-brush painting rendition (one operator per brush).
Domain gen_use_once_metaphor(int n);

// Wall/roller/color domain and its problem instance. wall_colors maps each
// wall index (0-based) to a color name; colors are collected from the map.
Domain gen_rollers();
struct RollersSpec {
  int walls = 5;
  int rollers = 2;
  std::vector<std::string> wall_colors;  // size == walls
};
Problem gen_rollers_problem(const RollersSpec& spec);
RollersSpec rollers_five_wall_spec();  // 5 walls, 2 rollers, red×3 + green×2

// The worked-example fixture: goals g1..g3, initial {g7}, operators o1..o4.
Domain fixture_domain();
Problem fixture_problem();

// Random problem for a family: the goal set is a uniformly random k-subset
// of the m goal atoms, kept in draw order; the initial state holds every i_k.
// Deterministic in seed.
Problem gen_random_goals(Family family, int m, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment harness.

struct SuiteSpec {
  Family family = Family::kDms1;
  int m = 15;            // operator count
  int goals_min = 1;
  int goals_max = 15;
  int per_point = 10;    // problems per goal count
  std::uint64_t seed = 0;
};

struct RunRecord {
  std::string family;
  int size = 0;          // goal count
  int problem_id = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kExhausted;
  std::size_t plan_length = 0;
  std::uint64_t nodes = 0;
  std::uint64_t backtracks = 0;
  std::uint64_t subgoal_steps = 0;
  std::uint64_t apply_steps = 0;
  double elapsed_ms = 0.0;
};

struct AggregateRow {
  int size = 0;
  std::string strategy;
  int runs = 0;
  int solved = 0;
  double mean_nodes = 0.0;
  std::uint64_t min_nodes = 0;
  std::uint64_t max_nodes = 0;
  double mean_backtracks = 0.0;
};

struct SuiteResult {
  std::vector<RunRecord> rows;
  std::vector<AggregateRow> aggregates;  // keyed (size, strategy), sorted
};

// Runs the cartesian product of generated problems × strategies under the
// given config. Every solved plan is validated before being recorded; a
// validation failure is a soundness bug and throws. Search failures become
// rows, never abort the suite.
SuiteResult run_suite(const SuiteSpec& spec,
                      const std::vector<Strategy>& strategies,
                      const SearchConfig& base_config);

// CSV: family,size,problem_id,strategy,seed,outcome,plan_length,nodes,
//      backtracks,subgoal_steps,apply_steps,elapsed_ms
void write_raw_csv(std::ostream& os, const std::vector<RunRecord>& rows);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

// Deterministic per-run seed derivation (splitmix64 over the components).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace flecs
