#include <doctest.h>

#include <algorithm>
#include <functional>

#include "flecs/bench.hpp"
#include "flecs/io.hpp"
#include "flecs/oracle.hpp"
#include "flecs/search.hpp"
#include "test_support.hpp"

using namespace flecs;
using namespace flecs::test;

namespace {

std::vector<OpRef> load_plan(Grounder& g, const std::string& path) {
  std::vector<OpRef> plan;
  for (const auto& step : parse_plan(read_file(path)))
    plan.push_back(g.resolve(step.name, step.args));
  return plan;
}

// All permutations of [0..n) consistent with the orderings.
void for_each_linear_extension(const PartialOrderPlan& po,
                               const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> perm(po.steps.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end());
  do {
    std::vector<std::size_t> position(perm.size());
    for (std::size_t slot = 0; slot < perm.size(); ++slot)
      position[perm[slot]] = slot;
    bool consistent = true;
    for (const auto& [i, j] : po.orderings)
      if (position[i] > position[j]) {
        consistent = false;
        break;
      }
    if (consistent) fn(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

TEST_CASE("validate_plan accepts the twelve-step roller solution") {
  Domain d = gen_rollers();
  Problem p = gen_rollers_problem(rollers_five_wall_spec());
  Grounder g(d, p);
  auto plan = load_plan(g, FLECS_DATA_DIR "/rollers-5wall-optimal.plan");
  REQUIRE(plan.size() == 12);
  ValidationReport v = validate_plan(d, p, plan);
  CHECK(v.valid);
  CHECK_FALSE(v.failing_step.has_value());
  CHECK(v.final_state.contains(atom("painted", {"wallE", "green"})));
}

TEST_CASE("validate_plan: filling before readying all red walls fails") {
  Domain d = gen_rollers();
  Problem p = gen_rollers_problem(rollers_five_wall_spec());
  Grounder g(d, p);
  auto plan = load_plan(g, FLECS_DATA_DIR "/rollers-5wall-optimal.plan");
  // move fill-roller(roller1,red) before the three designations
  std::rotate(plan.begin(), plan.begin() + 3, plan.begin() + 4);
  ValidationReport v = validate_plan(d, p, plan);
  CHECK_FALSE(v.valid);
  CHECK(v.failing_step == 1);  // (chosen roller1 red) not yet established
  CHECK(v.missing == lit("chosen", {"roller1", "red"}));
}

TEST_CASE("validate_plan: empty plan, satisfied goal") {
  Domain d = fixture_domain();
  Problem p = fixture_problem();
  p.goal = {lit("g7")};
  CHECK(validate_plan(d, p, {}).valid);
  p.goal = {lit("g1")};
  ValidationReport v = validate_plan(d, p, {});
  CHECK_FALSE(v.valid);
  CHECK_FALSE(v.failing_step.has_value());  // steps fine, goal unsatisfied
}

TEST_CASE("validate_plan: D^3S^1 descending order fails at step 2") {
  Domain d = gen_dms1(3);
  Problem p = gen_random_goals(Family::kDms1, 3, 3, 5);
  Grounder g(d, p);
  std::vector<OpRef> bad{g.resolve("a2", {}), g.resolve("a1", {}),
                         g.resolve("a3", {})};
  ValidationReport v = validate_plan(d, p, bad);
  CHECK_FALSE(v.valid);
  CHECK(v.failing_step == 2);
  CHECK(v.missing == lit("i1"));  // deleted by a2
}

TEST_CASE("brute_force_solve: fixture shortest plan has length 3") {
  Domain d = fixture_domain();
  Problem p = fixture_problem();
  BruteResult r = brute_force_solve(d, p, 6);
  REQUIRE(r.status == BruteStatus::kSolved);
  CHECK(r.plan.size() == 3);
  CHECK(validate_plan(d, p, r.plan).valid);
  // exhaustive: nothing shorter exists
  CHECK(brute_force_solve(d, p, 2).status == BruteStatus::kNoPlan);
  // one shortest plan is o4, o2, o3
  CHECK(r.plan[0]->schema == "o4");
}

TEST_CASE("brute_force_solve: unsolvable goal reports none") {
  Domain d = parse_domain(
      "(domain dead (:types) (:operator a (:params) (:pre (p)) (:add (q)) (:del))\n"
      " (:operator b (:params) (:pre (r)) (:add (q)) (:del)))");
  Problem p = parse_problem(
      "(problem dead (:domain dead) (:objects) (:init (p)) (:goal (r)))", d);
  CHECK(brute_force_solve(d, p, 10).status == BruteStatus::kNoPlan);
}

TEST_CASE("brute_force_solve: budget exhaustion is a distinct outcome") {
  Domain d = gen_rollers();
  Problem p = gen_rollers_problem(rollers_five_wall_spec());
  BruteResult r = brute_force_solve(d, p, 12, /*state_budget=*/50);
  CHECK(r.status == BruteStatus::kBudgetExceeded);
}

TEST_CASE("brute_force_solve: use-once with more goals than operators") {
  // 2 single-use operators cannot reach 3 distinct goal atoms
  Domain d = gen_use_once(2);
  Problem p = gen_random_goals(Family::kUseOnce, 2, 2, 0);
  p.objects.push_back({"part3", "part"});
  p.goal.push_back(lit("done", {"part3"}));
  CHECK(brute_force_solve(d, p, 4).status == BruteStatus::kNoPlan);
  // and any operator applied twice fails validation at its second use
  Grounder g(d, p);
  std::vector<OpRef> twice{g.resolve("a1", {"part1"}),
                           g.resolve("a1", {"part2"})};
  ValidationReport v = validate_plan(d, p, twice);
  CHECK_FALSE(v.valid);
  CHECK(v.failing_step == 2);
}

TEST_CASE("to_partial_order: the worked-example plan") {
  Domain d = fixture_domain();
  Problem p = fixture_problem();
  Grounder g(d, p);
  std::vector<OpRef> plan{g.resolve("o4", {}), g.resolve("o2", {}),
                          g.resolve("o3", {})};
  PartialOrderPlan po = to_partial_order(d, p, plan);
  // rule-derived orderings: o4 before both consumers, and the threat edge
  // o2 < o3 (o3 deletes g4, a precondition of o2)
  std::set<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {0, 2}, {1, 2}};
  CHECK(po.orderings == expected);
  // the reduction drops the implied o4 < o3
  std::set<std::pair<std::size_t, std::size_t>> reduced{{0, 1}, {1, 2}};
  CHECK(po.reduced() == reduced);
  CHECK(po.precedes(0, 1));
  CHECK(po.precedes(0, 2));
  CHECK(po.precedes(1, 2));
  CHECK_FALSE(po.precedes(2, 0));
}

TEST_CASE("to_partial_order: single step and disjoint steps") {
  Domain d = gen_use_once(2);
  Problem p = gen_random_goals(Family::kUseOnce, 2, 2, 0);
  Grounder g(d, p);

  Problem one_goal = p;
  one_goal.goal = {lit("done", {"part1"})};
  PartialOrderPlan single =
      to_partial_order(d, one_goal, {g.resolve("a1", {"part1"})});
  CHECK(single.orderings.empty());

  // disjoint pre/add/del: no orderings, both extensions validate
  std::vector<OpRef> pair{g.resolve("a1", {"part1"}),
                          g.resolve("a2", {"part2"})};
  PartialOrderPlan po = to_partial_order(d, p, pair);
  CHECK(po.orderings.empty());
  CHECK(validate_plan(d, p, {pair[1], pair[0]}).valid);
}

TEST_CASE("to_partial_order rejects invalid input plans") {
  Domain d = gen_dms1(3);
  Problem p = gen_random_goals(Family::kDms1, 3, 3, 5);
  Grounder g(d, p);
  std::vector<OpRef> bad{g.resolve("a2", {}), g.resolve("a1", {}),
                         g.resolve("a3", {})};
  CHECK_THROWS_AS(to_partial_order(d, p, bad), std::runtime_error);
}

TEST_CASE("to_partial_order: every linear extension validates (exhaustive)") {
  int plans_checked = 0;
  for (std::uint64_t seed = 1; seed <= 120 && plans_checked < 25; ++seed) {
    TinyInstance inst = random_tiny_instance(seed);
    BruteResult r = brute_force_solve(inst.domain, inst.problem, 6);
    if (r.status != BruteStatus::kSolved || r.plan.empty()) continue;
    ++plans_checked;
    PartialOrderPlan po = to_partial_order(inst.domain, inst.problem, r.plan);
    int extensions = 0;
    for_each_linear_extension(po, [&](const std::vector<std::size_t>& perm) {
      ++extensions;
      std::vector<OpRef> linear;
      for (std::size_t idx : perm) linear.push_back(po.steps[idx]);
      CHECK(validate_plan(inst.domain, inst.problem, linear).valid);
    });
    CHECK(extensions >= 1);  // the original order is always an extension
  }
  CHECK(plans_checked >= 10);
}

TEST_CASE("partial-order render names the reduced constraints") {
  Domain d = fixture_domain();
  Problem p = fixture_problem();
  Grounder g(d, p);
  std::vector<OpRef> plan{g.resolve("o4", {}), g.resolve("o2", {}),
                          g.resolve("o3", {})};
  std::string text = to_partial_order(d, p, plan).render();
  CHECK(text.find("1:o4()") != std::string::npos);
  CHECK(text.find("1<2") != std::string::npos);
  CHECK(text.find("2<3") != std::string::npos);
}

TEST_CASE("engine plans always pass the validator on random instances") {
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    TinyInstance inst = random_tiny_instance(seed);
    Strategy s = seed % 2 ? Strategy::saba() : Strategy::savta();
    SearchConfig config;
    config.strategy = &s;
    config.node_budget = 20000;
    SearchResult r = search(inst.domain, inst.problem, config);
    if (r.outcome == Outcome::kSolved)
      CHECK(validate_plan(inst.domain, inst.problem, r.plan).valid);
  }
}
