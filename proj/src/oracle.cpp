#include "flecs/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace flecs {

std::string ValidationReport::message() const {
  if (valid) return "valid";
  if (failing_step)
    return "invalid: step " + std::to_string(*failing_step) +
           " has unsatisfied precondition " +
           (missing ? missing->str() : std::string("?"));
  return "invalid: goal statement unsatisfied in the final state";
}

ValidationReport validate_plan(const Domain& domain, const Problem& problem,
                               const std::vector<OpRef>& plan) {
  (void)domain;
  ValidationReport report;
  State state = problem.initial_state();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    for (const auto& p : plan[i]->pre) {
      if (!satisfies(state, p)) {
        report.failing_step = i + 1;
        report.missing = p;
        report.final_state = std::move(state);
        return report;
      }
    }
    state = apply_effects(state, *plan[i]);
  }
  report.goal_satisfied = true;
  for (const auto& g : problem.goal)
    if (!satisfies(state, g)) {
      report.goal_satisfied = false;
      break;
    }
  report.valid = report.goal_satisfied;
  report.final_state = std::move(state);
  return report;
}

std::vector<OpRef> all_ground_operators(const Domain& domain,
                                        const Problem& problem) {
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& obj : problem.objects) by_type[obj.type].push_back(obj.name);
  for (auto& [t, names] : by_type) std::sort(names.begin(), names.end());

  std::vector<OpRef> out;
  for (const auto& schema : domain.operators) {
    std::vector<std::string> args(schema.params.size());
    std::vector<std::size_t> counter(schema.params.size(), 0);
    for (;;) {
      bool viable = true;
      for (std::size_t i = 0; i < schema.params.size(); ++i) {
        auto it = by_type.find(schema.params[i].type);
        if (it == by_type.end() || it->second.empty()) {
          viable = false;
          break;
        }
        args[i] = it->second[counter[i]];
      }
      if (!viable) break;
      out.push_back(std::make_shared<const GroundOperator>(
          instantiate(schema, args)));
      std::size_t i = schema.params.size();
      for (; i > 0; --i) {
        const auto& pool = by_type[schema.params[i - 1].type];
        if (++counter[i - 1] < pool.size()) break;
        counter[i - 1] = 0;
      }
      if (i == 0) break;
    }
  }
  return out;
}

BruteResult brute_force_solve(const Domain& domain, const Problem& problem,
                              std::size_t max_length,
                              std::uint64_t state_budget) {
  BruteResult result;
  const std::vector<OpRef> ops = all_ground_operators(domain, problem);

  // local atom interning: states become sorted int vectors
  std::unordered_map<Atom, int, AtomHash> atom_ids;
  auto intern = [&](const Atom& a) {
    auto [it, inserted] = atom_ids.emplace(a, static_cast<int>(atom_ids.size()));
    (void)inserted;
    return it->second;
  };
  struct OpInts {
    std::vector<std::pair<int, bool>> pre;  // (atom, required polarity)
    std::vector<int> add, del;              // sorted
  };
  std::vector<OpInts> op_ints(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (const auto& p : ops[i]->pre)
      op_ints[i].pre.emplace_back(intern(p.atom), p.positive);
    for (const auto& a : ops[i]->add) op_ints[i].add.push_back(intern(a));
    for (const auto& a : ops[i]->del) op_ints[i].del.push_back(intern(a));
    std::sort(op_ints[i].add.begin(), op_ints[i].add.end());
    std::sort(op_ints[i].del.begin(), op_ints[i].del.end());
  }
  std::vector<std::pair<int, bool>> goal_ints;
  for (const auto& g : problem.goal)
    goal_ints.emplace_back(intern(g.atom), g.positive);
  for (const auto& a : problem.init) intern(a);  // fix the universe up front

  using IntState = std::vector<int>;  // sorted atom ids
  auto holds = [](const IntState& s, int atom) {
    return std::binary_search(s.begin(), s.end(), atom);
  };
  auto goal_holds = [&](const IntState& s) {
    for (auto [atom, positive] : goal_ints)
      if (holds(s, atom) != positive) return false;
    return true;
  };
  struct StateHash {
    std::size_t operator()(const IntState& s) const noexcept {
      std::size_t h = 1469598103934665603ULL;
      for (int v : s) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
      return h;
    }
  };

  // bitmask fast path when the ground-atom universe fits in one word
  if (atom_ids.size() <= 64) {
    auto mask_of = [](const std::vector<int>& ids) {
      std::uint64_t m = 0;
      for (int id : ids) m |= std::uint64_t{1} << id;
      return m;
    };
    struct OpMask {
      std::uint64_t pre_pos = 0, pre_neg = 0, add = 0, del = 0;
    };
    std::vector<OpMask> masks(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
      for (auto [atom, positive] : op_ints[i].pre)
        (positive ? masks[i].pre_pos : masks[i].pre_neg) |=
            std::uint64_t{1} << atom;
      masks[i].add = mask_of(op_ints[i].add);
      masks[i].del = mask_of(op_ints[i].del);
    }
    std::uint64_t goal_pos = 0, goal_neg = 0;
    for (auto [atom, positive] : goal_ints)
      (positive ? goal_pos : goal_neg) |= std::uint64_t{1} << atom;
    auto goal_ok = [&](std::uint64_t s) {
      return (s & goal_pos) == goal_pos && (s & goal_neg) == 0;
    };

    struct BitNode {
      std::uint64_t state;
      std::int32_t parent;
      std::int32_t op;
      std::uint32_t depth;
    };
    std::vector<BitNode> nodes;
    std::unordered_set<std::uint64_t> visited;
    auto reconstruct = [&](std::int32_t idx) {
      std::vector<OpRef> plan;
      for (; idx > 0; idx = nodes[idx].parent) plan.push_back(ops[nodes[idx].op]);
      std::reverse(plan.begin(), plan.end());
      return plan;
    };

    std::uint64_t init = 0;
    for (const auto& a : problem.initial_state())
      init |= std::uint64_t{1} << intern(a);
    if (goal_ok(init)) {
      result.status = BruteStatus::kSolved;
      return result;
    }
    visited.insert(init);
    nodes.push_back(BitNode{init, -1, -1, 0});
    for (std::size_t front = 0; front < nodes.size(); ++front) {
      if (nodes[front].depth >= max_length) continue;
      if (++result.states_expanded > state_budget) {
        result.status = BruteStatus::kBudgetExceeded;
        return result;
      }
      const std::uint64_t s = nodes[front].state;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        const OpMask& m = masks[i];
        if ((s & m.pre_pos) != m.pre_pos || (s & m.pre_neg) != 0) continue;
        std::uint64_t applied = (s | m.add) & ~m.del;
        if (!visited.insert(applied).second) continue;
        if (goal_ok(applied)) {
          result.status = BruteStatus::kSolved;
          result.plan = reconstruct(static_cast<std::int32_t>(front));
          result.plan.push_back(ops[i]);
          return result;
        }
        nodes.push_back(BitNode{applied, static_cast<std::int32_t>(front),
                                static_cast<std::int32_t>(i),
                                nodes[front].depth + 1});
      }
    }
    result.status = BruteStatus::kNoPlan;
    return result;
  }

  // general path: states as sorted atom-id vectors
  struct SearchNode {
    IntState state;
    std::int32_t parent;
    std::int32_t op;
    std::uint32_t depth;
  };
  std::vector<SearchNode> nodes;
  std::unordered_set<IntState, StateHash> visited;

  auto reconstruct = [&](std::int32_t idx) {
    std::vector<OpRef> plan;
    for (; idx > 0; idx = nodes[idx].parent) plan.push_back(ops[nodes[idx].op]);
    std::reverse(plan.begin(), plan.end());
    return plan;
  };

  IntState init;
  for (const auto& a : problem.initial_state()) init.push_back(intern(a));
  std::sort(init.begin(), init.end());
  if (goal_holds(init)) {
    result.status = BruteStatus::kSolved;
    return result;
  }
  visited.insert(init);
  nodes.push_back(SearchNode{std::move(init), -1, -1, 0});

  IntState merged, applied;
  for (std::size_t front = 0; front < nodes.size(); ++front) {
    if (nodes[front].depth >= max_length) continue;
    if (++result.states_expanded > state_budget) {
      result.status = BruteStatus::kBudgetExceeded;
      return result;
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const OpInts& op = op_ints[i];
      const IntState& state = nodes[front].state;
      bool applicable = true;
      for (auto [atom, positive] : op.pre)
        if (holds(state, atom) != positive) {
          applicable = false;
          break;
        }
      if (!applicable) continue;
      // (state ∪ add) − del over sorted vectors
      merged.clear();
      std::set_union(state.begin(), state.end(), op.add.begin(), op.add.end(),
                     std::back_inserter(merged));
      applied.clear();
      std::set_difference(merged.begin(), merged.end(), op.del.begin(),
                          op.del.end(), std::back_inserter(applied));
      if (visited.count(applied)) continue;
      if (goal_holds(applied)) {
        result.status = BruteStatus::kSolved;
        result.plan = reconstruct(static_cast<std::int32_t>(front));
        result.plan.push_back(ops[i]);
        return result;
      }
      visited.insert(applied);
      nodes.push_back(SearchNode{applied, static_cast<std::int32_t>(front),
                                 static_cast<std::int32_t>(i),
                                 nodes[front].depth + 1});
    }
  }
  result.status = BruteStatus::kNoPlan;
  return result;
}

namespace {

// L is established by op (made true for positive L, made false for negative).
bool establishes(const GroundOperator& op, const Literal& l) {
  return l.positive ? op.adds(l.atom) : op.deletes(l.atom);
}

// L is clobbered by op.
bool negates(const GroundOperator& op, const Literal& l) {
  return l.positive ? op.deletes(l.atom) : op.adds(l.atom);
}

}  // namespace

std::set<std::pair<std::size_t, std::size_t>> PartialOrderPlan::reduced() const {
  const std::size_t n = steps.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [i, j] : orderings) reach[i][j] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;

  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [i, j] : orderings) {
    bool implied = false;
    for (std::size_t k = 0; k < n && !implied; ++k)
      if (k != i && k != j && reach[i][k] && reach[k][j]) implied = true;
    if (!implied) out.insert({i, j});
  }
  return out;
}

bool PartialOrderPlan::precedes(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  std::vector<std::size_t> stack{i};
  std::set<std::size_t> seen{i};
  while (!stack.empty()) {
    std::size_t cur = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : orderings) {
      if (a != cur || seen.count(b)) continue;
      if (b == j) return true;
      seen.insert(b);
      stack.push_back(b);
    }
  }
  return false;
}

std::string PartialOrderPlan::render() const {
  std::ostringstream os;
  os << "steps:";
  for (std::size_t i = 0; i < steps.size(); ++i)
    os << " " << (i + 1) << ":" << steps[i]->display;
  os << "\norderings:";
  for (const auto& [i, j] : reduced()) os << " " << (i + 1) << "<" << (j + 1);
  if (reduced().empty()) os << " (none)";
  os << "\n";
  return os.str();
}

PartialOrderPlan to_partial_order(const Domain& domain, const Problem& problem,
                                  const std::vector<OpRef>& plan) {
  ValidationReport check = validate_plan(domain, problem, plan);
  if (!check.valid)
    throw std::runtime_error("to_partial_order: input plan is invalid (" +
                             check.message() + ")");

  PartialOrderPlan out;
  out.steps = plan;
  const std::size_t n = plan.size();

  // producer links: step j consumes a precondition established last by i
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& l : plan[j]->pre) {
      std::optional<std::size_t> producer;
      for (std::size_t i = 0; i < j; ++i)
        if (establishes(*plan[i], l)) producer = i;
      if (producer) out.orderings.insert({*producer, j});
    }
  }
  // threat edges between every ordered pair
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool edge = false;
      // j clobbers a precondition of i: j must stay after i
      for (const auto& l : plan[i]->pre)
        if (negates(*plan[j], l)) {
          edge = true;
          break;
        }
      // i clobbers something j establishes: j must stay after i
      if (!edge) {
        for (const auto& a : plan[j]->add)
          if (plan[i]->deletes(a)) {
            edge = true;
            break;
          }
      }
      if (!edge) {
        for (const auto& a : plan[j]->del)
          if (plan[i]->adds(a)) {
            edge = true;
            break;
          }
      }
      if (edge) out.orderings.insert({i, j});
    }
  }
  return out;
}

}  // namespace flecs
