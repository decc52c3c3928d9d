#pragma once

// Shared helpers for the test suites: literal/atom shorthands, random tiny
// STRIPS instances, and random planner-state walks. Test-only; the random
// instance generator feeds the soundness/completeness oracle checks and must
// stay independent of the engine's search path.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "flecs/bench.hpp"
#include "flecs/grounding.hpp"
#include "flecs/planner_state.hpp"
#include "flecs/search.hpp"

namespace flecs::test {

inline Atom atom(const std::string& pred, std::vector<std::string> args = {}) {
  return Atom{pred, std::move(args)};
}

inline Literal lit(const std::string& pred, std::vector<std::string> args = {}) {
  return pos(atom(pred, std::move(args)));
}

inline Literal nlit(const std::string& pred,
                    std::vector<std::string> args = {}) {
  return neg(atom(pred, std::move(args)));
}

// Portable uniform draw (uniform_int_distribution is not cross-library
// reproducible).
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

struct TinyInstance {
  Domain domain;
  Problem problem;
};

struct TinyParams {
  int max_objects = 3;
  int max_preds = 3;
  int max_schemas = 4;
  int max_goals = 3;
  int max_arity = 1;
  bool allow_negative = true;
};

// Random tiny STRIPS instance, deterministic in seed. Atom universe stays
// small (≤ ~9 ground atoms) so the brute-force oracle is a complete decision
// procedure via duplicate-state elimination.
inline TinyInstance random_tiny_instance(std::uint64_t seed,
                                         const TinyParams& params = {}) {
  std::mt19937_64 rng(seed);
  TinyInstance inst;
  auto& d = inst.domain;
  auto& p = inst.problem;

  d.name = "tiny-" + std::to_string(seed);
  d.types = {"obj"};
  const int n_objects = 1 + static_cast<int>(draw(rng, params.max_objects));
  const int n_preds = 2 + static_cast<int>(draw(rng, params.max_preds - 1));
  std::vector<std::size_t> arity(n_preds);
  for (int i = 0; i < n_preds; ++i) {
    arity[i] = params.max_arity > 0 ? draw(rng, params.max_arity + 1) : 0;
    d.predicate_arity["p" + std::to_string(i + 1)] = arity[i];
  }

  const int n_schemas = 2 + static_cast<int>(draw(rng, params.max_schemas - 1));
  for (int s = 0; s < n_schemas; ++s) {
    OperatorSchema op;
    op.name = "op" + std::to_string(s + 1);
    op.file_index = s;
    const bool has_param = draw(rng, 2) == 1;
    if (has_param) op.params.push_back({"?x", "obj"});

    auto random_template = [&](bool allow_neg) {
      int pi = static_cast<int>(draw(rng, n_preds));
      TemplateLiteral t;
      t.pred = "p" + std::to_string(pi + 1);
      for (std::size_t a = 0; a < arity[pi]; ++a) {
        if (has_param && draw(rng, 2) == 1)
          t.args.push_back("?x");
        else
          t.args.push_back("c" + std::to_string(1 + draw(rng, n_objects)));
      }
      t.positive = !(allow_neg && params.allow_negative && draw(rng, 10) == 0);
      return t;
    };

    const int n_pre = 1 + static_cast<int>(draw(rng, 2));
    for (int i = 0; i < n_pre; ++i) op.pre.push_back(random_template(true));
    const int n_add = 1 + static_cast<int>(draw(rng, 2));
    for (int i = 0; i < n_add; ++i) {
      TemplateLiteral t = random_template(false);
      t.positive = true;
      op.add.push_back(t);
    }
    if (draw(rng, 3) > 0) {
      TemplateLiteral t = random_template(false);
      t.positive = true;
      op.del.push_back(t);
    }
    d.operators.push_back(std::move(op));
  }

  p.name = d.name;
  p.domain_name = d.name;
  for (int i = 1; i <= n_objects; ++i)
    p.objects.push_back({"c" + std::to_string(i), "obj"});

  // all ground atoms of the universe
  std::vector<Atom> universe;
  for (int i = 0; i < n_preds; ++i) {
    std::string pred = "p" + std::to_string(i + 1);
    if (arity[i] == 0) {
      universe.push_back(Atom{pred, {}});
    } else {
      for (int o = 1; o <= n_objects; ++o)
        universe.push_back(Atom{pred, {"c" + std::to_string(o)}});
    }
  }
  for (const auto& a : universe)
    if (draw(rng, 10) < 4) p.init.push_back(a);

  const int n_goals = 1 + static_cast<int>(draw(rng, params.max_goals));
  std::set<Literal> goals;
  for (int g = 0; g < n_goals && !universe.empty(); ++g) {
    Atom a = universe[draw(rng, universe.size())];
    bool positive = !(params.allow_negative && draw(rng, 10) == 0);
    goals.insert(Literal{a, positive});
  }
  p.goal.assign(goals.begin(), goals.end());
  return inst;
}

// One random legal planner step; returns false at a dead end.
inline bool random_step(PlannerState& ps, Grounder& grounder,
                        const Problem& problem, std::mt19937_64& rng) {
  Agenda agenda = ps.refresh_agenda(problem);
  struct Choice {
    bool is_apply;
    Literal goal;
    OpRef op;
  };
  std::vector<Choice> choices;
  for (const auto& g : agenda.pending)
    for (const auto& op : grounder.relevant_operators(g))
      choices.push_back({false, g, op});
  for (const auto& op : agenda.applicable)
    choices.push_back({true, Literal{}, op});
  if (choices.empty()) return false;
  const Choice& c = choices[draw(rng, choices.size())];
  if (c.is_apply)
    ps.apply_step(c.op);
  else
    ps.subgoal_step(c.goal, c.op);
  return true;
}

}  // namespace flecs::test
