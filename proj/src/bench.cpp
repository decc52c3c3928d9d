#include "flecs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "flecs/oracle.hpp"

namespace flecs {

const char* to_string(Family f) {
  switch (f) {
    case Family::kDms1: return "dms1";
    case Family::kUseOnce: return "use-once";
    case Family::kRollers: return "rollers";
    case Family::kFixture: return "fixture";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "dms1") return Family::kDms1;
  if (s == "use-once" || s == "useonce") return Family::kUseOnce;
  if (s == "rollers") return Family::kRollers;
  if (s == "fixture") return Family::kFixture;
  throw std::runtime_error("unknown suite family '" + s + "'");
}

namespace {
std::string num(int i) { return std::to_string(i); }
}  // namespace

Domain gen_dms1(int m) {
  if (m < 1) throw std::invalid_argument("gen_dms1: m must be >= 1");
  Domain d;
  d.name = "dms1-" + num(m);
  for (int k = 1; k <= m; ++k) {
    OperatorSchema op;
    op.name = "a" + num(k);
    op.pre.push_back({"i" + num(k), {}, true});
    op.add.push_back({"g" + num(k), {}, true});
    for (int j = 1; j < k; ++j) op.del.push_back({"i" + num(j), {}, true});
    op.file_index = k - 1;
    d.operators.push_back(std::move(op));
  }
  for (int k = 1; k <= m; ++k) {
    d.predicate_arity["i" + num(k)] = 0;
    d.predicate_arity["g" + num(k)] = 0;
  }
  return d;
}

Domain gen_dms1_metaphor(int m) {
  if (m < 1) throw std::invalid_argument("gen_dms1_metaphor: m must be >= 1");
  // one brush, shades ordered light to dark; painting a darker shade ruins
  // the lighter ones
  static const char* kNamed[] = {"white", "yellow", "green", "blue",
                                 "red",   "brown",  "black"};
  auto shade = [&](int k) {
    return k <= 7 ? std::string(kNamed[k - 1]) : "shade" + num(k);
  };
  Domain d;
  d.name = "one-brush-painting-" + num(m);
  d.types = {"object"};
  for (int k = 1; k <= m; ++k) {
    OperatorSchema op;
    op.name = "paint-" + shade(k);
    op.params = {{"?obj", "object"}};
    op.pre.push_back({"usable", {shade(k)}, true});
    op.add.push_back({shade(k), {"?obj"}, true});
    for (int j = 1; j < k; ++j) op.del.push_back({"usable", {shade(j)}, true});
    op.file_index = k - 1;
    d.operators.push_back(std::move(op));
  }
  d.predicate_arity["usable"] = 1;
  for (int k = 1; k <= m; ++k) d.predicate_arity[shade(k)] = 1;
  return d;
}

Domain gen_use_once(int n) {
  if (n < 1) throw std::invalid_argument("gen_use_once: n must be >= 1");
  Domain d;
  d.name = "use-once-" + num(n);
  d.types = {"part"};
  for (int k = 1; k <= n; ++k) {
    OperatorSchema op;
    op.name = "a" + num(k);
    op.params = {{"?p", "part"}};
    op.pre.push_back({"i" + num(k), {}, true});
    op.add.push_back({"done", {"?p"}, true});
    op.del.push_back({"i" + num(k), {}, true});
    op.file_index = k - 1;
    d.operators.push_back(std::move(op));
  }
  for (int k = 1; k <= n; ++k) d.predicate_arity["i" + num(k)] = 0;
  d.predicate_arity["done"] = 1;
  return d;
}

Domain gen_use_once_metaphor(int n) {
  if (n < 1) throw std::invalid_argument("gen_use_once_metaphor: n must be >= 1");
  Domain d;
  d.name = "multi-brush-painting-" + num(n);
  d.types = {"parts", "color"};
  for (int k = 1; k <= n; ++k) {
    OperatorSchema op;
    op.name = "paint-with-brush" + num(k);
    op.params = {{"?parts", "parts"}, {"?color", "color"}};
    op.pre.push_back({"unused", {"brush" + num(k)}, true});
    op.add.push_back({"painted", {"?parts", "?color"}, true});
    op.del.push_back({"unused", {"brush" + num(k)}, true});
    op.file_index = k - 1;
    d.operators.push_back(std::move(op));
  }
  d.predicate_arity["unused"] = 1;
  d.predicate_arity["painted"] = 2;
  return d;
}

Domain gen_rollers() {
  Domain d;
  d.name = "rollers";
  d.types = {"wall", "roller", "color"};

  OperatorSchema designate;
  designate.name = "designate-roller";
  designate.params = {{"?wall", "wall"}, {"?roller", "roller"}, {"?color", "color"}};
  designate.pre.push_back({"clean", {"?roller"}, true});
  designate.pre.push_back({"needs-painting", {"?wall"}, true});
  designate.add.push_back({"ready", {"?wall", "?roller", "?color"}, true});
  designate.add.push_back({"chosen", {"?roller", "?color"}, true});
  designate.file_index = 0;

  OperatorSchema fill;
  fill.name = "fill-roller";
  fill.params = {{"?roller", "roller"}, {"?color", "color"}};
  fill.pre.push_back({"clean", {"?roller"}, true});
  fill.pre.push_back({"chosen", {"?roller", "?color"}, true});
  fill.add.push_back({"filled-with-paint", {"?roller", "?color"}, true});
  fill.del.push_back({"clean", {"?roller"}, true});
  fill.file_index = 1;

  OperatorSchema paint;
  paint.name = "paint-wall";
  paint.params = {{"?wall", "wall"}, {"?roller", "roller"}, {"?color", "color"}};
  paint.pre.push_back({"ready", {"?wall", "?roller", "?color"}, true});
  paint.pre.push_back({"filled-with-paint", {"?roller", "?color"}, true});
  paint.add.push_back({"painted", {"?wall", "?color"}, true});
  paint.del.push_back({"ready", {"?wall", "?roller", "?color"}, true});
  paint.del.push_back({"needs-painting", {"?wall"}, true});
  paint.file_index = 2;

  d.operators = {std::move(designate), std::move(fill), std::move(paint)};
  d.predicate_arity = {{"clean", 1},  {"needs-painting", 1},
                       {"ready", 3},  {"chosen", 2},
                       {"filled-with-paint", 2}, {"painted", 2}};
  return d;
}

RollersSpec rollers_five_wall_spec() {
  return RollersSpec{5, 2, {"red", "red", "red", "green", "green"}};
}

Problem gen_rollers_problem(const RollersSpec& spec) {
  if (spec.walls < 1 || spec.rollers < 1)
    throw std::invalid_argument("rollers: walls and rollers must be >= 1");
  if (static_cast<int>(spec.wall_colors.size()) != spec.walls)
    throw std::invalid_argument("rollers: one color per wall required");

  auto wall_name = [](int i) { return std::string("wall") + char('A' + i); };

  Problem p;
  p.name = "rollers-" + num(spec.walls) + "w" + num(spec.rollers) + "r";
  p.domain_name = "rollers";
  for (int i = 0; i < spec.walls; ++i) p.objects.push_back({wall_name(i), "wall"});
  for (int i = 1; i <= spec.rollers; ++i)
    p.objects.push_back({"roller" + num(i), "roller"});
  std::vector<std::string> colors;
  for (const auto& c : spec.wall_colors)
    if (std::find(colors.begin(), colors.end(), c) == colors.end())
      colors.push_back(c);
  for (const auto& c : colors) p.objects.push_back({c, "color"});

  for (int i = 0; i < spec.walls; ++i)
    p.init.push_back({"needs-painting", {wall_name(i)}});
  for (int i = 1; i <= spec.rollers; ++i)
    p.init.push_back({"clean", {"roller" + num(i)}});
  for (int i = 0; i < spec.walls; ++i)
    p.goal.push_back(pos(Atom{"painted", {wall_name(i), spec.wall_colors[i]}}));
  return p;
}

Domain fixture_domain() {
  Domain d;
  d.name = "figure-example";
  auto lit = [](const std::string& p) { return TemplateLiteral{p, {}, true}; };

  OperatorSchema o1;
  o1.name = "o1";
  o1.pre = {lit("g6"), lit("g7")};
  o1.add = {lit("g1")};
  o1.file_index = 0;

  OperatorSchema o2;  // achieves g2; adds g1 as a side-effect
  o2.name = "o2";
  o2.pre = {lit("g4")};
  o2.add = {lit("g2"), lit("g1")};
  o2.file_index = 1;

  OperatorSchema o3;  // deletes g4, a precondition of o2
  o3.name = "o3";
  o3.pre = {lit("g4"), lit("g5")};
  o3.add = {lit("g3")};
  o3.del = {lit("g4")};
  o3.file_index = 2;

  OperatorSchema o4;
  o4.name = "o4";
  o4.pre = {lit("g7")};
  o4.add = {lit("g4"), lit("g5")};
  o4.file_index = 3;

  d.operators = {std::move(o1), std::move(o2), std::move(o3), std::move(o4)};
  for (int k = 1; k <= 7; ++k) d.predicate_arity["g" + num(k)] = 0;
  return d;
}

Problem fixture_problem() {
  Problem p;
  p.name = "figure-example";
  p.domain_name = "figure-example";
  p.init = {Atom{"g7", {}}};
  p.goal = {pos(Atom{"g1", {}}), pos(Atom{"g2", {}}), pos(Atom{"g3", {}})};
  return p;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the mixed components
  std::uint64_t x = base ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Portable uniform draw below n (std::uniform_int_distribution is not
// reproducible across standard libraries).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace

Problem gen_random_goals(Family family, int m, int k, std::uint64_t seed) {
  if (k < 1 || k > m)
    throw std::invalid_argument("gen_random_goals: need 1 <= k <= m");

  if (family == Family::kUseOnce) {
    // goals are interchangeable; k parts, all i_k true initially
    Problem p;
    p.name = "use-once-" + num(m) + "-k" + num(k);
    p.domain_name = "use-once-" + num(m);
    for (int i = 1; i <= k; ++i) p.objects.push_back({"part" + num(i), "part"});
    for (int i = 1; i <= m; ++i) p.init.push_back({"i" + num(i), {}});
    for (int i = 1; i <= k; ++i)
      p.goal.push_back(pos(Atom{"done", {"part" + num(i)}}));
    return p;
  }
  if (family != Family::kDms1)
    throw std::invalid_argument("gen_random_goals: unsupported family");

  // uniformly random k-subset of {g1..gm} without replacement, in draw order
  std::mt19937_64 rng(seed);
  std::vector<int> indices(m);
  for (int i = 0; i < m; ++i) indices[i] = i + 1;
  std::vector<int> chosen;
  for (int i = 0; i < k; ++i) {
    std::size_t j = i + uniform_below(rng, indices.size() - i);
    std::swap(indices[i], indices[j]);
    chosen.push_back(indices[i]);
  }

  Problem p;
  std::ostringstream name;
  name << "dms1-" << m << "-k" << k << "-s" << seed;
  p.name = name.str();
  p.domain_name = "dms1-" + num(m);
  for (int i = 1; i <= m; ++i) p.init.push_back({"i" + num(i), {}});
  for (int g : chosen) p.goal.push_back(pos(Atom{"g" + num(g), {}}));
  return p;
}

SuiteResult run_suite(const SuiteSpec& spec,
                      const std::vector<Strategy>& strategies,
                      const SearchConfig& base_config) {
  SuiteResult result;

  struct Instance {
    Domain domain;
    Problem problem;
    int size;
    int problem_id;
    std::uint64_t seed;
  };
  std::vector<Instance> instances;

  switch (spec.family) {
    case Family::kDms1: {
      Domain d = gen_dms1(spec.m);
      for (int k = spec.goals_min; k <= spec.goals_max; ++k)
        for (int idx = 0; idx < spec.per_point; ++idx) {
          std::uint64_t s = derive_seed(spec.seed, k, idx);
          instances.push_back({d, gen_random_goals(Family::kDms1, spec.m, k, s),
                               k, idx, s});
        }
      break;
    }
    case Family::kUseOnce: {
      Domain d = gen_use_once(spec.m);
      for (int k = spec.goals_min; k <= spec.goals_max; ++k)
        for (int idx = 0; idx < spec.per_point; ++idx) {
          std::uint64_t s = derive_seed(spec.seed, k, idx);
          instances.push_back(
              {d, gen_random_goals(Family::kUseOnce, spec.m, k, s), k, idx, s});
        }
      break;
    }
    case Family::kRollers: {
      RollersSpec rs = rollers_five_wall_spec();
      instances.push_back({gen_rollers(), gen_rollers_problem(rs),
                           static_cast<int>(rs.walls), 0, spec.seed});
      break;
    }
    case Family::kFixture: {
      instances.push_back({fixture_domain(), fixture_problem(), 3, 0, spec.seed});
      break;
    }
  }

  for (const auto& inst : instances) {
    for (const auto& strategy : strategies) {
      SearchConfig config = base_config;
      config.strategy = &strategy;
      auto t0 = std::chrono::steady_clock::now();
      SearchResult r = search(inst.domain, inst.problem, config);
      auto t1 = std::chrono::steady_clock::now();

      if (r.outcome == Outcome::kSolved) {
        ValidationReport v = validate_plan(inst.domain, inst.problem, r.plan);
        if (!v.valid)
          throw std::logic_error("run_suite: engine returned an invalid plan on " +
                                 inst.problem.name + " (" + v.message() + ")");
      }

      RunRecord row;
      row.family = to_string(spec.family);
      row.size = inst.size;
      row.problem_id = inst.problem_id;
      row.strategy = strategy.name;
      row.seed = inst.seed;
      row.outcome = r.outcome;
      row.plan_length = r.plan.size();
      row.nodes = r.stats.nodes_expanded;
      row.backtracks = r.stats.backtracks;
      row.subgoal_steps = r.stats.subgoal_steps;
      row.apply_steps = r.stats.apply_steps;
      row.elapsed_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      result.rows.push_back(std::move(row));
    }
  }

  // aggregate by (size, strategy), preserving first-seen order
  std::vector<std::pair<int, std::string>> keys;
  for (const auto& row : result.rows) {
    std::pair<int, std::string> key{row.size, row.strategy};
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) {
    AggregateRow agg;
    agg.size = key.first;
    agg.strategy = key.second;
    agg.min_nodes = UINT64_MAX;
    double node_sum = 0.0, backtrack_sum = 0.0;
    for (const auto& row : result.rows) {
      if (row.size != key.first || row.strategy != key.second) continue;
      ++agg.runs;
      if (row.outcome == Outcome::kSolved) ++agg.solved;
      node_sum += static_cast<double>(row.nodes);
      backtrack_sum += static_cast<double>(row.backtracks);
      agg.min_nodes = std::min(agg.min_nodes, row.nodes);
      agg.max_nodes = std::max(agg.max_nodes, row.nodes);
    }
    agg.mean_nodes = node_sum / agg.runs;
    agg.mean_backtracks = backtrack_sum / agg.runs;
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

void write_raw_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << "family,size,problem_id,strategy,seed,outcome,plan_length,nodes,"
        "backtracks,subgoal_steps,apply_steps,elapsed_ms\n";
  for (const auto& r : rows) {
    os << r.family << ',' << r.size << ',' << r.problem_id << ',' << r.strategy
       << ',' << r.seed << ',' << to_string(r.outcome) << ',' << r.plan_length
       << ',' << r.nodes << ',' << r.backtracks << ',' << r.subgoal_steps << ','
       << r.apply_steps << ',' << r.elapsed_ms << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "size,strategy,runs,solved,mean_nodes,min_nodes,max_nodes,"
        "mean_backtracks\n";
  for (const auto& r : rows) {
    os << r.size << ',' << r.strategy << ',' << r.runs << ',' << r.solved << ','
       << r.mean_nodes << ',' << r.min_nodes << ',' << r.max_nodes << ','
       << r.mean_backtracks << '\n';
  }
}

}  // namespace flecs
