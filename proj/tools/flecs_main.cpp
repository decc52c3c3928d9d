// Command-line front door for the planner: solve, bench, validate, and an
// interactive step session.
//
// Exit codes: 0 solved/valid/completed, 1 exhausted/invalid, 2 budget,
// time-out or aborted session, 3 usage or parse errors.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "flecs/bench.hpp"
#include "flecs/io.hpp"
#include "flecs/oracle.hpp"
#include "flecs/search.hpp"

namespace {

using namespace flecs;

constexpr int kExitSolved = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 3;

int exit_code_for(Outcome o) {
  switch (o) {
    case Outcome::kSolved: return kExitSolved;
    case Outcome::kExhausted: return kExitUnsolved;
    case Outcome::kBudgetExceeded:
    case Outcome::kTimedOut:
    case Outcome::kAborted: return kExitBudget;
  }
  return kExitUsage;
}

struct ConfigFlags {
  int depth_init = 8;
  int depth_increment = 8;
  std::uint64_t node_budget = 0;
  std::int64_t time_limit_ms = 0;
  bool no_goal_loop = false;
  bool no_state_loop = false;
  bool no_independence = false;
  std::string trace_path;

  void add_to(CLI::App* cmd, int default_depth_init) {
    depth_init = default_depth_init;
    cmd->add_option("--depth-init", depth_init, "initial depth bound")
        ->capture_default_str();
    cmd->add_option("--depth-increment", depth_increment,
                    "depth bound increment per deepening round")
        ->capture_default_str();
    cmd->add_option("--node-budget", node_budget,
                    "node budget, 0 = unbounded")
        ->capture_default_str();
    cmd->add_option("--time-limit-ms", time_limit_ms, "time limit, 0 = none")
        ->capture_default_str();
    cmd->add_flag("--no-goal-loop", no_goal_loop, "disable goal-loop pruning");
    cmd->add_flag("--no-state-loop", no_state_loop,
                  "disable state-loop pruning");
    cmd->add_flag("--no-independence", no_independence,
                  "disable the independence partition at step 7");
    cmd->add_option("--trace", trace_path, "write the search trace to a file");
  }

  SearchConfig to_config() const {
    SearchConfig c;
    c.depth_init = depth_init;
    c.depth_increment = depth_increment;
    c.node_budget = node_budget;
    if (time_limit_ms > 0)
      c.time_limit = std::chrono::milliseconds(time_limit_ms);
    c.goal_loop_pruning = !no_goal_loop;
    c.state_loop_pruning = !no_state_loop;
    c.independence_pruning = !no_independence;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Interactive decision source (cmd_step and --strategy interactive).

class InteractiveSource : public ChoiceSource {
 public:
  InteractiveSource(std::istream& in, std::ostream& out, bool show_state)
      : in_(in), out_(out), show_state_(show_state) {}

  PhaseReply phase_choice(const DecisionView& view, const ChoiceContext& ctx,
                          Phase first, StrategyCursor& cursor) override {
    if (auto_) return {};
    maybe_print_state(view);
    for (;;) {
      out_ << "[5d] subgoal or apply? (default " << to_string(first)
           << ") [sub/app/auto/undo/quit] > " << std::flush;
      std::string tok;
      if (!read_token(tok)) return {ReplyKind::kAbort, first};
      if (tok == "quit") return {ReplyKind::kAbort, first};
      if (tok == "undo") {
        if (ctx.depth == 0 && cursor.script_pos == 0) {
          out_ << "nothing to undo\n";
          continue;
        }
        return {ReplyKind::kUndo, first};
      }
      if (handle_auto(tok)) return {};
      if (tok.empty()) tok = to_string(first) == std::string("subgoal") ? "sub" : "app";
      if (tok == "sub") {
        record(cursor, "sub");
        return {ReplyKind::kPick, Phase::kSubgoal};
      }
      if (tok == "app") {
        record(cursor, "app");
        return {ReplyKind::kPick, Phase::kApply};
      }
      out_ << "unrecognized answer '" << tok << "'\n";
    }
  }

  OpReply op_choice(const DecisionView& view, const ChoiceContext& ctx,
                    const std::vector<OpRef>& options,
                    const std::vector<bool>& tried,
                    StrategyCursor& cursor) override {
    if (auto_) return {};
    maybe_print_state(view);
    const char* site = ctx.site == ChoiceSite::kRelevant ? "6c" : "7";
    for (;;) {
      if (ctx.site == ChoiceSite::kRelevant && ctx.goal)
        out_ << "achievers of " << ctx.goal->str() << ":\n";
      else
        out_ << "applicable operators:\n";
      for (std::size_t i = 0; i < options.size(); ++i) {
        int score = ctx.site == ChoiceSite::kRelevant
                        ? conspiracy_score(view, *options[i])
                        : threat_score(view, *options[i]);
        out_ << "  " << (i + 1) << ". " << options[i]->display
             << (ctx.site == ChoiceSite::kRelevant ? "  (conspiracy "
                                                   : "  (threat ")
             << score << ")" << (tried[i] ? "  [tried]" : "") << "\n";
      }
      out_ << "[" << site << "] choose operator [number/name/auto/undo/quit] > "
           << std::flush;
      std::string tok;
      if (!read_token(tok)) return {ReplyKind::kAbort, 0};
      if (tok == "quit") return {ReplyKind::kAbort, 0};
      if (tok == "undo") {
        if (ctx.depth == 0 && cursor.script_pos == 0) {
          out_ << "nothing to undo\n";
          continue;
        }
        return {ReplyKind::kUndo, 0};
      }
      if (handle_auto(tok)) return {};
      std::optional<std::size_t> idx;
      if (tok.empty()) {
        for (std::size_t i = 0; i < options.size(); ++i)
          if (!tried[i]) {
            idx = i;
            break;
          }
      } else if (tok.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t n = std::stoul(tok);
        if (n >= 1 && n <= options.size()) idx = n - 1;
      } else {
        for (std::size_t i = 0; i < options.size(); ++i)
          if (options[i]->display == tok) idx = i;
      }
      if (!idx) {
        out_ << "no such operator\n";
        continue;
      }
      if (tried[*idx]) {
        out_ << options[*idx]->display << " already failed here\n";
        continue;
      }
      record(cursor, options[*idx]->display);
      return {ReplyKind::kPick, *idx};
    }
  }

  void on_iteration(const DecisionView& view) override {
    maybe_print_state(view);
  }

  void maybe_print_state(const DecisionView& view) {
    if (!show_state_ || auto_) return;
    State now_state = view.ps.current();
    if (printed_once_ && now_state == last_printed_) return;
    printed_once_ = true;
    std::vector<Atom> now = now_state.sorted();
    std::vector<Atom> added, removed;
    for (const auto& a : now)
      if (!last_printed_.contains(a)) added.push_back(a);
    for (const auto& a : last_printed_.sorted())
      if (!now_state.contains(a)) removed.push_back(a);
    out_ << "--------------------------------------------------\n";
    out_ << "state delta:";
    if (added.empty() && removed.empty()) out_ << " (none)";
    for (const auto& a : added) out_ << " +" << a.str();
    for (const auto& a : removed) out_ << " -" << a.str();
    out_ << "\npending:";
    if (view.agenda.pending.empty()) out_ << " (none)";
    for (const auto& p : view.agenda.pending)
      out_ << " " << p.str() << (satisfies(now_state, p) ? "*" : "");
    out_ << "\napplicable:";
    if (view.agenda.applicable.empty()) out_ << " (none)";
    for (const auto& a : view.agenda.applicable) out_ << " " << a->display;
    out_ << "\nhead-plan:";
    if (view.ps.head().empty()) out_ << " (empty)";
    for (const auto& op : view.ps.head()) out_ << " " << op->display;
    out_ << "\n";
    last_printed_ = std::move(now_state);
  }

  std::optional<Toggle> toggle_override(const DecisionView&) override {
    return auto_ ? auto_toggle_ : std::nullopt;
  }

  // Saved script: answered prompts in positional order plus an explicit
  // fallback directive when auto handed control to a non-default strategy.
  std::string script_text(std::size_t upto) const {
    std::ostringstream os;
    if (auto_ && auto_name_ != "saba")
      os << "# fallback: " << auto_name_ << "\n";
    for (std::size_t i = 0; i < std::min(upto, record_.size()); ++i)
      os << record_[i] << "\n";
    return os.str();
  }

 private:
  bool read_token(std::string& tok) {
    std::string line;
    if (!std::getline(in_, line)) {
      out_ << "(end of input)\n";
      return false;
    }
    std::istringstream is(line);
    tok.clear();
    is >> tok;
    pending_arg_.clear();
    is >> pending_arg_;
    return true;
  }

  bool handle_auto(const std::string& tok) {
    if (tok != "auto") return false;
    auto_ = true;
    auto_name_ = pending_arg_.empty() ? "saba" : pending_arg_;
    if (auto_name_ == "savta")
      auto_toggle_ = Toggle::kApp;
    else
      auto_toggle_ = Toggle::kSub;
    out_ << "remaining decisions handed to " << auto_name_ << "\n";
    return true;
  }

  void record(StrategyCursor& cursor, std::string tok) {
    std::size_t pos = cursor.script_pos++;
    if (record_.size() > pos) record_.resize(pos);
    record_.push_back(std::move(tok));
  }

  std::istream& in_;
  std::ostream& out_;
  bool show_state_;
  bool auto_ = false;
  std::string auto_name_ = "saba";
  std::optional<Toggle> auto_toggle_;
  std::string pending_arg_;
  std::vector<std::string> record_;
  State last_printed_;
  bool printed_once_ = false;
};

// ---------------------------------------------------------------------------
// Strategy selector: saba | savta | schedule:PATH | script:PATH | interactive

Strategy make_strategy(const std::string& selector,
                       std::vector<std::shared_ptr<ChoiceSource>>& keep_alive) {
  if (selector == "saba") return Strategy::saba();
  if (selector == "savta") return Strategy::savta();
  if (selector.rfind("schedule:", 0) == 0) {
    std::string path = selector.substr(9);
    Strategy s = Strategy::schedule(parse_toggle_schedule(read_file(path)));
    s.name = "schedule:" + std::filesystem::path(path).filename().string();
    return s;
  }
  if (selector.rfind("script:", 0) == 0) {
    std::string path = selector.substr(7);
    std::string text = read_file(path);
    auto source = std::make_shared<ScriptSource>(ScriptSource::from_text(text));
    keep_alive.push_back(source);
    Strategy s = Strategy::script(source,
        "script:" + std::filesystem::path(path).filename().string());
    // fallback directive, e.g. "# fallback: savta"
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      auto at = line.find("# fallback:");
      if (at != std::string::npos) {
        std::string name = line.substr(at + 11);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t\r") + 1);
        if (name == "savta") s.toggle.kind = TogglePolicy::Kind::kSavta;
        break;
      }
    }
    return s;
  }
  if (selector == "interactive") {
    auto source = std::make_shared<InteractiveSource>(std::cin, std::cout,
                                                      /*show_state=*/false);
    keep_alive.push_back(source);
    return Strategy::script(source, "interactive");
  }
  throw std::runtime_error(
      "unknown strategy '" + selector +
      "' (expected saba, savta, schedule:PATH, script:PATH, interactive)");
}

SearchResult run_search_with_trace(const Domain& domain, const Problem& problem,
                                   SearchConfig config,
                                   const std::string& trace_path) {
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file)
      throw std::runtime_error("cannot write trace file: " + trace_path);
    config.trace_sink = [&trace_file](const TraceEvent& ev) {
      trace_file << ev.line() << "\n";
    };
  }
  return search(domain, problem, config);
}

void print_stats(std::ostream& os, const SearchResult& r) {
  os << "# outcome=" << to_string(r.outcome)
     << " plan-length=" << r.plan.size()
     << " nodes=" << r.stats.nodes_expanded
     << " backtracks=" << r.stats.backtracks
     << " subgoal-steps=" << r.stats.subgoal_steps
     << " apply-steps=" << r.stats.apply_steps
     << " deepening-rounds=" << r.stats.deepening_rounds
     << " peak-depth=" << r.stats.peak_depth << "\n";
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& domain_path, const std::string& problem_path,
              const std::string& strategy_sel, const std::string& schedule_path,
              const ConfigFlags& flags, const std::string& out_path,
              bool partial_order) {
  Domain domain = parse_domain(read_file(domain_path));
  Problem problem = parse_problem(read_file(problem_path), domain);

  std::vector<std::shared_ptr<ChoiceSource>> keep_alive;
  Strategy strategy = schedule_path.empty()
                          ? make_strategy(strategy_sel, keep_alive)
                          : [&] {
                              Strategy s = Strategy::schedule(
                                  parse_toggle_schedule(read_file(schedule_path)));
                              s.name = "schedule";
                              return s;
                            }();

  SearchConfig config = flags.to_config();
  config.strategy = &strategy;
  SearchResult r = run_search_with_trace(domain, problem, config, flags.trace_path);

  std::ostringstream plan_text;
  for (const auto& op : r.plan) plan_text << op->display << "\n";
  std::cout << plan_text.str();
  print_stats(std::cout, r);

  if (!out_path.empty()) write_file(out_path, plan_text.str());

  if (partial_order && r.outcome == Outcome::kSolved) {
    PartialOrderPlan po = to_partial_order(domain, problem, r.plan);
    std::istringstream lines(po.render());
    std::string line;
    while (std::getline(lines, line)) std::cout << "# " << line << "\n";
  }
  return exit_code_for(r.outcome);
}

int cmd_validate(const std::string& domain_path, const std::string& problem_path,
                 const std::string& plan_path) {
  Domain domain = parse_domain(read_file(domain_path));
  Problem problem = parse_problem(read_file(problem_path), domain);
  Grounder grounder(domain, problem);
  std::vector<OpRef> plan;
  for (const auto& step : parse_plan(read_file(plan_path)))
    plan.push_back(grounder.resolve(step.name, step.args));
  ValidationReport report = validate_plan(domain, problem, plan);
  std::cout << report.message() << "\n";
  std::cout << "final-state:";
  for (const auto& a : report.final_state.sorted()) std::cout << " " << a.str();
  std::cout << "\n";
  return report.valid ? kExitSolved : kExitUnsolved;
}

int cmd_bench(const std::string& suite, int m, const std::string& goals_range,
              int per_point, const std::string& strategies_csv,
              std::uint64_t seed, const ConfigFlags& flags,
              const std::string& out_prefix, const std::string& emit_dir) {
  if (per_point < 1) throw CLI::ValidationError("--per-point must be >= 1");

  SuiteSpec spec;
  spec.family = family_from_string(suite);
  spec.m = m;
  spec.per_point = per_point;
  spec.seed = seed;
  auto dots = goals_range.find("..");
  if (dots == std::string::npos) {
    spec.goals_min = spec.goals_max = std::stoi(goals_range);
  } else {
    spec.goals_min = std::stoi(goals_range.substr(0, dots));
    spec.goals_max = std::stoi(goals_range.substr(dots + 2));
  }
  if (spec.goals_min < 1 || spec.goals_max < spec.goals_min)
    throw CLI::ValidationError("--goals must be a range like 1..15");

  std::vector<std::shared_ptr<ChoiceSource>> keep_alive;
  std::vector<Strategy> strategies;
  std::stringstream ss(strategies_csv);
  std::string sel;
  while (std::getline(ss, sel, ','))
    if (!sel.empty()) strategies.push_back(make_strategy(sel, keep_alive));

  SearchConfig config = flags.to_config();
  SuiteResult result = run_suite(spec, strategies, config);

  std::ofstream raw(out_prefix + ".raw.csv");
  std::ofstream agg(out_prefix + ".aggregate.csv");
  if (!raw || !agg)
    throw std::runtime_error("cannot write CSV output at prefix " + out_prefix);
  write_raw_csv(raw, result.rows);
  write_aggregate_csv(agg, result.aggregates);
  std::cout << "wrote " << result.rows.size() << " rows to " << out_prefix
            << ".raw.csv and " << result.aggregates.size() << " aggregates to "
            << out_prefix << ".aggregate.csv\n";

  if (!emit_dir.empty()) {
    std::filesystem::create_directories(emit_dir);
    auto emit = [&](const std::string& name, const std::string& text) {
      write_file((std::filesystem::path(emit_dir) / name).string(), text);
    };
    switch (spec.family) {
      case Family::kDms1:
        emit("dms1.domain", serialize_domain(gen_dms1(spec.m)));
        emit("dms1-metaphor.domain", serialize_domain(gen_dms1_metaphor(spec.m)));
        break;
      case Family::kUseOnce:
        emit("use-once.domain", serialize_domain(gen_use_once(spec.m)));
        emit("use-once-metaphor.domain",
             serialize_domain(gen_use_once_metaphor(spec.m)));
        break;
      case Family::kRollers:
        emit("rollers.domain", serialize_domain(gen_rollers()));
        emit("rollers-5wall.problem",
             serialize_problem(gen_rollers_problem(rollers_five_wall_spec())));
        break;
      case Family::kFixture:
        emit("figure-example.domain", serialize_domain(fixture_domain()));
        emit("figure-example.problem", serialize_problem(fixture_problem()));
        break;
    }
  }
  return kExitSolved;
}

int cmd_step(const std::string& domain_path, const std::string& problem_path,
             const ConfigFlags& flags, const std::string& save_path) {
  Domain domain = parse_domain(read_file(domain_path));
  Problem problem = parse_problem(read_file(problem_path), domain);

  auto source = std::make_shared<InteractiveSource>(std::cin, std::cout,
                                                    /*show_state=*/true);
  Strategy strategy = Strategy::script(source, "interactive");
  SearchConfig config = flags.to_config();
  config.strategy = &strategy;

  SearchResult r = run_search_with_trace(domain, problem, config, flags.trace_path);

  std::cout << "==================================================\n";
  if (r.outcome == Outcome::kSolved) {
    std::cout << "plan:\n";
    for (const auto& op : r.plan) std::cout << op->display << "\n";
  }
  print_stats(std::cout, r);

  std::string path = save_path;
  if (path.empty() && r.outcome != Outcome::kAborted) {
    std::cout << "save decision script to (empty to skip) > " << std::flush;
    std::getline(std::cin, path);
  }
  if (!path.empty()) {
    write_file(path, source->script_text(SIZE_MAX));
    std::cout << "saved " << path << "\n";
  }
  return exit_code_for(r.outcome);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FLECS: backward-chaining planner with a flexible commitment strategy"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "search for a plan");
  std::string domain_path, problem_path, strategy_sel = "saba", schedule_path,
              out_path;
  bool partial_order = false;
  ConfigFlags solve_flags;
  solve->add_option("--domain", domain_path, "domain file")->required();
  solve->add_option("--problem", problem_path, "problem file")->required();
  solve->add_option("--strategy", strategy_sel,
                    "saba | savta | schedule:PATH | script:PATH | interactive")
      ->capture_default_str();
  solve->add_option("--schedule", schedule_path,
                    "toggle schedule file (shortcut for --strategy schedule:PATH)");
  solve->add_option("--out", out_path, "write the plan to a file");
  solve->add_flag("--partial-order", partial_order,
                  "also print the partial-order conversion of the plan");
  solve_flags.add_to(solve, /*default_depth_init=*/8);
  std::uint64_t solve_seed = 0;
  solve->add_option("--seed", solve_seed, "accepted for interface parity; unused");

  // validate
  auto* validate = app.add_subcommand("validate", "check a plan file");
  std::string v_domain, v_problem, v_plan;
  validate->add_option("--domain", v_domain, "domain file")->required();
  validate->add_option("--problem", v_problem, "problem file")->required();
  validate->add_option("--plan", v_plan, "plan file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  std::string suite = "dms1", goals_range = "1..15",
              strategies_csv = "saba,savta", out_prefix = "bench", emit_dir;
  int m = 15, per_point = 10;
  std::uint64_t seed = 0;
  ConfigFlags bench_flags;
  bench->add_option("--suite", suite, "dms1 | use-once | rollers | fixture")
      ->capture_default_str();
  bench->add_option("--m", m, "operator count")->capture_default_str();
  bench->add_option("--goals", goals_range, "goal counts, e.g. 1..15")
      ->capture_default_str();
  bench->add_option("--per-point", per_point, "problems per goal count")
      ->capture_default_str();
  bench->add_option("--strategies", strategies_csv,
                    "comma-separated strategy selectors")
      ->capture_default_str();
  bench->add_option("--seed", seed, "suite seed")->capture_default_str();
  bench->add_option("--out", out_prefix, "output CSV prefix")
      ->capture_default_str();
  bench->add_option("--emit-domains", emit_dir,
                    "also write the generated domain/problem files here");
  bench_flags.add_to(bench, /*default_depth_init=*/100000);

  // step
  auto* step = app.add_subcommand("step", "interactive step session");
  std::string s_domain, s_problem, s_save;
  ConfigFlags step_flags;
  step->add_option("--domain", s_domain, "domain file")->required();
  step->add_option("--problem", s_problem, "problem file")->required();
  step->add_option("--save", s_save, "write the decision script here on exit");
  step_flags.add_to(step, /*default_depth_init=*/100000);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(domain_path, problem_path, strategy_sel, schedule_path,
                       solve_flags, out_path, partial_order);
    if (validate->parsed()) return cmd_validate(v_domain, v_problem, v_plan);
    if (bench->parsed())
      return cmd_bench(suite, m, goals_range, per_point, strategies_csv, seed,
                       bench_flags, out_prefix, emit_dir);
    if (step->parsed()) return cmd_step(s_domain, s_problem, step_flags, s_save);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const flecs::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
