#include "flecs/strategy.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace flecs {

ScriptSource ScriptSource::from_text(const std::string& text) {
  std::vector<std::string> entries;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    entries.push_back(line.substr(b, e - b + 1));
  }
  return ScriptSource(std::move(entries));
}

PhaseReply ScriptSource::phase_choice(const DecisionView&, const ChoiceContext& ctx,
                                      Phase, StrategyCursor& cursor) {
  if (ctx.attempt > 0 || cursor.script_pos >= entries_.size()) return {};
  const std::string& tok = entries_[cursor.script_pos++];
  if (tok == "sub") return {ReplyKind::kPick, Phase::kSubgoal};
  if (tok == "app") return {ReplyKind::kPick, Phase::kApply};
  return {};  // entry was not a phase token; consumed without effect
}

OpReply ScriptSource::op_choice(const DecisionView&, const ChoiceContext& ctx,
                                const std::vector<OpRef>& options,
                                const std::vector<bool>& tried,
                                StrategyCursor& cursor) {
  if (ctx.attempt > 0 || cursor.script_pos >= entries_.size()) return {};
  const std::string& tok = entries_[cursor.script_pos++];
  for (std::size_t i = 0; i < options.size(); ++i)
    if (options[i]->display == tok && !tried[i]) return {ReplyKind::kPick, i};
  return {};
}

Toggle Strategy::decide_toggle(const DecisionView& view,
                               StrategyCursor& cursor) const {
  (void)view;
  std::uint64_t visit = cursor.toggle_visits++;
  switch (toggle.kind) {
    case TogglePolicy::Kind::kSaba:
      return Toggle::kSub;
    case TogglePolicy::Kind::kSavta:
      return Toggle::kApp;
    case TogglePolicy::Kind::kSchedule: {
      if (toggle.schedule.empty())
        throw std::logic_error("toggle schedule must be nonempty");
      std::size_t idx = std::min<std::uint64_t>(visit, toggle.schedule.size() - 1);
      return toggle.schedule[idx];  // last value persists after exhaustion
    }
  }
  return Toggle::kSub;
}

Strategy Strategy::saba() {
  Strategy s;
  s.name = "saba";
  s.toggle.kind = TogglePolicy::Kind::kSaba;
  return s;
}

Strategy Strategy::savta() {
  Strategy s;
  s.name = "savta";
  s.toggle.kind = TogglePolicy::Kind::kSavta;
  return s;
}

Strategy Strategy::schedule(std::vector<Toggle> values) {
  Strategy s;
  s.name = "schedule";
  s.toggle.kind = TogglePolicy::Kind::kSchedule;
  s.toggle.schedule = std::move(values);
  return s;
}

Strategy Strategy::script(std::shared_ptr<ChoiceSource> source, std::string name) {
  Strategy s;
  s.name = std::move(name);
  s.toggle.kind = TogglePolicy::Kind::kSaba;  // fallback after script exhaustion
  s.choices = std::move(source);
  s.toggle_event_is_resolved = true;
  return s;
}

std::vector<Toggle> parse_toggle_schedule(const std::string& text) {
  std::vector<Toggle> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(b, e - b + 1);
    if (tok == "sub")
      out.push_back(Toggle::kSub);
    else if (tok == "app")
      out.push_back(Toggle::kApp);
    else
      throw std::runtime_error("schedule line " + std::to_string(lineno) +
                               ": expected 'sub' or 'app', got '" + tok + "'");
  }
  if (out.empty()) throw std::runtime_error("schedule file is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Goal selection.

LitId select_goal_id(const PlannerState& ps, const std::vector<LitId>& candidates) {
  if (candidates.empty())
    throw std::logic_error("select_goal: no pending goals");
  auto better = [&](LitId a, LitId b) {
    bool ua = !ps.holds(a);
    bool ub = !ps.holds(b);
    if (ua != ub) return ua;  // means-ends: unsatisfied goals first
    std::size_t sa = ps.statement_index(a), sb = ps.statement_index(b);
    if (sa != sb) return sa < sb;  // goal-statement order (kNpos sorts last)
    return ps.seq_of(a) < ps.seq_of(b);  // fringe-entry order
  };
  LitId best = candidates[0];
  for (LitId c : candidates)
    if (better(c, best)) best = c;
  return best;
}

Literal select_goal(const DecisionView& view,
                    const std::vector<Literal>& candidates) {
  Grounder& g = view.ps.grounder();
  std::vector<LitId> ids;
  ids.reserve(candidates.size());
  for (const auto& l : candidates) ids.push_back(g.lit_id(l));
  return g.lit_of(select_goal_id(view.ps, ids));
}

// ---------------------------------------------------------------------------
// Operator rankings.

int conspiracy_score_id(const PlannerState& ps, OpId op) {
  int unsatisfied = 0;
  for (LitId p : ps.grounder().op_ids(op).pre)
    if (!ps.holds(p)) ++unsatisfied;
  return unsatisfied;
}

std::vector<OpId> rank_relevant_ids(const PlannerState& ps,
                                    std::vector<OpId> candidates) {
  const Grounder& g = ps.grounder();
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](OpId a, OpId b) {
                     int sa = conspiracy_score_id(ps, a);
                     int sb = conspiracy_score_id(ps, b);
                     if (sa != sb) return sa < sb;
                     const auto& ia = g.op_ids(a);
                     const auto& ib = g.op_ids(b);
                     if (ia.pre.size() != ib.pre.size())
                       return ia.pre.size() < ib.pre.size();
                     return ia.order_key < ib.order_key;
                   });
  return candidates;
}

namespace {

template <typename T>
bool sorted_intersect(const std::vector<T>& a, const std::vector<T>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

}  // namespace

int threat_score_id(const PlannerState& ps, OpId op) {
  const Grounder& g = ps.grounder();
  const auto& cand = g.op_ids(op);
  int score = 0;
  for (OpId other_id : ps.selected_ids()) {
    if (other_id == op) continue;
    const auto& other = g.op_ids(other_id);
    // op deletes a precondition of another selected operator
    if (sorted_intersect(cand.del, other.pre_pos_atoms)) ++score;
    // another selected operator deletes one of op's effects
    if (sorted_intersect(other.del, cand.add)) ++score;
  }
  return score;
}

std::vector<OpId> rank_applicable_ids(const PlannerState& ps,
                                      std::vector<OpId> candidates) {
  const Grounder& g = ps.grounder();
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](OpId a, OpId b) {
                     int sa = threat_score_id(ps, a);
                     int sb = threat_score_id(ps, b);
                     if (sa != sb) return sa < sb;
                     return g.op_ids(a).order_key < g.op_ids(b).order_key;
                   });
  return candidates;
}

// ---------------------------------------------------------------------------
// Independence partition.

namespace {

// Atoms of the ancestor sets reachable from the operator's causes.
std::vector<AtomId> ancestor_atoms(const PlannerState& ps, OpId op) {
  std::vector<AtomId> out;
  const Grounder& g = ps.grounder();
  for (LitId cause : ps.cause_ids(op))
    for (SetId s : ps.anc_ids(cause))
      for (LitId l : g.set_of(s)) out.push_back(atom_of_lit(l));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool interacts(const Grounder& g, OpId a, OpId b,
               const std::vector<AtomId>& anc_a,
               const std::vector<AtomId>& anc_b) {
  const auto& ia = g.op_ids(a);
  const auto& ib = g.op_ids(b);
  if (sorted_intersect(ia.del, ib.pre_pos_atoms) ||
      sorted_intersect(ia.del, ib.add) ||
      sorted_intersect(ib.del, ia.pre_pos_atoms) ||
      sorted_intersect(ib.del, ia.add))
    return true;
  // conservative ancestor check
  return sorted_intersect(ia.del, anc_b) || sorted_intersect(ib.del, anc_a);
}

}  // namespace

std::vector<std::vector<OpId>> independence_partition_ids(
    const PlannerState& ps, const std::vector<OpId>& candidates) {
  const std::size_t n = candidates.size();
  const Grounder& g = ps.grounder();
  std::vector<std::vector<AtomId>> anc(n);
  for (std::size_t i = 0; i < n; ++i) anc[i] = ancestor_atoms(ps, candidates[i]);

  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (interacts(g, candidates[i], candidates[j], anc[i], anc[j]))
        parent[find(i)] = find(j);

  std::map<std::size_t, std::vector<OpId>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[find(i)].push_back(candidates[i]);
  std::vector<std::vector<OpId>> out;
  for (auto& [root, members] : classes) {
    (void)root;
    out.push_back(std::move(members));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Value-typed wrappers.

namespace {

std::vector<OpId> to_ids(Grounder& g, const std::vector<OpRef>& ops) {
  std::vector<OpId> ids;
  ids.reserve(ops.size());
  for (const auto& op : ops) ids.push_back(g.op_id(op));
  return ids;
}

std::vector<OpRef> to_refs(const Grounder& g, const std::vector<OpId>& ids) {
  std::vector<OpRef> ops;
  ops.reserve(ids.size());
  for (OpId id : ids) ops.push_back(g.op_of(id));
  return ops;
}

}  // namespace

int conspiracy_score(const DecisionView& view, const GroundOperator& op) {
  int unsatisfied = 0;
  for (const auto& p : op.pre)
    if (!satisfies(view.ps.current(), p)) ++unsatisfied;
  return unsatisfied;
}

int threat_score(const DecisionView& view, const GroundOperator& op) {
  Grounder& g = view.ps.grounder();
  for (const auto& o : view.ps.selected())
    if (o->display == op.display) return threat_score_id(view.ps, g.op_id(o));
  // not selected: score against the selected set all the same
  OpRef ref = g.resolve(op.schema, op.args);
  return threat_score_id(view.ps, g.op_id(ref));
}

std::vector<OpRef> rank_relevant(const DecisionView& view,
                                 std::vector<OpRef> candidates) {
  Grounder& g = view.ps.grounder();
  return to_refs(g, rank_relevant_ids(view.ps, to_ids(g, candidates)));
}

std::vector<OpRef> rank_applicable(const DecisionView& view,
                                   std::vector<OpRef> candidates) {
  Grounder& g = view.ps.grounder();
  return to_refs(g, rank_applicable_ids(view.ps, to_ids(g, candidates)));
}

std::vector<std::vector<OpRef>> independence_partition(
    const DecisionView& view, const std::vector<OpRef>& candidates) {
  Grounder& g = view.ps.grounder();
  auto classes = independence_partition_ids(view.ps, to_ids(g, candidates));
  std::vector<std::vector<OpRef>> out;
  for (const auto& cls : classes) out.push_back(to_refs(g, cls));
  return out;
}

}  // namespace flecs
