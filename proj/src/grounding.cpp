#include "flecs/grounding.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "flecs/io.hpp"

namespace flecs {

namespace {
bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }
}  // namespace

bool GroundOperator::adds(const Atom& a) const {
  return std::find(add.begin(), add.end(), a) != add.end();
}

bool GroundOperator::deletes(const Atom& a) const {
  return std::find(del.begin(), del.end(), a) != del.end();
}

bool GroundOperator::achieves(const Literal& goal) const {
  return goal.positive ? adds(goal.atom) : deletes(goal.atom);
}

GroundOperator instantiate(const OperatorSchema& schema,
                           const std::vector<std::string>& args) {
  if (args.size() != schema.params.size())
    throw std::runtime_error("operator '" + schema.name + "' expects " +
                             std::to_string(schema.params.size()) +
                             " argument(s), got " + std::to_string(args.size()));
  auto subst = [&](const std::string& term) -> const std::string& {
    if (is_variable(term)) {
      for (std::size_t i = 0; i < schema.params.size(); ++i)
        if (schema.params[i].var == term) return args[i];
      throw std::runtime_error("unbound variable " + term + " in " + schema.name);
    }
    return term;
  };

  GroundOperator op;
  op.schema = schema.name;
  op.args = args;
  op.schema_index = schema.file_index;
  for (const auto& t : schema.pre) {
    Atom a{t.pred, {}};
    for (const auto& arg : t.args) a.args.push_back(subst(arg));
    op.pre.push_back(Literal{std::move(a), t.positive});
  }
  auto ground_all = [&](const std::vector<TemplateLiteral>& ts,
                        std::vector<Atom>& out) {
    for (const auto& t : ts) {
      Atom a{t.pred, {}};
      for (const auto& arg : t.args) a.args.push_back(subst(arg));
      // duplicate effect entries collapse
      if (std::find(out.begin(), out.end(), a) == out.end())
        out.push_back(std::move(a));
    }
  };
  ground_all(schema.add, op.add);
  ground_all(schema.del, op.del);
  op.display = format_plan_step(op.schema, op.args);
  return op;
}

State apply_effects(const State& s, const GroundOperator& op) {
  State out = s;
  for (const auto& a : op.add) out.add(a);
  for (const auto& a : op.del) out.remove(a);
  return out;
}

Grounder::Grounder(const Domain& domain, const Problem& problem)
    : domain_(&domain), problem_(&problem) {
  for (const auto& obj : problem.objects) {
    objects_by_type_[obj.type].push_back(obj.name);
    type_of_[obj.name] = obj.type;
  }
  for (auto& [type, names] : objects_by_type_) std::sort(names.begin(), names.end());
  sets_.emplace_back();  // SetId 0 is the empty ancestor set
  set_ids_.emplace(std::vector<LitId>{}, 0);
}

const std::vector<std::string>& Grounder::objects_of_type(
    const std::string& type) const {
  auto it = objects_by_type_.find(type);
  return it == objects_by_type_.end() ? no_objects_ : it->second;
}

OpRef Grounder::get(const OperatorSchema& schema,
                    const std::vector<std::string>& args) {
  auto key = std::make_pair(schema.name, args);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto op = std::make_shared<const GroundOperator>(instantiate(schema, args));
  cache_.emplace(std::move(key), op);
  return op;
}

OpRef Grounder::resolve(const std::string& name,
                        const std::vector<std::string>& args) {
  const OperatorSchema* schema = domain_->find_operator(name);
  if (!schema) throw std::runtime_error("unknown operator '" + name + "'");
  for (std::size_t i = 0; i < args.size() && i < schema->params.size(); ++i) {
    auto it = type_of_.find(args[i]);
    if (it == type_of_.end())
      throw std::runtime_error("unknown constant '" + args[i] + "'");
    if (it->second != schema->params[i].type)
      throw std::runtime_error("constant '" + args[i] + "' has type '" +
                               it->second + "', operator '" + name +
                               "' expects '" + schema->params[i].type + "'");
  }
  return get(*schema, args);
}

std::vector<OpRef> Grounder::relevant_operators(const Literal& goal) {
  std::vector<OpRef> out;
  for (const auto& schema : domain_->operators) {
    const auto& effects = goal.positive ? schema.add : schema.del;
    // all bindings from this schema, collected then sorted lexicographically
    std::set<std::vector<std::string>> bindings;
    for (const auto& tmpl : effects) {
      if (tmpl.pred != goal.atom.pred || tmpl.args.size() != goal.atom.args.size())
        continue;
      // unify the goal against the effect template
      std::map<std::string, std::string> bound;
      bool ok = true;
      for (std::size_t i = 0; i < tmpl.args.size() && ok; ++i) {
        const std::string& term = tmpl.args[i];
        const std::string& value = goal.atom.args[i];
        if (is_variable(term)) {
          auto [it, inserted] = bound.emplace(term, value);
          ok = inserted ? true : it->second == value;
        } else {
          ok = term == value;
        }
      }
      if (!ok) continue;
      // bound values must respect the parameter's declared type
      for (std::size_t i = 0; i < schema.params.size() && ok; ++i) {
        auto it = bound.find(schema.params[i].var);
        if (it == bound.end()) continue;
        auto ty = type_of_.find(it->second);
        ok = ty != type_of_.end() && ty->second == schema.params[i].type;
      }
      if (!ok) continue;

      // enumerate the remaining free parameters over type-compatible objects
      std::vector<std::string> args(schema.params.size());
      std::vector<std::size_t> free_idx;
      for (std::size_t i = 0; i < schema.params.size(); ++i) {
        auto it = bound.find(schema.params[i].var);
        if (it != bound.end())
          args[i] = it->second;
        else
          free_idx.push_back(i);
      }
      std::vector<std::size_t> counter(free_idx.size(), 0);
      for (;;) {
        bool viable = true;
        for (std::size_t f = 0; f < free_idx.size(); ++f) {
          const auto& pool =
              objects_of_type(schema.params[free_idx[f]].type);
          if (pool.empty()) {
            viable = false;
            break;
          }
          args[free_idx[f]] = pool[counter[f]];
        }
        if (!viable) break;
        bindings.insert(args);
        // advance the mixed-radix counter
        std::size_t f = free_idx.size();
        for (; f > 0; --f) {
          const auto& pool = objects_of_type(schema.params[free_idx[f - 1]].type);
          if (++counter[f - 1] < pool.size()) break;
          counter[f - 1] = 0;
        }
        if (f == 0) break;
      }
    }
    for (const auto& b : bindings) out.push_back(get(schema, b));
  }
  return out;
}

}  // namespace flecs

namespace flecs {

AtomId Grounder::atom_id(const Atom& a) {
  auto it = atom_ids_.find(a);
  if (it != atom_ids_.end()) return it->second;
  AtomId id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(a);
  atom_ids_.emplace(a, id);
  return id;
}

OpId Grounder::op_id(const OpRef& op) {
  auto it = op_ids_.find(op.get());
  if (it != op_ids_.end()) return it->second;
  OpId id = static_cast<OpId>(ops_.size());
  OpIds ids;
  ids.op = op;
  for (const auto& p : op->pre) {
    ids.pre.push_back(lit_id(p));
    if (p.positive) ids.pre_pos_atoms.push_back(atom_id(p.atom));
  }
  for (const auto& a : op->add) ids.add.push_back(atom_id(a));
  for (const auto& a : op->del) ids.del.push_back(atom_id(a));
  std::sort(ids.pre_pos_atoms.begin(), ids.pre_pos_atoms.end());
  std::sort(ids.add.begin(), ids.add.end());
  std::sort(ids.del.begin(), ids.del.end());
  // fixed-width schema index then NUL-joined args: lexicographic compare of
  // the key is exactly the (file order, binding order) tie-break
  char prefix[9];
  std::snprintf(prefix, sizeof prefix, "%08x",
                static_cast<unsigned>(op->schema_index));
  ids.order_key = prefix;
  for (const auto& a : op->args) {
    ids.order_key.push_back('\0');
    ids.order_key += a;
  }
  ops_.push_back(std::move(ids));
  op_ids_.emplace(op.get(), id);
  return id;
}

const std::vector<OpId>& Grounder::relevant_ops(LitId goal) {
  auto it = relevant_cache_.find(goal);
  if (it != relevant_cache_.end()) return it->second;
  std::vector<OpId> ids;
  for (const auto& op : relevant_operators(lit_of(goal))) ids.push_back(op_id(op));
  return relevant_cache_.emplace(goal, std::move(ids)).first->second;
}

SetId Grounder::set_id(const std::vector<LitId>& lits) {
  auto it = set_ids_.find(lits);
  if (it != set_ids_.end()) return it->second;
  SetId id = static_cast<SetId>(sets_.size());
  sets_.push_back(lits);
  set_ids_.emplace(lits, id);
  return id;
}

}  // namespace flecs
