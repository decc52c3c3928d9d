#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "flecs/domain.hpp"
#include "flecs/problem.hpp"
#include "flecs/state.hpp"

namespace flecs {

// Fully-instantiated operator. Identity is (schema, args); a Grounder
// canonicalizes instances so the same ground operator is shared.
struct GroundOperator {
  std::string schema;              // schema name
  std::vector<std::string> args;   // constants in parameter order
  int schema_index = 0;
  std::vector<Literal> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;
  std::string display;             // "name(c1,c2)"

  bool adds(const Atom& a) const;
  bool deletes(const Atom& a) const;
  // Achieves a goal literal: positive goal in add, negative goal in del.
  bool achieves(const Literal& goal) const;
};

using OpRef = std::shared_ptr<const GroundOperator>;

// Deterministic operator order: schema file order, then lexicographic binding.
struct OpOrder {
  bool operator()(const OpRef& a, const OpRef& b) const {
    if (a->schema_index != b->schema_index)
      return a->schema_index < b->schema_index;
    return a->args < b->args;
  }
};

// Instantiates a schema with bindings in parameter order. Pure representation
// work; shared by the planner and by the independent oracle.
GroundOperator instantiate(const OperatorSchema& schema,
                           const std::vector<std::string>& args);

// Effect application, Table-2 step 7a: (state ∪ add) − del, delete wins.
State apply_effects(const State& s, const GroundOperator& op);

// Interned identifiers used on the search hot path. A literal id packs the
// atom id with its polarity.
using AtomId = std::int32_t;
using LitId = std::int32_t;
using OpId = std::int32_t;
using SetId = std::int32_t;  // interned ancestor set; 0 is the empty set

inline AtomId atom_of_lit(LitId l) { return l >> 1; }
inline bool lit_positive(LitId l) { return (l & 1) != 0; }
inline LitId make_lit(AtomId a, bool positive) {
  return (a << 1) | (positive ? 1 : 0);
}
inline LitId negate_lit(LitId l) { return l ^ 1; }

class Grounder {
 public:
  Grounder(const Domain& domain, const Problem& problem);

  const Domain& domain() const { return *domain_; }
  const Problem& problem() const { return *problem_; }

  // Canonical shared instance for (schema, args).
  OpRef get(const OperatorSchema& schema, const std::vector<std::string>& args);

  // Resolves a plan step by operator name; throws std::runtime_error on
  // unknown name or arity mismatch.
  OpRef resolve(const std::string& name, const std::vector<std::string>& args);

  // All ground operators achieving the goal: goal ∈ add for positive goals,
  // goal ∈ del for negative ones. Bindings come from unifying the goal with
  // the matching effect template; remaining parameters are enumerated over
  // all type-compatible objects. Deterministic output order: schema file
  // order, then lexicographic bindings.
  std::vector<OpRef> relevant_operators(const Literal& goal);

  const std::vector<std::string>& objects_of_type(const std::string& type) const;

  // ---- interning --------------------------------------------------------

  AtomId atom_id(const Atom& a);
  const Atom& atom_of(AtomId id) const { return atoms_[id]; }
  std::size_t atom_count() const { return atoms_.size(); }

  LitId lit_id(const Literal& l) { return make_lit(atom_id(l.atom), l.positive); }
  Literal lit_of(LitId id) const {
    return Literal{atoms_[atom_of_lit(id)], lit_positive(id)};
  }

  // Per-operator id views: precondition literal ids, sorted effect atom ids,
  // sorted positive-precondition atom ids, and a single-string order key
  // realizing the (schema file order, lexicographic bindings) tie-break.
  struct OpIds {
    OpRef op;
    std::vector<LitId> pre;
    std::vector<AtomId> pre_pos_atoms;  // sorted
    std::vector<AtomId> add;            // sorted
    std::vector<AtomId> del;            // sorted
    std::string order_key;
  };
  OpId op_id(const OpRef& op);
  const OpIds& op_ids(OpId id) const { return ops_[id]; }
  const OpRef& op_of(OpId id) const { return ops_[id].op; }
  std::size_t op_count() const { return ops_.size(); }

  // relevant_operators by id, cached per goal literal.
  const std::vector<OpId>& relevant_ops(LitId goal);

  // ---- ancestor-set interning -------------------------------------------

  // lits must be sorted and duplicate-free.
  SetId set_id(const std::vector<LitId>& lits);
  const std::vector<LitId>& set_of(SetId id) const { return sets_[id]; }

 private:
  const Domain* domain_;
  const Problem* problem_;
  std::map<std::pair<std::string, std::vector<std::string>>, OpRef> cache_;
  std::map<std::string, std::vector<std::string>> objects_by_type_;  // sorted
  std::map<std::string, std::string> type_of_;
  std::vector<std::string> no_objects_;

  std::unordered_map<Atom, AtomId, AtomHash> atom_ids_;
  std::vector<Atom> atoms_;
  std::unordered_map<const GroundOperator*, OpId> op_ids_;
  std::vector<OpIds> ops_;
  std::unordered_map<LitId, std::vector<OpId>> relevant_cache_;
  std::map<std::vector<LitId>, SetId> set_ids_;
  std::vector<std::vector<LitId>> sets_;
};

}  // namespace flecs
