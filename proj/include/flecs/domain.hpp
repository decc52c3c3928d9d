#pragma once

#include <map>
#include <string>
#include <vector>

#include "flecs/literal.hpp"

namespace flecs {

struct Param {
  std::string var;   // "?x"
  std::string type;

  bool operator==(const Param&) const = default;
};

// Literal template inside an operator schema: args are parameter variables
// ("?x") or constants. Effects (add/del) are positive by construction.
struct TemplateLiteral {
  std::string pred;
  std::vector<std::string> args;
  bool positive = true;

  bool operator==(const TemplateLiteral&) const = default;
  std::string str() const;
};

struct OperatorSchema {
  std::string name;
  std::vector<Param> params;
  std::vector<TemplateLiteral> pre;
  std::vector<TemplateLiteral> add;  // positive templates
  std::vector<TemplateLiteral> del;  // positive templates
  int file_index = 0;                // order of appearance; deterministic tie-break

  bool operator==(const OperatorSchema& o) const {
    return name == o.name && params == o.params && pre == o.pre &&
           add == o.add && del == o.del;
  }
};

struct Domain {
  std::string name;
  std::vector<std::string> types;
  std::vector<OperatorSchema> operators;
  // Inferred predicate arities; problems are checked against this table.
  std::map<std::string, std::size_t> predicate_arity;

  const OperatorSchema* find_operator(const std::string& op_name) const {
    for (const auto& s : operators)
      if (s.name == op_name) return &s;
    return nullptr;
  }

  bool operator==(const Domain& o) const {
    return name == o.name && types == o.types && operators == o.operators;
  }
};

}  // namespace flecs
