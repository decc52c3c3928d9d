#pragma once

#include <string>
#include <vector>

#include "flecs/literal.hpp"
#include "flecs/state.hpp"

namespace flecs {

struct TypedConstant {
  std::string name;
  std::string type;

  bool operator==(const TypedConstant&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedConstant> objects;
  std::vector<Atom> init;      // ground positive atoms, file order
  std::vector<Literal> goal;   // ground literals, goal-statement order

  State initial_state() const {
    State s;
    for (const auto& a : init) s.add(a);
    return s;
  }

  bool operator==(const Problem& o) const {
    return name == o.name && domain_name == o.domain_name &&
           objects == o.objects && init == o.init && goal == o.goal;
  }
};

}  // namespace flecs
