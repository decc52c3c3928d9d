#pragma once

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "flecs/literal.hpp"

namespace flecs {

// World state: a set of ground positive atoms with expected constant-time
// membership. Closed-world: a negative literal holds iff its atom is absent.
class State {
 public:
  State() = default;
  explicit State(std::vector<Atom> atoms) {
    for (auto& a : atoms) atoms_.insert(std::move(a));
  }

  bool contains(const Atom& a) const { return atoms_.count(a) != 0; }
  void add(Atom a) { atoms_.insert(std::move(a)); }
  void remove(const Atom& a) { atoms_.erase(a); }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  // Deterministic listing for traces and error messages.
  std::vector<Atom> sorted() const {
    std::vector<Atom> out(atoms_.begin(), atoms_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const State& other) const { return atoms_ == other.atoms_; }

 private:
  std::unordered_set<Atom, AtomHash> atoms_;
};

inline bool satisfies(const State& s, const Literal& l) {
  return l.positive == s.contains(l.atom);
}

}  // namespace flecs
