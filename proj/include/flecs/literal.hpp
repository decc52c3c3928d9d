#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace flecs {

// Ground atom: a predicate applied to constants.
struct Atom {
  std::string pred;
  std::vector<std::string> args;

  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;

  // "(pred a b)" / "(pred)"
  std::string str() const;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept;
};

// Ground literal: an atom with a polarity. Negative literals appear in
// preconditions and goal statements only; states hold positive atoms.
struct Literal {
  Atom atom;
  bool positive = true;

  bool operator==(const Literal&) const = default;
  auto operator<=>(const Literal&) const = default;

  Literal negated() const { return Literal{atom, !positive}; }

  // "(pred a b)" or "(not (pred a b))"
  std::string str() const;
};

struct LiteralHash {
  std::size_t operator()(const Literal& l) const noexcept;
};

inline Literal pos(Atom a) { return Literal{std::move(a), true}; }
inline Literal neg(Atom a) { return Literal{std::move(a), false}; }

}  // namespace flecs
