#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flecs {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) +
                           ", column " + std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

// S-expression node: either a symbol or a list. ';' starts a line comment.
struct Sexpr {
  bool is_list = false;
  std::string symbol;           // valid when !is_list
  std::vector<Sexpr> items;     // valid when is_list
  int line = 0;
  int col = 0;

  bool is_symbol() const { return !is_list; }
  const Sexpr& at(std::size_t i) const;
  std::size_t size() const { return items.size(); }
  // Throws ParseError unless this is a symbol.
  const std::string& sym() const;
};

// Parses one s-expression from text; trailing content is an error.
Sexpr parse_sexpr(const std::string& text);

// Parses a whole file as a sequence of s-expressions.
std::vector<Sexpr> parse_sexprs(const std::string& text);

}  // namespace flecs
