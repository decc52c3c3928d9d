#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "flecs/domain.hpp"
#include "flecs/problem.hpp"
#include "flecs/sexpr.hpp"

namespace flecs {

// Domain file grammar (UTF-8 s-expressions):
//   (domain NAME
//     (:types T1 T2 ...)
//     (:operator NAME (:params (v T) ...) (:pre LIT ...) (:add ATOM ...) (:del ATOM ...))
//     ...)
//   LIT  ::= (pred args...) | (not (pred args...))
//   ATOM ::= (pred args...)       variables are ?name
Domain parse_domain(const std::string& text);

// Problem file grammar:
//   (problem NAME (:domain NAME) (:objects (c T) ...) (:init ATOM ...) (:goal LIT ...))
Problem parse_problem(const std::string& text, const Domain& domain);

std::string serialize_domain(const Domain& d);
std::string serialize_problem(const Problem& p);

// Plan file: one ground operator per line, "name(c1,c2,...)". Blank lines and
// '#' comments are ignored; a bare "name" is accepted for zero-arg operators.
struct PlanStep {
  std::string name;
  std::vector<std::string> args;
  bool operator==(const PlanStep&) const = default;
};
std::vector<PlanStep> parse_plan(const std::string& text);
std::string format_plan_step(const std::string& name,
                             const std::vector<std::string>& args);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace flecs
