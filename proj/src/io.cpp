#include "flecs/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flecs/sexpr.hpp"

namespace flecs {

namespace {

bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

void expect_keyword(const Sexpr& node, const std::string& kw) {
  if (!node.is_list || node.items.empty() || !node.at(0).is_symbol() ||
      node.at(0).sym() != kw)
    throw ParseError("expected (" + kw + " ...)", node.line, node.col);
}

// Reads "(pred args...)" or, when allow_negation, "(not (pred args...))".
TemplateLiteral parse_template(const Sexpr& node, bool allow_negation) {
  if (!node.is_list || node.items.empty())
    throw ParseError("expected literal", node.line, node.col);
  if (node.at(0).is_symbol() && node.at(0).sym() == "not") {
    if (!allow_negation)
      throw ParseError("negation not allowed here", node.line, node.col);
    if (node.size() != 2)
      throw ParseError("(not ...) takes exactly one literal", node.line, node.col);
    TemplateLiteral inner = parse_template(node.at(1), false);
    inner.positive = false;
    return inner;
  }
  TemplateLiteral lit;
  lit.pred = node.at(0).sym();
  for (std::size_t i = 1; i < node.size(); ++i) lit.args.push_back(node.at(i).sym());
  return lit;
}

void note_arity(std::map<std::string, std::size_t>& arities,
                const TemplateLiteral& lit, const Sexpr& where) {
  auto [it, inserted] = arities.emplace(lit.pred, lit.args.size());
  if (!inserted && it->second != lit.args.size())
    throw ParseError("predicate '" + lit.pred + "' used with arity " +
                         std::to_string(lit.args.size()) + " but previously " +
                         std::to_string(it->second),
                     where.line, where.col);
}

OperatorSchema parse_operator(const Sexpr& node, const Domain& domain,
                              std::map<std::string, std::size_t>& arities) {
  OperatorSchema op;
  if (node.size() < 2)
    throw ParseError("operator needs a name", node.line, node.col);
  op.name = node.at(1).sym();

  std::set<std::string> declared_vars;
  for (std::size_t i = 2; i < node.size(); ++i) {
    const Sexpr& section = node.at(i);
    if (!section.is_list || section.items.empty() || !section.at(0).is_symbol())
      throw ParseError("expected operator section", section.line, section.col);
    const std::string& kw = section.at(0).sym();
    if (kw == ":params") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        const Sexpr& pv = section.at(j);
        if (!pv.is_list || pv.size() != 2)
          throw ParseError("parameter must be (var type)", pv.line, pv.col);
        Param p{pv.at(0).sym(), pv.at(1).sym()};
        if (!is_variable(p.var))
          throw ParseError("parameter '" + p.var + "' must start with '?'",
                           pv.line, pv.col);
        if (!declared_vars.insert(p.var).second)
          throw ParseError("duplicate parameter '" + p.var + "'", pv.line, pv.col);
        bool known_type = false;
        for (const auto& t : domain.types) known_type |= (t == p.type);
        if (!known_type)
          throw ParseError("parameter type '" + p.type + "' not declared",
                           pv.line, pv.col);
        op.params.push_back(std::move(p));
      }
    } else if (kw == ":pre" || kw == ":add" || kw == ":del") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        TemplateLiteral lit = parse_template(section.at(j), kw == ":pre");
        for (const auto& a : lit.args) {
          if (is_variable(a) && declared_vars.count(a) == 0)
            throw ParseError("variable '" + a + "' in " + kw +
                                 " of operator '" + op.name +
                                 "' is not declared in :params",
                             section.at(j).line, section.at(j).col);
        }
        note_arity(arities, lit, section.at(j));
        if (kw == ":pre")
          op.pre.push_back(std::move(lit));
        else if (kw == ":add")
          op.add.push_back(std::move(lit));
        else
          op.del.push_back(std::move(lit));
      }
    } else {
      throw ParseError("unknown operator section '" + kw + "'", section.line,
                       section.col);
    }
  }
  return op;
}

Atom ground_atom(const TemplateLiteral& t, const Sexpr& where) {
  for (const auto& a : t.args)
    if (is_variable(a))
      throw ParseError("atom must be ground, found '" + a + "'", where.line,
                       where.col);
  return Atom{t.pred, t.args};
}

}  // namespace

std::string TemplateLiteral::str() const {
  std::string s = "(" + pred;
  for (const auto& a : args) s += " " + a;
  s += ")";
  if (!positive) s = "(not " + s + ")";
  return s;
}

Domain parse_domain(const std::string& text) {
  Sexpr root = parse_sexpr(text);
  expect_keyword(root, "domain");
  if (root.size() < 2)
    throw ParseError("domain needs a name", root.line, root.col);

  Domain d;
  d.name = root.at(1).sym();
  std::map<std::string, std::size_t> arities;

  for (std::size_t i = 2; i < root.size(); ++i) {
    const Sexpr& section = root.at(i);
    if (!section.is_list || section.items.empty() || !section.at(0).is_symbol())
      throw ParseError("expected domain section", section.line, section.col);
    const std::string& kw = section.at(0).sym();
    if (kw == ":types") {
      for (std::size_t j = 1; j < section.size(); ++j)
        d.types.push_back(section.at(j).sym());
    } else if (kw == ":operator") {
      OperatorSchema op = parse_operator(section, d, arities);
      if (d.find_operator(op.name))
        throw ParseError("duplicate operator name '" + op.name + "'",
                         section.line, section.col);
      op.file_index = static_cast<int>(d.operators.size());
      d.operators.push_back(std::move(op));
    } else {
      throw ParseError("unknown domain section '" + kw + "'", section.line,
                       section.col);
    }
  }
  d.predicate_arity = std::move(arities);
  return d;
}

Problem parse_problem(const std::string& text, const Domain& domain) {
  Sexpr root = parse_sexpr(text);
  expect_keyword(root, "problem");
  if (root.size() < 2)
    throw ParseError("problem needs a name", root.line, root.col);

  Problem p;
  p.name = root.at(1).sym();
  std::set<std::string> known_constants;

  auto check_literal = [&](const TemplateLiteral& t, const Sexpr& where) {
    auto it = domain.predicate_arity.find(t.pred);
    if (it == domain.predicate_arity.end())
      throw ParseError("unknown predicate '" + t.pred + "'", where.line,
                       where.col);
    if (it->second != t.args.size())
      throw ParseError("predicate '" + t.pred + "' expects " +
                           std::to_string(it->second) + " argument(s), got " +
                           std::to_string(t.args.size()),
                       where.line, where.col);
    for (const auto& a : t.args)
      if (known_constants.count(a) == 0)
        throw ParseError("constant '" + a + "' is not declared in :objects",
                         where.line, where.col);
  };

  for (std::size_t i = 2; i < root.size(); ++i) {
    const Sexpr& section = root.at(i);
    if (!section.is_list || section.items.empty() || !section.at(0).is_symbol())
      throw ParseError("expected problem section", section.line, section.col);
    const std::string& kw = section.at(0).sym();
    if (kw == ":domain") {
      if (section.size() != 2)
        throw ParseError("(:domain NAME)", section.line, section.col);
      p.domain_name = section.at(1).sym();
      if (p.domain_name != domain.name)
        throw ParseError("problem references domain '" + p.domain_name +
                             "' but '" + domain.name + "' was loaded",
                         section.line, section.col);
    } else if (kw == ":objects") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        const Sexpr& ov = section.at(j);
        if (!ov.is_list || ov.size() != 2)
          throw ParseError("object must be (name type)", ov.line, ov.col);
        TypedConstant c{ov.at(0).sym(), ov.at(1).sym()};
        bool known_type = false;
        for (const auto& t : domain.types) known_type |= (t == c.type);
        if (!known_type)
          throw ParseError("constant '" + c.name + "' has undeclared type '" +
                               c.type + "'",
                           ov.line, ov.col);
        if (!known_constants.insert(c.name).second)
          throw ParseError("duplicate constant '" + c.name + "'", ov.line, ov.col);
        p.objects.push_back(std::move(c));
      }
    } else if (kw == ":init") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        TemplateLiteral t = parse_template(section.at(j), false);
        check_literal(t, section.at(j));
        p.init.push_back(ground_atom(t, section.at(j)));
      }
    } else if (kw == ":goal") {
      for (std::size_t j = 1; j < section.size(); ++j) {
        TemplateLiteral t = parse_template(section.at(j), true);
        check_literal(t, section.at(j));
        for (const auto& a : t.args)
          if (is_variable(a))
            throw ParseError("goal literal must be ground", section.at(j).line,
                             section.at(j).col);
        p.goal.push_back(Literal{Atom{t.pred, t.args}, t.positive});
      }
    } else {
      throw ParseError("unknown problem section '" + kw + "'", section.line,
                       section.col);
    }
  }
  return p;
}

std::string serialize_domain(const Domain& d) {
  std::ostringstream os;
  os << "(domain " << d.name << "\n";
  os << "  (:types";
  for (const auto& t : d.types) os << " " << t;
  os << ")\n";
  for (const auto& op : d.operators) {
    os << "  (:operator " << op.name << "\n";
    os << "    (:params";
    for (const auto& p : op.params) os << " (" << p.var << " " << p.type << ")";
    os << ")\n";
    auto emit = [&os](const char* kw, const std::vector<TemplateLiteral>& ls) {
      os << "    (" << kw;
      for (const auto& l : ls) os << " " << l.str();
      os << ")\n";
    };
    emit(":pre", op.pre);
    emit(":add", op.add);
    emit(":del", op.del);
    os << "  )\n";
  }
  os << ")\n";
  return os.str();
}

std::string serialize_problem(const Problem& p) {
  std::ostringstream os;
  os << "(problem " << p.name << "\n";
  os << "  (:domain " << p.domain_name << ")\n";
  os << "  (:objects";
  for (const auto& o : p.objects) os << " (" << o.name << " " << o.type << ")";
  os << ")\n";
  os << "  (:init";
  for (const auto& a : p.init) os << " " << a.str();
  os << ")\n";
  os << "  (:goal";
  for (const auto& g : p.goal) os << " " << g.str();
  os << ")\n";
  os << ")\n";
  return os.str();
}

std::vector<PlanStep> parse_plan(const std::string& text) {
  std::vector<PlanStep> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comment and whitespace
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    PlanStep step;
    auto lp = line.find('(');
    if (lp == std::string::npos) {
      step.name = line;
    } else {
      if (line.back() != ')')
        throw ParseError("plan step missing ')'", lineno, 1);
      step.name = line.substr(0, lp);
      std::string inner = line.substr(lp + 1, line.size() - lp - 2);
      std::string cur;
      for (char c : inner) {
        if (c == ',') {
          if (cur.empty()) throw ParseError("empty plan argument", lineno, 1);
          step.args.push_back(cur);
          cur.clear();
        } else if (c != ' ' && c != '\t') {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) step.args.push_back(cur);
    }
    if (step.name.empty()) throw ParseError("plan step missing name", lineno, 1);
    out.push_back(std::move(step));
  }
  return out;
}

std::string format_plan_step(const std::string& name,
                             const std::vector<std::string>& args) {
  std::string s = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i];
  }
  s += ")";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << content;
}

}  // namespace flecs
