#include "flecs/sexpr.hpp"

namespace flecs {

const Sexpr& Sexpr::at(std::size_t i) const {
  if (!is_list || i >= items.size())
    throw ParseError("expected list element " + std::to_string(i), line, col);
  return items[i];
}

const std::string& Sexpr::sym() const {
  if (is_list) throw ParseError("expected symbol, found list", line, col);
  return symbol;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }

  Sexpr read() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    char c = text_[pos_];
    if (c == '(') return read_list();
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    return read_symbol();
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Sexpr read_list() {
    Sexpr node;
    node.is_list = true;
    node.line = line_;
    node.col = col_;
    advance();  // '('
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size())
        throw ParseError("unterminated list", node.line, node.col);
      if (text_[pos_] == ')') {
        advance();
        return node;
      }
      node.items.push_back(read());
    }
  }

  Sexpr read_symbol() {
    Sexpr node;
    node.line = line_;
    node.col = col_;
    std::string s;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' ||
          c == '\r' || c == '\n')
        break;
      s.push_back(c);
      advance();
    }
    node.symbol = std::move(s);
    return node;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Sexpr parse_sexpr(const std::string& text) {
  Reader r(text);
  Sexpr node = r.read();
  if (!r.eof()) {
    Sexpr extra = r.read();
    throw ParseError("trailing content after expression", extra.line, extra.col);
  }
  return node;
}

std::vector<Sexpr> parse_sexprs(const std::string& text) {
  Reader r(text);
  std::vector<Sexpr> out;
  while (!r.eof()) out.push_back(r.read());
  return out;
}

}  // namespace flecs
