#include "calibra/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>

#include "calibra/errors.hpp"

namespace calibra {

namespace {

class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

using Fn = std::function<double(double, double)>;

// Recursive-descent parser:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | primary
//   primary:= number | 'u' | 'v' | func '(' expr ')' | '(' expr ')'
class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  Fn parse() {
    Fn e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected input at position " + std::to_string(pos_));
    return e;
  }

private:
  const std::string& text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Fn expr() {
    Fn left = term();
    for (;;) {
      if (consume('+')) {
        Fn right = term();
        left = [left, right](double u, double v) { return left(u, v) + right(u, v); };
      } else if (consume('-')) {
        Fn right = term();
        left = [left, right](double u, double v) { return left(u, v) - right(u, v); };
      } else {
        return left;
      }
    }
  }

  Fn term() {
    Fn left = factor();
    for (;;) {
      if (consume('*')) {
        Fn right = factor();
        left = [left, right](double u, double v) { return left(u, v) * right(u, v); };
      } else if (consume('/')) {
        Fn right = factor();
        left = [left, right](double u, double v) { return left(u, v) / right(u, v); };
      } else {
        return left;
      }
    }
  }

  Fn factor() {
    Fn base = unary();
    if (consume('^')) {
      Fn exp = factor();  // right associative
      return [base, exp](double u, double v) { return std::pow(base(u, v), exp(u, v)); };
    }
    return base;
  }

  Fn unary() {
    if (consume('-')) {
      Fn inner = unary();
      return [inner](double u, double v) { return -inner(u, v); };
    }
    return primary();
  }

  Fn primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double value = std::stod(text_.substr(pos_), &used);
      pos_ += used;
      return [value](double, double) { return value; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      if (name == "u") return [](double u, double) { return u; };
      if (name == "v") return [](double, double v) { return v; };
      double (*fn)(double) = nullptr;
      if (name == "sin") fn = std::sin;
      else if (name == "cos") fn = std::cos;
      else if (name == "cosh") fn = std::cosh;
      else if (name == "sinh") fn = std::sinh;
      else if (name == "exp") fn = std::exp;
      else if (name == "sqrt") fn = std::sqrt;
      if (!fn) throw ParseError("unknown identifier '" + name + "'");
      if (!consume('(')) throw ParseError("expected '(' after " + name);
      Fn inner = expr();
      if (!consume(')')) throw ParseError("expected ')' in call to " + name);
      return [fn, inner](double u, double v) { return fn(inner(u, v)); };
    }
    if (consume('(')) {
      Fn inner = expr();
      if (!consume(')')) throw ParseError("expected ')'");
      return inner;
    }
    throw ParseError(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

std::function<double(double, double)> parse_expression(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace calibra
