#include "parec/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>

namespace parec {

namespace {

using Fn = std::function<double(double)>;

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at position " + std::to_string(pos) +
                                " in \"" + text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(unsigned(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Fn parse_expr() {
    Fn lhs = parse_term();
    while (true) {
      if (eat('+')) {
        Fn rhs = parse_term();
        lhs = [lhs, rhs](double s) { return lhs(s) + rhs(s); };
      } else if (eat('-')) {
        Fn rhs = parse_term();
        lhs = [lhs, rhs](double s) { return lhs(s) - rhs(s); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_term() {
    Fn lhs = parse_factor();
    while (true) {
      if (eat('*')) {
        Fn rhs = parse_factor();
        lhs = [lhs, rhs](double s) { return lhs(s) * rhs(s); };
      } else if (eat('/')) {
        Fn rhs = parse_factor();
        lhs = [lhs, rhs](double s) { return lhs(s) / rhs(s); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_factor() {
    Fn base = parse_unary();
    if (eat('^')) {
      Fn exponent = parse_factor();  // right associative
      return [base, exponent](double s) { return std::pow(base(s), exponent(s)); };
    }
    return base;
  }

  Fn parse_unary() {
    if (eat('-')) {
      Fn inner = parse_unary();
      return [inner](double s) { return -inner(s); };
    }
    return parse_primary();
  }

  Fn parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      Fn inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(unsigned(c)) || c == '.') {
      char* end = nullptr;
      const double value = std::strtod(text.c_str() + pos, &end);
      if (end == text.c_str() + pos) fail("bad number");
      pos = size_t(end - text.c_str());
      return [value](double) { return value; };
    }
    if (std::isalpha(unsigned(c))) {
      size_t start = pos;
      while (pos < text.size() && std::isalnum(unsigned(text[pos]))) ++pos;
      const std::string name = text.substr(start, pos - start);
      if (name == "s") return [](double s) { return s; };
      static const std::pair<const char*, double (*)(double)> table[] = {
          {"abs", std::fabs}, {"sqrt", std::sqrt}, {"sin", std::sin},  {"cos", std::cos},
          {"tan", std::tan},  {"exp", std::exp},   {"log", std::log},  {"tanh", std::tanh}};
      for (const auto& [fname, fptr] : table) {
        if (name == fname) {
          if (!eat('(')) fail("expected '(' after " + name);
          Fn arg = parse_expr();
          if (!eat(')')) fail("missing ')'");
          auto f = fptr;
          return [f, arg](double s) { return f(arg(s)); };
        }
      }
      pos = start;
      fail("unknown identifier \"" + name + "\"");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

std::function<double(double)> compile_expression(const std::string& text) {
  Parser parser(text);
  Fn fn = parser.parse_expr();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  return fn;
}

}  // namespace parec
