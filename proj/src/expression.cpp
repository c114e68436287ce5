#include "qklab/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

namespace qklab {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::invalid_argument(message + " at offset " + std::to_string(position)), position_(position) {}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& coords)
      : s_(text), coords_(coords), dim_(static_cast<int>(coords.size())) {}

  ScalarField parse() {
    if (dim_ < 1) throw ArgumentError("parse_expression: chart has no coordinates");
    ScalarField f = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return f;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  ScalarField constant(double v) const { return ScalarField::constant(dim_, v); }

  ScalarField expr() {
    ScalarField f = term();
    for (;;) {
      if (eat('+')) f = f + term();
      else if (eat('-')) f = f - term();
      else return f;
    }
  }

  ScalarField term() {
    ScalarField f = unary();
    for (;;) {
      if (eat('*')) f = f * unary();
      else if (eat('/')) f = f / unary();
      else return f;
    }
  }

  ScalarField unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  ScalarField power() {
    ScalarField base = primary();
    if (eat('^')) return raise(base, unary());
    return base;
  }

  ScalarField raise(const ScalarField& a, const ScalarField& b) { return pow(a, b); }

  ScalarField primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarField f = expr();
      expect(')');
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  ScalarField number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  ScalarField name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') return call(id, start);
    for (int i = 0; i < dim_; ++i)
      if (coords_[i] == id) return lift_coordinate(i, dim_);
    if (id == "pi") return constant(std::numbers::pi);
    if (id == "e") return constant(std::numbers::e);
    throw ParseError("unknown name '" + id + "'", start);
  }

  ScalarField call(const std::string& id, std::size_t at) {
    using Fn = Jet2 (*)(const Jet2&);
    static const std::map<std::string, Fn> unary_fns = {
        {"exp", qklab::exp},   {"log", qklab::log},   {"ln", qklab::log},     {"sqrt", qklab::sqrt},
        {"sin", qklab::sin},   {"cos", qklab::cos},   {"tan", qklab::tan},    {"sinh", qklab::sinh},
        {"cosh", qklab::cosh}, {"tanh", qklab::tanh}, {"atan", qklab::atan},
    };
    expect('(');
    if (id == "pow") {
      ScalarField a = expr();
      expect(',');
      ScalarField b = expr();
      expect(')');
      return raise(a, b);
    }
    const auto it = unary_fns.find(id);
    if (it == unary_fns.end()) throw ParseError("unknown function '" + id + "'", at);
    ScalarField a = expr();
    expect(')');
    return map(a, it->second);
  }

  const std::string& s_;
  const std::vector<std::string>& coords_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarField parse_expression(const std::string& text, const std::vector<std::string>& coords) {
  return Parser(text, coords).parse();
}

}  // namespace qklab
