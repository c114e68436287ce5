#pragma once

// Arithmetic expressions over named chart coordinates, compiled to scalar
// fields so that derivatives stay exact.
//
// Grammar: numbers, coordinate names, the constants pi and e, binary + - * /
// and ^ (right associative), unary minus, parentheses, the functions exp, log
// (alias ln), sqrt, sin, cos, tan, sinh, cosh, tanh, atan and pow(a, b).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qklab/forms.hpp"

namespace qklab {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Compiles `text` into a field on the chart whose coordinates are `coords`.
ScalarField parse_expression(const std::string& text, const std::vector<std::string>& coords);

}  // namespace qklab
