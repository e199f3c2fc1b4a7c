// Minimal arithmetic expression grammar for user-supplied surfaces and frame
// coefficients: + - * / ^ (right-associative), unary minus, sin, cos, sinh,
// cosh, exp, ln, sqrt, the constant pi, numeric literals, and the variables
// x, y, z, w mapped to chart coordinates 0..3.

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "foliation/field.hpp"

namespace foliation {

struct ExprError : std::runtime_error {
  std::size_t position;
  ExprError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at position " + std::to_string(pos)), position(pos) {}
};

namespace detail {
struct ExprNode;
}

class Expr {
 public:
  // Throws ExprError on any lexical or syntactic problem, including unknown
  // identifiers.
  static Expr parse(const std::string& text);

  // Highest coordinate index used plus one (0 for constant expressions).
  int min_dim() const;

  Jet2d eval(const JetVec<double>& seeds, int dim) const;
  Jet2x eval(const JetVec<Dual>& seeds, int dim) const;

  ScalarField field() const;
  const std::string& text() const { return text_; }

 private:
  Expr(std::shared_ptr<const detail::ExprNode> root, std::string text);
  std::shared_ptr<const detail::ExprNode> root_;
  std::string text_;
};

ScalarField parse_scalar_field(const std::string& text);

}  // namespace foliation
