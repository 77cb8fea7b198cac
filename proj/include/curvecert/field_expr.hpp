#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "curvecert/errors.hpp"

namespace curvecert {

// Parsed vector-field component expression over the grammar:
//   literals, variables t and x0..x{d-1}, operators + - * / and unary -,
//   functions sin cos exp pow, parentheses.
// Precedence: unary minus > * / > + -, left-associative.
class FieldExpr {
 public:
  struct Node;

  double eval(double t, std::span<const double> x) const;
  std::string to_string() const;
  int dim() const { return dim_; }

 private:
  friend FieldExpr parse_field_expr(std::string_view source, int dim);
  std::shared_ptr<const Node> root_;
  int dim_ = 0;
};

// Recursive-descent parse. Throws ParseError (with position) on syntax
// errors and UnknownVariable on names outside the grammar or variable
// indices >= dim.
FieldExpr parse_field_expr(std::string_view source, int dim);

}  // namespace curvecert
