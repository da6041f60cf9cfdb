#pragma once

#include <memory>
#include <string>

#include "ahe/common.hpp"

namespace ahe {

// Minimal arithmetic expression over grid coordinates: identifiers x1..xn,
// numbers, + - * /, sin, cos, exp, parentheses; unary minus and the constant
// `pi` are accepted as conveniences.
class Expr {
 public:
  struct Node;

  static Expr parse(const std::string& text, int dim);
  double eval(const VectorXd& x) const;
  const std::string& text() const { return text_; }

  Expr() = default;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace ahe
