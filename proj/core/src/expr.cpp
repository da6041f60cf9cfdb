#include "ahe/expr.hpp"

#include <cctype>
#include <cmath>

namespace ahe {

struct Expr::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp } kind;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  NodePtr run() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("ParseError", "trailing input at column " + std::to_string(pos_ + 1));
    return e;
  }

 private:
  NodePtr expression() {
    NodePtr left = term();
    for (;;) {
      skip_ws();
      if (match('+')) {
        left = binary(Expr::Node::Kind::Add, left, term());
      } else if (match('-')) {
        left = binary(Expr::Node::Kind::Sub, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      skip_ws();
      if (match('*')) {
        left = binary(Expr::Node::Kind::Mul, left, unary());
      } else if (match('/')) {
        left = binary(Expr::Node::Kind::Div, left, unary());
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    if (match('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::Neg;
      n->a = unary();
      return n;
    }
    if (match('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("ParseError", "unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      skip_ws();
      if (!match(')')) fail("ParseError", "missing ')' at column " + std::to_string(pos_ + 1));
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("ParseError", std::string("unexpected character '") + c + "' at column " + std::to_string(pos_ + 1));
  }

  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' || s_[end] == 'e' ||
            s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ && (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Const;
    try {
      n->value = std::stod(s_.substr(pos_, end - pos_));
    } catch (const std::exception&) {
      fail("ParseError", "bad number at column " + std::to_string(pos_ + 1));
    }
    pos_ = end;
    return n;
  }

  NodePtr identifier() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "pi") {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::Const;
      n->value = M_PI;
      return n;
    }
    if (name == "sin" || name == "cos" || name == "exp") {
      skip_ws();
      if (!match('(')) fail("ParseError", name + " needs '(' at column " + std::to_string(pos_ + 1));
      NodePtr arg = expression();
      skip_ws();
      if (!match(')')) fail("ParseError", "missing ')' at column " + std::to_string(pos_ + 1));
      auto n = std::make_shared<Expr::Node>();
      n->kind = name == "sin"   ? Expr::Node::Kind::Sin
                : name == "cos" ? Expr::Node::Kind::Cos
                                : Expr::Node::Kind::Exp;
      n->a = arg;
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = 0;
      try {
        idx = std::stoi(name.substr(1));
      } catch (const std::exception&) {
        fail("ParseError", "unknown identifier '" + name + "'");
      }
      if (idx < 1 || idx > dim_)
        fail("ParseError", "coordinate " + name + " out of range for dimension " + std::to_string(dim_));
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::Var;
      n->var = idx - 1;
      return n;
    }
    fail("ParseError", "unknown identifier '" + name + "'");
  }

  NodePtr binary(Expr::Node::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool match(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, const VectorXd& x) {
  using K = Expr::Node::Kind;
  switch (n.kind) {
    case K::Const: return n.value;
    case K::Var: return x(n.var);
    case K::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case K::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case K::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case K::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case K::Neg: return -eval_node(*n.a, x);
    case K::Sin: return std::sin(eval_node(*n.a, x));
    case K::Cos: return std::cos(eval_node(*n.a, x));
    case K::Exp: return std::exp(eval_node(*n.a, x));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text, int dim) {
  Expr e;
  e.root_ = Parser(text, dim).run();
  e.text_ = text;
  return e;
}

double Expr::eval(const VectorXd& x) const {
  if (!root_) fail("ParseError", "empty expression");
  return eval_node(*root_, x);
}

}  // namespace ahe
