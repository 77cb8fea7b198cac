#include "curvecert/field_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace curvecert {

namespace {

enum class Op { Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Pow, Num, VarT, VarX };

const char* op_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Pow: return "pow";
    default: return "";
  }
}

}  // namespace

struct FieldExpr::Node {
  Op op = Op::Num;
  double number = 0.0;
  int var_index = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const FieldExpr::Node>;

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<FieldExpr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

double eval_node(const FieldExpr::Node& n, double t, std::span<const double> x) {
  switch (n.op) {
    case Op::Num:
      return n.number;
    case Op::VarT:
      return t;
    case Op::VarX:
      return x[static_cast<std::size_t>(n.var_index)];
    case Op::Neg:
      return -eval_node(*n.lhs, t, x);
    case Op::Add:
      return eval_node(*n.lhs, t, x) + eval_node(*n.rhs, t, x);
    case Op::Sub:
      return eval_node(*n.lhs, t, x) - eval_node(*n.rhs, t, x);
    case Op::Mul:
      return eval_node(*n.lhs, t, x) * eval_node(*n.rhs, t, x);
    case Op::Div: {
      const double denom = eval_node(*n.rhs, t, x);
      if (denom == 0.0) {
        throw EvalError("division by zero");
      }
      return eval_node(*n.lhs, t, x) / denom;
    }
    case Op::Sin:
      return std::sin(eval_node(*n.lhs, t, x));
    case Op::Cos:
      return std::cos(eval_node(*n.lhs, t, x));
    case Op::Exp: {
      const double v = std::exp(eval_node(*n.lhs, t, x));
      if (!std::isfinite(v)) {
        throw EvalError("exp overflow");
      }
      return v;
    }
    case Op::Pow: {
      const double v = std::pow(eval_node(*n.lhs, t, x), eval_node(*n.rhs, t, x));
      if (!std::isfinite(v)) {
        throw EvalError("pow outside its real domain or overflow");
      }
      return v;
    }
  }
  throw EvalError("corrupt expression node");
}

void print_node(const FieldExpr::Node& n, std::string& out) {
  switch (n.op) {
    case Op::Num: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", n.number);
      out += buf;
      return;
    }
    case Op::VarT:
      out += "t";
      return;
    case Op::VarX:
      out += "x" + std::to_string(n.var_index);
      return;
    case Op::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = n.op == Op::Add   ? " + "
                        : n.op == Op::Sub ? " - "
                        : n.op == Op::Mul ? " * "
                                          : " / ";
      out += "(";
      print_node(*n.lhs, out);
      out += sym;
      print_node(*n.rhs, out);
      out += ")";
      return;
    }
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      out += op_name(n.op);
      out += "(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Op::Pow:
      out += "pow(";
      print_node(*n.lhs, out);
      out += ", ";
      print_node(*n.rhs, out);
      out += ")";
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) {
      fail("end of input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError("syntax error at position " + std::to_string(pos_) +
                         ": expected " + expected,
                     pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        lhs = make_node(Op::Add, lhs, parse_term());
      } else if (eat('-')) {
        lhs = make_node(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        lhs = make_node(Op::Mul, lhs, parse_unary());
      } else if (eat('/')) {
        lhs = make_node(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) {
      return make_node(Op::Neg, parse_unary());
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail("a literal, variable, function, or '('");
    }
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!eat(')')) {
        fail("')'");
      }
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_ident();
    }
    fail("a literal, variable, function, or '('");
  }

  NodePtr parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr == begin) {
      fail("a numeric literal");
    }
    pos_ = static_cast<std::size_t>(res.ptr - src_.data());
    auto n = std::make_shared<FieldExpr::Node>();
    n->op = Op::Num;
    n->number = value;
    return n;
  }

  NodePtr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "t") {
      return make_node(Op::VarT);
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = -1;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc{} && res.ptr == name.data() + name.size()) {
        if (idx < 0 || idx >= dim_) {
          throw UnknownVariable("variable " + name + " is out of range for dimension " +
                                    std::to_string(dim_),
                                name);
        }
        auto n = std::make_shared<FieldExpr::Node>();
        n->op = Op::VarX;
        n->var_index = idx;
        return n;
      }
    }
    Op fn;
    int arity;
    if (name == "sin") {
      fn = Op::Sin;
      arity = 1;
    } else if (name == "cos") {
      fn = Op::Cos;
      arity = 1;
    } else if (name == "exp") {
      fn = Op::Exp;
      arity = 1;
    } else if (name == "pow") {
      fn = Op::Pow;
      arity = 2;
    } else {
      throw UnknownVariable("unknown name '" + name + "'", name);
    }
    if (!eat('(')) {
      fail("'(' after function name");
    }
    NodePtr first = parse_sum();
    NodePtr second;
    if (arity == 2) {
      if (!eat(',')) {
        fail("',' between pow arguments");
      }
      second = parse_sum();
    }
    if (!eat(')')) {
      fail("')'");
    }
    return make_node(fn, first, second);
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

double FieldExpr::eval(double t, std::span<const double> x) const {
  if (!root_) {
    throw EvalError("empty expression");
  }
  if (static_cast<int>(x.size()) != dim_) {
    throw EvalError("expression expects dimension " + std::to_string(dim_) +
                    ", got " + std::to_string(x.size()));
  }
  const double v = eval_node(*root_, t, x);
  if (!std::isfinite(v)) {
    throw EvalError("expression evaluated to a non-finite value");
  }
  return v;
}

std::string FieldExpr::to_string() const {
  std::string out;
  if (root_) {
    print_node(*root_, out);
  }
  return out;
}

FieldExpr parse_field_expr(std::string_view source, int dim) {
  if (dim < 1) {
    throw DomainError("expression dimension must be >= 1");
  }
  Parser parser(source, dim);
  FieldExpr expr;
  expr.root_ = parser.parse();
  expr.dim_ = dim;
  return expr;
}

}  // namespace curvecert
