#include "foliation/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace foliation {

namespace detail {

enum class Fun { Sin, Cos, Sinh, Cosh, Exp, Ln, Sqrt };

struct ExprNode {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind = Kind::Const;
  double value = 0.0;
  int var = 0;
  Fun fun = Fun::Sin;
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int idx) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Var;
  n->var = idx;
  return n;
}

NodePtr make_unary(ExprNode::Kind k, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr make_call(Fun f, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Call;
  n->fun = f;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(ExprNode::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ExprError(what, at);
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+'))
        lhs = make_binary(ExprNode::Kind::Add, lhs, parse_term());
      else if (eat('-'))
        lhs = make_binary(ExprNode::Kind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*'))
        lhs = make_binary(ExprNode::Kind::Mul, lhs, parse_unary());
      else if (eat('/'))
        lhs = make_binary(ExprNode::Kind::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_unary(ExprNode::Kind::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    // Right associative; the exponent re-enters at unary so 2^-3 parses.
    if (eat('^')) return make_binary(ExprNode::Kind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression", pos);
    const char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr parse_number() {
    const char* begin = src.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number", pos);
    pos += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr parse_ident() {
    const std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    const std::string name = src.substr(start, pos - start);
    if (name == "pi") return make_const(3.14159265358979323846);
    if (name == "x") return make_var(0);
    if (name == "y") return make_var(1);
    if (name == "z") return make_var(2);
    if (name == "w") return make_var(3);
    static const std::pair<const char*, Fun> funs[] = {
        {"sin", Fun::Sin},   {"cos", Fun::Cos}, {"sinh", Fun::Sinh}, {"cosh", Fun::Cosh},
        {"exp", Fun::Exp},   {"ln", Fun::Ln},   {"sqrt", Fun::Sqrt}};
    for (const auto& [fname, f] : funs) {
      if (name == fname) {
        if (!eat('(')) fail("expected '(' after function '" + name + "'", pos);
        NodePtr arg = parse_expr();
        if (!eat(')')) fail("expected ')' closing call of '" + name + "'", pos);
        return make_call(f, arg);
      }
    }
    fail("unknown identifier '" + name + "'", start);
  }
};

int node_min_dim(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Const: return 0;
    case ExprNode::Kind::Var: return n.var + 1;
    case ExprNode::Kind::Neg:
    case ExprNode::Kind::Call: return node_min_dim(*n.a);
    default: return std::max(node_min_dim(*n.a), node_min_dim(*n.b));
  }
}

template <class S>
Jet2<S> eval_node(const ExprNode& n, const JetVec<S>& seeds, int dim) {
  switch (n.kind) {
    case ExprNode::Kind::Const:
      return jet_const(S(n.value), dim);
    case ExprNode::Kind::Var:
      if (n.var >= dim)
        throw std::invalid_argument("expression uses a coordinate beyond the chart dimension");
      return seeds[n.var];
    case ExprNode::Kind::Neg:
      return -eval_node(*n.a, seeds, dim);
    case ExprNode::Kind::Add:
      return eval_node(*n.a, seeds, dim) + eval_node(*n.b, seeds, dim);
    case ExprNode::Kind::Sub:
      return eval_node(*n.a, seeds, dim) - eval_node(*n.b, seeds, dim);
    case ExprNode::Kind::Mul:
      return eval_node(*n.a, seeds, dim) * eval_node(*n.b, seeds, dim);
    case ExprNode::Kind::Div:
      return eval_node(*n.a, seeds, dim) / eval_node(*n.b, seeds, dim);
    case ExprNode::Kind::Pow: {
      const Jet2<S> base = eval_node(*n.a, seeds, dim);
      if (n.b->kind == ExprNode::Kind::Const) {
        const double p = n.b->value;
        if (p == std::floor(p) && std::abs(p) <= 64.0)
          return ipow(base, static_cast<int>(p));
        return pow(base, p);
      }
      const Jet2<S> expo = eval_node(*n.b, seeds, dim);
      return exp(expo * log(base));
    }
    case ExprNode::Kind::Call: {
      const Jet2<S> a = eval_node(*n.a, seeds, dim);
      switch (n.fun) {
        case Fun::Sin: return sin(a);
        case Fun::Cos: return cos(a);
        case Fun::Sinh: return sinh(a);
        case Fun::Cosh: return cosh(a);
        case Fun::Exp: return exp(a);
        case Fun::Ln: return log(a);
        case Fun::Sqrt: return sqrt(a);
      }
      break;
    }
  }
  throw std::logic_error("expr: unreachable node kind");
}

}  // namespace
}  // namespace detail

Expr::Expr(std::shared_ptr<const detail::ExprNode> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expr Expr::parse(const std::string& text) {
  detail::Parser p(text);
  auto root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input", p.pos);
  return Expr(std::move(root), text);
}

int Expr::min_dim() const { return detail::node_min_dim(*root_); }

Jet2d Expr::eval(const JetVec<double>& seeds, int dim) const {
  return detail::eval_node<double>(*root_, seeds, dim);
}

Jet2x Expr::eval(const JetVec<Dual>& seeds, int dim) const {
  return detail::eval_node<Dual>(*root_, seeds, dim);
}

ScalarField Expr::field() const {
  auto root = root_;
  return {ScalarFn<double>([root](const JetVec<double>& s, int dim) {
            return detail::eval_node<double>(*root, s, dim);
          }),
          ScalarFn<Dual>([root](const JetVec<Dual>& s, int dim) {
            return detail::eval_node<Dual>(*root, s, dim);
          })};
}

ScalarField parse_scalar_field(const std::string& text) { return Expr::parse(text).field(); }

}  // namespace foliation
