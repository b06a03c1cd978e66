#include "core/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

namespace attrikit {

namespace {

struct Node {
  enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Relu };
  Op op;
  double constant = 0.0;
  int variable = -1;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

using NodePtr = std::unique_ptr<Node>;

double eval_node(const Node& n, const Vec& x) {
  switch (n.op) {
    case Node::Op::Constant: return n.constant;
    case Node::Op::Variable: return x[n.variable];
    case Node::Op::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Node::Op::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Node::Op::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Node::Op::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case Node::Op::Pow: return std::pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case Node::Op::Neg: return -eval_node(*n.lhs, x);
    case Node::Op::Sin: return std::sin(eval_node(*n.lhs, x));
    case Node::Op::Cos: return std::cos(eval_node(*n.lhs, x));
    case Node::Op::Exp: return std::exp(eval_node(*n.lhs, x));
    case Node::Op::Relu: return std::max(0.0, eval_node(*n.lhs, x));
  }
  return 0.0;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  NodePtr parse() {
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("expression error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
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

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        lhs = binary(Node::Op::Add, std::move(lhs), parse_term());
      } else if (eat('-')) {
        lhs = binary(Node::Op::Sub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (eat('*')) {
        lhs = binary(Node::Op::Mul, std::move(lhs), parse_factor());
      } else if (eat('/')) {
        lhs = binary(Node::Op::Div, std::move(lhs), parse_factor());
      } else {
        return lhs;
      }
    }
  }

  // '^' binds tighter than unary minus and is right-associative, so
  // -x^2 reads as -(x^2) and 2^3^2 as 2^(3^2).
  NodePtr parse_factor() { return parse_unary(); }

  NodePtr parse_unary() {
    if (eat('-')) {
      auto node = std::make_unique<Node>();
      node->op = Node::Op::Neg;
      node->lhs = parse_unary();
      return node;
    }
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) return binary(Node::Op::Pow, std::move(base), parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("invalid number");
    pos_ += static_cast<std::size_t>(end - start);
    auto node = std::make_unique<Node>();
    node->op = Node::Op::Constant;
    node->constant = v;
    return node;
  }

  NodePtr parse_name() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(begin, pos_ - begin);
    if (peek() == '(') {
      static const std::map<std::string, Node::Op> functions = {
          {"sin", Node::Op::Sin}, {"cos", Node::Op::Cos}, {"exp", Node::Op::Exp},
          {"relu", Node::Op::Relu}};
      const auto it = functions.find(name);
      if (it == functions.end()) fail("unknown function '" + name + "'");
      eat('(');
      auto node = std::make_unique<Node>();
      node->op = it->second;
      node->lhs = parse_expr();
      if (!eat(')')) fail("missing ')' after " + name);
      return node;
    }
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      if (variables_[v] == name) {
        auto node = std::make_unique<Node>();
        node->op = Node::Op::Variable;
        node->variable = static_cast<int>(v);
        return node;
      }
    }
    fail("unknown variable '" + name + "'");
  }

  NodePtr binary(Node::Op op, NodePtr lhs, NodePtr rhs) {
    auto node = std::make_unique<Node>();
    node->op = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  const std::string& text_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

}  // namespace

FuncPtr parse_expression(const std::string& text, const std::vector<std::string>& variables) {
  require(!variables.empty(), "expression needs at least one variable");
  Parser parser(text, variables);
  std::shared_ptr<Node> root{parser.parse().release()};
  return std::make_shared<CallableFunction>(
      static_cast<int>(variables.size()),
      [root](const Vec& x) { return eval_node(*root, x); }, "expr:" + text);
}

FuncPtr parse_expression(const std::string& text, int dim) {
  require(dim >= 1, "expression dimension must be positive");
  std::vector<std::string> vars;
  vars.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) vars.push_back("x" + std::to_string(i));
  return parse_expression(text, vars);
}

}  // namespace attrikit
