#include "weylcheck/expression.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

namespace weylcheck {

struct Expression::Node {
  enum class Kind { number, variable, add, sub, mul, div, neg, pow, exp, log, sin, cos, sqrt };
  Kind kind = Kind::number;
  double number = 0.0;
  int variable = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError("expression '" + std::string(text_) + "' at position " + std::to_string(pos_) + ": " +
                      message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Node::Kind::add, lhs, term());
      else if (accept('-'))
        lhs = make(Node::Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Node::Kind::mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Node::Kind::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto node = std::make_shared<Node>();
    node->number = value;
    return node;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name == "pi") {
      auto node = std::make_shared<Node>();
      node->number = std::numbers::pi;
      return node;
    }
    if (name == "t" || (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '6')) {
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::variable;
      node->variable = name == "t" ? 0 : name[1] - '0';
      return node;
    }

    static constexpr std::pair<std::string_view, Node::Kind> kFunctions[] = {
        {"exp", Node::Kind::exp}, {"log", Node::Kind::log},   {"sin", Node::Kind::sin},
        {"cos", Node::Kind::cos}, {"sqrt", Node::Kind::sqrt}, {"pow", Node::Kind::pow},
    };
    for (const auto& [fname, kind] : kFunctions) {
      if (name != fname) continue;
      expect('(');
      NodePtr arg = expr();
      NodePtr second;
      if (kind == Node::Kind::pow) {
        expect(',');
        second = expr();
      }
      expect(')');
      return make(kind, arg, second);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int max_var(const Node* node) {
  if (!node) return -1;
  if (node->kind == Node::Kind::variable) return node->variable;
  return std::max(max_var(node->lhs.get()), max_var(node->rhs.get()));
}

Jet3 eval(const Node& node, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  switch (node.kind) {
    case Node::Kind::number:
      return Jet3::constant(n, node.number);
    case Node::Kind::variable:
      if (node.variable >= n) throw ConfigError("expression uses x" + std::to_string(node.variable) +
                                                " in dimension " + std::to_string(n));
      return Jet3::variable(n, node.variable, x[static_cast<std::size_t>(node.variable)]);
    case Node::Kind::add:
      return eval(*node.lhs, x) + eval(*node.rhs, x);
    case Node::Kind::sub:
      return eval(*node.lhs, x) - eval(*node.rhs, x);
    case Node::Kind::mul:
      return eval(*node.lhs, x) * eval(*node.rhs, x);
    case Node::Kind::div:
      return eval(*node.lhs, x) / eval(*node.rhs, x);
    case Node::Kind::neg:
      return -eval(*node.lhs, x);
    case Node::Kind::pow:
      // Constant exponents take the real-power path, which accepts negative
      // bases for integer exponents.
      if (max_var(node.rhs.get()) < 0) return pow(eval(*node.lhs, x), eval(*node.rhs, x).value());
      return pow(eval(*node.lhs, x), eval(*node.rhs, x));
    case Node::Kind::exp:
      return exp(eval(*node.lhs, x));
    case Node::Kind::log:
      return log(eval(*node.lhs, x));
    case Node::Kind::sin:
      return sin(eval(*node.lhs, x));
    case Node::Kind::cos:
      return cos(eval(*node.lhs, x));
    case Node::Kind::sqrt:
      return sqrt(eval(*node.lhs, x));
  }
  throw UsageError("corrupt expression node");
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(e.text_).parse();
  return e;
}

Jet3 Expression::evaluate(std::span<const double> coords) const {
  if (!root_) throw UsageError("empty expression");
  return eval(*root_, coords);
}

int Expression::max_variable() const { return max_var(root_.get()); }

}  // namespace weylcheck
