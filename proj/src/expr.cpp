#include "finslerkit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "finslerkit/errors.hpp"

namespace finslerkit {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct FunctionEntry {
  std::string_view name;
  ExprFunction fn;
};

constexpr FunctionEntry kFunctions[] = {
    {"sqrt", ExprFunction::sqrt}, {"sin", ExprFunction::sin},
    {"cos", ExprFunction::cos},   {"exp", ExprFunction::exp},
    {"log", ExprFunction::log},   {"abs", ExprFunction::abs},
};

NodePtr make_node(ExprNode::Kind kind, std::size_t offset, NodePtr lhs = {},
                  NodePtr rhs = {}) {
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->offset = offset;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

bool contains_variable(const ExprNode& node) {
  if (node.kind == ExprNode::Kind::variable) return true;
  return (node.lhs && contains_variable(*node.lhs)) ||
         (node.rhs && contains_variable(*node.rhs));
}

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars)
      : src_(src), vars_(vars) {}

  NodePtr parse() {
    skip_space();
    if (pos_ >= src_.size()) fail("empty expression");
    NodePtr node = parse_expr();
    skip_space();
    if (pos_ < src_.size()) {
      fail(std::string("unexpected '") + src_[pos_] + "'");
    }
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what,
                         ParseError::Kind kind = ParseError::Kind::syntax) {
    fail_at(what, pos_, kind);
  }

  [[noreturn]] void fail_at(const std::string& what, std::size_t offset,
                            ParseError::Kind kind = ParseError::Kind::syntax) {
    std::ostringstream msg;
    msg << what << " at offset " << offset << " in \"" << src_ << "\"";
    throw ParseError(kind, msg.str(), offset);
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' before end");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_node(ExprNode::Kind::add, at, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_node(ExprNode::Kind::subtract, at, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_node(ExprNode::Kind::multiply, at, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(ExprNode::Kind::divide, at, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make_node(ExprNode::Kind::negate, at, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_space();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skip_space();
    const std::size_t exponent_at = pos_;
    NodePtr exponent = parse_unary();
    if (contains_variable(*exponent)) {
      fail_at("exponent must be a constant expression", exponent_at);
    }
    double value = 0.0;
    try {
      value = Expr(exponent, {}).eval(std::span<const Jet>{}).value();
    } catch (const DomainError& e) {
      fail_at(std::string("exponent does not evaluate: ") + e.what(), exponent_at);
    }
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::power;
    node->offset = at;
    node->lhs = std::move(base);
    node->number = value;
    return node;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    const std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(src_.substr(at, pos_ - at));
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                               [&](const FunctionEntry& e) { return e.name == name; });
        if (it == std::end(kFunctions)) {
          fail_at("unknown function '" + name + "'", at,
                  ParseError::Kind::unknown_function);
        }
        ++pos_;
        NodePtr arg = parse_expr();
        expect(')');
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::call;
        node->function = it->fn;
        node->offset = at;
        node->lhs = std::move(arg);
        return node;
      }
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end() &&
          std::any_of(std::begin(kFunctions), std::end(kFunctions),
                      [&](const FunctionEntry& e) { return e.name == name; })) {
        fail("expected '(' after function '" + name + "'");
      }
      if (it == vars_.end()) {
        fail_at("unknown variable '" + name + "'", at,
                ParseError::Kind::unknown_variable);
      }
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::variable;
      node->variable = static_cast<int>(it - vars_.begin());
      node->offset = at;
      return node;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t at = pos_;
    auto digits = [&] {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      return pos_ - start;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at("malformed number", at);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at("malformed exponent in number", at);
    }
    const std::string text(src_.substr(at, pos_ - at));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      fail_at("number out of range", at);
    }
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::constant;
    node->number = value;
    node->offset = at;
    return node;
  }

  std::string_view src_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

Jet apply(ExprFunction fn, const Jet& a) {
  switch (fn) {
    case ExprFunction::sqrt: return sqrt(a);
    case ExprFunction::sin: return sin(a);
    case ExprFunction::cos: return cos(a);
    case ExprFunction::exp: return exp(a);
    case ExprFunction::log: return log(a);
    case ExprFunction::abs: return abs(a);
  }
  throw std::logic_error("unreachable");
}

struct Evaluator {
  std::span<const Jet> args;
  int nvars;
  int order;

  Jet eval(const ExprNode& node) const {
    using K = ExprNode::Kind;
    if (node.kind == K::constant) return Jet::constant(node.number, nvars, order);
    if (node.kind == K::variable) return args[node.variable];
    try {
      switch (node.kind) {
        case K::negate: return -eval(*node.lhs);
        case K::add: return eval(*node.lhs) + eval(*node.rhs);
        case K::subtract: return eval(*node.lhs) - eval(*node.rhs);
        case K::multiply: return eval(*node.lhs) * eval(*node.rhs);
        case K::divide: return eval(*node.lhs) / eval(*node.rhs);
        case K::call: return apply(node.function, eval(*node.lhs));
        case K::power: return pow(eval(*node.lhs), node.number);
        default: break;
      }
    } catch (const EvalError&) {
      throw;
    } catch (const DomainError& e) {
      throw EvalError(std::string(e.what()) + " (expression offset " +
                          std::to_string(node.offset) + ")",
                      e.offending_value(), node.offset);
    }
    throw std::logic_error("unreachable");
  }
};

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void serialize_into(const ExprNode& node, const std::vector<std::string>& vars,
                    std::string& out) {
  using K = ExprNode::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    serialize_into(*node.lhs, vars, out);
    out += op;
    serialize_into(*node.rhs, vars, out);
    out += ')';
  };
  switch (node.kind) {
    case K::constant: out += format_number(node.number); break;
    case K::variable: out += vars.at(node.variable); break;
    case K::negate:
      out += "(-";
      serialize_into(*node.lhs, vars, out);
      out += ')';
      break;
    case K::add: binary("+"); break;
    case K::subtract: binary("-"); break;
    case K::multiply: binary("*"); break;
    case K::divide: binary("/"); break;
    case K::call:
      out += function_name(node.function);
      out += '(';
      serialize_into(*node.lhs, vars, out);
      out += ')';
      break;
    case K::power:
      out += '(';
      serialize_into(*node.lhs, vars, out);
      out += ")^(";
      out += format_number(node.number);
      out += ')';
      break;
  }
}

}  // namespace

std::string_view function_name(ExprFunction fn) {
  for (const auto& e : kFunctions) {
    if (e.fn == fn) return e.name;
  }
  return "?";
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  using K = ExprNode::Kind;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case K::constant: return a.number == b.number;
    case K::variable: return a.variable == b.variable;
    case K::call:
      return a.function == b.function && structurally_equal(*a.lhs, *b.lhs);
    case K::power:
      return a.number == b.number && structurally_equal(*a.lhs, *b.lhs);
    case K::negate: return structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
  }
}

Expr::Expr(std::shared_ptr<const ExprNode> root, std::vector<std::string> vars,
           std::string source)
    : root_(std::move(root)), vars_(std::move(vars)), source_(std::move(source)) {
  if (!root_) throw std::invalid_argument("expr: null root");
}

Expr Expr::parse(std::string_view source, std::vector<std::string> allowed_vars) {
  Parser parser(source, allowed_vars);
  NodePtr root = parser.parse();
  return Expr(std::move(root), std::move(allowed_vars), std::string(source));
}

Jet Expr::eval(std::span<const Jet> args) const {
  if (args.size() != vars_.size()) {
    throw std::invalid_argument("expr eval: expected " +
                                std::to_string(vars_.size()) + " arguments");
  }
  int nvars = 0;
  int order = 0;
  if (!args.empty()) {
    nvars = args[0].nvars();
    order = args[0].order();
    for (const Jet& a : args) {
      if (a.nvars() != nvars || a.order() != order) {
        throw std::invalid_argument("expr eval: argument jets differ in shape");
      }
    }
  }
  return Evaluator{args, nvars, order}.eval(*root_);
}

Jet Expr::eval(const std::map<std::string, Jet>& bindings) const {
  std::vector<Jet> args;
  args.reserve(vars_.size());
  for (const std::string& name : vars_) {
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw std::invalid_argument("expr eval: no binding for variable '" + name + "'");
    }
    args.push_back(it->second);
  }
  return eval(args);
}

std::string Expr::serialize() const {
  std::string out;
  serialize_into(*root_, vars_, out);
  return out;
}

}  // namespace finslerkit
