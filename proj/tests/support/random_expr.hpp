#ifndef FINSLERKIT_TESTS_RANDOM_EXPR_HPP
#define FINSLERKIT_TESTS_RANDOM_EXPR_HPP

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "finslerkit/expr.hpp"

namespace finslerkit::testing {

using NodePtr = std::shared_ptr<const ExprNode>;

inline NodePtr leaf_constant(double c) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::constant;
  n->number = c;
  return n;
}

inline NodePtr leaf_variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::variable;
  n->variable = index;
  return n;
}

inline NodePtr unary(ExprNode::Kind kind, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(a);
  return n;
}

inline NodePtr call(ExprFunction fn, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::call;
  n->function = fn;
  n->lhs = std::move(a);
  return n;
}

inline NodePtr binary(ExprNode::Kind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline NodePtr power(NodePtr a, double exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::power;
  n->lhs = std::move(a);
  n->number = exponent;
  return n;
}

/// Random tree over `nvars` variables whose every subexpression is finite
/// and smooth for arguments in [-1, 1]: divisors, sqrt and log arguments are
/// kept away from zero by construction.
class SafeExprGenerator {
 public:
  SafeExprGenerator(int nvars, std::uint64_t seed) : nvars_(nvars), rng_(seed) {}

  NodePtr operator()(int depth) {
    using K = ExprNode::Kind;
    if (depth == 0 || pick(4) == 0) {
      if (pick(3) == 0) return leaf_constant(constant());
      return leaf_variable(pick(nvars_));
    }
    switch (pick(10)) {
      case 0: return binary(K::add, (*this)(depth - 1), (*this)(depth - 1));
      case 1: return binary(K::subtract, (*this)(depth - 1), (*this)(depth - 1));
      case 2: return binary(K::multiply, (*this)(depth - 1), (*this)(depth - 1));
      case 3:  // a / (2 + sin(b))
        return binary(K::divide, (*this)(depth - 1),
                      binary(K::add, leaf_constant(2.0),
                             call(ExprFunction::sin, (*this)(depth - 1))));
      case 4: return call(ExprFunction::sin, (*this)(depth - 1));
      case 5: return call(ExprFunction::cos, (*this)(depth - 1));
      case 6:  // exp(sin(a))
        return call(ExprFunction::exp, call(ExprFunction::sin, (*this)(depth - 1)));
      case 7:  // sqrt(1 + a*a)
        return call(ExprFunction::sqrt, binary(K::add, leaf_constant(1.0),
                                               power((*this)(depth - 1), 2.0)));
      case 8:  // log(2 + cos(a))
        return call(ExprFunction::log,
                    binary(K::add, leaf_constant(2.0),
                           call(ExprFunction::cos, (*this)(depth - 1))));
      default: {
        // (1.5 + sin(a))^e with a half-integer or integer exponent.
        static const double kExponents[] = {2.0, 3.0, -1.0, 0.5, -0.5, 1.5};
        return power(binary(K::add, leaf_constant(1.5),
                            call(ExprFunction::sin, (*this)(depth - 1))),
                     kExponents[pick(6)]);
      }
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  double constant() { return std::uniform_real_distribution<double>(0.1, 3.0)(rng_); }

  int nvars_;
  std::mt19937_64 rng_;
};

/// Unrestricted tree covering every node kind (for syntax round trips).
class AnyExprGenerator {
 public:
  AnyExprGenerator(int nvars, std::uint64_t seed) : nvars_(nvars), rng_(seed) {}

  NodePtr operator()(int depth) {
    using K = ExprNode::Kind;
    if (depth == 0 || pick(5) == 0) {
      if (pick(2) == 0) {
        // Literals are nonnegative: a leading minus parses as negation.
        const double choices[] = {0.0, 1.0, 2.5, 1e-7, 3.0e12, 0.1, 1.0 / 3.0};
        return leaf_constant(pick(2) ? choices[pick(7)]
                                     : std::uniform_real_distribution<double>(0, 100)(rng_));
      }
      return leaf_variable(pick(nvars_));
    }
    static const K kBinary[] = {K::add, K::subtract, K::multiply, K::divide};
    switch (pick(4)) {
      case 0: return binary(kBinary[pick(4)], (*this)(depth - 1), (*this)(depth - 1));
      case 1: return unary(K::negate, (*this)(depth - 1));
      case 2: {
        static const ExprFunction kFns[] = {ExprFunction::sqrt, ExprFunction::sin,
                                            ExprFunction::cos,  ExprFunction::exp,
                                            ExprFunction::log,  ExprFunction::abs};
        return call(kFns[pick(6)], (*this)(depth - 1));
      }
      default: {
        const double exps[] = {2.0, -0.5, 3.0, 0.25, -2.0, 1e-3};
        return power((*this)(depth - 1), exps[pick(6)]);
      }
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  int nvars_;
  std::mt19937_64 rng_;
};

/// Direct recursive interpreter over plain reals, independent of the jets.
inline double interpret(const ExprNode& node, const std::vector<double>& args) {
  using K = ExprNode::Kind;
  switch (node.kind) {
    case K::constant: return node.number;
    case K::variable: return args.at(node.variable);
    case K::negate: return -interpret(*node.lhs, args);
    case K::add: return interpret(*node.lhs, args) + interpret(*node.rhs, args);
    case K::subtract: return interpret(*node.lhs, args) - interpret(*node.rhs, args);
    case K::multiply: return interpret(*node.lhs, args) * interpret(*node.rhs, args);
    case K::divide: return interpret(*node.lhs, args) / interpret(*node.rhs, args);
    case K::power: return std::pow(interpret(*node.lhs, args), node.number);
    case K::call: {
      const double a = interpret(*node.lhs, args);
      switch (node.function) {
        case ExprFunction::sqrt: return std::sqrt(a);
        case ExprFunction::sin: return std::sin(a);
        case ExprFunction::cos: return std::cos(a);
        case ExprFunction::exp: return std::exp(a);
        case ExprFunction::log: return std::log(a);
        case ExprFunction::abs: return std::abs(a);
      }
    }
  }
  throw std::logic_error("interpret: bad node");
}

}  // namespace finslerkit::testing

#endif  // FINSLERKIT_TESTS_RANDOM_EXPR_HPP
