#pragma once

// Random composite functions of several variables, evaluable on plain doubles
// (for finite differences) and on jets (for exact derivatives). Every node is
// built so its argument stays inside the function's domain.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace weylcheck::testing {

class RandomComposite {
 public:
  RandomComposite(int n_vars, std::uint64_t seed) : n_(n_vars), rng_(seed) { root_ = grow(3); }

  int vars() const { return n_; }
  const std::string& text() const { return text_cache_.empty() ? (text_cache_ = describe(*root_)) : text_cache_; }

  template <typename T>
  T operator()(const std::vector<T>& x) const {
    return eval(*root_, x);
  }

 private:
  enum class Op { var, constant, add, mul, sub, sin, cos, exp, log, sqrt, recip, pow_const, pow_jet };

  struct Node {
    Op op;
    int var = 0;
    double c = 0.0;
    std::unique_ptr<Node> a, b;
  };

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int count) { return std::uniform_int_distribution<int>(0, count - 1)(rng_); }

  std::unique_ptr<Node> leaf() {
    auto node = std::make_unique<Node>();
    if (pick(4) == 0) {
      node->op = Op::constant;
      node->c = uniform(0.5, 1.5);
    } else {
      node->op = Op::var;
      node->var = pick(n_);
    }
    return node;
  }

  std::unique_ptr<Node> grow(int depth) {
    if (depth == 0) return leaf();
    auto node = std::make_unique<Node>();
    static constexpr Op kOps[] = {Op::add, Op::mul, Op::sub, Op::sin, Op::cos, Op::exp,
                                  Op::log, Op::sqrt, Op::recip, Op::pow_const, Op::pow_jet};
    node->op = kOps[pick(static_cast<int>(std::size(kOps)))];
    node->a = grow(depth - 1);
    if (node->op == Op::add || node->op == Op::mul || node->op == Op::sub || node->op == Op::pow_jet)
      node->b = grow(depth - 1);
    node->c = uniform(-1.5, 1.5);
    // Keep every function's derivative well inside the domain of the oracle.
    if (node->op == Op::exp) node->c = uniform(0.2, 0.6);
    return node;
  }

  template <typename T>
  static T eval(const Node& n, const std::vector<T>& x) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    switch (n.op) {
      case Op::var:
        return x[static_cast<std::size_t>(n.var)];
      case Op::constant:
        return x[0] * 0.0 + n.c;
      case Op::add:
        return eval(*n.a, x) + eval(*n.b, x);
      case Op::mul:
        return eval(*n.a, x) * eval(*n.b, x);
      case Op::sub:
        return eval(*n.a, x) - eval(*n.b, x);
      case Op::sin:
        return sin(eval(*n.a, x));
      case Op::cos:
        return cos(eval(*n.a, x));
      case Op::exp:
        return exp(n.c * sin(eval(*n.a, x)));
      case Op::log: {
        const T a = eval(*n.a, x);
        return log(1.5 + a * a);
      }
      case Op::sqrt: {
        const T a = eval(*n.a, x);
        return sqrt(1.0 + a * a);
      }
      case Op::recip:
        return 1.0 / (2.0 + cos(eval(*n.a, x)));
      case Op::pow_const:
        return pow(1.5 + sin(eval(*n.a, x)), n.c);
      case Op::pow_jet:
        return pow(1.5 + sin(eval(*n.a, x)), 0.5 + 0.3 * sin(eval(*n.b, x)));
    }
    return x[0];
  }

  static std::string describe(const Node& n) {
    switch (n.op) {
      case Op::var:
        return "x" + std::to_string(n.var);
      case Op::constant:
        return std::to_string(n.c);
      case Op::add:
        return "(" + describe(*n.a) + " + " + describe(*n.b) + ")";
      case Op::mul:
        return "(" + describe(*n.a) + " * " + describe(*n.b) + ")";
      case Op::sub:
        return "(" + describe(*n.a) + " - " + describe(*n.b) + ")";
      case Op::sin:
        return "sin(" + describe(*n.a) + ")";
      case Op::cos:
        return "cos(" + describe(*n.a) + ")";
      case Op::exp:
        return "exp(" + std::to_string(n.c) + " sin(" + describe(*n.a) + "))";
      case Op::log:
        return "log(1.5 + (" + describe(*n.a) + ")^2)";
      case Op::sqrt:
        return "sqrt(1 + (" + describe(*n.a) + ")^2)";
      case Op::recip:
        return "1/(2 + cos(" + describe(*n.a) + "))";
      case Op::pow_const:
        return "(1.5 + sin(" + describe(*n.a) + "))^" + std::to_string(n.c);
      case Op::pow_jet:
        return "(1.5 + sin(" + describe(*n.a) + "))^(0.5 + 0.3 sin(" + describe(*n.b) + "))";
    }
    return "?";
  }

  int n_;
  std::mt19937_64 rng_;
  std::unique_ptr<Node> root_;
  mutable std::string text_cache_;
};

struct DerivativeComparison {
  double worst_relative = 0.0;  // max |jet - fd| / max(1, |jet|) over orders 1..3
  int checked = 0;
};

/// Compare every partial of orders 1-3 of `f` at `x` against nested central
/// differences with step `h`. With `richardson`, the differences at h and h/2
/// are combined to cancel the leading h^2 truncation term.
template <typename JetT>
DerivativeComparison compare_with_finite_differences(const RandomComposite& f, const std::vector<double>& x, double h,
                                                     bool richardson = false) {
  const int n = f.vars();
  std::vector<JetT> jx;
  for (int i = 0; i < n; ++i) jx.push_back(JetT::variable(n, i, x[static_cast<std::size_t>(i)]));
  const JetT jet = f(jx);

  const auto at = [&](const std::vector<std::pair<int, double>>& shifts) {
    std::vector<double> p = x;
    for (const auto& [i, s] : shifts) p[static_cast<std::size_t>(i)] += s;
    return f(p);
  };
  const double signs[2] = {1.0, -1.0};
  const auto diff1 = [&](int i, double s) { return (at({{i, s}}) - at({{i, -s}})) / (2.0 * s); };
  const auto diff2 = [&](int i, int j, double s) {
    double d = 0.0;
    for (double si : signs)
      for (double sj : signs) d += si * sj * at({{i, si * s}, {j, sj * s}});
    return d / (4.0 * s * s);
  };
  const auto diff3 = [&](int i, int j, int k, double s) {
    double d = 0.0;
    for (double si : signs)
      for (double sj : signs)
        for (double sk : signs) d += si * sj * sk * at({{i, si * s}, {j, sj * s}, {k, sk * s}});
    return d / (8.0 * s * s * s);
  };
  const auto approx = [&](const auto& diff) { return richardson ? (4.0 * diff(h / 2) - diff(h)) / 3.0 : diff(h); };

  DerivativeComparison out;
  const auto record = [&](double exact, double fd) {
    out.worst_relative = std::max(out.worst_relative, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    ++out.checked;
  };
  for (int i = 0; i < n; ++i) {
    record(jet.d1(i), approx([&](double s) { return diff1(i, s); }));
    for (int j = i; j < n; ++j) {
      record(jet.d2(i, j), approx([&](double s) { return diff2(i, j, s); }));
      for (int k = j; k < n; ++k) record(jet.d3(i, j, k), approx([&](double s) { return diff3(i, j, k, s); }));
    }
  }
  return out;
}

}  // namespace weylcheck::testing
