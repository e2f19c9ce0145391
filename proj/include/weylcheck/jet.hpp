#pragma once

// Truncated multivariate Taylor data: a value together with every partial
// derivative up to `Order` (at most 3) with respect to n <= 7 chart
// variables. Arithmetic propagates derivatives exactly (no truncation error
// beyond floating point), so the curvature pipeline never differentiates
// numerically.
//
// Only sorted index tuples (i <= j <= k) are computed; the other
// permutations are mirrored from them, which keeps the second and third
// derivative arrays exactly symmetric.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "weylcheck/error.hpp"
#include "weylcheck/tensor.hpp"

namespace weylcheck {

template <int Order>
class Jet {
  static_assert(Order >= 0 && Order <= 3, "jets are supported through third order");

 public:
  static constexpr int order = Order;
  static constexpr int kStride = kMaxDim;

  Jet() = default;

  /// Constant function. n == 0 gives a dimensionless constant that combines
  /// with jets of any dimension.
  static Jet constant(int n, double c) {
    Jet j;
    j.n_ = checked_dim(n);
    j.value_ = c;
    return j;
  }

  /// The coordinate function x^index evaluated at `at`.
  static Jet variable(int n, int index, double at) {
    Jet j = constant(n, at);
    if (index < 0 || index >= n) throw UsageError("jet variable index out of range");
    if constexpr (Order >= 1) j.d1_[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  /// Build a jet from explicit derivative arrays (row-major n, n*n, n*n*n).
  /// Higher-order arrays are symmetrized on write; arrays beyond `Order`
  /// may be empty.
  static Jet from_derivatives(int n, double value, std::span<const double> d1,
                              std::span<const double> d2 = {}, std::span<const double> d3 = {}) {
    Jet j = constant(n, value);
    const auto un = static_cast<std::size_t>(n);
    if constexpr (Order >= 1) {
      if (d1.size() != un) throw UsageError("first-derivative array has wrong length");
      for (int i = 0; i < n; ++i) j.d1_[static_cast<std::size_t>(i)] = d1[static_cast<std::size_t>(i)];
    }
    if constexpr (Order >= 2) {
      if (d2.size() != un * un) throw UsageError("second-derivative array has wrong length");
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          const double s = 0.5 * (d2[idx(n, a, b)] + d2[idx(n, b, a)]);
          j.set2(a, b, s);
        }
    }
    if constexpr (Order >= 3) {
      if (d3.size() != un * un * un) throw UsageError("third-derivative array has wrong length");
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int c = b; c < n; ++c) {
            const double s = (d3[idx(n, a, b, c)] + d3[idx(n, a, c, b)] + d3[idx(n, b, a, c)] +
                              d3[idx(n, b, c, a)] + d3[idx(n, c, a, b)] + d3[idx(n, c, b, a)]) /
                             6.0;
            j.set3(a, b, c, s);
          }
    }
    return j;
  }

  int dim() const { return n_; }
  double value() const { return value_; }

  double d1(int i) const
    requires(Order >= 1)
  {
    return d1_[static_cast<std::size_t>(i)];
  }
  double d2(int i, int j) const
    requires(Order >= 2)
  {
    return d2_[static_cast<std::size_t>(i * kStride + j)];
  }
  double d3(int i, int j, int k) const
    requires(Order >= 3)
  {
    return d3_[static_cast<std::size_t>((i * kStride + j) * kStride + k)];
  }

  /// Partial derivative with respect to chart variable `i`, one order lower.
  Jet<Order - 1> partial(int i) const
    requires(Order >= 1)
  {
    if (i < 0 || i >= n_) throw UsageError("partial index out of range");
    Jet<Order - 1> out = Jet<Order - 1>::constant(n_, d1(i));
    if constexpr (Order >= 2)
      for (int a = 0; a < n_; ++a) out.d1_[static_cast<std::size_t>(a)] = d2(i, a);
    if constexpr (Order >= 3)
      for (int a = 0; a < n_; ++a)
        for (int b = a; b < n_; ++b) out.set2(a, b, d3(i, a, b));
    return out;
  }

  /// Drop derivative orders above `Lower`.
  template <int Lower>
  Jet<Lower> truncate() const
    requires(Lower <= Order)
  {
    Jet<Lower> out = Jet<Lower>::constant(n_, value_);
    if constexpr (Lower >= 1) out.d1_ = d1_;
    if constexpr (Lower >= 2) out.d2_ = d2_;
    if constexpr (Lower >= 3) out.d3_ = d3_;
    return out;
  }

  /// Chain rule for h = F(a) given F, F', F'', F''' evaluated at a.value().
  Jet compose(double f0, double f1, double f2, double f3) const {
    Jet h = constant(n_, f0);
    const int n = n_;
    if constexpr (Order >= 1)
      for (int i = 0; i < n; ++i) h.d1_[static_cast<std::size_t>(i)] = f1 * d1(i);
    if constexpr (Order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h.set2(i, j, f2 * d1(i) * d1(j) + f1 * d2(i, j));
    if constexpr (Order >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            h.set3(i, j, k,
                   f3 * d1(i) * d1(j) * d1(k) +
                       f2 * (d2(i, j) * d1(k) + d2(i, k) * d1(j) + d2(j, k) * d1(i)) +
                       f1 * d3(i, j, k));
    (void)f2;
    (void)f3;
    return h;
  }

  Jet operator-() const { return compose(-value_, -1.0, 0.0, 0.0); }

  Jet& operator+=(const Jet& b) { return axpy(1.0, b); }
  Jet& operator-=(const Jet& b) { return axpy(-1.0, b); }
  Jet& operator*=(double s) {
    value_ *= s;
    for (double& x : d1_) x *= s;
    for (double& x : d2_) x *= s;
    for (double& x : d3_) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    value_ += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) {
    if (s == 0.0) throw NumericalError("jet division singularity");
    return a *= 1.0 / s;
  }

  /// Leibniz rule through `Order`.
  friend Jet operator*(const Jet& f, const Jet& g) {
    const int n = merged_dim(f, g);
    Jet h = constant(n, f.value_ * g.value_);
    const double fv = f.value_;
    const double gv = g.value_;
    if constexpr (Order >= 1)
      for (int i = 0; i < n; ++i) h.d1_[static_cast<std::size_t>(i)] = f.d1(i) * gv + fv * g.d1(i);
    if constexpr (Order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          h.set2(i, j, f.d2(i, j) * gv + f.d1(i) * g.d1(j) + f.d1(j) * g.d1(i) + fv * g.d2(i, j));
    if constexpr (Order >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            h.set3(i, j, k,
                   f.d3(i, j, k) * gv + f.d2(i, j) * g.d1(k) + f.d2(i, k) * g.d1(j) +
                       f.d2(j, k) * g.d1(i) + f.d1(i) * g.d2(j, k) + f.d1(j) * g.d2(i, k) +
                       f.d1(k) * g.d2(i, j) + fv * g.d3(i, j, k));
    return h;
  }

  friend Jet operator/(const Jet& f, const Jet& g) { return f * reciprocal(g); }
  friend Jet operator/(double s, const Jet& g) { return reciprocal(g) * s; }

  friend Jet reciprocal(const Jet& g) {
    const double x = g.value_;
    if (x == 0.0) throw NumericalError("jet division singularity");
    const double r = 1.0 / x;
    return g.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
  }

  /// Largest absolute difference over value and all derivative slots.
  friend double max_abs_diff(const Jet& a, const Jet& b) {
    double m = std::abs(a.value_ - b.value_);
    for (std::size_t i = 0; i < a.d1_.size(); ++i) m = std::max(m, std::abs(a.d1_[i] - b.d1_[i]));
    for (std::size_t i = 0; i < a.d2_.size(); ++i) m = std::max(m, std::abs(a.d2_[i] - b.d2_[i]));
    for (std::size_t i = 0; i < a.d3_.size(); ++i) m = std::max(m, std::abs(a.d3_[i] - b.d3_[i]));
    return m;
  }

  friend bool operator==(const Jet&, const Jet&) = default;

 private:
  template <int>
  friend class Jet;

  static int checked_dim(int n) {
    if (n < 0 || n > kMaxDim) throw UsageError("jet dimension out of range");
    return n;
  }
  static int merged_dim(const Jet& a, const Jet& b) {
    if (a.n_ == b.n_ || b.n_ == 0) return a.n_;
    if (a.n_ == 0) return b.n_;
    throw UsageError("jet dimension mismatch");
  }
  static std::size_t idx(int n, int a, int b) { return static_cast<std::size_t>(a * n + b); }
  static std::size_t idx(int n, int a, int b, int c) { return static_cast<std::size_t>((a * n + b) * n + c); }

  void set2(int i, int j, double v) {
    d2_[static_cast<std::size_t>(i * kStride + j)] = v;
    d2_[static_cast<std::size_t>(j * kStride + i)] = v;
  }
  void set3(int i, int j, int k, double v) {
    const auto put = [this, v](int a, int b, int c) {
      d3_[static_cast<std::size_t>((a * kStride + b) * kStride + c)] = v;
    };
    put(i, j, k);
    put(i, k, j);
    put(j, i, k);
    put(j, k, i);
    put(k, i, j);
    put(k, j, i);
  }

  Jet& axpy(double s, const Jet& b) {
    n_ = merged_dim(*this, b);
    value_ += s * b.value_;
    for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] += s * b.d1_[i];
    for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] += s * b.d2_[i];
    for (std::size_t i = 0; i < d3_.size(); ++i) d3_[i] += s * b.d3_[i];
    return *this;
  }

  int n_ = 0;
  double value_ = 0.0;
  std::array<double, (Order >= 1 ? kMaxDim : 0)> d1_{};
  std::array<double, (Order >= 2 ? kMaxDim * kMaxDim : 0)> d2_{};
  std::array<double, (Order >= 3 ? kMaxDim * kMaxDim * kMaxDim : 0)> d3_{};
};

using Jet3 = Jet<3>;

template <int Order>
double pivot_magnitude(const Jet<Order>& x) {
  return std::abs(x.value());
}

template <int Order>
Jet<Order> exp(const Jet<Order>& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e, e);
}

template <int Order>
Jet<Order> log(const Jet<Order>& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw NumericalError("log: argument must be positive");
  const double r = 1.0 / x;
  return a.compose(std::log(x), r, -r * r, 2.0 * r * r * r);
}

template <int Order>
Jet<Order> sin(const Jet<Order>& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose(s, c, -s, -c);
}

template <int Order>
Jet<Order> cos(const Jet<Order>& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose(c, -s, -c, s);
}

/// a^p for a real exponent. Negative bases need an integer exponent; a zero
/// base needs every derivative factor actually used to stay finite.
template <int Order>
Jet<Order> pow(const Jet<Order>& a, double p) {
  const double x = a.value();
  const bool integral = std::floor(p) == p;
  if (x < 0.0 && !integral) throw NumericalError("pow: negative base with non-integer exponent");
  std::array<double, 4> f{};
  double coeff = 1.0;
  for (int k = 0; k <= 3; ++k) {
    if (k > 0) coeff *= p - (k - 1);
    if (coeff == 0.0) {
      f[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    if (x == 0.0 && p - k < 0.0 && k <= Order) throw NumericalError("pow: derivative singular at zero base");
    f[static_cast<std::size_t>(k)] = k <= Order ? coeff * std::pow(x, p - k) : 0.0;
  }
  return a.compose(f[0], f[1], f[2], f[3]);
}

template <int Order>
Jet<Order> pow(const Jet<Order>& a, const Jet<Order>& b) {
  if (!(a.value() > 0.0)) throw NumericalError("pow: base must be positive for a variable exponent");
  return exp(b * log(a));
}

template <int Order>
Jet<Order> sqrt(const Jet<Order>& a) {
  if (!(a.value() > 0.0)) throw NumericalError("sqrt: argument must be positive");
  return pow(a, 0.5);
}

}  // namespace weylcheck
