#pragma once

// Gauss-Jordan inversion shared by plain doubles and jets. Pivots are chosen
// on the magnitude of the value part, so the same elimination sequence is
// applied to a jet matrix and to its matrix of values.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "weylcheck/error.hpp"

namespace weylcheck::detail {

inline double pivot_magnitude(double x) { return std::abs(x); }

/// Invert the row-major n x n matrix `m`. `one` and `zero` supply the unit and
/// zero elements of the scalar type.
template <typename Scalar>
std::vector<Scalar> invert(std::vector<Scalar> m, int n, const Scalar& zero, const Scalar& one) {
  const auto at = [n](int r, int c) { return static_cast<std::size_t>(r * n + c); };
  std::vector<Scalar> inv(static_cast<std::size_t>(n * n), zero);
  for (int i = 0; i < n; ++i) inv[at(i, i)] = one;

  double scale = 0.0;
  for (const auto& x : m) scale = std::max(scale, pivot_magnitude(x));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalError("singular metric");

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (pivot_magnitude(m[at(r, col)]) > pivot_magnitude(m[at(pivot, col)])) pivot = r;
    if (pivot_magnitude(m[at(pivot, col)]) <= 1e-13 * scale) throw NumericalError("singular metric");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(m[at(col, c)], m[at(pivot, c)]);
        std::swap(inv[at(col, c)], inv[at(pivot, c)]);
      }
    }
    const Scalar p = m[at(col, col)];
    for (int c = 0; c < n; ++c) {
      m[at(col, c)] = m[at(col, c)] / p;
      inv[at(col, c)] = inv[at(col, c)] / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Scalar factor = m[at(r, col)];
      for (int c = 0; c < n; ++c) {
        m[at(r, c)] = m[at(r, c)] - factor * m[at(col, c)];
        inv[at(r, c)] = inv[at(r, c)] - factor * inv[at(col, c)];
      }
    }
  }
  return inv;
}

}  // namespace weylcheck::detail
