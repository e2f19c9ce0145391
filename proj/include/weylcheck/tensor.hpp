#pragma once

// Dense component arrays with per-slot variance, and the handful of
// multilinear operations the curvature pipeline needs.
//
// Components are stored row-major: the last slot varies fastest. Every
// operation is a pure function of its arguments.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace weylcheck {

inline constexpr int kMinDim = 4;
inline constexpr int kMaxDim = 7;
inline constexpr int kMaxRank = 5;

enum class Variance : unsigned char { up, down };

using Slots = std::vector<Variance>;

/// Helpers for spelling variance lists: `down(2)` is {down, down}.
Slots down(int count);
Slots up(int count);

using MultiIndex = std::array<int, kMaxRank>;

class TensorValue {
 public:
  TensorValue() = default;

  /// Zero tensor of dimension n with the given slot variances.
  TensorValue(int n, Slots variance);

  static TensorValue scalar(double value);
  static TensorValue zeros(int n, Slots variance) { return {n, std::move(variance)}; }
  static TensorValue kronecker(int n);  // delta^a_b, slots (up, down)

  int dim() const { return n_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const Slots& variance() const { return variance_; }
  Variance variance(int slot) const { return variance_.at(static_cast<std::size_t>(slot)); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  template <typename... I>
  double& operator()(I... idx) {
    return data_[offset_of(static_cast<int>(idx)...)];
  }
  template <typename... I>
  double operator()(I... idx) const {
    return data_[offset_of(static_cast<int>(idx)...)];
  }

  double& at(const MultiIndex& idx) { return data_[offset(idx)]; }
  double at(const MultiIndex& idx) const { return data_[offset(idx)]; }

  std::size_t offset(const MultiIndex& idx) const;
  MultiIndex unravel(std::size_t flat) const;

  /// Value of a rank-0 tensor.
  double value() const;

  /// Fix the first slot to `index`, dropping it.
  TensorValue slice_first(int index) const;

  double max_abs() const;
  bool all_finite() const;

  TensorValue& operator+=(const TensorValue& other);
  TensorValue& operator-=(const TensorValue& other);
  TensorValue& operator*=(double factor);

  friend bool operator==(const TensorValue&, const TensorValue&) = default;

 private:
  template <typename... I>
  std::size_t offset_of(I... idx) const {
    std::size_t flat = 0;
    ((flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return flat;
  }
  void check_compatible(const TensorValue& other) const;

  int n_ = 0;
  Slots variance_;
  std::vector<double> data_ = std::vector<double>(1, 0.0);
};

TensorValue operator+(TensorValue a, const TensorValue& b);
TensorValue operator-(TensorValue a, const TensorValue& b);
TensorValue operator*(double factor, TensorValue a);

/// max |a - b| over components; shapes must match.
double max_abs_diff(const TensorValue& a, const TensorValue& b);

/// Stack same-shaped tensors along a new leading slot.
TensorValue stack_first(std::span<const TensorValue> parts, Variance variance);

/// Tensor (outer) product, slots of `a` first.
TensorValue outer(const TensorValue& a, const TensorValue& b);

/// Sum over a paired up/down slot. Throws UsageError "variance mismatch"
/// when both slots carry the same variance.
TensorValue contract(const TensorValue& t, int slot_a, int slot_b);

enum class Direction { up, down };

/// Flip the variance of one slot with the metric (`direction == down`, g has
/// slots (down, down)) or inverse metric (`direction == up`, slots (up, up)).
TensorValue raise_lower(const TensorValue& t, int slot, const TensorValue& metric,
                        Direction direction);

/// Inverse of a (down, down) metric; NumericalError "singular metric" when
/// the matrix cannot be inverted.
TensorValue inverse_metric(const TensorValue& g);

/// (A wedge B)_{iklm} = A_im B_kl - A_km B_il - A_il B_km + A_kl B_im.
/// Both factors must be symmetric rank-2 covariant tensors.
TensorValue kulkarni_nomizu(const TensorValue& a, const TensorValue& b);

struct CurvatureSymmetryResiduals {
  double first_pair = 0.0;   // T_iklm + T_kilm
  double second_pair = 0.0;  // T_iklm + T_ikml
  double pair_exchange = 0.0;  // T_iklm - T_lmik
  double first_bianchi = 0.0;  // T_iklm + T_klim + T_likm

  double max() const;
};

/// Diagnostic for the algebraic symmetries of a generalized curvature tensor.
CurvatureSymmetryResiduals generalized_curvature_check(const TensorValue& t);

/// Full self-contraction T_{a...} T^{a...} with every slot moved through g.
/// `g` is the covariant metric.
double norm_squared(const TensorValue& t, const TensorValue& g);

/// Same, with a precomputed inverse metric.
double norm_squared(const TensorValue& t, const TensorValue& g, const TensorValue& g_inv);

/// max |T_{ab} - T_{ba}| of a rank-2 tensor.
double asymmetry(const TensorValue& t);

}  // namespace weylcheck
