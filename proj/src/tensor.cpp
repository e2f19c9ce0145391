#include "weylcheck/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weylcheck/error.hpp"
#include "weylcheck/linear_solve.hpp"

namespace weylcheck {
namespace {

// Below this many output components the OpenMP fork costs more than the work.
constexpr std::size_t kParallelThreshold = 2048;

std::size_t ipow(int n, int rank) {
  std::size_t out = 1;
  for (int i = 0; i < rank; ++i) out *= static_cast<std::size_t>(n);
  return out;
}

void check_slot(const TensorValue& t, int slot) {
  if (slot < 0 || slot >= t.rank())
    throw UsageError("slot " + std::to_string(slot) + " out of range for rank " +
                     std::to_string(t.rank()));
}

void check_metric_shape(const TensorValue& g, int n) {
  if (g.rank() != 2 || g.dim() != n || g.variance(0) != g.variance(1))
    throw UsageError("metric must be a rank-2 tensor of matching dimension with equal slot variance");
}

}  // namespace

Slots down(int count) { return Slots(static_cast<std::size_t>(count), Variance::down); }
Slots up(int count) { return Slots(static_cast<std::size_t>(count), Variance::up); }

TensorValue::TensorValue(int n, Slots variance) : n_(n), variance_(std::move(variance)) {
  if (rank() > kMaxRank) throw UsageError("rank above " + std::to_string(kMaxRank));
  if (n < 1 || n > kMaxDim) throw UsageError("dimension out of range: " + std::to_string(n));
  data_.assign(ipow(n, rank()), 0.0);
}

TensorValue TensorValue::scalar(double value) {
  TensorValue t;
  t.n_ = 0;
  t.data_ = {value};
  return t;
}

TensorValue TensorValue::kronecker(int n) {
  TensorValue t(n, {Variance::up, Variance::down});
  for (int a = 0; a < n; ++a) t(a, a) = 1.0;
  return t;
}

std::size_t TensorValue::offset(const MultiIndex& idx) const {
  std::size_t flat = 0;
  for (int s = 0; s < rank(); ++s)
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]);
  return flat;
}

MultiIndex TensorValue::unravel(std::size_t flat) const {
  MultiIndex idx{};
  for (int s = rank() - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

double TensorValue::value() const {
  if (rank() != 0) throw UsageError("value() requires a rank-0 tensor");
  return data_[0];
}

TensorValue TensorValue::slice_first(int index) const {
  if (rank() == 0) throw UsageError("cannot slice a scalar");
  if (index < 0 || index >= n_) throw UsageError("slice index out of range");
  TensorValue out(n_, Slots(variance_.begin() + 1, variance_.end()));
  const std::size_t stride = out.size();
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(stride * static_cast<std::size_t>(index)),
              stride, out.data_.begin());
  if (out.rank() == 0) out.n_ = n_;
  return out;
}

double TensorValue::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool TensorValue::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

void TensorValue::check_compatible(const TensorValue& other) const {
  if (rank() != other.rank() || (rank() > 0 && n_ != other.n_) || variance_ != other.variance_)
    throw UsageError("tensor shape mismatch");
}

TensorValue& TensorValue::operator+=(const TensorValue& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

TensorValue& TensorValue::operator-=(const TensorValue& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

TensorValue& TensorValue::operator*=(double factor) {
  for (double& x : data_) x *= factor;
  return *this;
}

TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
TensorValue operator*(double factor, TensorValue a) { return a *= factor; }

double max_abs_diff(const TensorValue& a, const TensorValue& b) { return (a - b).max_abs(); }

TensorValue stack_first(std::span<const TensorValue> parts, Variance variance) {
  if (parts.empty()) throw UsageError("nothing to stack");
  const TensorValue& first = parts.front();
  const int n = first.rank() == 0 ? static_cast<int>(parts.size()) : first.dim();
  if (static_cast<int>(parts.size()) != n) throw UsageError("stack needs exactly n parts");
  Slots slots{variance};
  slots.insert(slots.end(), first.variance().begin(), first.variance().end());
  TensorValue out(n, std::move(slots));
  const std::size_t stride = first.size();
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].variance() != first.variance() || parts[p].size() != stride)
      throw UsageError("stack parts differ in shape");
    std::copy(parts[p].data().begin(), parts[p].data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(p * stride));
  }
  return out;
}

TensorValue outer(const TensorValue& a, const TensorValue& b) {
  if (a.rank() == 0) return a.value() * b;
  if (b.rank() == 0) return b.value() * a;
  if (a.dim() != b.dim()) throw UsageError("dimension mismatch in outer product");
  Slots slots = a.variance();
  slots.insert(slots.end(), b.variance().begin(), b.variance().end());
  TensorValue out(a.dim(), std::move(slots));
  auto dst = out.data();
  const auto as = a.data();
  const auto bs = b.data();
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j) dst[i * bs.size() + j] = as[i] * bs[j];
  return out;
}

TensorValue contract(const TensorValue& t, int slot_a, int slot_b) {
  check_slot(t, slot_a);
  check_slot(t, slot_b);
  if (slot_a == slot_b) throw UsageError("cannot contract a slot with itself");
  if (t.variance(slot_a) == t.variance(slot_b)) throw UsageError("variance mismatch");
  if (slot_a > slot_b) std::swap(slot_a, slot_b);

  const int n = t.dim();
  Slots slots;
  for (int s = 0; s < t.rank(); ++s)
    if (s != slot_a && s != slot_b) slots.push_back(t.variance(s));
  const int out_rank = static_cast<int>(slots.size());
  TensorValue out = out_rank == 0 ? TensorValue::scalar(0.0) : TensorValue(n, std::move(slots));

  const auto total = static_cast<std::ptrdiff_t>(out.size());
  auto dst = out.data();
#pragma omp parallel for if (out.size() >= kParallelThreshold)
  for (std::ptrdiff_t flat = 0; flat < total; ++flat) {
    const MultiIndex o = out_rank == 0 ? MultiIndex{} : out.unravel(static_cast<std::size_t>(flat));
    MultiIndex in{};
    for (int s = 0, k = 0; s < t.rank(); ++s)
      if (s != slot_a && s != slot_b) in[static_cast<std::size_t>(s)] = o[static_cast<std::size_t>(k++)];
    double sum = 0.0;
    for (int p = 0; p < n; ++p) {
      in[static_cast<std::size_t>(slot_a)] = p;
      in[static_cast<std::size_t>(slot_b)] = p;
      sum += t.at(in);
    }
    dst[static_cast<std::size_t>(flat)] = sum;
  }
  return out;
}

TensorValue inverse_metric(const TensorValue& g) {
  check_metric_shape(g, g.dim());
  const int n = g.dim();
  std::vector<double> m(g.data().begin(), g.data().end());
  const auto inv = detail::invert(std::move(m), n, 0.0, 1.0);
  const Variance flipped = g.variance(0) == Variance::down ? Variance::up : Variance::down;
  TensorValue out(n, {flipped, flipped});
  std::copy(inv.begin(), inv.end(), out.data().begin());
  return out;
}

TensorValue raise_lower(const TensorValue& t, int slot, const TensorValue& metric, Direction direction) {
  check_slot(t, slot);
  const int n = t.dim();
  check_metric_shape(metric, n);
  const Variance target = direction == Direction::up ? Variance::up : Variance::down;
  if (t.variance(slot) == target) throw UsageError("slot already has the requested variance");

  // Raising needs g^{ab}, lowering g_{ab}; a metric of the other kind is inverted first.
  const TensorValue m = metric.variance(0) == target ? metric : inverse_metric(metric);

  Slots slots = t.variance();
  slots[static_cast<std::size_t>(slot)] = target;
  TensorValue out(n, std::move(slots));
  const auto total = static_cast<std::ptrdiff_t>(out.size());
  auto dst = out.data();
#pragma omp parallel for if (out.size() >= kParallelThreshold)
  for (std::ptrdiff_t flat = 0; flat < total; ++flat) {
    MultiIndex idx = out.unravel(static_cast<std::size_t>(flat));
    const int a = idx[static_cast<std::size_t>(slot)];
    double sum = 0.0;
    for (int b = 0; b < n; ++b) {
      idx[static_cast<std::size_t>(slot)] = b;
      sum += m(a, b) * t.at(idx);
    }
    dst[static_cast<std::size_t>(flat)] = sum;
  }
  return out;
}

double asymmetry(const TensorValue& t) {
  if (t.rank() != 2) throw UsageError("asymmetry needs a rank-2 tensor");
  double worst = 0.0;
  for (int a = 0; a < t.dim(); ++a)
    for (int b = a + 1; b < t.dim(); ++b) worst = std::max(worst, std::abs(t(a, b) - t(b, a)));
  return worst;
}

TensorValue kulkarni_nomizu(const TensorValue& a, const TensorValue& b) {
  for (const TensorValue* f : {&a, &b}) {
    if (f->rank() != 2 || f->variance() != down(2)) throw UsageError("factor must be covariant rank 2");
    if (asymmetry(*f) > 1e-10) throw UsageError("asymmetric factor");
  }
  if (a.dim() != b.dim()) throw UsageError("dimension mismatch in Kulkarni-Nomizu product");
  const int n = a.dim();
  TensorValue out(n, down(4));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          out(i, k, l, m) = a(i, m) * b(k, l) - a(k, m) * b(i, l) - a(i, l) * b(k, m) + a(k, l) * b(i, m);
  return out;
}

double CurvatureSymmetryResiduals::max() const {
  return std::max({first_pair, second_pair, pair_exchange, first_bianchi});
}

CurvatureSymmetryResiduals generalized_curvature_check(const TensorValue& t) {
  if (t.rank() != 4 || t.variance() != down(4)) throw UsageError("curvature check needs a (0,4) tensor");
  const int n = t.dim();
  CurvatureSymmetryResiduals r;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          const double x = t(i, k, l, m);
          r.first_pair = std::max(r.first_pair, std::abs(x + t(k, i, l, m)));
          r.second_pair = std::max(r.second_pair, std::abs(x + t(i, k, m, l)));
          r.pair_exchange = std::max(r.pair_exchange, std::abs(x - t(l, m, i, k)));
          r.first_bianchi = std::max(r.first_bianchi, std::abs(x + t(k, l, i, m) + t(l, i, k, m)));
        }
  return r;
}

double norm_squared(const TensorValue& t, const TensorValue& g, const TensorValue& g_inv) {
  if (t.rank() == 0) return t.value() * t.value();
  TensorValue flipped = t;
  for (int s = 0; s < t.rank(); ++s) {
    flipped = flipped.variance(s) == Variance::down ? raise_lower(flipped, s, g_inv, Direction::up)
                                                    : raise_lower(flipped, s, g, Direction::down);
  }
  double sum = 0.0;
  const auto a = t.data();
  const auto b = flipped.data();
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm_squared(const TensorValue& t, const TensorValue& g) {
  return norm_squared(t, g, inverse_metric(g));
}

}  // namespace weylcheck
