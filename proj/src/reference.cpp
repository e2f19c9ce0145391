#include "weylcheck/reference.hpp"

#include "weylcheck/error.hpp"
#include "weylcheck/jet.hpp"

namespace weylcheck::reference {
namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

}  // namespace

TensorValue contract(const TensorValue& t, int slot_a, int slot_b) {
  if (slot_a < 0 || slot_b < 0 || slot_a >= t.rank() || slot_b >= t.rank() || slot_a == slot_b)
    throw UsageError("bad contraction slots");
  if (t.variance(slot_a) == t.variance(slot_b)) throw UsageError("variance mismatch");
  Slots slots;
  for (int s = 0; s < t.rank(); ++s)
    if (s != slot_a && s != slot_b) slots.push_back(t.variance(s));
  TensorValue out = slots.empty() ? TensorValue::scalar(0.0) : TensorValue(t.dim(), slots);

  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const MultiIndex in = t.unravel(flat);
    if (in[sz(slot_a)] != in[sz(slot_b)]) continue;
    MultiIndex o{};
    for (int s = 0, k = 0; s < t.rank(); ++s)
      if (s != slot_a && s != slot_b) o[sz(k++)] = in[sz(s)];
    if (slots.empty())
      out.data()[0] += t.at(in);
    else
      out.at(o) += t.at(in);
  }
  return out;
}

MixedRiemann riemann_from_connection(const Connection& conn) {
  using Jet1 = Jet<1>;
  using Jet2 = Jet<2>;
  const int n = conn.dim();
  std::vector<Jet2> G;
  G.reserve(sz(n * n * n));
  std::vector<double> d1(sz(n));
  std::vector<double> d2(sz(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        for (int e = 0; e < n; ++e) {
          d1[sz(e)] = conn.d_gamma(e, a, b, c);
          for (int f = 0; f < n; ++f) d2[sz(e * n + f)] = conn.dd_gamma(e, f, a, b, c);
        }
        G.push_back(Jet2::from_derivatives(n, conn.gamma(a, b, c), d1, d2));
      }
  const auto g = [&](int a, int b, int c) -> const Jet2& { return G[sz((a * n + b) * n + c)]; };

  MixedRiemann r{TensorValue(n, {Variance::up, Variance::down, Variance::down, Variance::down}),
                 TensorValue(n, {Variance::down, Variance::up, Variance::down, Variance::down, Variance::down})};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet1 v = g(a, d, b).partial(c) - g(a, c, b).partial(d);
          for (int e = 0; e < n; ++e)
            v += g(a, c, e).truncate<1>() * g(e, d, b).truncate<1>() -
                 g(a, d, e).truncate<1>() * g(e, c, b).truncate<1>();
          r.value(a, b, c, d) = v.value();
          for (int f = 0; f < n; ++f) r.partials(f, a, b, c, d) = v.d1(f);
        }
  return r;
}

TensorValue covariant_derivative(const TensorField& field, const Connection& conn) {
  const int n = conn.dim();
  const int rank = field.value.rank();
  Slots slots{Variance::down};
  slots.insert(slots.end(), field.value.variance().begin(), field.value.variance().end());
  TensorValue out(n, slots);
  if (field.partials.size() != out.size()) throw UsageError("missing derivative data");
  std::copy(field.partials.data().begin(), field.partials.data().end(), out.data().begin());

  // Scatter each component of T into every connection term it feeds.
  for (std::size_t flat = 0; flat < field.value.size(); ++flat) {
    const MultiIndex t = rank == 0 ? MultiIndex{} : field.value.unravel(flat);
    const double tv = field.value.data()[flat];
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < rank; ++s)
        for (int q = 0; q < n; ++q) {
          MultiIndex o{};
          o[0] = i;
          for (int r = 0; r < rank; ++r) o[sz(r + 1)] = t[sz(r)];
          o[sz(s + 1)] = q;
          // Down slot: -Gamma^{t_s}_{i q} T_{..t_s..}; up slot: +Gamma^{q}_{i t_s} T^{..t_s..}.
          const double coeff = field.value.variance(s) == Variance::down ? -conn.gamma(t[sz(s)], i, q)
                                                                          : conn.gamma(q, i, t[sz(s)]);
          out.at(o) += coeff * tv;
        }
  }
  return out;
}

std::vector<BundleOutcome> build_bundles(const MetricModel& model, std::span<const ChartPoint> points) {
  std::vector<BundleOutcome> out;
  out.reserve(points.size());
  for (const ChartPoint& p : points) {
    BundleOutcome o;
    o.point = p;
    try {
      o.bundle = build_bundle(model, p);
    } catch (const NumericalError& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace weylcheck::reference
