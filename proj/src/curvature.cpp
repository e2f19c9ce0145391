#include "weylcheck/curvature.hpp"

#include <algorithm>

#include "weylcheck/linear_solve.hpp"

namespace weylcheck {
namespace {

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

constexpr std::size_t kParallelThreshold = 1024;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Slots with_derivative_slot(const Slots& slots) {
  Slots out{Variance::down};
  out.insert(out.end(), slots.begin(), slots.end());
  return out;
}

// Order-1 jets of every component of a field, in flat component order.
std::vector<Jet1> to_jets(const TensorField& field, int n) {
  const std::size_t count = field.value.size();
  std::vector<Jet1> out;
  out.reserve(count);
  const auto v = field.value.data();
  const auto d = field.partials.data();
  std::array<double, kMaxDim> grad{};
  for (std::size_t c = 0; c < count; ++c) {
    for (int i = 0; i < n; ++i) grad[sz(i)] = d[sz(i) * count + c];
    out.push_back(Jet1::from_derivatives(n, v[c], std::span<const double>(grad.data(), sz(n))));
  }
  return out;
}

TensorField from_jets(const std::vector<Jet1>& jets, int n, Slots slots) {
  TensorField f;
  f.value = slots.empty() ? TensorValue::scalar(0.0) : TensorValue(n, slots);
  f.partials = TensorValue(n, with_derivative_slot(slots));
  const std::size_t count = f.value.size();
  auto v = f.value.data();
  auto d = f.partials.data();
  for (std::size_t c = 0; c < count; ++c) {
    v[c] = jets[c].value();
    for (int i = 0; i < n; ++i) d[sz(i) * count + c] = jets[c].d1(i);
  }
  return f;
}

// (A wedge B)_{iklm} accumulated into `out` with weight `w`; no symmetry checks.
void add_kulkarni_nomizu(TensorValue& out, const TensorValue& a, const TensorValue& b, double w) {
  const int n = out.dim();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          out(i, k, l, m) += w * (a(i, m) * b(k, l) - a(k, m) * b(i, l) - a(i, l) * b(k, m) + a(k, l) * b(i, m));
}

}  // namespace

TensorField TensorField::constant(TensorValue value) {
  TensorField f;
  const int n = value.dim();
  f.partials = TensorValue(n, with_derivative_slot(value.variance()));
  f.value = std::move(value);
  return f;
}

TensorField MetricJets::metric_field() const {
  TensorField f{TensorValue(n, down(2)), TensorValue(n, down(3))};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet3& j = g[sz(a * n + b)];
      f.value(a, b) = j.value();
      for (int e = 0; e < n; ++e) f.partials(e, a, b) = j.d1(e);
    }
  return f;
}

TensorField MetricJets::inverse_field() const {
  TensorField f{TensorValue(n, up(2)), TensorValue(n, {Variance::down, Variance::up, Variance::up})};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet2& j = g_inv[sz(a * n + b)];
      f.value(a, b) = j.value();
      for (int e = 0; e < n; ++e) f.partials(e, a, b) = j.d1(e);
    }
  return f;
}

MetricJets evaluate_metric(const MetricModel& model, const ChartPoint& point) {
  MetricJets m;
  m.n = model.dim();
  m.g = model.metric_jet(point);
  std::vector<Jet2> low;
  low.reserve(m.g.size());
  for (const Jet3& j : m.g) low.push_back(j.truncate<2>());
  m.g_inv = detail::invert(std::move(low), m.n, Jet2::constant(m.n, 0.0), Jet2::constant(m.n, 1.0));
  return m;
}

Connection christoffel(const MetricJets& metric) {
  const int n = metric.n;
  // dg[(e * n + a) * n + b] = d_e g_{ab}
  std::vector<Jet2> dg;
  dg.reserve(sz(n * n * n));
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg.push_back(metric.g[sz(a * n + b)].partial(e));
  const auto d = [&](int e, int a, int b) -> const Jet2& { return dg[sz((e * n + a) * n + b)]; };

  Connection c{TensorValue(n, {Variance::up, Variance::down, Variance::down}),
               TensorValue(n, {Variance::down, Variance::up, Variance::down, Variance::down}),
               TensorValue(n, {Variance::down, Variance::down, Variance::up, Variance::down, Variance::down})};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = b; cc < n; ++cc) {
        Jet2 sum = Jet2::constant(n, 0.0);
        for (int dd = 0; dd < n; ++dd)
          sum += metric.g_inv[sz(a * n + dd)] * (d(b, dd, cc) + d(cc, dd, b) - d(dd, b, cc));
        sum *= 0.5;
        for (auto [x, y] : {std::pair{b, cc}, std::pair{cc, b}}) {
          c.gamma(a, x, y) = sum.value();
          for (int e = 0; e < n; ++e) {
            c.d_gamma(e, a, x, y) = sum.d1(e);
            for (int f = 0; f < n; ++f) c.dd_gamma(e, f, a, x, y) = sum.d2(e, f);
          }
        }
      }
  return c;
}

Connection christoffel(const MetricModel& model, const ChartPoint& point) {
  return christoffel(evaluate_metric(model, point));
}

MixedRiemann riemann_from_connection(const Connection& conn) {
  const int n = conn.dim();
  const TensorValue& G = conn.gamma;
  const TensorValue& dG = conn.d_gamma;
  const TensorValue& ddG = conn.dd_gamma;
  MixedRiemann r{TensorValue(n, {Variance::up, Variance::down, Variance::down, Variance::down}),
                 TensorValue(n, {Variance::down, Variance::up, Variance::down, Variance::down, Variance::down})};

  const int pairs = n * n;
#pragma omp parallel for if (r.partials.size() >= kParallelThreshold)
  for (int ab = 0; ab < pairs; ++ab) {
    const int a = ab / n;
    const int b = ab % n;
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        double v = dG(c, a, d, b) - dG(d, a, c, b);
        for (int e = 0; e < n; ++e) v += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
        r.value(a, b, c, d) = v;
        for (int f = 0; f < n; ++f) {
          double w = ddG(f, c, a, d, b) - ddG(f, d, a, c, b);
          for (int e = 0; e < n; ++e)
            w += dG(f, a, c, e) * G(e, d, b) + G(a, c, e) * dG(f, e, d, b) - dG(f, a, d, e) * G(e, c, b) -
                 G(a, d, e) * dG(f, e, c, b);
          r.partials(f, a, b, c, d) = w;
        }
      }
  }
  return r;
}

CurvatureFields riemann_ricci_scalar(const Connection& connection, const TensorField& g, const TensorField& g_inv) {
  const int n = connection.dim();
  const MixedRiemann mixed = riemann_from_connection(connection);
  const auto rm = to_jets(TensorField{mixed.value, mixed.partials}, n);
  const auto gj = to_jets(g, n);
  const auto gi = to_jets(g_inv, n);
  const auto at4 = [n](int a, int b, int c, int d) { return sz(((a * n + b) * n + c) * n + d); };
  const auto at2 = [n](int a, int b) { return sz(a * n + b); };

  std::vector<Jet1> lowered(sz(n * n * n * n), Jet1::constant(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet1 s = Jet1::constant(n, 0.0);
          for (int e = 0; e < n; ++e) s += gj[at2(a, e)] * rm[at4(e, b, c, d)];
          lowered[at4(a, b, c, d)] = s;
        }

  std::vector<Jet1> ricci(sz(n * n), Jet1::constant(n, 0.0));
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      Jet1 s = Jet1::constant(n, 0.0);
      for (int a = 0; a < n; ++a) s += rm[at4(a, b, a, d)];
      ricci[at2(b, d)] = s;
    }

  Jet1 scalar = Jet1::constant(n, 0.0);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) scalar += gi[at2(b, d)] * ricci[at2(b, d)];

  return {from_jets(lowered, n, down(4)), from_jets(ricci, n, down(2)), from_jets({scalar}, n, {})};
}

TensorField weyl(const CurvatureFields& curvature, const TensorField& g) {
  const int n = g.value.dim();
  if (n < 4) throw UsageError("Weyl undefined");
  const auto R4 = to_jets(curvature.riemann, n);
  const auto Ric = to_jets(curvature.ricci, n);
  const Jet1 R = to_jets(curvature.scalar, n).front();
  const auto G = to_jets(g, n);
  const auto at2 = [n](int a, int b) { return sz(a * n + b); };
  const double c1 = 1.0 / (n - 2);
  const double c2 = 1.0 / ((n - 1) * (n - 2));

  std::vector<Jet1> C;
  C.reserve(R4.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          const Jet1 ricci_part = G[at2(j, l)] * Ric[at2(k, m)] - G[at2(j, m)] * Ric[at2(k, l)] +
                                  G[at2(k, m)] * Ric[at2(j, l)] - G[at2(k, l)] * Ric[at2(j, m)];
          const Jet1 scalar_part = R * (G[at2(j, l)] * G[at2(k, m)] - G[at2(j, m)] * G[at2(k, l)]);
          C.push_back(R4[sz(((j * n + k) * n + l) * n + m)] - c1 * ricci_part + c2 * scalar_part);
        }
  return from_jets(C, n, down(4));
}

TensorValue covariant_derivative(const TensorField& field, const Connection& conn) {
  const int n = conn.dim();
  const int rank = field.value.rank();
  if (rank > kMaxRank - 1) throw UsageError("covariant derivative would exceed the maximum rank");
  if (field.partials.rank() != rank + 1 || field.partials.dim() != n)
    throw UsageError("missing derivative data");
  TensorValue out(n, with_derivative_slot(field.value.variance()));
  const auto total = static_cast<std::ptrdiff_t>(out.size());
  const TensorValue& G = conn.gamma;
  auto dst = out.data();

#pragma omp parallel for if (out.size() >= kParallelThreshold)
  for (std::ptrdiff_t flat = 0; flat < total; ++flat) {
    const MultiIndex o = out.unravel(static_cast<std::size_t>(flat));
    double v = field.partials.at(o);
    const int i = o[0];
    MultiIndex t{};
    for (int s = 0; s < rank; ++s) t[sz(s)] = o[sz(s + 1)];
    for (int s = 0; s < rank; ++s) {
      const int own = t[sz(s)];
      const bool lower = field.value.variance(s) == Variance::down;
      for (int p = 0; p < n; ++p) {
        t[sz(s)] = p;
        const double tp = field.value.at(t);
        v += lower ? -G(p, i, own) * tp : G(own, i, p) * tp;
      }
      t[sz(s)] = own;
    }
    dst[static_cast<std::size_t>(flat)] = v;
  }
  return out;
}

TensorValue gamma_tensor(const TensorValue& weyl, const TensorValue& electric, const TensorValue& u_down,
                         const TensorValue& g) {
  const int n = weyl.dim();
  if (n < 4) throw UsageError("Weyl undefined");
  TensorValue uu(n, down(2));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) uu(a, b) = u_down(a) * u_down(b);
  const double w = 1.0 / (n - 3);
  return weyl - ((n - 2) * w) * kulkarni_nomizu(uu, electric) - w * kulkarni_nomizu(g, electric);
}

CurvatureBundle build_bundle(const MetricModel& model, const ChartPoint& point) {
  const int n = model.dim();
  if (n < 4) throw UsageError("Weyl undefined");
  const MetricJets mj = evaluate_metric(model, point);

  CurvatureBundle b;
  b.point = point;
  b.n = n;
  b.metric_class = model.expected_class();
  b.expected_failures = model.expected_failures();

  const TensorField gf = mj.metric_field();
  const TensorField gif = mj.inverse_field();
  b.g = gf.value;
  b.g_inv = gif.value;
  b.connection = christoffel(mj);

  const CurvatureFields curv = riemann_ricci_scalar(b.connection, gf, gif);
  b.riemann = curv.riemann;
  b.ricci = curv.ricci;
  b.scalar_curvature = curv.scalar.value.value();
  b.nabla_riemann = covariant_derivative(curv.riemann, b.connection);

  const TensorField wf = weyl(curv, gf);
  b.weyl = wf.value;
  b.nabla_weyl = covariant_derivative(wf, b.connection);

  b.div_weyl = TensorValue(n, down(3));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) s += b.g_inv(p, q) * b.nabla_weyl(p, i, k, m, q);
        b.div_weyl(i, k, m) = s;
      }

  // Velocity: constant contravariant components in the comoving chart.
  b.u_up = TensorValue(n, up(1));
  for (int a = 0; a < n; ++a) b.u_up(a) = model.u_up()[sz(a)];
  TensorField u_down_field{TensorValue(n, down(1)), TensorValue(n, down(2))};
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      u_down_field.value(a) += b.g(a, c) * b.u_up(c);
      for (int e = 0; e < n; ++e) u_down_field.partials(e, a) += gf.partials(e, a, c) * b.u_up(c);
    }
  b.u_down = u_down_field.value;
  b.nabla_u = covariant_derivative(u_down_field, b.connection);

  const TensorValue nabla_u_up = covariant_derivative(TensorField::constant(b.u_up), b.connection);
  double divergence = 0.0;
  for (int k = 0; k < n; ++k) divergence += nabla_u_up(k, k);
  b.phi = divergence / (n - 1);

  // d_i phi = d_i Gamma^k_{kc} u^c / (n - 1), since d u^c = 0.
  b.dphi = TensorValue(n, down(1));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < n; ++c) s += b.connection.d_gamma(i, k, k, c) * b.u_up(c);
    b.dphi(i) = s / (n - 1);
  }

  TensorField e_field{TensorValue(n, down(2)), TensorValue(n, down(3))};
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
          const double w = b.u_up(j) * b.u_up(m);
          if (w == 0.0) continue;
          e_field.value(k, l) += w * wf.value(j, k, l, m);
          for (int e = 0; e < n; ++e) e_field.partials(e, k, l) += w * wf.partials(e, j, k, l, m);
        }
  b.electric = e_field.value;
  b.nabla_electric = covariant_derivative(e_field, b.connection);

  b.gamma_tensor = gamma_tensor(b.weyl, b.electric, b.u_down, b.g);

  const double w = 1.0 / (n - 3);
  std::vector<TensorValue> slices;
  slices.reserve(sz(n));
  for (int p = 0; p < n; ++p) {
    TensorValue slice = b.nabla_weyl.slice_first(p);
    TensorValue d_uu(n, down(2));
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) d_uu(a, c) = b.nabla_u(p, a) * b.u_down(c) + b.u_down(a) * b.nabla_u(p, c);
    TensorValue uu(n, down(2));
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) uu(a, c) = b.u_down(a) * b.u_down(c);
    const TensorValue dE = b.nabla_electric.slice_first(p);
    add_kulkarni_nomizu(slice, d_uu, b.electric, -(n - 2) * w);
    add_kulkarni_nomizu(slice, uu, dE, -(n - 2) * w);
    add_kulkarni_nomizu(slice, b.g, dE, -w);
    slices.push_back(std::move(slice));
  }
  b.nabla_gamma = stack_first(slices, Variance::down);

  double u_dphi = 0.0;
  for (int p = 0; p < n; ++p) u_dphi += b.u_up(p) * b.dphi(p);
  b.xi = (n - 1) * (u_dphi + b.phi * b.phi);

  b.v_up = TensorValue(n, up(1));
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) b.v_up(k) += (b.g_inv(k, m) + b.u_up(k) * b.u_up(m)) * b.dphi(m);
  b.v_down = raise_lower(b.v_up, 0, b.g, Direction::down);
  return b;
}

std::vector<BundleOutcome> build_bundles(const MetricModel& model, std::span<const ChartPoint> points) {
  std::vector<BundleOutcome> out(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& slot = out[static_cast<std::size_t>(i)];
    slot.point = points[static_cast<std::size_t>(i)];
    try {
      slot.bundle = build_bundle(model, slot.point);
    } catch (const NumericalError& e) {
      slot.error = e.what();
    }
  }
  return out;
}

}  // namespace weylcheck
