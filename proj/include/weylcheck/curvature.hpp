#pragma once

// From metric jets to every curvature quantity at a chart point.
//
// Conventions: signature (-, +, ..., +);
//   Gamma^a_{bc} = 1/2 g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc})
//   R^a_{bcd}    = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
//   R_{bd}       = R^a_{bad},  R = g^{bd} R_{bd}
// Derivative slots always come first: nabla_weyl(i, j, k, l, m) = nabla_i C_{jklm}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylcheck/jet.hpp"
#include "weylcheck/metric_models.hpp"
#include "weylcheck/tensor.hpp"

namespace weylcheck {

/// Tensor values plus first coordinate derivatives; partials(i, ...) = d_i value(...).
struct TensorField {
  TensorValue value;
  TensorValue partials;

  /// Field with vanishing coordinate derivatives.
  static TensorField constant(TensorValue value);
};

struct Connection {
  TensorValue gamma;     // Gamma^a_{bc}
  TensorValue d_gamma;   // d_e Gamma^a_{bc}, slots (e, a, b, c)
  TensorValue dd_gamma;  // d_e d_f Gamma^a_{bc}, slots (e, f, a, b, c)

  int dim() const { return gamma.dim(); }
};

struct MetricJets {
  int n = 0;
  MetricJet g;                  // g_{ab} through third derivatives
  std::vector<Jet<2>> g_inv;    // g^{ab} through second derivatives

  TensorField metric_field() const;
  TensorField inverse_field() const;
};

/// Metric and inverse-metric jets at a point. NumericalError "singular metric"
/// if the metric cannot be inverted there.
MetricJets evaluate_metric(const MetricModel& model, const ChartPoint& point);

/// Levi-Civita connection with its first and second coordinate derivatives.
Connection christoffel(const MetricJets& metric);
Connection christoffel(const MetricModel& model, const ChartPoint& point);

/// R^a_{bcd} and d_e R^a_{bcd} (slots (e, a, b, c, d)).
struct MixedRiemann {
  TensorValue value;
  TensorValue partials;
};
MixedRiemann riemann_from_connection(const Connection& connection);

struct CurvatureFields {
  TensorField riemann;  // R_{abcd}
  TensorField ricci;    // R_{bd}
  TensorField scalar;   // R
};

CurvatureFields riemann_ricci_scalar(const Connection& connection, const TensorField& g, const TensorField& g_inv);

/// Weyl tensor C_{jklm} with coordinate derivatives. UsageError
/// "Weyl undefined" for n < 4.
TensorField weyl(const CurvatureFields& curvature, const TensorField& g);

/// Covariant derivative, derivative slot first; one connection term per slot
/// with the sign fixed by that slot's variance. The field must have rank <= 4.
TensorValue covariant_derivative(const TensorField& field, const Connection& connection);

struct CurvatureBundle {
  ChartPoint point;
  int n = 0;
  MetricClass metric_class = MetricClass::non_twisted;
  std::vector<std::string> expected_failures;

  TensorValue g;
  TensorValue g_inv;
  Connection connection;

  TensorField riemann;
  TensorValue nabla_riemann;  // nabla_e R_{abcd}
  TensorField ricci;
  double scalar_curvature = 0.0;

  TensorValue weyl;        // C_{jklm}
  TensorValue nabla_weyl;  // nabla_i C_{jklm}
  TensorValue div_weyl;    // nabla_p C_{ikm}^p

  TensorValue u_up;
  TensorValue u_down;
  TensorValue nabla_u;  // nabla_i u_j
  double phi = 0.0;     // nabla_k u^k / (n - 1)
  TensorValue dphi;     // nabla_i phi

  TensorValue electric;        // E_{kl} = u^j u^m C_{jklm}
  TensorValue nabla_electric;  // nabla_p E_{kl}

  TensorValue gamma_tensor;  // C minus the electric Kulkarni-Nomizu corrections
  TensorValue nabla_gamma;   // nabla_p Gamma_{iklm} by the product rule

  double xi = 0.0;  // (n - 1)(u^p nabla_p phi + phi^2)
  TensorValue v_up;    // (g^{km} + u^k u^m) nabla_m phi
  TensorValue v_down;
};

CurvatureBundle build_bundle(const MetricModel& model, const ChartPoint& point);

struct BundleOutcome {
  ChartPoint point;
  std::optional<CurvatureBundle> bundle;
  std::string error;  // set when the point had to be skipped
};

/// Bundles for many points, built in parallel; order follows `points`.
std::vector<BundleOutcome> build_bundles(const MetricModel& model, std::span<const ChartPoint> points);

/// Gamma_{iklm} = C - (n-2)/(n-3) KN(u u, E) - 1/(n-3) KN(g, E).
TensorValue gamma_tensor(const TensorValue& weyl, const TensorValue& electric, const TensorValue& u_down,
                         const TensorValue& g);

}  // namespace weylcheck
