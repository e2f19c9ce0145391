#pragma once

// Straightforward serial implementations of the parallel kernels. They take a
// different route to the same numbers (accumulate-over-inputs instead of
// gather-per-output, jet arithmetic instead of a hand-written product rule)
// and exist for tests and benchmarks.

#include <span>
#include <vector>

#include "weylcheck/curvature.hpp"
#include "weylcheck/tensor.hpp"

namespace weylcheck::reference {

TensorValue contract(const TensorValue& t, int slot_a, int slot_b);

/// Riemann via order-2 Christoffel jets and order-1 jet products.
MixedRiemann riemann_from_connection(const Connection& connection);

TensorValue covariant_derivative(const TensorField& field, const Connection& connection);

/// Single-threaded point sweep.
std::vector<BundleOutcome> build_bundles(const MetricModel& model, std::span<const ChartPoint> points);

}  // namespace weylcheck::reference
