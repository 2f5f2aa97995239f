#pragma once

// Quantile binning of a continuous series into K ordered states.

#include <span>
#include <vector>

#include "mixtrans/tensor.hpp"

namespace mixtrans {

struct Discretization {
  StateSequence states;
  std::vector<double> edges;  // K - 1 type-7 sample quantiles at j / K
  bool degenerate = false;    // fewer than two distinct states were produced
};

/// Bins by the full-series quantiles at 1/K, ..., (K-1)/K. A value equal to
/// an edge goes to the lower bin. The assignment depends on ranks only, so
/// any strictly increasing transform of the input yields the same states.
Discretization discretize_quantiles(std::span<const double> values, int K);

}  // namespace mixtrans
