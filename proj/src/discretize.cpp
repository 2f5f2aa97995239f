#include "mixtrans/discretize.hpp"

#include <algorithm>
#include <cmath>

namespace mixtrans {

Discretization discretize_quantiles(std::span<const double> values, int K) {
  if (K < 2) throw std::domain_error("discretize: K must be at least 2");
  if (values.empty()) throw std::domain_error("discretize: empty series");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error("discretize: non-finite value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  Discretization out;
  // For observed values, v > edge_j exactly when v exceeds the lower order
  // statistic used by the type-7 interpolation, so thresholds are taken from
  // integer positions.
  std::vector<double> lower(static_cast<std::size_t>(K) - 1);
  for (int j = 1; j < K; ++j) {
    const std::size_t lo = (n - 1) * static_cast<std::size_t>(j) / static_cast<std::size_t>(K);
    lower[static_cast<std::size_t>(j) - 1] = sorted[lo];
    out.edges.push_back(quantile(sorted, static_cast<double>(j) / K));
  }
  std::vector<int> states;
  states.reserve(n);
  for (double v : values) {
    int s = 0;
    for (double e : lower) s += v > e ? 1 : 0;
    states.push_back(s);
  }
  const auto [mn, mx] = std::minmax_element(states.begin(), states.end());
  out.degenerate = *mn == *mx;
  out.states = StateSequence(std::move(states), K);
  return out;
}

}  // namespace mixtrans
