#pragma once

// Convergence summaries over several chains of one scalar quantity.

#include <vector>

namespace mixtrans {

/// Split-chain potential scale reduction. Each chain is halved; returns 1 for
/// constant input and NaN when fewer than 4 draws per chain are available.
double split_rhat(const std::vector<std::vector<double>>& chains);

/// Effective sample size pooled over chains, using the initial positive
/// sequence truncation of the chain-averaged autocorrelations.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

/// Autocorrelation of one series at lags 0..max_lag.
std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag);

}  // namespace mixtrans
