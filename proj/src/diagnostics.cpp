#include "mixtrans/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixtrans {

namespace {

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double var_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

std::size_t min_length(const std::vector<std::vector<double>>& chains) {
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) n = std::min(n, c.size());
  return chains.empty() ? 0 : n;
}

}  // namespace

std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::vector<double> out(max_lag + 1, 0.0);
  if (n < 2) return out;
  const double m = mean_of(x);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - m;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;
  if (c0 <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  for (std::size_t lag = 0; lag <= max_lag && lag < n; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
    out[lag] = s / c0;
  }
  return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  const std::size_t n = min_length(chains);
  if (n < 4) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t half = n / 2;
  std::vector<std::vector<double>> parts;
  for (const auto& c : chains) {
    // Drop the first draw of odd-length chains so both halves match.
    const std::size_t start = c.size() - 2 * half;
    parts.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(start),
                       c.begin() + static_cast<std::ptrdiff_t>(start + half));
    parts.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(start + half), c.end());
  }
  const double m = static_cast<double>(parts.size());
  const double len = static_cast<double>(half);
  std::vector<double> means;
  double W = 0.0;
  for (const auto& p : parts) {
    means.push_back(mean_of(p));
    W += var_of(p);
  }
  W /= m;
  const double B = len * var_of(means);
  if (W <= 0.0) return B <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (len - 1.0) / len * W + B / len;
  return std::sqrt(var_plus / W);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  const std::size_t n = min_length(chains);
  const std::size_t m = chains.size();
  if (n < 4) return std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> trimmed;
  for (const auto& c : chains) trimmed.emplace_back(c.end() - static_cast<std::ptrdiff_t>(n), c.end());

  std::vector<double> means;
  double W = 0.0;
  for (const auto& c : trimmed) {
    means.push_back(mean_of(c));
    W += var_of(c);
  }
  W /= static_cast<double>(m);
  const double dn = static_cast<double>(n);
  const double B = m > 1 ? dn * var_of(means) : 0.0;
  const double var_plus = (dn - 1.0) / dn * W + B / dn;
  const double total = dn * static_cast<double>(m);
  if (!(var_plus > 0.0)) return total;

  const std::size_t max_lag = n - 1;
  std::vector<double> acov_mean(max_lag + 1, 0.0);
  for (const auto& c : trimmed) {
    const auto rho = autocorrelation(c, max_lag);
    const double v = var_of(c) * (dn - 1.0) / dn;
    for (std::size_t k = 0; k <= max_lag; ++k) acov_mean[k] += rho[k] * v;
  }
  for (double& a : acov_mean) a /= static_cast<double>(m);

  auto rho_hat = [&](std::size_t k) { return 1.0 - (W - acov_mean[k]) / var_plus; };
  // Sum consecutive pairs while positive, enforcing monotone decrease.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 <= max_lag; k += 2) {
    double pair = rho_hat(k) + rho_hat(k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

}  // namespace mixtrans
