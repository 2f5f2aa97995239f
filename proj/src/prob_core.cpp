#include "mixtrans/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mixtrans {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

bool is_simplex(std::span<const double> v, double tol) {
  double total = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

ProbVec::ProbVec(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::domain_error("ProbVec: empty vector");
  if (!is_simplex(values_)) {
    throw std::domain_error("ProbVec: entries must be nonnegative and sum to 1");
  }
}

ProbVec ProbVec::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::domain_error("ProbVec::normalized: invalid weight");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::domain_error("ProbVec::normalized: zero total");
  for (double& w : weights) w /= total;
  return ProbVec(std::move(weights));
}

ProbVec ProbVec::uniform(std::size_t n) {
  return ProbVec(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVec ProbVec::point_mass(std::size_t n, std::size_t index) {
  std::vector<double> v(n, 0.0);
  v.at(index) = 1.0;
  return ProbVec(std::move(v));
}

StickFractions::StickFractions(std::vector<double> x) : x_(std::move(x)) {
  for (double v : x_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("StickFractions: fraction outside [0,1]");
    }
  }
}

ProbVec stick_break(const StickFractions& x) {
  const std::size_t J = x.size() + 1;
  std::vector<double> theta(J);
  double remaining = 1.0;
  for (std::size_t j = 0; j + 1 < J; ++j) {
    theta[j] = x[j] * remaining;
    remaining *= 1.0 - x[j];
  }
  theta[J - 1] = remaining;
  return ProbVec(std::move(theta));
}

StickFractions stick_unbreak(const ProbVec& theta) {
  const std::size_t J = theta.size();
  if (J < 2) throw std::domain_error("stick_unbreak: need at least 2 entries");
  std::vector<double> x(J - 1, 0.0);
  // Remaining mass is tracked as a tail sum rather than 1 - prefix to keep
  // full relative precision on small remainders.
  std::vector<double> tail(J + 1, 0.0);
  for (std::size_t j = J; j-- > 0;) tail[j] = tail[j + 1] + theta[j];
  for (std::size_t j = 0; j + 1 < J; ++j) {
    const double rest = tail[j];
    if (rest > 0.0) x[j] = std::clamp(theta[j] / rest, 0.0, 1.0);
  }
  return StickFractions(std::move(x));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6d747864u};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  // Marsaglia polar method; the spare variate is discarded so that the
  // stream position depends only on the number of calls.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RngStream::log_gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::domain_error("RngStream::log_gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // G(a) = G(a+1) * U^(1/a), in logs.
    const double boost = std::log(uniform()) / shape;
    return log_gamma(shape + 1.0) + boost;
  }
  // Marsaglia and Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double RngStream::gamma(double shape) { return std::exp(log_gamma(shape)); }

double RngStream::beta(double a, double b) {
  const double la = log_gamma(a);
  const double lb = log_gamma(b);
  const double m = std::max(la, lb);
  return std::exp(la - m) / (std::exp(la - m) + std::exp(lb - m));
}

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw std::domain_error("RngStream::index: empty range");
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

std::size_t sample_categorical(std::span<const double> log_weights,
                               RngStream& rng) {
  if (log_weights.empty()) {
    throw std::domain_error("sample_categorical: empty weights");
  }
  double m = kNegInf;
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw std::domain_error("sample_categorical: non-finite log weight");
    }
    m = std::max(m, lw);
  }
  if (m == kNegInf) {
    throw std::domain_error("sample_categorical: all weights are zero");
  }
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - m);
  double u = rng.uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights[i] - m);
    if (w > 0.0) last_positive = i;
    if (u < w) return i;
    u -= w;
  }
  return last_positive;
}

ProbVec sample_dirichlet(std::span<const double> alpha, RngStream& rng) {
  if (alpha.empty()) throw std::domain_error("sample_dirichlet: empty alpha");
  std::vector<double> lg(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) lg[i] = rng.log_gamma(alpha[i]);
  const double lse = log_sum_exp(lg);
  double total = 0.0;
  for (double& v : lg) {
    v = std::exp(v - lse);
    total += v;
  }
  for (double& v : lg) v /= total;
  return ProbVec(std::move(lg));
}

double quantile(std::vector<double> data, double p) {
  if (data.empty()) throw std::domain_error("quantile: empty data");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p outside [0,1]");
  std::sort(data.begin(), data.end());
  const double h = (static_cast<double>(data.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

}  // namespace mixtrans
