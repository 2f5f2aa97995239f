#pragma once

// Reference computations written independently of the library: direct
// log-gamma formulas, brute-force expansions and plain Monte Carlo using
// <random>. Tests compare library results against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline double log_multi_beta(const std::vector<double>& a) {
  double s = 0.0;
  double tot = 0.0;
  for (double x : a) {
    s += std::lgamma(x);
    tot += x;
  }
  return s - std::lgamma(tot);
}

inline double dirichlet_marginal(const std::vector<double>& alpha, const std::vector<std::int64_t>& n) {
  std::vector<double> post(alpha);
  for (std::size_t j = 0; j < n.size(); ++j) post[j] += static_cast<double>(n[j]);
  return log_multi_beta(post) - log_multi_beta(alpha);
}

// Sum of sequential predictive log probabilities of a category sequence.
inline double chain_rule_dirichlet(const std::vector<double>& alpha, const std::vector<int>& seq) {
  std::vector<double> n(alpha.size(), 0.0);
  const double a0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  double out = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto k = static_cast<std::size_t>(seq[t]);
    out += std::log((alpha[k] + n[k]) / (a0 + static_cast<double>(t)));
    n[k] += 1.0;
  }
  return out;
}

inline double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

struct Sbm {
  std::vector<double> pi1, pi3, gamma, delta;
  double eta = 1.0;
};

// Product over breaks of the three-way beta-binomial mixture.
inline double sbm_marginal(const Sbm& s, const std::vector<std::int64_t>& n) {
  double out = 0.0;
  for (std::size_t j = 0; j < s.pi1.size(); ++j) {
    double rest = 0.0;
    for (std::size_t h = j + 1; h < n.size(); ++h) rest += static_cast<double>(n[h]);
    const double nj = static_cast<double>(n[j]);
    auto g = [&](double a, double b) { return std::exp(log_beta_fn(a + nj, b + rest) - log_beta_fn(a, b)); };
    const double pi2 = 1.0 - s.pi1[j] - s.pi3[j];
    out += std::log(s.pi1[j] * g(1.0, s.eta) + pi2 * g(s.gamma[j], s.delta[j]) + s.pi3[j] * g(s.eta, 1.0));
  }
  return out;
}

inline double sdm_marginal(const std::vector<double>& alpha, double beta, const std::vector<std::int64_t>& n) {
  const std::size_t J = alpha.size();
  std::vector<double> lw(J);
  std::vector<double> terms(J);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> a(alpha);
    a[j] += beta;
    double w = 0.0;
    for (double x : a) w += std::lgamma(x);
    lw[j] = w;
    terms[j] = dirichlet_marginal(a, n);
  }
  const double m = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    z += std::exp(lw[j] - m);
    acc += std::exp(lw[j] - m + terms[j]);
  }
  return std::log(acc / z);
}

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

inline double gamma_draw(std::mt19937_64& g, double shape) {
  if (shape < 1.0) {
    std::gamma_distribution<double> d(shape + 1.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return d(g) * std::pow(u(g), 1.0 / shape);
  }
  std::gamma_distribution<double> d(shape, 1.0);
  return d(g);
}

inline double beta_draw(std::mt19937_64& g, double a, double b) {
  const double x = gamma_draw(g, a);
  const double y = gamma_draw(g, b);
  return x / (x + y);
}

// Monte Carlo estimate of E[prod_j theta_j^{n_j}] under the SBM prior.
inline Estimate sbm_marginal_mc(const Sbm& s, const std::vector<std::int64_t>& n, std::size_t draws,
                                std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0;
  double sum2 = 0.0;
  const std::size_t J = s.pi1.size() + 1;
  for (std::size_t d = 0; d < draws; ++d) {
    double remaining = 1.0;
    double logp = 0.0;
    for (std::size_t j = 0; j + 1 < J; ++j) {
      const double v = u(g);
      double x;
      if (v < s.pi1[j]) {
        x = beta_draw(g, 1.0, s.eta);
      } else if (v < s.pi1[j] + s.pi3[j]) {
        x = beta_draw(g, s.eta, 1.0);
      } else {
        x = beta_draw(g, s.gamma[j], s.delta[j]);
      }
      const double th = remaining * x;
      if (n[j] > 0) logp += static_cast<double>(n[j]) * std::log(th);
      remaining *= 1.0 - x;
    }
    if (n[J - 1] > 0) logp += static_cast<double>(n[J - 1]) * std::log(remaining);
    const double p = std::exp(logp);
    sum += p;
    sum2 += p * p;
  }
  const double m = sum / static_cast<double>(draws);
  const double var = sum2 / static_cast<double>(draws) - m * m;
  return {m, std::sqrt(std::max(var, 0.0) / static_cast<double>(draws))};
}

// All r-subsets of {1..L} in lexicographic order, built by recursion.
inline std::vector<std::vector<int>> subsets(int L, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back(cur);
      return;
    }
    for (int l = start; l <= L; ++l) {
      cur.push_back(l);
      rec(l + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

// Column index of a lagged-state tuple, first coordinate fastest.
inline std::size_t column_of(const std::vector<int>& states, int K) {
  std::size_t col = 0;
  std::size_t mult = 1;
  for (int s : states) {
    col += static_cast<std::size_t>(s) * mult;
    mult *= static_cast<std::size_t>(K);
  }
  return col;
}

// Batch-means standard error of the mean of an autocorrelated series.
inline Estimate batch_means(const std::vector<double>& x, std::size_t batches = 50) {
  const std::size_t b = x.size() / batches;
  std::vector<double> m(batches, 0.0);
  for (std::size_t i = 0; i < batches; ++i) {
    for (std::size_t j = 0; j < b; ++j) m[i] += x[i * b + j];
    m[i] /= static_cast<double>(b);
  }
  const double mean = std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(batches);
  double v = 0.0;
  for (double y : m) v += (y - mean) * (y - mean);
  v /= static_cast<double>(batches - 1);
  return {mean, std::sqrt(v / static_cast<double>(batches))};
}

inline Estimate iid_mean(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double v = 0.0;
  for (double y : x) v += (y - mean) * (y - mean);
  return {mean, std::sqrt(v / (n - 1.0) / n)};
}

}  // namespace oracle
