#include "mixtrans/priors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mixtrans {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw std::domain_error(std::string(what) + ": dimension mismatch (expected " +
                            std::to_string(expected) + ", got " +
                            std::to_string(got) + ")");
  }
}

void require_counts(const CountVector& n) {
  for (auto c : n) {
    if (c < 0) throw std::domain_error("negative count");
  }
}

double log_mvbeta(std::span<const double> a) {
  double s = 0.0;
  double total = 0.0;
  for (double v : a) {
    s += std::lgamma(v);
    total += v;
  }
  return s - std::lgamma(total);
}

// log g_j(a, b, n) with a* = a + n_j, b* = b + tail.
double log_g(double a, double b, double nj, double tail) {
  const double as = a + nj;
  const double bs = b + tail;
  return std::lgamma(a + b) - std::lgamma(as + bs) + std::lgamma(as) -
         std::lgamma(a) + std::lgamma(bs) - std::lgamma(b);
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

std::vector<double> tail_sums(const CountVector& n) {
  std::vector<double> tail(n.size() + 1, 0.0);
  for (std::size_t j = n.size(); j-- > 0;) {
    tail[j] = tail[j + 1] + static_cast<double>(n[j]);
  }
  return tail;
}

// Three log mixture weights of break j after observing counts.
std::array<double, 3> sbm_break_log_weights(const SbmSpec& s, std::size_t j,
                                            double nj, double tail) {
  return {safe_log(s.pi1[j]) + log_g(1.0, s.eta, nj, tail),
          safe_log(s.pi2(j)) + log_g(s.gamma[j], s.delta[j], nj, tail),
          safe_log(s.pi3[j]) + log_g(s.eta, 1.0, nj, tail)};
}

std::pair<double, double> sbm_shapes(const SbmSpec& s, std::size_t j,
                                     std::size_t component) {
  switch (component) {
    case 0:
      return {1.0, s.eta};
    case 1:
      return {s.gamma[j], s.delta[j]};
    default:
      return {s.eta, 1.0};
  }
}

ProbVec sbm_draw(const SbmSpec& spec, const CountVector& counts, RngStream& rng) {
  const std::size_t breaks = spec.pi1.size();
  const auto tail = tail_sums(counts);
  std::vector<double> x(breaks);
  for (std::size_t j = 0; j < breaks; ++j) {
    const double nj = static_cast<double>(counts[j]);
    const auto lw = sbm_break_log_weights(spec, j, nj, tail[j + 1]);
    const std::size_t comp = sample_categorical(lw, rng);
    const auto [a, b] = sbm_shapes(spec, j, comp);
    x[j] = rng.beta(a + nj, b + tail[j + 1]);
  }
  return stick_break(StickFractions(std::move(x)));
}

}  // namespace

DirichletSpec DirichletSpec::symmetric(std::size_t J, double shape) {
  return DirichletSpec{std::vector<double>(J, shape)};
}

void DirichletSpec::validate() const {
  if (alpha.empty()) throw std::domain_error("DirichletSpec: empty alpha");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::domain_error("DirichletSpec: alpha must be positive");
    }
  }
}

void SdmSpec::validate() const {
  DirichletSpec{alpha}.validate();
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw std::domain_error("SdmSpec: beta must be >= 1");
  }
}

void SbmSpec::validate() const {
  const std::size_t n = pi1.size();
  if (pi3.size() != n || gamma.size() != n || delta.size() != n) {
    throw std::domain_error("SbmSpec: pi1, pi3, gamma, delta lengths differ");
  }
  if (!(eta > 0.0)) throw std::domain_error("SbmSpec: eta must be positive");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(pi1[j] >= 0.0) || !(pi3[j] >= 0.0) || pi1[j] + pi3[j] > 1.0 + 1e-12) {
      throw std::domain_error("SbmSpec: invalid mixture probabilities at position " +
                              std::to_string(j));
    }
    if (!(gamma[j] > 0.0) || !(delta[j] > 0.0)) {
      throw std::domain_error("SbmSpec: gamma and delta must be positive");
    }
  }
}

std::size_t prior_size(const WeightPrior& prior) {
  return std::visit([](const auto& p) { return p.size(); }, prior);
}

ProbVec prior_sample(const WeightPrior& prior, RngStream& rng) {
  return std::visit(
      [&](const auto& p) -> ProbVec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DirichletSpec>) {
          return dirichlet_sample(p, rng);
        } else if constexpr (std::is_same_v<T, SdmSpec>) {
          return sdm_sample(p, rng);
        } else if constexpr (std::is_same_v<T, SbmSpec>) {
          return sbm_sample(p, rng);
        } else {
          return p.value;
        }
      },
      prior);
}

ProbVec posterior_sample(const WeightPrior& prior, const CountVector& counts,
                         RngStream& rng) {
  return std::visit(
      [&](const auto& p) -> ProbVec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DirichletSpec>) {
          return dirichlet_posterior_sample(p, counts, rng);
        } else if constexpr (std::is_same_v<T, SdmSpec>) {
          return sdm_posterior_sample(p, counts, rng);
        } else if constexpr (std::is_same_v<T, SbmSpec>) {
          return sbm_posterior_sample(p, counts, rng);
        } else {
          return p.value;
        }
      },
      prior);
}

double prior_marginal_loglik(const WeightPrior& prior, const CountVector& counts) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DirichletSpec>) {
          return dirichlet_marginal_loglik(p, counts);
        } else if constexpr (std::is_same_v<T, SdmSpec>) {
          return sdm_marginal_loglik(p, counts);
        } else if constexpr (std::is_same_v<T, SbmSpec>) {
          return sbm_marginal_loglik(p, counts);
        } else {
          require_size(p.size(), counts.size(), "prior_marginal_loglik");
          double s = 0.0;
          for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[j] > 0) s += static_cast<double>(counts[j]) * safe_log(p.value[j]);
          }
          return s;
        }
      },
      prior);
}

double dirichlet_log_density(const DirichletSpec& spec, const ProbVec& theta) {
  require_size(spec.size(), theta.size(), "dirichlet_log_density");
  double out = -log_mvbeta(spec.alpha);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double a = spec.alpha[j];
    if (a == 1.0) continue;
    if (theta[j] == 0.0) {
      return a > 1.0 ? kNegInf : std::numeric_limits<double>::infinity();
    }
    out += (a - 1.0) * std::log(theta[j]);
  }
  return out;
}

ProbVec dirichlet_sample(const DirichletSpec& spec, RngStream& rng) {
  return sample_dirichlet(spec.alpha, rng);
}

ProbVec dirichlet_posterior_sample(const DirichletSpec& spec,
                                   const CountVector& counts, RngStream& rng) {
  require_size(spec.size(), counts.size(), "dirichlet_posterior_sample");
  std::vector<double> a(spec.alpha);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += static_cast<double>(counts[j]);
  return sample_dirichlet(a, rng);
}

double dirichlet_marginal_loglik(const DirichletSpec& spec,
                                 const CountVector& counts) {
  require_size(spec.size(), counts.size(), "dirichlet_marginal_loglik");
  require_counts(counts);
  double total_a = 0.0;
  double total_n = 0.0;
  double out = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double a = spec.alpha[j];
    const double n = static_cast<double>(counts[j]);
    total_a += a;
    total_n += n;
    if (n > 0) out += std::lgamma(a + n) - std::lgamma(a);
  }
  if (total_n > 0) out += std::lgamma(total_a) - std::lgamma(total_a + total_n);
  return out;
}

double sdm_log_density(const SdmSpec& spec, const ProbVec& theta) {
  require_size(spec.size(), theta.size(), "sdm_log_density");
  if (spec.beta == 1.0) return dirichlet_log_density({spec.alpha}, theta);
  const auto lw = sdm_log_component_weights(spec, CountVector(spec.size(), 0));
  std::vector<double> terms(spec.size());
  DirichletSpec boosted{spec.alpha};
  for (std::size_t j = 0; j < spec.size(); ++j) {
    boosted.alpha[j] += spec.beta;
    terms[j] = lw[j] + dirichlet_log_density(boosted, theta);
    boosted.alpha[j] = spec.alpha[j];
  }
  return log_sum_exp(terms);
}

std::vector<double> sdm_log_component_weights(const SdmSpec& spec,
                                              const CountVector& counts) {
  require_size(spec.size(), counts.size(), "sdm_log_component_weights");
  // w_j is prod_h Gamma(a_h + beta 1(h=j)); the factor common to all j is
  // dropped before normalizing.
  std::vector<double> lw(spec.size());
  for (std::size_t j = 0; j < lw.size(); ++j) {
    const double a = spec.alpha[j] + static_cast<double>(counts[j]);
    lw[j] = std::lgamma(a + spec.beta) - std::lgamma(a);
  }
  const double lse = log_sum_exp(lw);
  for (double& v : lw) v -= lse;
  return lw;
}

ProbVec sdm_sample(const SdmSpec& spec, RngStream& rng) {
  return sdm_posterior_sample(spec, CountVector(spec.size(), 0), rng);
}

ProbVec sdm_posterior_sample(const SdmSpec& spec, const CountVector& counts,
                             RngStream& rng) {
  const auto lw = sdm_log_component_weights(spec, counts);
  const std::size_t j = sample_categorical(lw, rng);
  std::vector<double> a(spec.alpha);
  for (std::size_t h = 0; h < a.size(); ++h) a[h] += static_cast<double>(counts[h]);
  a[j] += spec.beta;
  return sample_dirichlet(a, rng);
}

double sdm_marginal_loglik(const SdmSpec& spec, const CountVector& counts) {
  require_size(spec.size(), counts.size(), "sdm_marginal_loglik");
  require_counts(counts);
  const auto prior_lw = sdm_log_component_weights(spec, CountVector(spec.size(), 0));
  std::vector<double> terms(spec.size());
  DirichletSpec boosted{spec.alpha};
  for (std::size_t j = 0; j < spec.size(); ++j) {
    boosted.alpha[j] += spec.beta;
    terms[j] = prior_lw[j] + dirichlet_marginal_loglik(boosted, counts);
    boosted.alpha[j] = spec.alpha[j];
  }
  return log_sum_exp(terms);
}

ProbVec sbm_sample(const SbmSpec& spec, RngStream& rng) {
  return sbm_draw(spec, CountVector(spec.size(), 0), rng);
}

ProbVec sbm_posterior_sample(const SbmSpec& spec, const CountVector& counts,
                             RngStream& rng) {
  require_size(spec.size(), counts.size(), "sbm_posterior_sample");
  require_counts(counts);
  return sbm_draw(spec, counts, rng);
}

double sbm_marginal_loglik(const SbmSpec& spec, const CountVector& counts) {
  require_size(spec.size(), counts.size(), "sbm_marginal_loglik");
  require_counts(counts);
  const auto tail = tail_sums(counts);
  double out = 0.0;
  for (std::size_t j = 0; j < spec.pi1.size(); ++j) {
    const auto lw =
        sbm_break_log_weights(spec, j, static_cast<double>(counts[j]), tail[j + 1]);
    out += log_sum_exp(lw);
  }
  return out;
}

BetaShapes sbm_mimic_dirichlet(std::span<const double> alpha, double delta_scale) {
  for (double a : alpha) {
    if (!(a > 0.0)) throw std::domain_error("sbm_mimic_dirichlet: alpha must be positive");
  }
  if (alpha.size() < 2) return {};
  const std::size_t n = alpha.size() - 1;
  BetaShapes out{std::vector<double>(n), std::vector<double>(n)};
  double tail = 0.0;
  for (std::size_t j = alpha.size(); j-- > 1;) {
    tail += alpha[j];
    out.gamma[j - 1] = alpha[j - 1];
    out.delta[j - 1] = delta_scale * tail;
  }
  return out;
}

}  // namespace mixtrans
