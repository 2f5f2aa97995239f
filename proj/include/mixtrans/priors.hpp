#pragma once

// Dirichlet, sparse Dirichlet mixture (SDM) and stick-breaking mixture (SBM)
// distributions over probability vectors: densities, draws, conjugate
// updates and marginal likelihoods of multinomial counts.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mixtrans/prob_core.hpp"

namespace mixtrans {

/// Category occurrence counts n_1..n_J.
using CountVector = std::vector<std::int64_t>;

struct DirichletSpec {
  std::vector<double> alpha;

  static DirichletSpec symmetric(std::size_t J, double shape);
  void validate() const;
  std::size_t size() const { return alpha.size(); }
};

/// Mixture over j of Dir(alpha + beta e_j) with weights prop. to
/// prod_h Gamma(alpha_h + beta 1(h=j)). beta == 1 is a plain Dirichlet.
struct SdmSpec {
  std::vector<double> alpha;
  double beta = 1.0;

  void validate() const;
  std::size_t size() const { return alpha.size(); }
};

/// Stick-breaking mixture: X_j ~ pi1 Beta(1,eta) + pi2 Beta(gamma,delta)
/// + pi3 Beta(eta,1) for j = 1..J-1, with pi2 = 1 - pi1 - pi3.
struct SbmSpec {
  std::vector<double> pi1;
  std::vector<double> pi3;
  double eta = 1.0;
  std::vector<double> gamma;
  std::vector<double> delta;

  void validate() const;
  /// Length of the probability vector (number of breaks + 1).
  std::size_t size() const { return pi1.size() + 1; }
  double pi2(std::size_t j) const { return 1.0 - pi1[j] - pi3[j]; }
};

/// Degenerate prior that pins the vector to fixed values.
struct FixedWeights {
  ProbVec value;
  std::size_t size() const { return value.size(); }
};

/// Any of the priors a mixing-weight vector may carry.
using WeightPrior = std::variant<DirichletSpec, SdmSpec, SbmSpec, FixedWeights>;

std::size_t prior_size(const WeightPrior& prior);
ProbVec prior_sample(const WeightPrior& prior, RngStream& rng);
ProbVec posterior_sample(const WeightPrior& prior, const CountVector& counts,
                         RngStream& rng);
/// log p(sequence with the given counts), the weight vector integrated out.
double prior_marginal_loglik(const WeightPrior& prior, const CountVector& counts);

double dirichlet_log_density(const DirichletSpec& spec, const ProbVec& theta);
ProbVec dirichlet_sample(const DirichletSpec& spec, RngStream& rng);
ProbVec dirichlet_posterior_sample(const DirichletSpec& spec,
                                   const CountVector& counts, RngStream& rng);
/// log[ B(alpha + n) / B(alpha) ].
double dirichlet_marginal_loglik(const DirichletSpec& spec,
                                 const CountVector& counts);

double sdm_log_density(const SdmSpec& spec, const ProbVec& theta);
ProbVec sdm_sample(const SdmSpec& spec, RngStream& rng);
/// Draws from SDM(alpha + n, beta).
ProbVec sdm_posterior_sample(const SdmSpec& spec, const CountVector& counts,
                             RngStream& rng);
/// Normalized log mixture weights of SDM(alpha + n, beta).
std::vector<double> sdm_log_component_weights(const SdmSpec& spec,
                                              const CountVector& counts);
double sdm_marginal_loglik(const SdmSpec& spec, const CountVector& counts);

ProbVec sbm_sample(const SbmSpec& spec, RngStream& rng);
ProbVec sbm_posterior_sample(const SbmSpec& spec, const CountVector& counts,
                             RngStream& rng);
double sbm_marginal_loglik(const SbmSpec& spec, const CountVector& counts);

/// Second-component beta shapes that reproduce Dirichlet(alpha) through the
/// generalized-Dirichlet construction: gamma_j = alpha_j,
/// delta_j = delta_scale * sum_{h>j} alpha_h.
struct BetaShapes {
  std::vector<double> gamma;
  std::vector<double> delta;
};
BetaShapes sbm_mimic_dirichlet(std::span<const double> alpha,
                               double delta_scale = 1.0);

}  // namespace mixtrans
