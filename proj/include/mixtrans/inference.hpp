#pragma once

// Gibbs samplers for the mixture models described by a ModelSpec.
//
// Each observation t (s_t with t >= L) carries an allocation to one mixture
// component. The collapsed kernel integrates the transition blocks out and
// scores candidate allocations with Dirichlet-multinomial predictive ratios;
// the full kernel keeps explicit transition draws.

#include <cstdint>
#include <string>
#include <vector>

#include "mixtrans/model_spec.hpp"
#include "mixtrans/mtd_models.hpp"
#include "mixtrans/tensor.hpp"

namespace mixtrans {

/// Allocation counts per component and outcome-by-column counts per block.
struct SuffCounts {
  std::vector<std::vector<std::int64_t>> block;   // block[b][k + K * col]
  std::vector<std::vector<std::int64_t>> column;  // column[b][col], sum over k
  std::vector<std::int64_t> component;            // observations per component

  std::int64_t total() const;
  friend bool operator==(const SuffCounts&, const SuffCounts&) = default;
};

/// Counts for allocations alloc[i] of observation s_{L+i}.
SuffCounts accumulate_counts(const MixtureLayout& layout, const StateSequence& data,
                             std::span<const int> alloc);

/// log p(data | allocations) with every transition block integrated out.
double collapsed_loglik(const ModelSpec& spec, const MixtureLayout& layout,
                        const SuffCounts& counts);

struct ChainState {
  std::vector<int> alloc;
  ProbVec top;
  std::vector<ProbVec> within;
  std::vector<TransitionTensor> q;  // empty unless the chain runs in full mode
};

struct SwapResult {
  double log_ratio;
  bool accepted;
};

class MixtureSampler {
 public:
  MixtureSampler(ModelSpec spec, StateSequence data);

  const ModelSpec& spec() const { return spec_; }
  const MixtureLayout& layout() const { return layout_; }
  const StateSequence& data() const { return data_; }
  std::size_t observations() const { return n_obs_; }
  const ChainState& state() const { return state_; }
  const SuffCounts& counts() const { return counts_; }

  void set_random_scan(bool on) { random_scan_ = on; }

  /// Weights from symmetric unit Dirichlet draws, allocations from those
  /// weights, transition blocks (full mode) from their priors.
  ChainState initial_state(RngStream& rng, bool full) const;
  /// Weights, allocations and (full mode) transition blocks from the prior.
  ChainState prior_state(RngStream& rng, bool full) const;
  void set_state(ChainState state);
  /// Swaps in a new sequence of the same length, keeping the allocations.
  void reset_data(StateSequence data);

  /// Weights, then allocations with the blocks integrated out.
  void collapsed_sweep(RngStream& rng);
  /// Allocations, then weights, then transition blocks.
  void full_sweep(RngStream& rng);
  /// Metropolis move proposing weights and allocations from their prior.
  SwapResult prior_swap(RngStream& rng);
  /// The same move with a caller-supplied proposal.
  SwapResult prior_swap_to(ChainState proposal, RngStream& rng);

  void draw_weights(RngStream& rng);
  void draw_q(RngStream& rng);

  /// Normalized allocation probabilities of observation i given all others.
  std::vector<double> collapsed_conditional(std::size_t i);
  std::vector<double> full_conditional(std::size_t i) const;

  double collapsed_data_loglik() const;
  /// log p(data | weights, transition blocks); needs full-mode blocks.
  double mixture_loglik() const;

  std::vector<std::int64_t> group_counts() const;
  std::vector<std::int64_t> member_counts(std::size_t group) const;

  /// Column of component c for observation i.
  std::size_t column_of(std::size_t i, std::size_t c) const {
    return col_[i * layout_.components() + c];
  }
  int outcome(std::size_t i) const { return data_[i + static_cast<std::size_t>(layout_.L())]; }

 private:
  void build_tables();
  void refresh_log_weights();
  void collapsed_scores(std::size_t i, std::vector<double>& out) const;
  void full_scores(std::size_t i, std::vector<double>& out) const;
  void remove(std::size_t i);
  void add(std::size_t i);

  ModelSpec spec_;
  MixtureLayout layout_;
  StateSequence data_;
  std::size_t n_obs_ = 0;
  bool random_scan_ = false;

  std::vector<int> block_of_;                   // block of each component
  std::vector<std::uint32_t> col_;              // n_obs x components
  std::vector<std::vector<double>> log_a_;     // [b][k * (n_obs+1) + n] = log(alpha_k + n)
  std::vector<std::vector<double>> log_asum_;  // [b][n] = log(sum alpha + n)

  ChainState state_;
  SuffCounts counts_;
  std::vector<double> log_w_;
  std::vector<double> scratch_;
};

struct McmcConfig {
  std::size_t burn_in = 20000;
  std::size_t keep = 20000;
  std::size_t thin = 20;
  std::size_t swap_period = 10;  // 0 disables the prior-proposal move
  std::size_t chains = 4;
  std::uint64_t seed = 1;
  bool collapsed = true;
  bool random_scan = false;
  bool parallel = true;

  static McmcConfig paper_scale();
  void validate() const;
};

struct Draw {
  std::size_t chain = 0;
  std::size_t iteration = 0;
  ProbVec top;
  std::vector<ProbVec> within;
  std::vector<TransitionTensor> q;
  std::vector<std::int64_t> group_counts;
  double log_marginal = 0.0;
  std::uint64_t swaps_accepted = 0;  // cumulative within the chain
  std::uint64_t swaps_proposed = 0;
};

struct ParamDiagnostic {
  std::string name;
  double rhat = 1.0;
  double ess = 0.0;
};

struct PosteriorSamples {
  ModelSpec spec;
  McmcConfig config;
  std::vector<Draw> draws;  // chain-major, iteration ascending
  std::vector<ParamDiagnostic> diagnostics;
  std::vector<std::string> warnings;

  std::size_t chains() const;
  std::vector<const Draw*> chain(std::size_t c) const;
  /// Top-level weights followed by each within-group vector.
  static std::vector<double> flat_weights(const Draw& d);
  /// Fills diagnostics and convergence warnings from the stored draws.
  void diagnose();
};

/// Weights of every mixture component at one draw.
std::vector<double> component_weights(const MixtureLayout& layout, const Draw& d);

PosteriorSamples run_mcmc(const ModelSpec& spec, const StateSequence& data,
                          const McmcConfig& config);

/// Typed parameters of one draw (the draw must carry transition blocks).
MtdParams to_mtd_params(const ModelSpec& spec, const Draw& d);
MtdgParams to_mtdg_params(const ModelSpec& spec, const Draw& d);
MmtdParams to_mmtd_params(const ModelSpec& spec, const Draw& d);

}  // namespace mixtrans
