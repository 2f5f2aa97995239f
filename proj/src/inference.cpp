#include "mixtrans/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "mixtrans/diagnostics.hpp"

namespace mixtrans {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> log_of(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  return out;
}

ProbVec unit_dirichlet_or_fixed(const WeightPrior& prior, RngStream& rng) {
  if (const auto* f = std::get_if<FixedWeights>(&prior)) return f->value;
  const std::vector<double> ones(prior_size(prior), 1.0);
  return sample_dirichlet(ones, rng);
}

std::vector<int> iid_allocations(const MixtureLayout& layout, const ProbVec& top,
                                 const std::vector<ProbVec>& within, std::size_t n,
                                 RngStream& rng) {
  const auto lw = log_of(layout.component_weights(top, within));
  std::vector<int> alloc(n);
  for (auto& a : alloc) a = static_cast<int>(sample_categorical(lw, rng));
  return alloc;
}

std::vector<TransitionTensor> q_from_prior(const ModelSpec& spec, const MixtureLayout& layout,
                                           RngStream& rng) {
  std::vector<TransitionTensor> q;
  for (std::size_t b = 0; b < layout.blocks(); ++b) {
    TransitionTensor t(spec.K, layout.block_order(b));
    for (std::size_t j = 0; j < t.columns(); ++j) {
      t.set_column(j, sample_dirichlet(spec.q_prior[b].alpha, rng));
    }
    q.push_back(std::move(t));
  }
  return q;
}

}  // namespace

std::int64_t SuffCounts::total() const {
  return std::accumulate(component.begin(), component.end(), std::int64_t{0});
}

SuffCounts accumulate_counts(const MixtureLayout& layout, const StateSequence& data,
                             std::span<const int> alloc) {
  const int L = layout.L();
  const auto K = static_cast<std::size_t>(layout.K());
  if (data.size() <= static_cast<std::size_t>(L)) {
    throw std::domain_error("accumulate_counts: sequence not longer than L");
  }
  if (alloc.size() != data.size() - static_cast<std::size_t>(L)) {
    throw std::domain_error("accumulate_counts: allocation length must be T - L");
  }
  SuffCounts out;
  for (std::size_t b = 0; b < layout.blocks(); ++b) {
    out.block.emplace_back(K * layout.block_columns(b), 0);
    out.column.emplace_back(layout.block_columns(b), 0);
  }
  out.component.assign(layout.components(), 0);
  std::vector<int> lagged(static_cast<std::size_t>(L));
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const std::size_t t = i + static_cast<std::size_t>(L);
    for (int l = 0; l < L; ++l) lagged[l] = data[t - 1 - static_cast<std::size_t>(l)];
    const auto c = static_cast<std::size_t>(alloc[i]);
    if (alloc[i] < 0 || c >= layout.components()) {
      throw std::domain_error("accumulate_counts: allocation out of range");
    }
    const auto b = static_cast<std::size_t>(layout.component(c).block);
    const std::size_t col = layout.column(c, lagged);
    ++out.block[b][static_cast<std::size_t>(data[t]) + K * col];
    ++out.column[b][col];
    ++out.component[c];
  }
  return out;
}

double collapsed_loglik(const ModelSpec& spec, const MixtureLayout& layout,
                        const SuffCounts& counts) {
  const auto K = static_cast<std::size_t>(spec.K);
  double total = 0.0;
  for (std::size_t b = 0; b < layout.blocks(); ++b) {
    const auto& alpha = spec.q_prior[b].alpha;
    const double A = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    const double lgA = std::lgamma(A);
    for (std::size_t col = 0; col < layout.block_columns(b); ++col) {
      const auto n = counts.column[b][col];
      if (n == 0) continue;
      double s = lgA - std::lgamma(A + static_cast<double>(n));
      for (std::size_t k = 0; k < K; ++k) {
        const auto nk = counts.block[b][k + K * col];
        if (nk > 0) s += std::lgamma(alpha[k] + static_cast<double>(nk)) - std::lgamma(alpha[k]);
      }
      total += s;
    }
  }
  return total;
}

MixtureSampler::MixtureSampler(ModelSpec spec, StateSequence data)
    : spec_(std::move(spec)), layout_(spec_), data_(std::move(data)) {
  if (data_.K() != spec_.K) throw std::domain_error("MixtureSampler: data K differs from model K");
  if (data_.size() <= static_cast<std::size_t>(spec_.L)) {
    throw std::domain_error("MixtureSampler: need T > L (T = " + std::to_string(data_.size()) +
                            ", L = " + std::to_string(spec_.L) + ")");
  }
  n_obs_ = data_.size() - static_cast<std::size_t>(spec_.L);
  for (std::size_t c = 0; c < layout_.components(); ++c) block_of_.push_back(layout_.component(c).block);
  build_tables();
}

void MixtureSampler::build_tables() {
  const std::size_t C = layout_.components();
  const int L = layout_.L();
  col_.assign(n_obs_ * C, 0);
  std::vector<int> lagged(static_cast<std::size_t>(L));
  for (std::size_t i = 0; i < n_obs_; ++i) {
    const std::size_t t = i + static_cast<std::size_t>(L);
    for (int l = 0; l < L; ++l) lagged[l] = data_[t - 1 - static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < C; ++c) {
      col_[i * C + c] = static_cast<std::uint32_t>(layout_.column(c, lagged));
    }
  }
  const std::size_t stride = n_obs_ + 1;
  log_a_.clear();
  log_asum_.clear();
  for (std::size_t b = 0; b < layout_.blocks(); ++b) {
    const auto& alpha = spec_.q_prior[b].alpha;
    std::vector<double> la(alpha.size() * stride);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      for (std::size_t n = 0; n < stride; ++n) la[k * stride + n] = std::log(alpha[k] + static_cast<double>(n));
    }
    const double A = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    std::vector<double> ls(stride);
    for (std::size_t n = 0; n < stride; ++n) ls[n] = std::log(A + static_cast<double>(n));
    log_a_.push_back(std::move(la));
    log_asum_.push_back(std::move(ls));
  }
}

ChainState MixtureSampler::initial_state(RngStream& rng, bool full) const {
  ChainState s;
  s.top = unit_dirichlet_or_fixed(spec_.top, rng);
  for (const auto& w : spec_.within) s.within.push_back(unit_dirichlet_or_fixed(w, rng));
  s.alloc = iid_allocations(layout_, s.top, s.within, n_obs_, rng);
  if (full) s.q = q_from_prior(spec_, layout_, rng);
  return s;
}

ChainState MixtureSampler::prior_state(RngStream& rng, bool full) const {
  ChainState s;
  s.top = prior_sample(spec_.top, rng);
  for (const auto& w : spec_.within) s.within.push_back(prior_sample(w, rng));
  s.alloc = iid_allocations(layout_, s.top, s.within, n_obs_, rng);
  if (full) s.q = q_from_prior(spec_, layout_, rng);
  return s;
}

void MixtureSampler::set_state(ChainState state) {
  if (state.alloc.size() != n_obs_) throw std::domain_error("set_state: allocation length must be T - L");
  if (state.top.size() != layout_.groups() || state.within.size() != spec_.within.size()) {
    throw std::domain_error("set_state: weight dimensions do not match the model");
  }
  if (!state.q.empty() && state.q.size() != layout_.blocks()) {
    throw std::domain_error("set_state: wrong number of transition blocks");
  }
  counts_ = accumulate_counts(layout_, data_, state.alloc);
  state_ = std::move(state);
  refresh_log_weights();
}

void MixtureSampler::reset_data(StateSequence data) {
  if (data.size() != data_.size() || data.K() != data_.K()) {
    throw std::domain_error("reset_data: sequence shape differs");
  }
  data_ = std::move(data);
  build_tables();
  if (!state_.alloc.empty()) counts_ = accumulate_counts(layout_, data_, state_.alloc);
}

void MixtureSampler::refresh_log_weights() {
  log_w_ = log_of(layout_.component_weights(state_.top, state_.within));
}

std::vector<std::int64_t> MixtureSampler::group_counts() const {
  std::vector<std::int64_t> out(layout_.groups(), 0);
  for (std::size_t c = 0; c < layout_.components(); ++c) {
    out[static_cast<std::size_t>(layout_.component(c).group)] += counts_.component[c];
  }
  return out;
}

std::vector<std::int64_t> MixtureSampler::member_counts(std::size_t group) const {
  std::vector<std::int64_t> out(layout_.group_size(group));
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = counts_.component[layout_.component_of(group, m)];
  return out;
}

void MixtureSampler::remove(std::size_t i) {
  const auto c = static_cast<std::size_t>(state_.alloc[i]);
  const auto b = static_cast<std::size_t>(block_of_[c]);
  const std::size_t col = col_[i * layout_.components() + c];
  --counts_.block[b][static_cast<std::size_t>(outcome(i)) + static_cast<std::size_t>(spec_.K) * col];
  --counts_.column[b][col];
  --counts_.component[c];
}

void MixtureSampler::add(std::size_t i) {
  const auto c = static_cast<std::size_t>(state_.alloc[i]);
  const auto b = static_cast<std::size_t>(block_of_[c]);
  const std::size_t col = col_[i * layout_.components() + c];
  ++counts_.block[b][static_cast<std::size_t>(outcome(i)) + static_cast<std::size_t>(spec_.K) * col];
  ++counts_.column[b][col];
  ++counts_.component[c];
}

void MixtureSampler::collapsed_scores(std::size_t i, std::vector<double>& out) const {
  const std::size_t C = layout_.components();
  const auto K = static_cast<std::size_t>(spec_.K);
  const auto k = static_cast<std::size_t>(outcome(i));
  const std::size_t stride = n_obs_ + 1;
  const std::uint32_t* cols = col_.data() + i * C;
  out.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    if (log_w_[c] == kNegInf) {
      out[c] = kNegInf;
      continue;
    }
    const auto b = static_cast<std::size_t>(block_of_[c]);
    const std::size_t col = cols[c];
    const auto nk = static_cast<std::size_t>(counts_.block[b][k + K * col]);
    const auto n = static_cast<std::size_t>(counts_.column[b][col]);
    out[c] = log_w_[c] + log_a_[b][k * stride + nk] - log_asum_[b][n];
  }
}

void MixtureSampler::full_scores(std::size_t i, std::vector<double>& out) const {
  const std::size_t C = layout_.components();
  const int k = outcome(i);
  const std::uint32_t* cols = col_.data() + i * C;
  out.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double q = state_.q[static_cast<std::size_t>(block_of_[c])](k, cols[c]);
    out[c] = log_w_[c] + (q > 0.0 ? std::log(q) : kNegInf);
  }
}

void MixtureSampler::draw_weights(RngStream& rng) {
  state_.top = posterior_sample(spec_.top, group_counts(), rng);
  for (std::size_t g = 0; g < layout_.groups(); ++g) {
    const int w = layout_.within_index(g);
    if (w < 0) continue;
    state_.within[static_cast<std::size_t>(w)] =
        posterior_sample(spec_.within[static_cast<std::size_t>(w)], member_counts(g), rng);
  }
  refresh_log_weights();
}

void MixtureSampler::draw_q(RngStream& rng) {
  const auto K = static_cast<std::size_t>(spec_.K);
  std::vector<TransitionTensor> q;
  std::vector<double> a(K);
  for (std::size_t b = 0; b < layout_.blocks(); ++b) {
    TransitionTensor t(spec_.K, layout_.block_order(b));
    const auto& alpha = spec_.q_prior[b].alpha;
    for (std::size_t j = 0; j < t.columns(); ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        a[k] = alpha[k] + static_cast<double>(counts_.block[b][k + K * j]);
      }
      t.set_column(j, sample_dirichlet(a, rng));
    }
    q.push_back(std::move(t));
  }
  state_.q = std::move(q);
}

void MixtureSampler::collapsed_sweep(RngStream& rng) {
  draw_weights(rng);
  std::vector<std::size_t> order(n_obs_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (random_scan_) {
    for (std::size_t j = n_obs_; j > 1; --j) std::swap(order[j - 1], order[rng.index(j)]);
  }
  for (std::size_t i : order) {
    remove(i);
    collapsed_scores(i, scratch_);
    state_.alloc[i] = static_cast<int>(sample_categorical(scratch_, rng));
    add(i);
  }
}

void MixtureSampler::full_sweep(RngStream& rng) {
  if (state_.q.size() != layout_.blocks()) {
    throw std::logic_error("full_sweep: state carries no transition blocks");
  }
  std::vector<std::size_t> order(n_obs_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (random_scan_) {
    for (std::size_t j = n_obs_; j > 1; --j) std::swap(order[j - 1], order[rng.index(j)]);
  }
  for (std::size_t i : order) {
    full_scores(i, scratch_);
    // Underflowed transition draws can leave no admissible candidate.
    if (*std::max_element(scratch_.begin(), scratch_.end()) == kNegInf) continue;
    remove(i);
    state_.alloc[i] = static_cast<int>(sample_categorical(scratch_, rng));
    add(i);
  }
  draw_weights(rng);
  draw_q(rng);
}

SwapResult MixtureSampler::prior_swap(RngStream& rng) {
  ChainState proposal;
  proposal.top = prior_sample(spec_.top, rng);
  for (const auto& w : spec_.within) proposal.within.push_back(prior_sample(w, rng));
  proposal.alloc = iid_allocations(layout_, proposal.top, proposal.within, n_obs_, rng);
  return prior_swap_to(std::move(proposal), rng);
}

SwapResult MixtureSampler::prior_swap_to(ChainState proposal, RngStream& rng) {
  auto counts = accumulate_counts(layout_, data_, proposal.alloc);
  const double delta = collapsed_loglik(spec_, layout_, counts) - collapsed_data_loglik();
  const bool accept = delta >= 0.0 || std::log(rng.uniform()) < delta;
  if (accept) {
    proposal.q = std::move(state_.q);
    state_ = std::move(proposal);
    counts_ = std::move(counts);
    refresh_log_weights();
  }
  return {delta, accept};
}

std::vector<double> MixtureSampler::collapsed_conditional(std::size_t i) {
  remove(i);
  std::vector<double> s;
  collapsed_scores(i, s);
  add(i);
  const double z = log_sum_exp(s);
  for (double& v : s) v = std::exp(v - z);
  return s;
}

std::vector<double> MixtureSampler::full_conditional(std::size_t i) const {
  std::vector<double> s;
  full_scores(i, s);
  const double z = log_sum_exp(s);
  for (double& v : s) v = std::exp(v - z);
  return s;
}

double MixtureSampler::collapsed_data_loglik() const { return collapsed_loglik(spec_, layout_, counts_); }

double MixtureSampler::mixture_loglik() const {
  if (state_.q.size() != layout_.blocks()) {
    throw std::logic_error("mixture_loglik: state carries no transition blocks");
  }
  const std::size_t C = layout_.components();
  const auto w = layout_.component_weights(state_.top, state_.within);
  double total = 0.0;
  for (std::size_t i = 0; i < n_obs_; ++i) {
    const int k = outcome(i);
    double p = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      p += w[c] * state_.q[static_cast<std::size_t>(block_of_[c])](k, col_[i * C + c]);
    }
    total += std::log(p);
  }
  return total;
}

McmcConfig McmcConfig::paper_scale() {
  McmcConfig c;
  c.burn_in = 200000;
  c.keep = 400000;
  c.thin = 200;
  return c;
}

void McmcConfig::validate() const {
  if (keep == 0 || thin == 0 || chains == 0) {
    throw std::domain_error("McmcConfig: keep, thin and chains must be positive");
  }
  if (keep < thin) throw std::domain_error("McmcConfig: keep must be at least thin");
}

std::size_t PosteriorSamples::chains() const {
  std::size_t n = 0;
  for (const auto& d : draws) n = std::max(n, d.chain + 1);
  return n;
}

std::vector<const Draw*> PosteriorSamples::chain(std::size_t c) const {
  std::vector<const Draw*> out;
  for (const auto& d : draws) {
    if (d.chain == c) out.push_back(&d);
  }
  return out;
}

std::vector<double> PosteriorSamples::flat_weights(const Draw& d) {
  std::vector<double> out(d.top.vec());
  for (const auto& w : d.within) out.insert(out.end(), w.vec().begin(), w.vec().end());
  return out;
}

std::vector<double> component_weights(const MixtureLayout& layout, const Draw& d) {
  return layout.component_weights(d.top, d.within);
}

void PosteriorSamples::diagnose() {
  diagnostics.clear();
  warnings.clear();
  if (draws.empty()) return;
  const MixtureLayout layout(spec);
  auto names = layout.weight_names();
  names.push_back("log_marginal");
  const std::size_t m = chains();
  std::vector<std::vector<std::vector<double>>> series(names.size(), std::vector<std::vector<double>>(m));
  for (const auto& d : draws) {
    auto w = flat_weights(d);
    w.push_back(d.log_marginal);
    for (std::size_t p = 0; p < names.size(); ++p) series[p][d.chain].push_back(w[p]);
  }
  std::vector<std::string> flagged;
  double worst = 1.0;
  for (std::size_t p = 0; p < names.size(); ++p) {
    ParamDiagnostic diag{names[p], split_rhat(series[p]), effective_sample_size(series[p])};
    if (diag.rhat > 1.1) {
      flagged.push_back(names[p]);
      worst = std::max(worst, diag.rhat);
    }
    diagnostics.push_back(std::move(diag));
  }
  if (!flagged.empty()) {
    std::ostringstream os;
    os << "split R-hat above 1.1 for " << flagged.size() << " quantities (max " << worst << "; ";
    for (std::size_t i = 0; i < flagged.size() && i < 5; ++i) os << (i ? ", " : "") << flagged[i];
    if (flagged.size() > 5) os << ", ...";
    os << "): chains disagree and may sit in different posterior modes; they are kept separate, "
          "consider longer or replicate runs";
    warnings.push_back(os.str());
  }
}

namespace {

std::vector<Draw> run_chain(const ModelSpec& spec, const StateSequence& data,
                            const McmcConfig& config, std::size_t chain) {
  RngStream rng(config.seed, chain);
  MixtureSampler sampler(spec, data);
  sampler.set_random_scan(config.random_scan);
  sampler.set_state(sampler.initial_state(rng, !config.collapsed));

  std::vector<Draw> out;
  out.reserve(config.keep / config.thin);
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
  const std::size_t total = config.burn_in + config.keep;
  for (std::size_t it = 1; it <= total; ++it) {
    if (config.collapsed) {
      sampler.collapsed_sweep(rng);
      if (config.swap_period > 0 && it % config.swap_period == 0) {
        ++proposed;
        if (sampler.prior_swap(rng).accepted) ++accepted;
      }
    } else {
      sampler.full_sweep(rng);
    }
    if (it <= config.burn_in || (it - config.burn_in) % config.thin != 0) continue;
    if (config.collapsed) sampler.draw_q(rng);
    Draw d;
    d.chain = chain;
    d.iteration = it;
    d.top = sampler.state().top;
    d.within = sampler.state().within;
    d.q = sampler.state().q;
    d.group_counts = sampler.group_counts();
    d.log_marginal = config.collapsed ? sampler.collapsed_data_loglik() : sampler.mixture_loglik();
    if (!std::isfinite(d.log_marginal)) {
      throw std::runtime_error("run_mcmc: non-finite log-likelihood in chain " + std::to_string(chain) +
                               " at iteration " + std::to_string(it));
    }
    d.swaps_accepted = accepted;
    d.swaps_proposed = proposed;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

PosteriorSamples run_mcmc(const ModelSpec& spec, const StateSequence& data, const McmcConfig& config) {
  spec.validate();
  config.validate();
  if (data.size() <= static_cast<std::size_t>(spec.L)) {
    throw std::domain_error("run_mcmc: need T > L (T = " + std::to_string(data.size()) +
                            ", L = " + std::to_string(spec.L) + ")");
  }
  std::vector<std::vector<Draw>> per_chain(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
  auto work = [&](std::size_t c) {
    try {
      per_chain[c] = run_chain(spec, data, config, c);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (config.parallel && config.chains > 1) {
    std::vector<std::thread> threads;
    for (std::size_t c = 0; c < config.chains; ++c) threads.emplace_back(work, c);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t c = 0; c < config.chains; ++c) work(c);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  PosteriorSamples out;
  out.spec = spec;
  out.config = config;
  for (auto& chain : per_chain) {
    for (auto& d : chain) out.draws.push_back(std::move(d));
  }
  out.diagnose();
  return out;
}

MtdParams to_mtd_params(const ModelSpec& spec, const Draw& d) {
  if (spec.kind != ModelKind::Mtd || d.q.size() != 1) throw std::domain_error("to_mtd_params: not an MTD draw");
  return MtdParams{d.top, d.q[0]};
}

MtdgParams to_mtdg_params(const ModelSpec& spec, const Draw& d) {
  if (spec.kind != ModelKind::Mtdg || d.q.size() != static_cast<std::size_t>(spec.L) + 1) {
    throw std::domain_error("to_mtdg_params: not an MTDg draw");
  }
  const auto c0 = d.q[0].column(0);
  return MtdgParams{d.top, ProbVec(std::vector<double>(c0.begin(), c0.end())),
                    std::vector<TransitionTensor>(d.q.begin() + 1, d.q.end())};
}

MmtdParams to_mmtd_params(const ModelSpec& spec, const Draw& d) {
  if (spec.kind != ModelKind::Mmtd || d.q.size() != static_cast<std::size_t>(spec.R) + 1) {
    throw std::domain_error("to_mmtd_params: not an MMTD draw");
  }
  return MmtdParams{d.top, d.within, d.q, spec.L};
}

}  // namespace mixtrans
