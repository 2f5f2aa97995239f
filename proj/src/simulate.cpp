#include "mixtrans/simulate.hpp"

#include <algorithm>
#include <chrono>

namespace mixtrans {

void ScenarioSpec::validate() const {
  if (K < 2) throw std::domain_error("ScenarioSpec: K must be at least 2");
  if (active_lags.empty()) throw std::domain_error("ScenarioSpec: need at least one active lag");
  for (std::size_t i = 0; i < active_lags.size(); ++i) {
    if (active_lags[i] < 1 || (i > 0 && active_lags[i] <= active_lags[i - 1])) {
      throw std::domain_error("ScenarioSpec: active lags must be strictly increasing positive integers");
    }
  }
  if (train == 0 || validation == 0) throw std::domain_error("ScenarioSpec: empty train or validation segment");
  if (context < 0) throw std::domain_error("ScenarioSpec: negative context");
  if (train < static_cast<std::size_t>(context_length())) {
    throw std::domain_error("ScenarioSpec: training segment shorter than the validation context");
  }
}

ProbVec Truth::transition(std::span<const int> lagged) const {
  if (static_cast<int>(lagged.size()) < max_lag()) throw std::domain_error("Truth: history too short");
  std::vector<int> sub;
  sub.reserve(active_lags.size());
  for (int l : active_lags) sub.push_back(lagged[static_cast<std::size_t>(l) - 1]);
  const auto col = q.column(rho(sub, q.K()));
  return ProbVec(std::vector<double>(col.begin(), col.end()));
}

Truth random_truth(const ScenarioSpec& spec, RngStream& rng) {
  spec.validate();
  checked_power(spec.K, spec.order() + 1);
  TransitionTensor q(spec.K, spec.order());
  const std::vector<double> ones(static_cast<std::size_t>(spec.K), 1.0);
  for (std::size_t j = 0; j < q.columns(); ++j) q.set_column(j, sample_dirichlet(ones, rng));
  return Truth{spec.active_lags, std::move(q)};
}

SimulatedData simulate_chain(const Truth& truth, const ScenarioSpec& spec, RngStream& rng) {
  spec.validate();
  const auto m = static_cast<std::size_t>(truth.max_lag());
  const std::size_t total = m + spec.burn_in + spec.train + spec.validation;
  std::vector<int> s(total);
  for (std::size_t t = 0; t < m; ++t) s[t] = static_cast<int>(rng.index(static_cast<std::size_t>(spec.K)));
  std::vector<int> lagged(m);
  std::vector<double> lw(static_cast<std::size_t>(spec.K));
  for (std::size_t t = m; t < total; ++t) {
    for (std::size_t l = 0; l < m; ++l) lagged[l] = s[t - 1 - l];
    const auto p = truth.transition(lagged);
    // Inverse-cdf draw; a zero-probability outcome is never selected.
    const double u = rng.uniform();
    double acc = 0.0;
    int k = spec.K - 1;
    for (int j = 0; j < spec.K; ++j) {
      acc += p[static_cast<std::size_t>(j)];
      if (u < acc) {
        k = j;
        break;
      }
    }
    while (p[static_cast<std::size_t>(k)] == 0.0 && k > 0) --k;
    s[t] = k;
  }
  const std::size_t train_start = m + spec.burn_in;
  const std::size_t val_start = train_start + spec.train;
  const auto ctx = static_cast<std::size_t>(spec.context_length());
  SimulatedData out;
  out.train = StateSequence(std::vector<int>(s.begin() + static_cast<std::ptrdiff_t>(train_start),
                                             s.begin() + static_cast<std::ptrdiff_t>(val_start)),
                            spec.K);
  out.validation = StateSequence(std::vector<int>(s.begin() + static_cast<std::ptrdiff_t>(val_start - ctx), s.end()),
                                 spec.K);
  out.context = ctx;
  return out;
}

std::vector<ProbVec> true_transitions(const Truth& truth, const SimulatedData& data) {
  const auto m = static_cast<std::size_t>(truth.max_lag());
  if (data.context < m) throw std::domain_error("true_transitions: context shorter than the true order");
  std::vector<ProbVec> out;
  std::vector<int> lagged(m);
  for (std::size_t t = data.context; t < data.validation.size(); ++t) {
    for (std::size_t l = 0; l < m; ++l) lagged[l] = data.validation[t - 1 - l];
    out.push_back(truth.transition(lagged));
  }
  return out;
}

int study_context(const ScenarioSpec& scenario, const std::vector<RosterEntry>& roster) {
  int ctx = scenario.context_length();
  for (const auto& e : roster) ctx = std::max(ctx, e.L);
  return ctx;
}

PosteriorSamples fit_entry(const RosterEntry& entry, const StateSequence& train, const McmcConfig& config) {
  ModelSpec spec;
  if (entry.profile == "intercept") {
    spec = make_profile("mmtd-dir", train.K(), std::max(entry.L, 1), 1, train.size());
    spec.top = FixedWeights{ProbVec::point_mass(2, 0)};
    spec.profile = "intercept";
  } else {
    spec = make_profile(entry.profile, train.K(), entry.L, entry.R, train.size());
  }
  return run_mcmc(spec, train, config);
}

PosteriorSamples oracle_samples(const Truth& truth, std::size_t T) {
  const int L = truth.max_lag();
  const int r = static_cast<int>(truth.active_lags.size());
  auto spec = make_profile("mmtd-dir", truth.K(), L, r, T);
  spec.profile = "oracle";
  Draw d;
  d.top = ProbVec::point_mass(static_cast<std::size_t>(r) + 1, static_cast<std::size_t>(r));
  spec.top = FixedWeights{d.top};
  for (int o = 1; o <= r; ++o) {
    const auto n = binomial(L, o);
    d.within.push_back(o == r ? ProbVec::point_mass(n, config_rank(truth.active_lags, L)) : ProbVec::uniform(n));
    spec.within[static_cast<std::size_t>(o) - 1] = FixedWeights{d.within.back()};
  }
  for (int o = 0; o <= r; ++o) d.q.push_back(o == r ? truth.q : TransitionTensor(truth.K(), o));
  d.group_counts.assign(static_cast<std::size_t>(r) + 1, 0);
  PosteriorSamples out;
  out.spec = std::move(spec);
  out.config.chains = 1;
  out.config.burn_in = 0;
  out.config.keep = 1;
  out.config.thin = 1;
  out.draws.push_back(std::move(d));
  return out;
}

StudyResult run_study(ScenarioSpec scenario, const std::vector<RosterEntry>& roster, const McmcConfig& config) {
  scenario.context = study_context(scenario, roster);
  scenario.validate();
  RngStream rng(scenario.seed, 0);
  StudyResult out{random_truth(scenario, rng), {}, {}, {}};
  out.data = simulate_chain(out.truth, scenario, rng);
  const auto truth = true_transitions(out.truth, out.data);
  for (const auto& entry : roster) {
    const auto start = std::chrono::steady_clock::now();
    StudyRow row;
    row.label = entry.label;
    if (entry.profile == "oracle") {
      auto samples = oracle_samples(out.truth, out.data.train.size());
      const auto est = predict_sequence(samples, out.data.validation, out.data.context);
      row.loss = l1_loss(est, truth);
      out.fits.emplace_back(std::move(samples));
    } else {
      auto samples = fit_entry(entry, out.data.train, config);
      const auto est = predict_sequence(samples, out.data.validation, out.data.context);
      row.loss = l1_loss(est, truth);
      row.warnings = samples.warnings;
      out.fits.emplace_back(std::move(samples));
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mixtrans
