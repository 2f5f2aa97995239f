#include "mixtrans/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mixtrans {

const char* const kLagZeroCaveat =
    "The order-weight prior shrinks toward low orders, so a high lag-0 (intercept) index "
    "is not evidence against Markov dependence unless it sits near 1 with a narrow interval. "
    "A lag-0 index well below the other lags does point to strong dependence.";

IntervalSummary summarize_values(std::string name, std::vector<double> values) {
  if (values.empty()) throw std::domain_error("summarize: no draws");
  IntervalSummary s;
  s.name = std::move(name);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.lo95 = quantile(values, 0.025);
  s.hi95 = quantile(std::move(values), 0.975);
  return s;
}

std::vector<double> inclusion_at(const MixtureLayout& layout, const Draw& d) {
  const auto w = layout.component_weights(d.top, d.within);
  std::vector<double> out(static_cast<std::size_t>(layout.L()) + 1, 0.0);
  for (std::size_t c = 0; c < layout.components(); ++c) {
    const auto& lags = layout.component(c).lags;
    if (lags.empty()) {
      out[0] += w[c];
    } else {
      for (int l : lags) out[static_cast<std::size_t>(l)] += w[c];
    }
  }
  return out;
}

InclusionIndex lag_inclusion(const PosteriorSamples& samples) {
  const MixtureLayout layout(samples.spec);
  InclusionIndex out;
  for (const auto& d : samples.draws) out.per_draw.push_back(inclusion_at(layout, d));
  const std::size_t n = static_cast<std::size_t>(layout.L()) + 1;
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<double> v;
    v.reserve(out.per_draw.size());
    for (const auto& row : out.per_draw) v.push_back(row[l]);
    out.summary.push_back(summarize_values("lag_" + std::to_string(l), std::move(v)));
  }
  return out;
}

Prediction predict_transition(const PosteriorSamples& samples, std::span<const int> lagged) {
  if (samples.draws.empty()) throw std::domain_error("predict_transition: no draws");
  const MixtureLayout layout(samples.spec);
  const auto K = static_cast<std::size_t>(layout.K());
  std::vector<std::vector<double>> per_k(K);
  std::vector<double> mean(K, 0.0);
  for (const auto& d : samples.draws) {
    if (d.q.size() != layout.blocks()) throw std::domain_error("predict_transition: draw lacks transition blocks");
    const auto p = layout.transition(layout.component_weights(d.top, d.within), d.q, lagged);
    for (std::size_t k = 0; k < K; ++k) {
      mean[k] += p[k];
      per_k[k].push_back(p[k]);
    }
  }
  Prediction out;
  for (auto& m : mean) m /= static_cast<double>(samples.draws.size());
  out.mean = ProbVec::normalized(std::move(mean));
  for (std::size_t k = 0; k < K; ++k) {
    out.lo95.push_back(quantile(per_k[k], 0.025));
    out.hi95.push_back(quantile(std::move(per_k[k]), 0.975));
  }
  return out;
}

std::vector<ProbVec> predict_sequence(const PosteriorSamples& samples,
                                      const StateSequence& sequence, std::size_t first) {
  if (samples.draws.empty()) throw std::domain_error("predict_sequence: no draws");
  const MixtureLayout layout(samples.spec);
  const auto L = static_cast<std::size_t>(layout.L());
  const auto K = static_cast<std::size_t>(layout.K());
  if (first < L) throw std::domain_error("predict_sequence: first prediction needs L states of history");
  if (sequence.K() != layout.K()) throw std::domain_error("predict_sequence: state count differs from model");
  const std::size_t n = sequence.size() > first ? sequence.size() - first : 0;
  const std::size_t C = layout.components();

  // Columns of every component at every prediction time.
  std::vector<std::size_t> cols(n * C);
  std::vector<int> lagged(L);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = first + i;
    for (std::size_t l = 0; l < L; ++l) lagged[l] = sequence[t - 1 - l];
    for (std::size_t c = 0; c < C; ++c) cols[i * C + c] = layout.column(c, lagged);
  }
  std::vector<double> acc(n * K, 0.0);
  for (const auto& d : samples.draws) {
    if (d.q.size() != layout.blocks()) throw std::domain_error("predict_sequence: draw lacks transition blocks");
    const auto w = layout.component_weights(d.top, d.within);
    for (std::size_t c = 0; c < C; ++c) {
      if (w[c] == 0.0) continue;
      const auto& q = d.q[static_cast<std::size_t>(layout.component(c).block)];
      for (std::size_t i = 0; i < n; ++i) {
        const auto col = q.column(cols[i * C + c]);
        double* a = acc.data() + i * K;
        for (std::size_t k = 0; k < K; ++k) a[k] += w[c] * col[k];
      }
    }
  }
  std::vector<ProbVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(ProbVec::normalized(std::vector<double>(acc.begin() + static_cast<std::ptrdiff_t>(i * K),
                                                          acc.begin() + static_cast<std::ptrdiff_t>((i + 1) * K))));
  }
  return out;
}

double l1_loss(const std::vector<ProbVec>& estimates, const std::vector<ProbVec>& truth) {
  if (estimates.size() != truth.size()) {
    throw std::domain_error("l1_loss: " + std::to_string(estimates.size()) + " estimates vs " +
                            std::to_string(truth.size()) + " truth vectors");
  }
  if (estimates.empty()) throw std::domain_error("l1_loss: no points");
  const std::size_t K = truth.front().size();
  double total = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (estimates[t].size() != K || truth[t].size() != K) {
      throw std::domain_error("l1_loss: dimension mismatch at point " + std::to_string(t));
    }
    for (std::size_t k = 0; k < K; ++k) total += std::abs(estimates[t][k] - truth[t][k]);
  }
  return 100.0 * total / (static_cast<double>(K) * static_cast<double>(truth.size()));
}

double mean_log_score(const std::vector<ProbVec>& predictions, const StateSequence& sequence,
                      std::size_t first) {
  if (first + predictions.size() != sequence.size()) {
    throw std::domain_error("mean_log_score: prediction count does not match the sequence");
  }
  if (predictions.empty()) throw std::domain_error("mean_log_score: no points");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::log(predictions[i][static_cast<std::size_t>(sequence[first + i])]);
  }
  return total / static_cast<double>(predictions.size());
}

std::vector<double> q_redundancy(const TransitionTensor& q) {
  const int r = q.order();
  if (r < 1) throw std::domain_error("q_redundancy: tensor has no lag axes");
  const auto K = static_cast<std::size_t>(q.K());
  std::vector<double> out;
  for (int a = 0; a < r; ++a) {
    std::size_t stride = 1;
    for (int i = 0; i < a; ++i) stride *= K;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t j = 0; j < q.columns(); ++j) {
      const std::size_t digit = (j / stride) % K;
      for (std::size_t v = digit + 1; v < K; ++v) {
        const std::size_t j2 = j + (v - digit) * stride;
        const auto c1 = q.column(j);
        const auto c2 = q.column(j2);
        for (std::size_t k = 0; k < K; ++k) total += std::abs(c1[k] - c2[k]);
        ++pairs;
      }
    }
    out.push_back(total / static_cast<double>(pairs));
  }
  return out;
}

std::vector<double> q_redundancy(const PosteriorSamples& samples, std::size_t block) {
  if (samples.draws.empty()) throw std::domain_error("q_redundancy: no draws");
  std::vector<double> acc;
  for (const auto& d : samples.draws) {
    if (block >= d.q.size()) throw std::domain_error("q_redundancy: draw lacks the requested block");
    const auto s = q_redundancy(d.q[block]);
    if (acc.empty()) acc.assign(s.size(), 0.0);
    for (std::size_t a = 0; a < s.size(); ++a) acc[a] += s[a];
  }
  for (double& v : acc) v /= static_cast<double>(samples.draws.size());
  return acc;
}

std::vector<IntervalSummary> summarize(const PosteriorSamples& samples) {
  if (samples.draws.empty()) throw std::domain_error("summarize: no draws");
  const MixtureLayout layout(samples.spec);
  const auto names = layout.weight_names();
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& d : samples.draws) {
    const auto w = PosteriorSamples::flat_weights(d);
    for (std::size_t p = 0; p < names.size(); ++p) cols[p].push_back(w[p]);
  }
  std::vector<IntervalSummary> out;
  for (std::size_t p = 0; p < names.size(); ++p) out.push_back(summarize_values(names[p], std::move(cols[p])));
  return out;
}

}  // namespace mixtrans
