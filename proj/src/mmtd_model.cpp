#include "mixtrans/mmtd_model.hpp"

#include <algorithm>
#include <string>

namespace mixtrans {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) {
    out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return out;
}

std::vector<LagConfig> enumerate_configs(int L, int r) {
  if (r < 0 || r > L) {
    throw std::domain_error("enumerate_configs: order " + std::to_string(r) +
                            " outside 0.." + std::to_string(L));
  }
  std::vector<LagConfig> out;
  out.reserve(binomial(L, r));
  LagConfig cur(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) cur[i] = i + 1;
  for (;;) {
    out.push_back(cur);
    int i = r - 1;
    while (i >= 0 && cur[i] == L - r + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::size_t config_rank(const LagConfig& config, int L) {
  const int r = static_cast<int>(config.size());
  std::size_t rank = 0;
  int prev = 0;
  for (int i = 0; i < r; ++i) {
    if (config[i] <= prev || config[i] > L) {
      throw std::domain_error("config_rank: lags must be increasing within 1..L");
    }
    for (int v = prev + 1; v < config[i]; ++v) rank += binomial(L - v, r - i - 1);
    prev = config[i];
  }
  return rank;
}

ZetaMap::ZetaMap(int L, int R) : L_(L), R_(R) {
  if (L < 1 || R < 0 || R > L) {
    throw std::domain_error("ZetaMap: need 0 <= R <= L and L >= 1");
  }
  for (int r = 0; r <= R; ++r) {
    offsets_.push_back(entries_.size());
    for (auto& c : enumerate_configs(L, r)) entries_.push_back({r, std::move(c)});
  }
  offsets_.push_back(entries_.size());
}

const ZetaMap::Entry& ZetaMap::decode(std::size_t zeta) const {
  if (zeta >= entries_.size()) {
    throw std::domain_error("ZetaMap::decode: zeta " + std::to_string(zeta) +
                            " out of range");
  }
  return entries_[zeta];
}

std::size_t ZetaMap::encode(int order, const LagConfig& lags) const {
  if (order < 0 || order > R_ || static_cast<int>(lags.size()) != order) {
    throw std::domain_error("ZetaMap::encode: inconsistent order");
  }
  return offsets_[static_cast<std::size_t>(order)] + config_rank(lags, L_);
}

std::size_t ZetaMap::count(int order) const {
  return offsets_.at(static_cast<std::size_t>(order) + 1) -
         offsets_.at(static_cast<std::size_t>(order));
}

void MmtdParams::validate() const {
  const int R = this->R();
  if (R < 0 || static_cast<int>(Lambda.size()) != R + 1) {
    throw std::domain_error("MmtdParams: Lambda must have R + 1 entries");
  }
  if (static_cast<int>(lambda.size()) != R) {
    throw std::domain_error("MmtdParams: need one lambda vector per order 1..R");
  }
  for (int r = 1; r <= R; ++r) {
    if (lambda[r - 1].size() != binomial(L, r)) {
      throw std::domain_error("MmtdParams: lambda for order " + std::to_string(r) +
                              " must have C(L, r) entries");
    }
  }
  for (int r = 0; r <= R; ++r) {
    if (Q[r].order() != r || Q[r].K() != K()) {
      throw std::domain_error("MmtdParams: Q tensor orders must be 0..R");
    }
  }
}

ProbVec mmtd_transition(const MmtdParams& params, std::span<const int> lagged) {
  const int K = params.K();
  const int L = params.L;
  if (static_cast<int>(lagged.size()) < L) {
    throw std::domain_error("mmtd_transition: history shorter than L");
  }
  for (int i = 0; i < L; ++i) {
    if (lagged[i] < 0 || lagged[i] >= K) {
      throw std::domain_error("mmtd_transition: state out of range");
    }
  }
  std::vector<double> p(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) p[k] = params.Lambda[0] * params.Q[0](k, 0);
  std::vector<int> sub;
  for (int r = 1; r <= params.R(); ++r) {
    const auto configs = enumerate_configs(L, r);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const double w = params.Lambda[static_cast<std::size_t>(r)] * params.lambda[r - 1][c];
      if (w == 0.0) continue;
      sub.clear();
      for (int l : configs[c]) sub.push_back(lagged[l - 1]);
      const auto col = params.Q[r].column(rho(sub, K));
      for (int k = 0; k < K; ++k) p[k] += w * col[k];
    }
  }
  return ProbVec::normalized(std::move(p));
}

TransitionTensor build_full_tensor(const MmtdParams& params) {
  const int K = params.K();
  TransitionTensor out(K, params.L);
  for (std::size_t col = 0; col < out.columns(); ++col) {
    out.set_column(col, mmtd_transition(params, rho_inverse(col, params.L, K)));
  }
  return out;
}

ParamCount param_count(int K, int L, int R) {
  if (K < 2 || R < 1 || R > L) {
    throw std::domain_error("param_count: need K >= 2 and 1 <= R <= L");
  }
  ParamCount out{};
  out.n_Lambda = static_cast<std::uint64_t>(R);
  std::uint64_t configs = 0;
  for (int r = 1; r <= R; ++r) configs += binomial(L, r);
  out.n_lambda = configs - static_cast<std::uint64_t>(R);
  std::uint64_t kr1 = 1;
  for (int i = 0; i <= R; ++i) kr1 *= static_cast<std::uint64_t>(K);
  out.n_Q = kr1 - 1;
  out.total = out.n_Lambda + out.n_lambda + out.n_Q;
  std::uint64_t kl = 1;
  for (int i = 0; i < L; ++i) kl *= static_cast<std::uint64_t>(K);
  out.unrestricted = kl * static_cast<std::uint64_t>(K - 1);
  return out;
}

std::vector<std::vector<double>> matricize(const TransitionTensor& q) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(q.K()),
                                        std::vector<double>(q.columns()));
  for (std::size_t j = 0; j < q.columns(); ++j) {
    for (int k = 0; k < q.K(); ++k) rows[k][j] = q(k, j);
  }
  return rows;
}

TransitionTensor tensorize(const std::vector<std::vector<double>>& rows, int order) {
  const int K = static_cast<int>(rows.size());
  const std::size_t cols = checked_power(K, order);
  std::vector<double> data(static_cast<std::size_t>(K) * cols);
  for (int k = 0; k < K; ++k) {
    if (rows[k].size() != cols) throw std::domain_error("tensorize: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) data[k + K * j] = rows[k][j];
  }
  return TransitionTensor(K, order, std::move(data));
}

}  // namespace mixtrans
