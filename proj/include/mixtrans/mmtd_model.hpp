#pragma once

// Mixture of mixture transition distributions: a convex mixture over orders
// 0..R, where order r mixes over every r-subset of the L lags through one
// shared order-r transition tensor.

#include <cstdint>
#include <span>
#include <vector>

#include "mixtrans/mtd_models.hpp"
#include "mixtrans/prob_core.hpp"
#include "mixtrans/tensor.hpp"

namespace mixtrans {

/// Strictly increasing 1-based lags (l_1 < ... < l_r).
using LagConfig = std::vector<int>;

std::uint64_t binomial(int n, int k);

/// All C(L, r) lag configurations in lexicographic order.
std::vector<LagConfig> enumerate_configs(int L, int r);

/// Lexicographic rank of `config` among enumerate_configs(L, config.size()).
std::size_t config_rank(const LagConfig& config, int L);

/// Bijection between a single allocation index zeta and (order, config).
/// Entry 0 is the intercept; then order 1 configs, order 2 configs, ...
class ZetaMap {
 public:
  struct Entry {
    int order;
    LagConfig lags;
  };

  ZetaMap(int L, int R);

  int L() const { return L_; }
  int R() const { return R_; }
  std::size_t size() const { return entries_.size(); }

  const Entry& decode(std::size_t zeta) const;
  std::size_t encode(int order, const LagConfig& lags) const;
  /// First zeta of the given order.
  std::size_t offset(int order) const { return offsets_.at(static_cast<std::size_t>(order)); }
  std::size_t count(int order) const;

 private:
  int L_;
  int R_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_;
};

struct MmtdParams {
  ProbVec Lambda;                   // length R + 1
  std::vector<ProbVec> lambda;      // lambda[r-1] has C(L, r) entries
  std::vector<TransitionTensor> Q;  // Q[r] has order r, r = 0..R
  int L = 0;

  int K() const { return Q.empty() ? 0 : Q[0].K(); }
  int R() const { return static_cast<int>(Q.size()) - 1; }
  void validate() const;
};

ProbVec mmtd_transition(const MmtdParams& params, std::span<const int> lagged);
TransitionTensor build_full_tensor(const MmtdParams& params);

struct ParamCount {
  std::uint64_t n_Lambda;
  std::uint64_t n_lambda;
  std::uint64_t n_Q;
  std::uint64_t total;
  std::uint64_t unrestricted;
};

ParamCount param_count(int K, int L, int R);

/// K x K^r matrix rows of the matricized tensor (row = outcome state).
std::vector<std::vector<double>> matricize(const TransitionTensor& q);
TransitionTensor tensorize(const std::vector<std::vector<double>>& rows, int order);

}  // namespace mixtrans
