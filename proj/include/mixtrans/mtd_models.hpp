#pragma once

// Mixture transition distribution models with a single shared transition
// matrix (MTD) or one matrix per lag plus an intercept (MTDg), and the
// maximal-reduction map that makes MTDg parameters identifiable.
//
// Lagged histories are passed most-recent first: lagged[0] = s_{t-1}.

#include <span>
#include <vector>

#include "mixtrans/prob_core.hpp"
#include "mixtrans/tensor.hpp"

namespace mixtrans {

struct MtdParams {
  ProbVec lambda;     // length L
  TransitionTensor q;  // order 1, K x K

  int K() const { return q.K(); }
  int L() const { return static_cast<int>(lambda.size()); }
  void validate() const;
};

struct MtdgParams {
  ProbVec lambda;                 // length L + 1, intercept first
  ProbVec q0;                     // length K
  std::vector<TransitionTensor> q;  // L matrices, order 1

  int K() const { return static_cast<int>(q0.size()); }
  int L() const { return static_cast<int>(q.size()); }
  void validate() const;
};

/// MTDg after maximal reduction. Lags whose reduced weight is zero carry
/// uniform matrices and are flagged inactive.
struct ReducedMtdg {
  MtdgParams params;
  std::vector<bool> active;  // length L + 1; active[0] refers to the intercept
};

ProbVec mtd_transition(const MtdParams& params, std::span<const int> lagged);
ProbVec mtdg_transition(const MtdgParams& params, std::span<const int> lagged);

ReducedMtdg mtdg_reduce(const MtdgParams& params);

/// Full order-L tensor with entry [k0, k1..kL] at column rho(k1..kL).
TransitionTensor build_full_tensor(const MtdParams& params);
TransitionTensor build_full_tensor(const MtdgParams& params);

}  // namespace mixtrans
