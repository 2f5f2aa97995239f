#include "mixtrans/mtd_models.hpp"

#include <algorithm>
#include <string>

namespace mixtrans {

namespace {

void check_lagged(std::span<const int> lagged, int K, int L) {
  if (static_cast<int>(lagged.size()) < L) {
    throw std::domain_error("transition: history shorter than the lag horizon");
  }
  for (int i = 0; i < L; ++i) {
    if (lagged[i] < 0 || lagged[i] >= K) {
      throw std::domain_error("transition: lagged state " + std::to_string(lagged[i] + 1) +
                              " outside 1.." + std::to_string(K));
    }
  }
}

template <class Params>
TransitionTensor full_tensor(const Params& params,
                             ProbVec (*transition)(const Params&, std::span<const int>)) {
  const int K = params.K();
  const int L = params.L();
  TransitionTensor out(K, L);
  for (std::size_t col = 0; col < out.columns(); ++col) {
    const auto lagged = rho_inverse(col, L, K);
    out.set_column(col, transition(params, lagged));
  }
  return out;
}

}  // namespace

void MtdParams::validate() const {
  if (q.order() != 1) throw std::domain_error("MtdParams: Q must be a K x K matrix");
  if (lambda.size() == 0) throw std::domain_error("MtdParams: empty lambda");
}

void MtdgParams::validate() const {
  if (lambda.size() != q.size() + 1) {
    throw std::domain_error("MtdgParams: lambda must have L + 1 entries");
  }
  for (const auto& m : q) {
    if (m.order() != 1 || m.K() != K()) {
      throw std::domain_error("MtdgParams: every Q must be K x K");
    }
  }
}

ProbVec mtd_transition(const MtdParams& params, std::span<const int> lagged) {
  const int K = params.K();
  check_lagged(lagged, K, params.L());
  std::vector<double> p(static_cast<std::size_t>(K), 0.0);
  for (int l = 0; l < params.L(); ++l) {
    const double w = params.lambda[static_cast<std::size_t>(l)];
    const auto col = params.q.column(static_cast<std::size_t>(lagged[l]));
    for (int k = 0; k < K; ++k) p[k] += w * col[k];
  }
  return ProbVec::normalized(std::move(p));
}

ProbVec mtdg_transition(const MtdgParams& params, std::span<const int> lagged) {
  const int K = params.K();
  check_lagged(lagged, K, params.L());
  std::vector<double> p(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) p[k] = params.lambda[0] * params.q0[k];
  for (int l = 1; l <= params.L(); ++l) {
    const double w = params.lambda[static_cast<std::size_t>(l)];
    const auto col = params.q[l - 1].column(static_cast<std::size_t>(lagged[l - 1]));
    for (int k = 0; k < K; ++k) p[k] += w * col[k];
  }
  return ProbVec::normalized(std::move(p));
}

ReducedMtdg mtdg_reduce(const MtdgParams& params) {
  params.validate();
  const int K = params.K();
  const int L = params.L();
  const auto Ku = static_cast<std::size_t>(K);

  std::vector<double> phi0(Ku);
  for (std::size_t k = 0; k < Ku; ++k) phi0[k] = params.lambda[0] * params.q0[k];

  std::vector<double> lambda(static_cast<std::size_t>(L) + 1);
  std::vector<TransitionTensor> q;
  std::vector<bool> active(static_cast<std::size_t>(L) + 1, true);
  q.reserve(static_cast<std::size_t>(L));

  for (int l = 1; l <= L; ++l) {
    const auto& Q = params.q[l - 1];
    const double w = params.lambda[static_cast<std::size_t>(l)];
    std::vector<double> phi(Ku * Ku);
    for (std::size_t j = 0; j < Ku; ++j) {
      for (std::size_t k = 0; k < Ku; ++k) phi[k + Ku * j] = w * Q(static_cast<int>(k), j);
    }
    for (std::size_t k = 0; k < Ku; ++k) {
      double a = phi[k];
      for (std::size_t j = 1; j < Ku; ++j) a = std::min(a, phi[k + Ku * j]);
      for (std::size_t j = 0; j < Ku; ++j) phi[k + Ku * j] -= a;
      phi0[k] += a;
    }
    // Column sums agree in exact arithmetic; average to spread rounding.
    double mass = 0.0;
    for (double v : phi) mass += v;
    mass /= static_cast<double>(Ku);
    if (mass <= 0.0) {
      lambda[static_cast<std::size_t>(l)] = 0.0;
      active[static_cast<std::size_t>(l)] = false;
      q.emplace_back(K, 1);
      continue;
    }
    lambda[static_cast<std::size_t>(l)] = mass;
    for (std::size_t j = 0; j < Ku; ++j) {
      double colsum = 0.0;
      for (std::size_t k = 0; k < Ku; ++k) colsum += phi[k + Ku * j];
      for (std::size_t k = 0; k < Ku; ++k) phi[k + Ku * j] /= colsum;
    }
    q.emplace_back(K, 1, std::move(phi));
  }

  double mass0 = 0.0;
  for (double v : phi0) mass0 += v;
  lambda[0] = mass0;
  ProbVec q0 = mass0 > 0.0 ? ProbVec::normalized(phi0) : ProbVec::uniform(Ku);
  active[0] = mass0 > 0.0;

  return ReducedMtdg{MtdgParams{ProbVec::normalized(std::move(lambda)), std::move(q0),
                                std::move(q)},
                     std::move(active)};
}

TransitionTensor build_full_tensor(const MtdParams& params) {
  return full_tensor<MtdParams>(params, &mtd_transition);
}

TransitionTensor build_full_tensor(const MtdgParams& params) {
  return full_tensor<MtdgParams>(params, &mtdg_transition);
}

}  // namespace mixtrans
