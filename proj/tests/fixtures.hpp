#pragma once

// Random parameter objects shared by unit and acceptance tests.

#include <vector>

#include "mixtrans/mmtd_model.hpp"
#include "mixtrans/mtd_models.hpp"
#include "mixtrans/priors.hpp"

namespace fixtures {

using namespace mixtrans;

inline TransitionTensor random_tensor(int K, int order, RngStream& rng, double shape = 1.0) {
  TransitionTensor q(K, order);
  const std::vector<double> alpha(static_cast<std::size_t>(K), shape);
  for (std::size_t j = 0; j < q.columns(); ++j) q.set_column(j, sample_dirichlet(alpha, rng));
  return q;
}

inline ProbVec random_simplex(std::size_t n, RngStream& rng, double shape = 1.0) {
  return sample_dirichlet(std::vector<double>(n, shape), rng);
}

inline MtdgParams random_mtdg(int K, int L, RngStream& rng) {
  MtdgParams p{random_simplex(static_cast<std::size_t>(L) + 1, rng), random_simplex(static_cast<std::size_t>(K), rng), {}};
  for (int l = 0; l < L; ++l) p.q.push_back(random_tensor(K, 1, rng));
  return p;
}

inline MmtdParams random_mmtd(int K, int L, int R, RngStream& rng) {
  MmtdParams p;
  p.L = L;
  p.Lambda = random_simplex(static_cast<std::size_t>(R) + 1, rng);
  for (int r = 1; r <= R; ++r) p.lambda.push_back(random_simplex(binomial(L, r), rng));
  for (int r = 0; r <= R; ++r) p.Q.push_back(random_tensor(K, r, rng));
  return p;
}

inline std::vector<int> random_history(int K, int L, RngStream& rng) {
  std::vector<int> h(static_cast<std::size_t>(L));
  for (auto& s : h) s = static_cast<int>(rng.index(static_cast<std::size_t>(K)));
  return h;
}

}  // namespace fixtures
