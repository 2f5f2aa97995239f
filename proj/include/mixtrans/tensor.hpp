#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixtrans/prob_core.hpp"

namespace mixtrans {

/// Upper bound on entries of any materialized transition tensor.
inline constexpr std::uint64_t kMaxTensorEntries = 100'000'000;

/// K^e as an unsigned count; throws CapacityError past kMaxTensorEntries.
std::uint64_t checked_power(int K, int e);

/// Time-ordered categorical observations, stored 0-based in {0..K-1}.
/// The 1-based labels used in files are converted at the I/O boundary.
class StateSequence {
 public:
  StateSequence() = default;
  StateSequence(std::vector<int> states, int K);
  static StateSequence from_one_based(std::span<const int> labels, int K);

  int K() const { return K_; }
  std::size_t size() const { return states_.size(); }
  int operator[](std::size_t t) const { return states_[t]; }
  std::span<const int> states() const { return states_; }
  std::vector<int> one_based() const;

 private:
  std::vector<int> states_;
  int K_ = 0;
};

/// Column index of a lagged-state vector in the matricized order-r tensor.
/// The first coordinate (most recent selected lag) varies fastest.
std::size_t rho(std::span<const int> lagged, int K);
/// Inverse of rho.
std::vector<int> rho_inverse(std::size_t column, int order, int K);

/// Order-r transition tensor Q[k0, k1..kr], held as its K x K^r matricized
/// form in column-major order. Each column is a distribution over k0.
class TransitionTensor {
 public:
  TransitionTensor() = default;
  /// Tensor of the given order with uniform columns.
  TransitionTensor(int K, int order);
  TransitionTensor(int K, int order, std::vector<double> data);

  int K() const { return K_; }
  int order() const { return order_; }
  std::size_t columns() const { return columns_; }

  double operator()(int k0, std::size_t column) const {
    return data_[static_cast<std::size_t>(k0) + static_cast<std::size_t>(K_) * column];
  }
  double& operator()(int k0, std::size_t column) {
    return data_[static_cast<std::size_t>(k0) + static_cast<std::size_t>(K_) * column];
  }
  /// Entry Q[k0, lagged[0], ..., lagged[r-1]].
  double at(int k0, std::span<const int> lagged) const;

  std::span<const double> column(std::size_t j) const {
    return {data_.data() + static_cast<std::size_t>(K_) * j, static_cast<std::size_t>(K_)};
  }
  void set_column(std::size_t j, const ProbVec& p);

  std::span<const double> data() const { return data_; }

  /// Checks every outcome slice sums to one.
  bool is_stochastic(double tol = kSimplexTol) const;

 private:
  int K_ = 0;
  int order_ = 0;
  std::size_t columns_ = 0;
  std::vector<double> data_;
};

}  // namespace mixtrans
