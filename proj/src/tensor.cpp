#include "mixtrans/tensor.hpp"

#include <string>

namespace mixtrans {

std::uint64_t checked_power(int K, int e) {
  if (K < 1 || e < 0) throw std::domain_error("checked_power: bad arguments");
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) {
    out *= static_cast<std::uint64_t>(K);
    if (out > kMaxTensorEntries) {
      throw CapacityError("tensor with " + std::to_string(K) + "^" +
                          std::to_string(e) + " entries exceeds the cap");
    }
  }
  return out;
}

StateSequence::StateSequence(std::vector<int> states, int K)
    : states_(std::move(states)), K_(K) {
  if (K < 1) throw std::domain_error("StateSequence: K must be positive");
  for (std::size_t t = 0; t < states_.size(); ++t) {
    if (states_[t] < 0 || states_[t] >= K) {
      throw std::domain_error("StateSequence: state " + std::to_string(states_[t] + 1) +
                              " at position " + std::to_string(t + 1) +
                              " outside 1.." + std::to_string(K));
    }
  }
}

StateSequence StateSequence::from_one_based(std::span<const int> labels, int K) {
  std::vector<int> s(labels.begin(), labels.end());
  for (int& v : s) --v;
  return StateSequence(std::move(s), K);
}

std::vector<int> StateSequence::one_based() const {
  std::vector<int> out(states_);
  for (int& v : out) ++v;
  return out;
}

std::size_t rho(std::span<const int> lagged, int K) {
  std::size_t col = 0;
  std::size_t stride = 1;
  for (int k : lagged) {
    if (k < 0 || k >= K) throw std::domain_error("rho: state out of range");
    col += static_cast<std::size_t>(k) * stride;
    stride *= static_cast<std::size_t>(K);
  }
  return col;
}

std::vector<int> rho_inverse(std::size_t column, int order, int K) {
  std::vector<int> out(static_cast<std::size_t>(order));
  for (auto& k : out) {
    k = static_cast<int>(column % static_cast<std::size_t>(K));
    column /= static_cast<std::size_t>(K);
  }
  return out;
}

TransitionTensor::TransitionTensor(int K, int order)
    : K_(K), order_(order), columns_(checked_power(K, order)) {
  checked_power(K, order + 1);
  data_.assign(static_cast<std::size_t>(K) * columns_, 1.0 / K);
}

TransitionTensor::TransitionTensor(int K, int order, std::vector<double> data)
    : K_(K), order_(order), columns_(checked_power(K, order)), data_(std::move(data)) {
  checked_power(K, order + 1);
  if (data_.size() != static_cast<std::size_t>(K) * columns_) {
    throw std::domain_error("TransitionTensor: data size does not match K^(r+1)");
  }
  if (!is_stochastic()) {
    throw std::domain_error("TransitionTensor: columns must be probability vectors");
  }
}

double TransitionTensor::at(int k0, std::span<const int> lagged) const {
  if (static_cast<int>(lagged.size()) != order_) {
    throw std::domain_error("TransitionTensor::at: wrong number of lagged states");
  }
  if (k0 < 0 || k0 >= K_) throw std::domain_error("TransitionTensor::at: bad outcome");
  return (*this)(k0, rho(lagged, K_));
}

void TransitionTensor::set_column(std::size_t j, const ProbVec& p) {
  if (p.size() != static_cast<std::size_t>(K_)) {
    throw std::domain_error("TransitionTensor::set_column: size mismatch");
  }
  std::copy(p.values().begin(), p.values().end(),
            data_.begin() + static_cast<std::ptrdiff_t>(K_ * j));
}

bool TransitionTensor::is_stochastic(double tol) const {
  for (std::size_t j = 0; j < columns_; ++j) {
    if (!is_simplex(column(j), tol)) return false;
  }
  return true;
}

}  // namespace mixtrans
