#pragma once

// Simplex vectors, stick-breaking, log-space helpers and seeded random draws.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixtrans {

inline constexpr double kSimplexTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;

/// Thrown when a simplex or tensor would exceed the materialization guard.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability vector: nonnegative entries summing to one within kSimplexTol.
class ProbVec {
 public:
  ProbVec() = default;
  explicit ProbVec(std::vector<double> values);

  /// Normalizes nonnegative weights. Throws if the total is not positive.
  static ProbVec normalized(std::vector<double> weights);
  static ProbVec uniform(std::size_t n);
  /// Unit vector with all mass at `index`.
  static ProbVec point_mass(std::size_t n, std::size_t index);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vec() const { return values_; }

  friend bool operator==(const ProbVec&, const ProbVec&) = default;

 private:
  std::vector<double> values_;
};

/// True when every entry is >= 0 and the sum is within `tol` of 1.
bool is_simplex(std::span<const double> v, double tol = kSimplexTol);

/// Break proportions X_1..X_{J-1}, each in [0,1].
class StickFractions {
 public:
  StickFractions() = default;
  explicit StickFractions(std::vector<double> x);

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> values() const { return x_; }

 private:
  std::vector<double> x_;
};

ProbVec stick_break(const StickFractions& x);

/// Inverse of stick_break. A fraction whose remaining stick is empty is 0.
StickFractions stick_unbreak(const ProbVec& theta);

double log_sum_exp(std::span<const double> values);

/// Seeded random stream. The same (seed, stream) pair always reproduces the
/// same sequence; all variates are generated here rather than through
/// <random> distributions so results do not depend on the standard library.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// log of a Gamma(shape, 1) variate; stays finite for very small shapes.
  double log_gamma(double shape);
  double gamma(double shape);
  double beta(double a, double b);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Draws index i with probability exp(lw_i - log_sum_exp(lw)).
std::size_t sample_categorical(std::span<const double> log_weights,
                               RngStream& rng);

/// Dirichlet draw computed from log-gamma variates.
ProbVec sample_dirichlet(std::span<const double> alpha, RngStream& rng);

/// Equal-tailed sample quantile (type 7) of unsorted data.
double quantile(std::vector<double> data, double p);

}  // namespace mixtrans
