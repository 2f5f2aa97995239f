#pragma once

// Summaries of posterior draws: lag inclusion, predictive transitions, loss
// scoring, transition-tensor redundancy and interval tables.

#include <span>
#include <string>
#include <vector>

#include "mixtrans/inference.hpp"

namespace mixtrans {

/// Printed next to every inclusion table.
extern const char* const kLagZeroCaveat;

struct IntervalSummary {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

IntervalSummary summarize_values(std::string name, std::vector<double> values);

struct InclusionIndex {
  /// per_draw[d][l], l = 0..L; l = 0 is the intercept.
  std::vector<std::vector<double>> per_draw;
  std::vector<IntervalSummary> summary;  // one row per lag 0..L
};

/// Inclusion index of one draw: for each lag, the summed weight of every
/// component whose configuration contains it (lag 0: the intercept weight).
std::vector<double> inclusion_at(const MixtureLayout& layout, const Draw& d);
InclusionIndex lag_inclusion(const PosteriorSamples& samples);

struct Prediction {
  ProbVec mean;
  std::vector<double> lo95;
  std::vector<double> hi95;
};

/// Posterior mean transition for a most-recent-first history of >= L states.
Prediction predict_transition(const PosteriorSamples& samples, std::span<const int> lagged);

/// Posterior mean transitions at every time t >= first of `sequence`, using
/// the preceding L states as history.
std::vector<ProbVec> predict_sequence(const PosteriorSamples& samples,
                                      const StateSequence& sequence, std::size_t first);

/// 100 * sum_t sum_k |est - truth| / (K * T').
double l1_loss(const std::vector<ProbVec>& estimates, const std::vector<ProbVec>& truth);

/// Mean log predictive probability of the observed states.
double mean_log_score(const std::vector<ProbVec>& predictions, const StateSequence& sequence,
                      std::size_t first);

/// For each lag axis a = 1..r, the mean L1 distance between outcome
/// distributions of column pairs that differ only in coordinate a.
std::vector<double> q_redundancy(const TransitionTensor& q);
/// Mean of q_redundancy over draws for transition block b.
std::vector<double> q_redundancy(const PosteriorSamples& samples, std::size_t block);

/// Mean, median and 95% equal-tailed interval of every weight, pooled over chains.
std::vector<IntervalSummary> summarize(const PosteriorSamples& samples);

}  // namespace mixtrans
