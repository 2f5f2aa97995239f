#pragma once

// Synthetic chains with known transition laws and the fit-and-score study
// loop used to compare models on them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixtrans/inference.hpp"
#include "mixtrans/postprocess.hpp"

namespace mixtrans {

struct ScenarioSpec {
  int K = 3;
  std::vector<int> active_lags{1, 3, 4};  // strictly increasing, 1-based
  std::size_t train = 500;
  std::size_t validation = 1000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;
  /// Validation states preceded by this many training states; 0 uses the
  /// largest active lag.
  int context = 0;

  int order() const { return static_cast<int>(active_lags.size()); }
  int max_lag() const { return active_lags.empty() ? 0 : active_lags.back(); }
  int context_length() const { return std::max(context, max_lag()); }
  void validate() const;
};

/// True law: an order-r tensor over the active lags.
struct Truth {
  std::vector<int> active_lags;
  TransitionTensor q;

  int K() const { return q.K(); }
  int max_lag() const { return active_lags.empty() ? 0 : active_lags.back(); }
  /// Transition for a most-recent-first history of at least max_lag() states.
  ProbVec transition(std::span<const int> lagged) const;
};

/// Every outcome distribution drawn uniformly from the simplex.
Truth random_truth(const ScenarioSpec& spec, RngStream& rng);

struct SimulatedData {
  StateSequence train;
  /// The last context_length() training states followed by the validation states.
  StateSequence validation;
  std::size_t context = 0;
};

SimulatedData simulate_chain(const Truth& truth, const ScenarioSpec& spec, RngStream& rng);

/// True transitions at every validation point.
std::vector<ProbVec> true_transitions(const Truth& truth, const SimulatedData& data);

/// One model of a study. `profile` is a prior profile name, "oracle" (the
/// truth itself) or "intercept" (serially independent categorical model).
struct RosterEntry {
  std::string label;
  std::string profile;
  int L = 1;
  int R = 1;
};

struct StudyRow {
  std::string label;
  double loss = 0.0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

struct StudyResult {
  Truth truth;
  SimulatedData data;
  std::vector<StudyRow> rows;
  std::vector<std::optional<PosteriorSamples>> fits;
};

/// Validation context needed so every roster model sees L states of history.
int study_context(const ScenarioSpec& scenario, const std::vector<RosterEntry>& roster);

StudyResult run_study(ScenarioSpec scenario, const std::vector<RosterEntry>& roster,
                      const McmcConfig& config);

/// The truth as a single fixed draw of an MMTD(max lag, order) model, so it
/// runs through the same prediction path as fitted models.
PosteriorSamples oracle_samples(const Truth& truth, std::size_t T);

/// Fits one roster entry to a training sequence.
PosteriorSamples fit_entry(const RosterEntry& entry, const StateSequence& train,
                           const McmcConfig& config);

}  // namespace mixtrans
