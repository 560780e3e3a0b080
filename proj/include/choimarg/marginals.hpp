#pragma once

#include <optional>
#include <string>
#include <vector>

#include "choimarg/channels.hpp"

namespace choimarg {

/// An output-input pair X|X'. Either side may be empty.
struct OutputInputPair {
  std::vector<std::string> out_labels;
  std::vector<std::string> in_labels;

  /// Equal as label sets on each side.
  bool same_as(const OutputInputPair& other) const;
};

/// Pair whose label lists follow the channel's own factor order.
OutputInputPair pair_of(const QuantumChannel& ch);

struct MarginalOutcome {
  /// Present only when the global channel has a well-defined marginal.
  std::optional<QuantumChannel> channel;
  /// Frobenius norm of T - tr_{S'\X'}(T) (x) I/d for T = tr_{S\X}(J).
  double residual = 0.0;
  /// tol_eq * dim(T), the threshold the residual was compared against.
  double threshold = 0.0;

  bool well_defined() const { return channel.has_value(); }
};

/// Signaling residual from S'\X' to X, as described in MarginalOutcome.
double signaling_residual(const QuantumChannel& global, const OutputInputPair& pair);

/// The reduced dynamics X' -> X, or an empty outcome if the global channel
/// signals from S'\X' to X. Throws LabelMismatch for labels outside the spaces.
MarginalOutcome marginal_channel(const QuantumChannel& global, const OutputInputPair& pair,
                                 const ToleranceConfig& tol = {});

bool is_no_signaling(const QuantumChannel& global, const OutputInputPair& pair,
                     const ToleranceConfig& tol = {});

/// Global spaces S, S' and one channel per output-input pair.
class MarginalScenario {
 public:
  MarginalScenario() = default;
  /// Pairs are read off the channels' spaces. Throws InvalidScenario for
  /// factors missing from (or with a different dimension than) the global
  /// spaces, for repeated pairs, and for channels with no factors at all.
  MarginalScenario(LabeledSpace global_out, LabeledSpace global_in,
                   std::vector<QuantumChannel> channels);

  const LabeledSpace& global_out() const noexcept { return out_; }
  const LabeledSpace& global_in() const noexcept { return in_; }
  const std::vector<OutputInputPair>& pairs() const noexcept { return pairs_; }
  const std::vector<QuantumChannel>& channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return channels_.size(); }

  /// Same shape with new channels (used for noisy mixtures).
  MarginalScenario with_channels(std::vector<QuantumChannel> channels) const;

 private:
  LabeledSpace out_;
  LabeledSpace in_;
  std::vector<OutputInputPair> pairs_;
  std::vector<QuantumChannel> channels_;
};

struct OverlapFailure {
  std::size_t first = 0;
  std::size_t second = 0;
  /// Trace distance between the overlap Chois, or the signaling residual
  /// when one of them has no well-defined overlap marginal.
  double residual = 0.0;
  std::string reason;
};

struct LocalCompatibilityReport {
  std::vector<OverlapFailure> failures;

  bool compatible() const { return failures.empty(); }
};

/// Checks that every two channels agree on their common output-input pair.
LocalCompatibilityReport local_compatibility_check(const MarginalScenario& scenario,
                                                   const ToleranceConfig& tol = {});

/// All channels share the full input S'. Throws InvalidScenario otherwise.
MarginalScenario broadcast_scenario(const std::vector<QuantumChannel>& channels);

/// k relabeled copies of `ch`, where the output factor `copy_out` and input
/// factor `copy_in` become `copy_out_i` and `copy_in_i` for i = 1..k.
MarginalScenario extendibility_scenario(const QuantumChannel& ch, const std::string& copy_out,
                                        const std::string& copy_in, std::size_t k);

}  // namespace choimarg
