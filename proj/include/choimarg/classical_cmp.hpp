#pragma once

// The marginal problem for classical channels (conditional probability
// tables): marginals, composition along a chain, linear-programming
// robustness and the PR-box example.

#include <optional>
#include <string>
#include <vector>

#include "choimarg/conic.hpp"
#include "choimarg/marginals.hpp"

namespace choimarg {

struct ClassicalMarginal {
  std::optional<StochasticChannel> channel;
  /// Largest change of P(x | x', r) over the ignored inputs r.
  double residual = 0.0;
  bool well_defined() const { return channel.has_value(); }
};

/// P(x | x') obtained by summing out S\X, defined when the result does not
/// depend on the inputs outside X' (within tol_eq).
ClassicalMarginal classical_marginal(const StochasticChannel& p, const OutputInputPair& pair,
                                     double tol_eq = 1e-7);

OutputInputPair pair_of(const StochasticChannel& ch);

class ClassicalScenario {
 public:
  ClassicalScenario() = default;
  /// Throws InvalidScenario for unknown labels, mismatched alphabet sizes
  /// or repeated pairs.
  ClassicalScenario(LabeledSpace global_out, LabeledSpace global_in,
                    std::vector<StochasticChannel> channels);

  const LabeledSpace& global_out() const noexcept { return out_; }
  const LabeledSpace& global_in() const noexcept { return in_; }
  const std::vector<OutputInputPair>& pairs() const noexcept { return pairs_; }
  const std::vector<StochasticChannel>& channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return channels_.size(); }

 private:
  LabeledSpace out_;
  LabeledSpace in_;
  std::vector<OutputInputPair> pairs_;
  std::vector<StochasticChannel> channels_;
};

/// P(abc | xyz) = P(ab | xy) P(bc | yz) / P(b | y) where B and Y are the
/// shared output and input labels. Entries with P(b | y) = 0 are set to 0;
/// any probability a column then misses is put on its first output.
/// Throws LocallyIncompatible if the shared marginal is missing or differs.
StochasticChannel compose_chain(const StochasticChannel& first, const StochasticChannel& second,
                                double tol_eq = 1e-7);

/// Every pair of channels agrees on its overlap. Same report type as the
/// quantum check.
LocalCompatibilityReport classical_local_compatibility(const ClassicalScenario& scenario,
                                                       double tol_eq = 1e-7);

/// Largest lambda such that some no-signaling global table has every
/// marginal entrywise above lambda times the target, solved as a linear
/// program. Throws SolverFailure when the solver does not converge.
double classical_robustness(const ClassicalScenario& scenario, const SolverOptions& opts = {});

/// The linear program behind classical_robustness; the last two variables
/// before the slacks are lambda and 1 - lambda.
ConicProgram build_classical_lp(const ClassicalScenario& scenario);

/// P(ab | xy) = 1/2 if a xor b = x y, on binary alphabets.
StochasticChannel pr_box(const std::string& a, const std::string& b, const std::string& x,
                         const std::string& y);

/// PR boxes on AB|XY, AC|XZ and BC|YZ.
ClassicalScenario pr_box_scenario();

/// The classical-to-classical quantum channel with Choi
/// sum P(s | s') |s><s| (x) |s'><s'| / d_in.
QuantumChannel embed_classical(const StochasticChannel& p);

MarginalScenario embed_scenario(const ClassicalScenario& scenario);

}  // namespace choimarg
