#pragma once

// Incompatibility robustness of a marginal scenario as a semidefinite
// program over global Choi states, its dual, and dual witnesses.
//
// The global Choi state rho lives on S (x) S' with the output labels first.

#include <optional>
#include <vector>

#include "choimarg/conic.hpp"
#include "choimarg/marginals.hpp"

namespace choimarg {

struct CmpOptions {
  SolverOptions solver;
  /// Largest complex dimension d_S * d_S' accepted for the global block.
  std::size_t max_dim = 256;
  ToleranceConfig tol;
};

/// Block layout of the program returned by build_primal: the realified
/// global state, one realified slack per pair, and a diagonal block holding
/// (lambda, 1 - lambda).
struct PrimalLayout {
  int rho = 0;
  std::vector<int> slack;
  int lambda = 0;
};

/// The robustness program
///
///   max lambda  s.t.  rho >= 0,  tr_S rho = I/d_S',  0 <= lambda <= 1,
///   tr_{S\X} rho = tr_{SS'\XX'} rho (x) I/d  and  tr_{SS'\XX'} rho - lambda E_XX' = W >= 0
///
/// for every pair. Given the factorization equality, the operator inequality
/// on XS' is equivalent to the one on XX', so the slack W lives on XX'.
/// Throws CapacityExceeded when d_S * d_S' exceeds opts.max_dim.
ConicProgram build_primal(const MarginalScenario& scenario, const CmpOptions& opts = {},
                          PrimalLayout* layout = nullptr);

/// The dual program in the solver's dual form (min b^T y subject to an LMI):
/// y collects the coordinates of H_S', of each H_XS' (restricted to the part
/// that does not cancel), of each Z_XS' and z.
ConicProgram build_dual(const MarginalScenario& scenario, const CmpOptions& opts = {});

struct RobustnessReport {
  double R = 0.0;
  /// Optimal global Choi state on S (x) S'.
  LabeledOperator global_choi;
  /// N_{X|X'} per pair; completely depolarizing when R rounds to 1.
  std::vector<QuantumChannel> noise_channels;
  /// Positive H~_{X|X'} on XX' per pair, read off the dual slack.
  std::vector<LabeledOperator> dual_witness;
  double primal_dual_gap = 0.0;
  ConicSolution solution;
};

/// Solves build_primal. Throws SolverFailure if the solver does not reach
/// an optimal status.
RobustnessReport robustness(const MarginalScenario& scenario, const CmpOptions& opts = {});

/// R >= 1 - tol.
bool is_compatible(const MarginalScenario& scenario, double tol = 1e-5,
                   const CmpOptions& opts = {});

/// A global channel S' -> S with the given marginals, if one exists.
std::optional<QuantumChannel> feasibility_global(const MarginalScenario& scenario,
                                                 double tol = 1e-5, const CmpOptions& opts = {});

/// Optimum of the build_dual program.
double dual_robustness(const MarginalScenario& scenario, const CmpOptions& opts = {});

/// max over compatible families L of sum_p tr(H_p L_p). One operator per
/// pair, on the pair's labels in the channel's factor order. Throws
/// InvalidWitness for non-PSD or misshaped operators.
double witness_max_over_compatible(const MarginalScenario& scenario,
                                   const std::vector<LabeledOperator>& h,
                                   const CmpOptions& opts = {});

/// sum_p tr(H_p E_p) for the scenario's own channels.
double witness_value(const MarginalScenario& scenario, const std::vector<LabeledOperator>& h);

struct WitnessCertificate {
  std::vector<LabeledOperator> operators;
  double value_on_input = 0.0;
  double compatible_max = 0.0;
  /// value_on_input - compatible_max
  double margin = 0.0;

  bool valid(double tol_margin = 1e-9) const { return margin > tol_margin; }
};

WitnessCertificate verify_witness(const MarginalScenario& scenario,
                                  const std::vector<LabeledOperator>& h,
                                  const CmpOptions& opts = {});

/// Violations of the robustness constraints at a given point, computed
/// directly with partial traces.
struct PrimalResiduals {
  /// Negative part of the smallest eigenvalue of rho.
  double positivity = 0.0;
  /// max |tr_S rho - I/d_S'|
  double normalization = 0.0;
  /// Per pair: max |tr_{S\X} rho - tr_{SS'\XX'} rho (x) I/d|
  std::vector<double> factorization;
  /// Per pair: negative part of the smallest eigenvalue of
  /// tr_{S\X} rho - lambda E (x) I/d.
  std::vector<double> dominance;

  double worst() const;
};

PrimalResiduals primal_residuals(const MarginalScenario& scenario, const LabeledOperator& rho,
                                 double lambda);

}  // namespace choimarg
