#pragma once

// Channel-form witnesses and ensemble state-discrimination tasks built from
// Choi-level incompatibility witnesses.

#include <optional>
#include <vector>

#include "choimarg/cmp_sdp.hpp"

namespace choimarg {

/// One term E (x) rho^T of a product decomposition: E Hermitian on the
/// output X, rho a state on the input X'.
struct ProductTerm {
  CMatrix effect;
  CMatrix state;
};

struct ProductDecomposition {
  LabeledSpace out_space;
  LabeledSpace in_space;
  std::vector<ProductTerm> terms;
  /// Max-entry residual of the reconstruction.
  double residual = 0.0;

  /// sum_j E_j (x) rho_j^T on out (x) in, which equals H / d_in.
  LabeledOperator reconstruct() const;
};

/// The fixed informationally complete set of input states: computational
/// projectors followed by the (|k> + |l>) and (|k> + i|l>) projectors, k < l.
std::vector<CMatrix> informationally_complete_states(std::size_t d);

/// Writes H on X (x) X' as d_X' * sum_j E_j (x) rho_j^T over the fixed
/// state set on X'. in_labels names the X' factors of H; the rest form X.
/// Throws DecompositionFailure if the reconstruction residual exceeds 1e-8.
ProductDecomposition product_decompose(const LabeledOperator& h,
                                       const std::vector<std::string>& in_labels);

/// sum_j tr[E_j N(rho_j)] through channel application.
double evaluate_terms(const std::vector<ProductTerm>& terms, const QuantumChannel& channel);

struct ChannelWitness {
  /// Per pair, padded with zero effects to a common length.
  std::vector<std::vector<ProductTerm>> terms;
  /// sum over pairs and terms of tr[E N(rho)] for the scenario's channels.
  double lhs = 0.0;
  /// The same sum maximized over compatible channel families.
  double rhs = 0.0;
  /// Common term count after padding.
  std::size_t length = 0;
  /// (max over pairs of max(d_X, d_X'))^2 + 3.
  std::size_t bound = 0;
  /// False when some pair needed more terms than the bound allows.
  bool within_bound = true;
  bool null() const { return terms.empty(); }
  double margin() const { return lhs - rhs; }
};

/// Decomposes the dual witness of a scenario with R < 1 into channel form.
/// A compatible scenario (R >= 1 - compat_tol) yields a null witness.
/// Throws InvalidWitness if the decomposed witness fails to separate.
ChannelWitness channel_form_witness(const MarginalScenario& scenario, const CmpOptions& opts = {},
                                    double compat_tol = 1e-5);

/// Choi-level operator d_X' sum_j E_j (x) rho_j^T of one pair, in the
/// channel's factor order.
LabeledOperator reassemble(const std::vector<ProductTerm>& terms, const QuantumChannel& shape);

struct PairTask {
  LabeledSpace out_space;
  LabeledSpace in_space;
  std::vector<double> q;
  std::vector<CMatrix> states;
  std::vector<CMatrix> povm;
};

struct DiscriminationTask {
  std::vector<double> p;
  std::vector<PairTask> pairs;
  double epsilon = 0.0;

  /// Throws InvalidScenario when the probabilities, states or POVMs are
  /// malformed.
  void validate(double tol = 1e-9) const;
  /// p > 0, q > 0 and every POVM element positive definite.
  bool strictly_positive(double tol = 0.0) const;
};

struct TaskOptions {
  std::optional<double> epsilon;
  /// Margin added above -lambda_min when shifting each effect.
  double delta_pos = 1e-3;
};

/// Builds a strictly positive task on which the scenario's channels beat
/// every compatible family. Throws NoAdvantagePossible for a null or
/// non-separating witness.
DiscriminationTask build_discrimination_task(const MarginalScenario& scenario,
                                             const ChannelWitness& witness,
                                             const TaskOptions& task_opts = {},
                                             const CmpOptions& opts = {});

/// P(D, N) = sum_p p sum_i q_i tr[M_i N_p(rho_i)]. Throws LabelMismatch when
/// a channel does not fit its pair.
double success_probability(const DiscriminationTask& task,
                           const std::vector<QuantumChannel>& channels);

/// max of P(D, L) over compatible families L of the scenario's shape.
double compatible_success_max(const DiscriminationTask& task, const MarginalScenario& scenario,
                              const CmpOptions& opts = {});

/// Max over compatible families of sum_p tr(H_p L_p) for Hermitian (not
/// necessarily positive) H_p, by shifting each H_p with a multiple of the
/// identity.
double hermitian_max_over_compatible(const MarginalScenario& scenario,
                                     const std::vector<LabeledOperator>& h,
                                     const CmpOptions& opts = {});

}  // namespace choimarg
