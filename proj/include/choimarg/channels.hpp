#pragma once

// Quantum channels stored as Choi operators, plus the stochastic-matrix
// analogue used by the classical problem.
//
// Choi convention: J = (E (x) id)(|Psi+><Psi+|) on out_space (x) in_space, so a
// channel is trace preserving exactly when tr_out J = I / d_in.

#include <string>
#include <utility>
#include <vector>

#include "choimarg/tensor.hpp"

namespace choimarg {

class QuantumChannel {
 public:
  QuantumChannel() = default;
  /// Validates positivity and the input marginal. Throws InvalidChannel,
  /// LabelCollision (shared in/out labels), ShapeError.
  QuantumChannel(LabeledSpace in_space, LabeledSpace out_space, CMatrix choi,
                 const ToleranceConfig& tol = {});

  const LabeledSpace& in_space() const noexcept { return in_; }
  const LabeledSpace& out_space() const noexcept { return out_; }
  const LabeledOperator& choi() const noexcept { return choi_; }
  std::size_t d_in() const noexcept { return in_.dim(); }
  std::size_t d_out() const noexcept { return out_.dim(); }

 private:
  LabeledSpace in_;
  LabeledSpace out_;
  LabeledOperator choi_;
};

/// Largest violation of the channel conditions: max of the negative part of
/// the spectrum and the entrywise error of tr_out J - I/d_in.
double channel_residual(const LabeledSpace& in_space, const LabeledSpace& out_space,
                        const CMatrix& choi);

QuantumChannel choi_from_kraus(const std::vector<CMatrix>& kraus, const LabeledSpace& in_space,
                               const LabeledSpace& out_space, const ToleranceConfig& tol = {});

/// E(rho) for a state on in_space (factors may be listed in any order).
LabeledOperator apply(const QuantumChannel& ch, const LabeledOperator& rho);

/// (E (x) id_R)(rho) for an operator on in_space plus extra factors R.
/// The result lives on out_space followed by R in rho's order.
LabeledOperator apply_partial(const QuantumChannel& ch, const LabeledOperator& rho);

/// Identity channel; factor k of `in_space` maps to factor k of `out_space`.
QuantumChannel identity_channel(const LabeledSpace& in_space, const LabeledSpace& out_space);
/// rho -> tr(rho) I/d_out
QuantumChannel completely_depolarizing(const LabeledSpace& in_space,
                                       const LabeledSpace& out_space);
/// rho -> tr(rho) sigma
QuantumChannel constant_channel(const LabeledOperator& sigma, const LabeledSpace& in_space);
/// p * identity + (1 - p) * completely depolarizing, on matching spaces.
QuantumChannel depolarizing(const LabeledSpace& in_space, const LabeledSpace& out_space, double p);
/// p * a + (1 - p) * b. Throws LabelMismatch unless the spaces agree.
QuantumChannel mix(const QuantumChannel& a, const QuantumChannel& b, double p);
/// Same channel with factors renamed; labels absent from `rename` are kept.
QuantumChannel relabel(const QuantumChannel& ch,
                       const std::vector<std::pair<std::string, std::string>>& rename);

/// CNOT[|0><0|_X (x) tr_X(.)] with B as control; outputs (X, B), inputs (X', B').
QuantumChannel cnot_ancilla_channel(const std::string& x_label);
/// SWAP[|0><0|_X (x) tr_X(.)]; outputs (X, B), inputs (X', B').
QuantumChannel swap_prepare_channel(const std::string& x_label);
/// Choi |phi><phi|_{XBB'} (x) I_{X'}/2 for a three-qubit vector phi ordered X, B, B'.
QuantumChannel ghz_marginal_channel(const CVector& phi, const std::string& x_label);
/// Choi sigma_B (x) omega_{XB'} (x) I_{X'}/2; omega is ordered X, B'.
QuantumChannel w_channel(const CMatrix& omega, const CMatrix& sigma, const std::string& x_label);
/// w_channel with omega = p Psi+ + (1 - p) I/4 and sigma = |0><0|.
QuantumChannel isotropic_w_channel(double p, const std::string& x_label);
/// Optimal universal 1 -> 2 qubit cloner from X to (A, C), machine traced out.
QuantumChannel cloning_channel();
/// rho -> sum_i tr(M_i rho) |i><i| with the pointer system named `out_label`.
QuantumChannel qc_channel_from_povm(const std::vector<CMatrix>& povm,
                                    const LabeledSpace& in_space, const std::string& out_label,
                                    const ToleranceConfig& tol = {});

/// Conditional distribution P(out | in) as a column-stochastic matrix of
/// shape d_out x d_in. Alphabets reuse LabeledSpace for names and sizes.
class StochasticChannel {
 public:
  StochasticChannel() = default;
  /// Throws InvalidChannel if an entry leaves [0, 1] or a column does not sum to 1.
  StochasticChannel(LabeledSpace in, LabeledSpace out, Eigen::MatrixXd p, double tol_eq = 1e-7);

  const LabeledSpace& in_space() const noexcept { return in_; }
  const LabeledSpace& out_space() const noexcept { return out_; }
  const Eigen::MatrixXd& matrix() const noexcept { return p_; }

 private:
  LabeledSpace in_;
  LabeledSpace out_;
  Eigen::MatrixXd p_;
};

}  // namespace choimarg
