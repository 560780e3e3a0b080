#pragma once

// Closed-form solutions for the two-CNOT-ancilla scenario, entered entry by
// entry so tests can check them without going through the solver.

#include <string>

#include "choimarg/channels.hpp"

namespace choimarg {

/// Choi state of a global channel A'B'C' -> ABC reaching robustness 3/4 for
/// cnot_ancilla_channel("A") and cnot_ancilla_channel("C"). Factor order is
/// B, B', A, C, A', C'.
LabeledOperator cnot_pair_global_choi();

/// The noise channel XB|X'B' that makes 3/4 M_XB + 1/4 N_XB compatible.
QuantumChannel cnot_pair_noise_channel(const std::string& x_label);

}  // namespace choimarg
