#pragma once

// Sparse Hermitian operator bases built from matrix units, used to state
// linear constraints on Choi states one coordinate at a time.

#include <string>
#include <vector>

#include "choimarg/conic.hpp"
#include "choimarg/tensor.hpp"

namespace choimarg {

/// A run of factors whose operator space enters a tensor product either in
/// full or restricted to its traceless part.
struct OperatorGroup {
  std::vector<std::string> labels;
  bool traceless = false;
};

/// Hermitian operators spanning the tensor product of the groups' operator
/// spaces, laid out on the groups' labels concatenated in order. An empty
/// traceless group contributes nothing, so the whole product is empty.
std::vector<std::vector<ComplexEntry>> hermitian_basis(const LabeledSpace& space,
                                                       const std::vector<OperatorGroup>& groups);

/// op (x) I on the remaining factors of `full`, for an op given on `labels`.
std::vector<ComplexEntry> embed_entries(const LabeledSpace& full,
                                        const std::vector<std::string>& labels,
                                        const std::vector<ComplexEntry>& op);

}  // namespace choimarg
