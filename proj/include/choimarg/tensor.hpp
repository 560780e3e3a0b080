#pragma once

// Dense complex operators on labeled tensor-product spaces.
//
// Basis convention: the leftmost factor is the most significant digit of the
// linear index, i.e. index = sum_k i_k * prod_{j>k} d_j. An operator on AB is
// therefore laid out exactly like the Kronecker product A (x) B.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace choimarg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Factor {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Factor&) const = default;
};

/// Ordered list of named subsystems. The empty space has dimension 1.
class LabeledSpace {
 public:
  LabeledSpace() = default;
  explicit LabeledSpace(std::vector<Factor> factors);
  LabeledSpace(std::initializer_list<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t num_factors() const noexcept { return factors_.size(); }
  bool empty() const noexcept { return factors_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  bool contains(const std::string& label) const;
  std::optional<std::size_t> position(const std::string& label) const;
  /// Throws LabelNotFound.
  std::size_t dim_of(const std::string& label) const;
  std::vector<std::string> labels() const;

  /// Factors named in `labels`, in that order. Throws LabelNotFound.
  LabeledSpace select(const std::vector<std::string>& labels) const;
  /// Factors not named in `labels`, in this space's order.
  LabeledSpace without(const std::vector<std::string>& labels) const;
  /// This space followed by `other`. Throws LabelCollision on shared labels.
  LabeledSpace concat(const LabeledSpace& other) const;
  /// True when both spaces hold the same (label, dim) pairs in any order.
  bool same_factors(const LabeledSpace& other) const;

  bool operator==(const LabeledSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::size_t dim_ = 1;
};

/// Linear-index offsets of a factor selection inside a space.
///
/// For every multi-index a over `selected` (in the requested order) and t over
/// the remaining factors (in space order), the full linear index is
/// selected[a] + rest[t].
struct FactorOffsets {
  std::vector<std::int64_t> selected;
  std::vector<std::int64_t> rest;
};

FactorOffsets factor_offsets(const LabeledSpace& space, const std::vector<std::string>& selected);

struct ToleranceConfig {
  double tol_herm = 1e-9;
  double tol_psd = 1e-9;
  double tol_trace = 1e-9;
  double tol_eq = 1e-7;

  /// Throws std::invalid_argument if any tolerance is negative.
  void validate() const;
};

class LabeledOperator {
 public:
  LabeledOperator() = default;
  LabeledOperator(LabeledSpace rows, LabeledSpace cols, CMatrix entries);
  LabeledOperator(LabeledSpace space, CMatrix entries);

  static LabeledOperator identity(const LabeledSpace& space);
  static LabeledOperator zero(const LabeledSpace& space);

  const LabeledSpace& row_space() const noexcept { return rows_; }
  const LabeledSpace& col_space() const noexcept { return cols_; }
  const CMatrix& matrix() const noexcept { return entries_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  cplx trace() const;

  LabeledOperator operator+(const LabeledOperator& other) const;
  LabeledOperator operator-(const LabeledOperator& other) const;
  LabeledOperator operator*(cplx scale) const;
  friend LabeledOperator operator*(cplx scale, const LabeledOperator& op) { return op * scale; }

 private:
  LabeledSpace rows_;
  LabeledSpace cols_;
  CMatrix entries_;
};

LabeledOperator kron_compose(const LabeledOperator& a, const LabeledOperator& b);

/// Traces out `traced` from a square operator; the remaining factors keep
/// their relative order. Throws LabelNotFound, ShapeError.
LabeledOperator partial_trace(const LabeledOperator& op, const std::vector<std::string>& traced);

/// Traces out everything except `kept` and orders the result as `kept`.
LabeledOperator reduce_to(const LabeledOperator& op, const std::vector<std::string>& kept);

/// Re-indexes a square operator to the factor order `new_order`.
/// Throws LabelMismatch if `new_order` is not a permutation of the labels.
LabeledOperator permute_factors(const LabeledOperator& op,
                                const std::vector<std::string>& new_order);

/// op (x) I on the remaining factors of `space`, laid out in `space` order.
LabeledOperator embed(const LabeledOperator& op, const LabeledSpace& space);

LabeledOperator transpose_op(const LabeledOperator& op);

/// (1/d) sum_ij |ii><jj| on (label, label + "'") for a single-factor space.
LabeledOperator max_entangled(const LabeledSpace& space);

bool is_hermitian(const LabeledOperator& op, double tol);
/// Minimum eigenvalue of the Hermitian part is >= -tol.
bool is_psd(const LabeledOperator& op, double tol);
/// Minimum eigenvalue of (op + op^dag)/2. Throws ShapeError if not square.
double min_eigenvalue(const LabeledOperator& op);
/// Checks Hermitian, PSD and unit trace within the configured tolerances.
bool is_state(const LabeledOperator& op, const ToleranceConfig& tol = {});

/// 0.5 * trace norm of (a - b) after Hermitian symmetrization.
double trace_distance(const CMatrix& a, const CMatrix& b);
double min_eigenvalue(const CMatrix& m);
CMatrix hermitian_part(const CMatrix& m);

/// The d x d identity divided by d.
CMatrix maximally_mixed(std::size_t d);

}  // namespace choimarg
