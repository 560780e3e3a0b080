#pragma once

// Semidefinite programs over a direct sum of PSD blocks and nonnegative
// (diagonal) blocks, in the form
//
//   maximize <C, X>  subject to  <A_i, X> = b_i,  X >= 0,
//
// with dual  minimize b^T y  subject to  Z = sum_i y_i A_i - C >= 0.

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace choimarg {

enum class BlockKind { Psd, Diagonal };

struct Block {
  std::string name;
  int size = 0;
  BlockKind kind = BlockKind::Psd;

  bool operator==(const Block&) const = default;
};

/// One coefficient of a symmetric block matrix. An off-diagonal entry stands
/// for both (row, col) and (col, row); repeated positions add up.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;

  bool operator==(const Entry&) const = default;
};

struct Constraint {
  std::vector<Entry> entries;
  double rhs = 0.0;

  bool operator==(const Constraint&) const = default;
};

struct ConicProgram {
  std::vector<Block> blocks;
  std::vector<Entry> objective;
  std::vector<Constraint> constraints;

  int add_block(std::string name, int size, BlockKind kind = BlockKind::Psd);
  int add_constraint(std::vector<Entry> entries, double rhs);

  /// Puts every entry in the upper triangle, sorts by (block, row, col),
  /// merges repeats and drops exact zeros.
  void normalize();
  /// Throws ShapeError for entries outside their block or off-diagonal
  /// entries in a diagonal block.
  void validate() const;

  /// Sum of block sizes.
  int total_size() const;

  bool operator==(const ConicProgram&) const = default;
};

/// Appends the upper-triangle entries of H_R / 2, where H_R is the real form
/// [[Re H, -Im H], [Im H, Re H]] of a d x d Hermitian H given by its nonzero
/// entries (both triangles). Pairing with a realified X gives tr(H X).
struct ComplexEntry {
  int row = 0;
  int col = 0;
  std::complex<double> value;
};
void append_realified(std::vector<Entry>& out, int block, int d,
                      const std::vector<ComplexEntry>& hermitian);
/// Same, for a dense Hermitian matrix; entries below `drop` in modulus are skipped.
void append_realified(std::vector<Entry>& out, int block, const Eigen::MatrixXcd& hermitian,
                      double drop = 0.0);
/// Complex Hermitian matrix represented by a 2d x 2d realified block.
Eigen::MatrixXcd complex_from_realified(const Eigen::MatrixXd& x);

struct SolverOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
  /// Relative pivot threshold for discarding linearly dependent constraints.
  double rank_tol = 1e-10;
  /// Print one line per iteration to stderr.
  bool verbose = false;
};

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

/// Convergence measures of one interior-point iterate.
struct IterateLog {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// <X, Z> / degree; nonnegative while both iterates stay in the cone.
  double mu = 0.0;
};

const char* status_name(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  /// Primal blocks; diagonal blocks are stored as column vectors.
  std::vector<Eigen::MatrixXd> x;
  std::vector<double> y;
  std::vector<Eigen::MatrixXd> z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// |primal - dual| / (1 + |primal|)
  double gap = 0.0;
  /// ||b - A(X)|| / (1 + ||b||) on the original constraints.
  double primal_infeasibility = 0.0;
  /// ||sum y_i A_i - C - Z|| / (1 + ||C||)
  double dual_infeasibility = 0.0;
  int iterations = 0;
  /// Constraints removed as linearly dependent before solving.
  int dropped_constraints = 0;
  /// One entry per iterate, the final one included.
  std::vector<IterateLog> history;
};

/// Infeasible primal-dual path following with Mehrotra predictor-corrector
/// steps in the HKM direction. Throws InfeasibleLinearSystem when the
/// equality system is inconsistent, ShapeError for malformed programs.
ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// <A, X> for a list of entries and primal blocks laid out as in ConicSolution.
double evaluate(const std::vector<Entry>& entries, const std::vector<Eigen::MatrixXd>& x);

/// SDPA sparse format. The file's "dual" form is this program's primal:
/// F0 = C, F_i = A_i, c = b.
void export_sdpa(const ConicProgram& prog, const std::string& path);
std::string to_sdpa(const ConicProgram& prog);
/// Throws ParseError with the offending line number.
ConicProgram import_sdpa(const std::string& path);
ConicProgram parse_sdpa(const std::string& text);

}  // namespace choimarg
