#include "choimarg/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>
#include <unsupported/Eigen/KroneckerProduct>

#include "choimarg/errors.hpp"
#include "choimarg/kernels.hpp"

namespace choimarg {

LabeledSpace::LabeledSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::unordered_set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim == 0) throw ShapeError("factor '" + f.label + "' has dimension 0");
    if (!seen.insert(f.label).second) throw LabelCollision("duplicate label '" + f.label + "'");
    dim_ *= f.dim;
  }
}

LabeledSpace::LabeledSpace(std::initializer_list<Factor> factors)
    : LabeledSpace(std::vector<Factor>(factors)) {}

bool LabeledSpace::contains(const std::string& label) const { return position(label).has_value(); }

std::optional<std::size_t> LabeledSpace::position(const std::string& label) const {
  for (std::size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k].label == label) return k;
  return std::nullopt;
}

std::size_t LabeledSpace::dim_of(const std::string& label) const {
  const auto pos = position(label);
  if (!pos) throw LabelNotFound("label '" + label + "' not in space");
  return factors_[*pos].dim;
}

std::vector<std::string> LabeledSpace::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

LabeledSpace LabeledSpace::select(const std::vector<std::string>& labels) const {
  std::vector<Factor> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back({l, dim_of(l)});
  return LabeledSpace(std::move(out));
}

LabeledSpace LabeledSpace::without(const std::vector<std::string>& labels) const {
  std::vector<Factor> out;
  for (const auto& f : factors_)
    if (std::find(labels.begin(), labels.end(), f.label) == labels.end()) out.push_back(f);
  return LabeledSpace(std::move(out));
}

LabeledSpace LabeledSpace::concat(const LabeledSpace& other) const {
  std::vector<Factor> out = factors_;
  out.insert(out.end(), other.factors_.begin(), other.factors_.end());
  return LabeledSpace(std::move(out));
}

bool LabeledSpace::same_factors(const LabeledSpace& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (const auto& f : factors_) {
    const auto pos = other.position(f.label);
    if (!pos || other.factors_[*pos].dim != f.dim) return false;
  }
  return true;
}

namespace {

std::vector<std::int64_t> enumerate_offsets(const std::vector<std::int64_t>& strides,
                                            const std::vector<std::size_t>& dims) {
  std::vector<std::int64_t> out{0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    std::vector<std::int64_t> next;
    next.reserve(out.size() * dims[k]);
    for (std::int64_t base : out)
      for (std::size_t i = 0; i < dims[k]; ++i)
        next.push_back(base + static_cast<std::int64_t>(i) * strides[k]);
    out = std::move(next);
  }
  return out;
}

void require_square(const LabeledOperator& op, const char* what) {
  if (!op.is_square())
    throw ShapeError(std::string(what) + ": operator row and column spaces differ");
}

}  // namespace

FactorOffsets factor_offsets(const LabeledSpace& space, const std::vector<std::string>& selected) {
  const auto& fs = space.factors();
  std::vector<std::int64_t> stride(fs.size(), 1);
  for (std::size_t k = fs.size(); k-- > 1;)
    stride[k - 1] = stride[k] * static_cast<std::int64_t>(fs[k].dim);

  std::vector<bool> used(fs.size(), false);
  std::vector<std::int64_t> sel_strides;
  std::vector<std::size_t> sel_dims;
  for (const auto& l : selected) {
    const auto pos = space.position(l);
    if (!pos) throw LabelNotFound("label '" + l + "' not in space");
    if (used[*pos]) throw LabelMismatch("label '" + l + "' selected twice");
    used[*pos] = true;
    sel_strides.push_back(stride[*pos]);
    sel_dims.push_back(fs[*pos].dim);
  }
  std::vector<std::int64_t> rest_strides;
  std::vector<std::size_t> rest_dims;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (used[k]) continue;
    rest_strides.push_back(stride[k]);
    rest_dims.push_back(fs[k].dim);
  }
  return {enumerate_offsets(sel_strides, sel_dims), enumerate_offsets(rest_strides, rest_dims)};
}

void ToleranceConfig::validate() const {
  if (tol_herm < 0 || tol_psd < 0 || tol_trace < 0 || tol_eq < 0)
    throw std::invalid_argument("tolerances must be nonnegative");
}

LabeledOperator::LabeledOperator(LabeledSpace rows, LabeledSpace cols, CMatrix entries)
    : rows_(std::move(rows)), cols_(std::move(cols)), entries_(std::move(entries)) {
  if (static_cast<std::size_t>(entries_.rows()) != rows_.dim() ||
      static_cast<std::size_t>(entries_.cols()) != cols_.dim())
    throw ShapeError("matrix shape " + std::to_string(entries_.rows()) + "x" +
                     std::to_string(entries_.cols()) + " does not match space dimensions " +
                     std::to_string(rows_.dim()) + "x" + std::to_string(cols_.dim()));
}

LabeledOperator::LabeledOperator(LabeledSpace space, CMatrix entries)
    : LabeledOperator(space, space, std::move(entries)) {}

LabeledOperator LabeledOperator::identity(const LabeledSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return {space, CMatrix::Identity(d, d)};
}

LabeledOperator LabeledOperator::zero(const LabeledSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return {space, CMatrix::Zero(d, d)};
}

cplx LabeledOperator::trace() const { return entries_.trace(); }

LabeledOperator LabeledOperator::operator+(const LabeledOperator& other) const {
  if (!(rows_ == other.rows_ && cols_ == other.cols_))
    throw LabelMismatch("operator spaces differ in sum");
  return {rows_, cols_, entries_ + other.entries_};
}

LabeledOperator LabeledOperator::operator-(const LabeledOperator& other) const {
  if (!(rows_ == other.rows_ && cols_ == other.cols_))
    throw LabelMismatch("operator spaces differ in difference");
  return {rows_, cols_, entries_ - other.entries_};
}

LabeledOperator LabeledOperator::operator*(cplx scale) const {
  return {rows_, cols_, entries_ * scale};
}

LabeledOperator kron_compose(const LabeledOperator& a, const LabeledOperator& b) {
  CMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return {a.row_space().concat(b.row_space()), a.col_space().concat(b.col_space()), std::move(m)};
}

LabeledOperator reduce_to(const LabeledOperator& op, const std::vector<std::string>& kept) {
  require_square(op, "partial trace");
  const LabeledSpace& space = op.row_space();
  const FactorOffsets offs = factor_offsets(space, kept);
  const auto n = static_cast<std::int64_t>(space.dim());
  std::vector<std::int32_t> diag(offs.rest.size());
  for (std::size_t t = 0; t < offs.rest.size(); ++t)
    diag[t] = static_cast<std::int32_t>(offs.rest[t] * (n + 1));

  const auto k = static_cast<Eigen::Index>(offs.selected.size());
  CMatrix out(k, k);
  const cplx* data = op.matrix().data();
  for (Eigen::Index b = 0; b < k; ++b)
    for (Eigen::Index a = 0; a < k; ++a)
      out(a, b) = kernels::gather_sum(diag, data, offs.selected[a] + offs.selected[b] * n);
  return {space.select(kept), std::move(out)};
}

LabeledOperator partial_trace(const LabeledOperator& op, const std::vector<std::string>& traced) {
  require_square(op, "partial trace");
  for (const auto& l : traced)
    if (!op.row_space().contains(l)) throw LabelNotFound("cannot trace unknown label '" + l + "'");
  return reduce_to(op, op.row_space().without(traced).labels());
}

LabeledOperator permute_factors(const LabeledOperator& op,
                                const std::vector<std::string>& new_order) {
  require_square(op, "permute");
  const LabeledSpace& space = op.row_space();
  if (new_order.size() != space.num_factors())
    throw LabelMismatch("new order is not a permutation of the operator labels");
  std::unordered_set<std::string> seen;
  for (const auto& l : new_order)
    if (!space.contains(l) || !seen.insert(l).second)
      throw LabelMismatch("new order is not a permutation of the operator labels");

  const FactorOffsets offs = factor_offsets(space, new_order);
  const auto d = static_cast<Eigen::Index>(space.dim());
  CMatrix out(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) out(a, b) = op.matrix()(offs.selected[a], offs.selected[b]);
  return {space.select(new_order), std::move(out)};
}

LabeledOperator embed(const LabeledOperator& op, const LabeledSpace& space) {
  require_square(op, "embed");
  for (const auto& f : op.row_space().factors())
    if (space.dim_of(f.label) != f.dim)
      throw LabelMismatch("dimension of '" + f.label + "' differs from target space");
  const FactorOffsets offs = factor_offsets(space, op.row_space().labels());
  const auto d = static_cast<Eigen::Index>(space.dim());
  CMatrix out = CMatrix::Zero(d, d);
  const auto k = static_cast<Eigen::Index>(offs.selected.size());
  for (std::int64_t r : offs.rest)
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index a = 0; a < k; ++a)
        out(offs.selected[a] + r, offs.selected[b] + r) = op.matrix()(a, b);
  return {space, std::move(out)};
}

LabeledOperator transpose_op(const LabeledOperator& op) {
  return {op.col_space(), op.row_space(), op.matrix().transpose()};
}

LabeledOperator max_entangled(const LabeledSpace& space) {
  if (space.num_factors() != 1) throw ShapeError("max_entangled needs a single-factor space");
  const Factor& f = space.factors().front();
  const auto d = static_cast<Eigen::Index>(f.dim);
  CVector psi = CVector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = 1.0;
  psi /= std::sqrt(static_cast<double>(d));
  LabeledSpace pair{f, Factor{f.label + "'", f.dim}};
  return {pair, psi * psi.adjoint()};
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eigenvalue(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigenvalues of a non-square matrix");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_eigenvalue(const LabeledOperator& op) {
  if (op.matrix().rows() != op.matrix().cols()) throw ShapeError("operator is not square");
  return min_eigenvalue(op.matrix());
}

bool is_hermitian(const LabeledOperator& op, double tol) {
  if (op.matrix().rows() != op.matrix().cols()) throw ShapeError("operator is not square");
  return (op.matrix() - op.matrix().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const LabeledOperator& op, double tol) { return min_eigenvalue(op) >= -tol; }

bool is_state(const LabeledOperator& op, const ToleranceConfig& tol) {
  if (!op.is_square()) return false;
  return is_hermitian(op, tol.tol_herm) && is_psd(op, tol.tol_psd) &&
         std::abs(op.trace() - 1.0) <= tol.tol_trace;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CMatrix maximally_mixed(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return CMatrix::Identity(n, n) / static_cast<double>(d);
}

}  // namespace choimarg
