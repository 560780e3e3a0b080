#pragma once

// Inner-loop kernels shared by the tensor and solver code.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant. The variant is picked once at runtime from the CPU feature
// flags; force_isa() overrides the choice so tests can compare both paths.

#include <complex>
#include <cstdint>
#include <span>

namespace choimarg::kernels {

enum class Isa { Scalar, Avx2 };

/// The instruction set the dispatched kernels currently use.
Isa active_isa();

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// Selects the kernel variant. Requesting Avx2 on a machine without it
/// falls back to Scalar. Returns the variant actually selected.
Isa force_isa(Isa isa);

const char* isa_name(Isa isa);

/// sum_k weights[k] * data[index[k]]
double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data);

/// sum_k data[base + index[k]]
std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base);

/// sum_k a[k] * b[k]
double dot(std::span<const double> a, std::span<const double> b);

// Dense column-major kernels for the solver.

/// c = a * b with a m-by-k, b k-by-n and c m-by-n.
void gemm(int m, int n, int k, const double* a, const double* b, double* c);

/// In-place lower Cholesky factor of the n-by-n matrix a (lower triangle
/// read). Returns false when a is not numerically positive definite.
bool cholesky(int n, double* a);

/// Solves L L^T x = b in place given the factor from cholesky().
void cholesky_solve(int n, const double* l, double* b);

/// Diagonally pivoted Cholesky of a positive semidefinite matrix, stopping
/// once every remaining pivot is at most tol. On return the lower triangle
/// holds L for the permuted matrix and piv[k] is the original index of row
/// k. Returns the number of pivots taken.
int pivoted_cholesky(int n, double* a, double tol, int* piv);

namespace scalar {
double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data);
std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base);
double dot(std::span<const double> a, std::span<const double> b);
void gemm(int m, int n, int k, const double* a, const double* b, double* c);
bool cholesky(int n, double* a);
void cholesky_solve(int n, const double* l, double* b);
int pivoted_cholesky(int n, double* a, double tol, int* piv);
}  // namespace scalar

namespace avx2 {
double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data);
std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base);
double dot(std::span<const double> a, std::span<const double> b);
void gemm(int m, int n, int k, const double* a, const double* b, double* c);
bool cholesky(int n, double* a);
void cholesky_solve(int n, const double* l, double* b);
int pivoted_cholesky(int n, double* a, double tol, int* piv);
}  // namespace avx2

}  // namespace choimarg::kernels
