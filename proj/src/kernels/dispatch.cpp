#include <atomic>

#include "choimarg/kernels.hpp"

namespace choimarg::kernels {

namespace {

bool detect_avx2() {
#if defined(CHOIMARG_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect_avx2() ? Isa::Avx2 : Isa::Scalar};
  return isa;
}

bool use_avx2() {
#if defined(CHOIMARG_HAVE_AVX2_KERNELS)
  return current().load(std::memory_order_relaxed) == Isa::Avx2;
#else
  return false;
#endif
}

}  // namespace

#if !defined(CHOIMARG_HAVE_AVX2_KERNELS)
// Non-x86 builds link the scalar code under the avx2 names so the symbols exist.
namespace avx2 {
double gather_dot(std::span<const double> w, std::span<const std::int32_t> i, const double* d) {
  return scalar::gather_dot(w, i, d);
}
std::complex<double> gather_sum(std::span<const std::int32_t> i, const std::complex<double>* d,
                                std::int64_t base) {
  return scalar::gather_sum(i, d, base);
}
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
void gemm(int m, int n, int k, const double* a, const double* b, double* c) {
  scalar::gemm(m, n, k, a, b, c);
}
bool cholesky(int n, double* a) { return scalar::cholesky(n, a); }
void cholesky_solve(int n, const double* l, double* b) { scalar::cholesky_solve(n, l, b); }
int pivoted_cholesky(int n, double* a, double tol, int* piv) {
  return scalar::pivoted_cholesky(n, a, tol, piv);
}
}  // namespace avx2
#endif

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool avx2_available() { return detect_avx2(); }

Isa force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !detect_avx2()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data) {
  return use_avx2() ? avx2::gather_dot(weights, index, data)
                    : scalar::gather_dot(weights, index, data);
}

std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base) {
  return use_avx2() ? avx2::gather_sum(index, data, base) : scalar::gather_sum(index, data, base);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return use_avx2() ? avx2::dot(a, b) : scalar::dot(a, b);
}

void gemm(int m, int n, int k, const double* a, const double* b, double* c) {
  if (use_avx2())
    avx2::gemm(m, n, k, a, b, c);
  else
    scalar::gemm(m, n, k, a, b, c);
}

bool cholesky(int n, double* a) { return use_avx2() ? avx2::cholesky(n, a) : scalar::cholesky(n, a); }

void cholesky_solve(int n, const double* l, double* b) {
  if (use_avx2())
    avx2::cholesky_solve(n, l, b);
  else
    scalar::cholesky_solve(n, l, b);
}

int pivoted_cholesky(int n, double* a, double tol, int* piv) {
  return use_avx2() ? avx2::pivoted_cholesky(n, a, tol, piv)
                    : scalar::pivoted_cholesky(n, a, tol, piv);
}

}  // namespace choimarg::kernels
