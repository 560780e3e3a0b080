#include "choimarg/kernels.hpp"

#include <immintrin.h>

#include <cstddef>

namespace choimarg::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data) {
  const std::size_t n = weights.size();
  std::size_t k = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; k + 4 <= n; k += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index.data() + k));
    const __m256d vals = _mm256_i32gather_pd(data, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(weights.data() + k), vals, acc);
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += weights[k] * data[index[k]];
  return hsum(acc) + tail;
}

std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base) {
  // Two complex values per register: [re0 im0 re1 im1].
  const double* raw = reinterpret_cast<const double*>(data + base);
  const std::size_t n = index.size();
  std::size_t k = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; k + 2 <= n; k += 2) {
    const __m128d a = _mm_loadu_pd(raw + 2 * static_cast<std::ptrdiff_t>(index[k]));
    const __m128d b = _mm_loadu_pd(raw + 2 * static_cast<std::ptrdiff_t>(index[k + 1]));
    acc = _mm256_add_pd(acc, _mm256_set_m128d(b, a));
  }
  __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  if (k < n) s = _mm_add_pd(s, _mm_loadu_pd(raw + 2 * static_cast<std::ptrdiff_t>(index[k])));
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::size_t k = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k), _mm256_loadu_pd(b.data() + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k + 4), _mm256_loadu_pd(b.data() + k + 4),
                           acc1);
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += a[k] * b[k];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

}  // namespace choimarg::kernels::avx2
