#include "choimarg/kernels.hpp"

#include <cstddef>

namespace choimarg::kernels::scalar {

double gather_dot(std::span<const double> weights, std::span<const std::int32_t> index,
                  const double* data) {
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) acc += weights[k] * data[index[k]];
  return acc;
}

std::complex<double> gather_sum(std::span<const std::int32_t> index,
                                const std::complex<double>* data, std::int64_t base) {
  double re = 0.0;
  double im = 0.0;
  for (std::int32_t k : index) {
    const std::complex<double> v = data[base + k];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace choimarg::kernels::scalar
