#include "safari/kernels.hpp"

namespace safari::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void select_scalar(const double* x, const std::uint8_t* keep, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = keep[i] ? x[i] : 0.0;
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar,  dot_scalar,    squared_distance_scalar,
                                 axpy_scalar,  select_scalar, scale_scalar};
  return table;
}

}  // namespace safari::kernels
