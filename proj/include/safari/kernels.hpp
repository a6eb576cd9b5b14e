#pragma once

// Dense double-precision vector kernels behind a runtime-dispatched table.
//
// Every kernel has a scalar reference in kernels_scalar.cpp. On x86-64 an
// AVX2 variant is compiled separately with -mavx2 and picked at startup when
// the CPU reports AVX2. Elementwise kernels are bit-identical across variants;
// reductions (dot, squared_distance) differ only in summation order.
//
// Setting SAFARI_KERNELS=scalar in the environment pins the scalar table.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace safari::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = keep[i] ? x[i] : +0.0
  void (*select)(const double* x, const std::uint8_t* keep, double* out, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table() noexcept;

const KernelTable& active() noexcept;

std::string_view isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline double squared_norm(std::span<const double> a) noexcept {
  return active().dot(a.data(), a.data(), a.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void select(std::span<const double> x, std::span<const std::uint8_t> keep,
                   std::span<double> out) noexcept {
  active().select(x.data(), keep.data(), out.data(), x.size());
}

inline void scale(double a, std::span<double> x) noexcept {
  active().scale(a, x.data(), x.size());
}

}  // namespace safari::kernels
