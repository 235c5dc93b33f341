#pragma once
// Dense arithmetic kernels behind the tensor algebra.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled in on x86-64 and chosen at startup when the CPU supports it.
// Setting PINCH_KERNELS=scalar in the environment pins the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace pinch::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t len);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // g = X X^T, X row-major rows x cols, g row-major rows x rows
  void (*gram)(const double* x, std::size_t rows, std::size_t cols, double* g);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t len);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// The table used by the library.
const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y) {
  active().gemv(a.data(), rows, cols, x.data(), y.data());
}

inline void gram(std::span<const double> x, std::size_t rows, std::size_t cols,
                 std::span<double> g) {
  active().gram(x.data(), rows, cols, g.data());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace pinch::kernels
