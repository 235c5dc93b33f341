#include "pinch/kernels.hpp"

namespace pinch::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += x[i] * y[i];
  return s;
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void gram_scalar(const double* x, std::size_t rows, std::size_t cols, double* g) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      const double v = dot_scalar(x + i * cols, x + j * cols, cols);
      g[i * rows + j] = v;
      g[j * rows + i] = v;
    }
  }
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, gemv_scalar, gram_scalar,
                                 axpy_scalar};
  return table;
}

}  // namespace pinch::kernels
