// Compiled with -mavx2 -mfma; only reached after a cpuid check.
#include "pinch/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace pinch::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += x[i] * y[i];
  return s;
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

// Four output columns per pass so each row of X is loaded once per block.
void gram_avx2(const double* x, std::size_t rows, std::size_t cols, double* g) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* xi = x + i * cols;
    std::size_t j = i;
    for (; j + 4 <= rows; j += 4) {
      const double* x0 = x + j * cols;
      const double* x1 = x0 + cols;
      const double* x2 = x1 + cols;
      const double* x3 = x2 + cols;
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      std::size_t k = 0;
      for (; k + 4 <= cols; k += 4) {
        const __m256d v = _mm256_loadu_pd(xi + k);
        a0 = _mm256_fmadd_pd(v, _mm256_loadu_pd(x0 + k), a0);
        a1 = _mm256_fmadd_pd(v, _mm256_loadu_pd(x1 + k), a1);
        a2 = _mm256_fmadd_pd(v, _mm256_loadu_pd(x2 + k), a2);
        a3 = _mm256_fmadd_pd(v, _mm256_loadu_pd(x3 + k), a3);
      }
      double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
      for (; k < cols; ++k) {
        s0 += xi[k] * x0[k];
        s1 += xi[k] * x1[k];
        s2 += xi[k] * x2[k];
        s3 += xi[k] * x3[k];
      }
      const double s[4] = {s0, s1, s2, s3};
      for (std::size_t t = 0; t < 4; ++t) {
        g[i * rows + j + t] = s[t];
        g[(j + t) * rows + i] = s[t];
      }
    }
    for (; j < rows; ++j) {
      const double v = dot_avx2(xi, x + j * cols, cols);
      g[i * rows + j] = v;
      g[j * rows + i] = v;
    }
  }
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t len) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < len; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table{"avx2", dot_avx2, gemv_avx2, gram_avx2, axpy_avx2};
  return &table;
}

}  // namespace pinch::kernels

#else

namespace pinch::kernels {
const KernelTable* avx2_table_impl() { return nullptr; }
}  // namespace pinch::kernels

#endif
