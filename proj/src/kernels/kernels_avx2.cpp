#include "lsa/kernels.hpp"

#if defined(LSA_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>

namespace lsa::kernels::avx2 {

bool compiled() { return true; }

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  // lanes (0,1) and (2,3) pair up the same way as the scalar accumulators
  const __m128d pair = _mm_add_pd(_mm_unpacklo_pd(lo, hi), _mm_unpackhi_pd(lo, hi));
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

}  // namespace lsa::kernels::avx2

#else

namespace lsa::kernels::avx2 {
bool compiled() { return false; }
double sum(const double* x, std::size_t n) { return scalar::sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return scalar::dot(x, y, n); }
}  // namespace lsa::kernels::avx2

#endif
