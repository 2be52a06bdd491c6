#include "lsa/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace lsa::kernels::neon {

bool compiled() { return true; }

double sum(const double* x, std::size_t n) {
  float64x2_t a01 = vdupq_n_f64(0.0);
  float64x2_t a23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a01 = vaddq_f64(a01, vld1q_f64(x + i));
    a23 = vaddq_f64(a23, vld1q_f64(x + i + 2));
  }
  double total = (vgetq_lane_f64(a01, 0) + vgetq_lane_f64(a01, 1)) +
                 (vgetq_lane_f64(a23, 0) + vgetq_lane_f64(a23, 1));
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t a01 = vdupq_n_f64(0.0);
  float64x2_t a23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a01 = vfmaq_f64(a01, vld1q_f64(x + i), vld1q_f64(y + i));
    a23 = vfmaq_f64(a23, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double total = (vgetq_lane_f64(a01, 0) + vgetq_lane_f64(a01, 1)) +
                 (vgetq_lane_f64(a23, 0) + vgetq_lane_f64(a23, 1));
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

}  // namespace lsa::kernels::neon

#else

namespace lsa::kernels::neon {
bool compiled() { return false; }
double sum(const double* x, std::size_t n) { return scalar::sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return scalar::dot(x, y, n); }
}  // namespace lsa::kernels::neon

#endif
