#include "coord/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace coord::kernels::detail {

namespace {

void sampled_mask(const double* values, const double* seeds, double tau_star,
                  std::uint8_t* out, std::size_t n) {
  const float64x2_t t = vdupq_n_f64(tau_star);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t threshold = vmulq_f64(vld1q_f64(seeds + k), t);
    const uint64x2_t ge = vcgeq_f64(vld1q_f64(values + k), threshold);
    out[k] = vgetq_lane_u64(ge, 0) ? 1 : 0;
    out[k + 1] = vgetq_lane_u64(ge, 1) ? 1 : 0;
  }
  for (; k < n; ++k) {
    const double threshold = seeds[k] * tau_star;
    out[k] = values[k] >= threshold ? 1 : 0;
  }
}

void pps_ranks(const double* values, const double* seeds, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    vst1q_f64(out + k, vdivq_f64(vld1q_f64(values + k), vld1q_f64(seeds + k)));
  }
  for (; k < n; ++k) out[k] = values[k] / seeds[k];
}

double weighted_square_sum(const double* widths, const double* values, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t v = vld1q_f64(values + k);
    acc = vfmaq_f64(acc, vld1q_f64(widths + k), vmulq_f64(v, v));
  }
  double sum = vaddvq_f64(acc);
  for (; k < n; ++k) sum += widths[k] * (values[k] * values[k]);
  return sum;
}

Moments moments(const double* x, std::size_t n) {
  float64x2_t s = vdupq_n_f64(0.0);
  float64x2_t q = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t v = vld1q_f64(x + k);
    s = vaddq_f64(s, v);
    q = vfmaq_f64(q, v, v);
  }
  Moments m{vaddvq_f64(s), vaddvq_f64(q)};
  for (; k < n; ++k) {
    m.sum += x[k];
    m.sum_sq += x[k] * x[k];
  }
  return m;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable t{sampled_mask, pps_ranks, weighted_square_sum, moments};
  return &t;
}

}  // namespace coord::kernels::detail

#else

namespace coord::kernels::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace coord::kernels::detail

#endif
