#include "coord/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))

#include <immintrin.h>

#define COORD_AVX2 __attribute__((target("avx2,fma")))

namespace coord::kernels::detail {

namespace {

COORD_AVX2 void sampled_mask(const double* values, const double* seeds, double tau_star,
                             std::uint8_t* out, std::size_t n) {
  const __m256d t = _mm256_set1_pd(tau_star);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d threshold = _mm256_mul_pd(_mm256_loadu_pd(seeds + k), t);
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(values + k), threshold, _CMP_GE_OQ);
    const int bits = _mm256_movemask_pd(ge);
    out[k] = bits & 1;
    out[k + 1] = (bits >> 1) & 1;
    out[k + 2] = (bits >> 2) & 1;
    out[k + 3] = (bits >> 3) & 1;
  }
  for (; k < n; ++k) {
    const double threshold = seeds[k] * tau_star;
    out[k] = values[k] >= threshold ? 1 : 0;
  }
}

COORD_AVX2 void pps_ranks(const double* values, const double* seeds, double* out,
                          std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k,
                     _mm256_div_pd(_mm256_loadu_pd(values + k), _mm256_loadu_pd(seeds + k)));
  }
  for (; k < n; ++k) out[k] = values[k] / seeds[k];
}

COORD_AVX2 double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

COORD_AVX2 double weighted_square_sum(const double* widths, const double* values,
                                      std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d v0 = _mm256_loadu_pd(values + k);
    const __m256d v1 = _mm256_loadu_pd(values + k + 4);
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(widths + k), _mm256_mul_pd(v0, v0), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(widths + k + 4), _mm256_mul_pd(v1, v1), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += widths[k] * (values[k] * values[k]);
  return acc;
}

COORD_AVX2 Moments moments(const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_loadu_pd(x + k);
    s = _mm256_add_pd(s, v);
    q = _mm256_fmadd_pd(v, v, q);
  }
  Moments m{hsum(s), hsum(q)};
  for (; k < n; ++k) {
    m.sum += x[k];
    m.sum_sq += x[k] * x[k];
  }
  return m;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{sampled_mask, pps_ranks, weighted_square_sum, moments};
  return &t;
}

}  // namespace coord::kernels::detail

#else

namespace coord::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace coord::kernels::detail

#endif
