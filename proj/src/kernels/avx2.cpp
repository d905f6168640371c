#include "ultrajet/kernels.hpp"

#include <limits>

#if defined(ULTRAJET_BUILD_AVX2) && defined(__AVX2__)
#include <immintrin.h>
#define ULTRAJET_AVX2_BODY 1
#endif

namespace ultrajet::kernels::avx2 {

#ifdef ULTRAJET_AVX2_BODY

bool compiled() { return true; }

Extremum max_affine(double slope, const double* u, const double* v, std::size_t n,
                    double tie_tol) {
  const __m256d s = _mm256_set1_pd(slope);
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_sub_pd(_mm256_mul_pd(s, _mm256_loadu_pd(u + i)),
                                       _mm256_loadu_pd(v + i));
    acc = _mm256_max_pd(acc, term);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double best = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > best) best = lanes[l];
  for (; i < n; ++i) {
    const double prod = slope * u[i];
    const double term = prod - v[i];
    if (term > best) best = term;
  }

  const double threshold = best - tie_tol;
  const __m256d thr = _mm256_set1_pd(threshold);
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_sub_pd(_mm256_mul_pd(s, _mm256_loadu_pd(u + i)),
                                       _mm256_loadu_pd(v + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(term, thr, _CMP_GE_OQ));
    if (mask != 0) return {best, i + static_cast<std::size_t>(__builtin_ctz(mask))};
  }
  for (; i < n; ++i) {
    const double prod = slope * u[i];
    const double term = prod - v[i];
    if (term >= threshold) return {best, i};
  }
  return {best, 0};
}

double striped_dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t l = 0; i < n; ++i, ++l) {
    const double prod = a[i] * b[i];
    lane[l] = lane[l] + prod;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

#else

bool compiled() { return false; }

Extremum max_affine(double slope, const double* u, const double* v, std::size_t n,
                    double tie_tol) {
  return scalar::max_affine(slope, u, v, n, tie_tol);
}

double striped_dot(const double* a, const double* b, std::size_t n) {
  return scalar::striped_dot(a, b, n);
}

#endif

}  // namespace ultrajet::kernels::avx2
