#include <immintrin.h>

#include <cmath>

#include "procaudit/simd.hpp"

namespace procaudit::simd {

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kBlock = 4 * kLanes;

// One block of 16 rows keeps four accumulators in registers across the
// feature loop.
inline void block16(const double* columns, std::size_t n, std::size_t dims, const double* point,
                    std::size_t j, double* out) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  for (std::size_t f = 0; f < dims; ++f) {
    const double* col = columns + f * n + j;
    const __m256d p = _mm256_set1_pd(point[f]);
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(col), p);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(col + 4), p);
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(col + 8), p);
    const __m256d d3 = _mm256_sub_pd(_mm256_loadu_pd(col + 12), p);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d0, d0));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(d1, d1));
    a2 = _mm256_add_pd(a2, _mm256_mul_pd(d2, d2));
    a3 = _mm256_add_pd(a3, _mm256_mul_pd(d3, d3));
  }
  _mm256_storeu_pd(out + j, a0);
  _mm256_storeu_pd(out + j + 4, a1);
  _mm256_storeu_pd(out + j + 8, a2);
  _mm256_storeu_pd(out + j + 12, a3);
}

inline void block4(const double* columns, std::size_t n, std::size_t dims, const double* point,
                   std::size_t j, double* out) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t f = 0; f < dims; ++f) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(columns + f * n + j), _mm256_set1_pd(point[f]));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  _mm256_storeu_pd(out + j, acc);
}

void squared_distances(const double* columns, std::size_t n, std::size_t dims,
                       const double* point, double* out) {
  std::size_t j = 0;
  for (; j + kBlock <= n; j += kBlock) block16(columns, n, dims, point, j, out);
  for (; j + kLanes <= n; j += kLanes) block4(columns, n, dims, point, j, out);
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t f = 0; f < dims; ++f) {
      const double d = columns[f * n + j] - point[f];
      acc = acc + d * d;
    }
    out[j] = acc;
  }
}

void distances(const double* columns, std::size_t n, std::size_t dims, const double* point,
               double* out) {
  squared_distances(columns, n, dims, point, out);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(_mm256_loadu_pd(out + j)));
  }
  for (; j < n; ++j) out[j] = std::sqrt(out[j]);
}

void argmin_update(const double* dist, std::size_t n, std::int32_t candidate, double* best,
                   std::int32_t* label) {
  const __m128i cand = _mm_set1_epi32(candidate);
  // Picks the low 32 bits of each 64-bit mask lane.
  const __m256i compress = _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d d = _mm256_loadu_pd(dist + j);
    const __m256d b = _mm256_loadu_pd(best + j);
    const __m256d lt = _mm256_cmp_pd(d, b, _CMP_LT_OQ);
    _mm256_storeu_pd(best + j, _mm256_blendv_pd(b, d, lt));
    const __m128i mask32 = _mm256_castsi256_si128(
        _mm256_permutevar8x32_epi32(_mm256_castpd_si256(lt), compress));
    auto* lp = reinterpret_cast<__m128i*>(label + j);
    _mm_storeu_si128(lp, _mm_blendv_epi8(_mm_loadu_si128(lp), cand, mask32));
  }
  for (; j < n; ++j) {
    if (dist[j] < best[j]) {
      best[j] = dist[j];
      label[j] = candidate;
    }
  }
}

constexpr KernelTable kAvx2{Isa::Avx2, squared_distances, distances, argmin_update};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace procaudit::simd
