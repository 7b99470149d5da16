#include <cmath>

#include "procaudit/simd.hpp"

namespace procaudit::simd {

namespace {

void squared_distances(const double* columns, std::size_t n, std::size_t dims,
                       const double* point, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t f = 0; f < dims; ++f) {
    const double* col = columns + f * n;
    const double p = point[f];
    for (std::size_t j = 0; j < n; ++j) {
      const double d = col[j] - p;
      out[j] = out[j] + d * d;
    }
  }
}

void distances(const double* columns, std::size_t n, std::size_t dims, const double* point,
               double* out) {
  squared_distances(columns, n, dims, point, out);
  for (std::size_t j = 0; j < n; ++j) out[j] = std::sqrt(out[j]);
}

void argmin_update(const double* dist, std::size_t n, std::int32_t candidate, double* best,
                   std::int32_t* label) {
  for (std::size_t j = 0; j < n; ++j) {
    if (dist[j] < best[j]) {
      best[j] = dist[j];
      label[j] = candidate;
    }
  }
}

constexpr KernelTable kScalar{Isa::Scalar, squared_distances, distances, argmin_update};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace procaudit::simd
