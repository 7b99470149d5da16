#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace procaudit::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

// Data-parallel inner loops of k-Means assignment and silhouette. Every
// variant must produce bit-identical output to the scalar reference: each
// lane accumulates features in ascending order with separate multiply and
// add, and sqrt is correctly rounded.
struct KernelTable {
  Isa isa;

  // out[j] = sum_f (columns[f * n + j] - point[f])^2 for j < n.
  void (*squared_distances)(const double* columns, std::size_t n, std::size_t dims,
                            const double* point, double* out);

  // out[j] = sqrt(squared distance) for j < n.
  void (*distances)(const double* columns, std::size_t n, std::size_t dims,
                    const double* point, double* out);

  // Where dist[j] < best[j]: best[j] = dist[j], label[j] = candidate.
  void (*argmin_update)(const double* dist, std::size_t n, std::int32_t candidate,
                        double* best, std::int32_t* label);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* kernels_for(Isa isa);

// Best supported variant; PROCAUDIT_SIMD=scalar|avx2 overrides the choice.
const KernelTable& active_kernels();
// Replaces the active table (tests compare whole fits across variants);
// returns the previous one.
const KernelTable& set_active_kernels(const KernelTable& table);

namespace detail {
const KernelTable* avx2_table();
}

}  // namespace procaudit::simd
