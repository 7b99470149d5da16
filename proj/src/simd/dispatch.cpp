#include <atomic>
#include <cstdlib>
#include <string>

#include "procaudit/simd.hpp"

namespace procaudit::simd {

#ifndef PROCAUDIT_BUILD_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& choose() {
  const char* env = std::getenv("PROCAUDIT_SIMD");
  const std::string request = env ? env : "";
  if (request == "scalar") return scalar_kernels();
  if (const auto* avx2 = kernels_for(Isa::Avx2)) return *avx2;
  return scalar_kernels();
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "scalar";
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar_kernels();
    case Isa::Avx2: return cpu_has_avx2() ? detail::avx2_table() : nullptr;
  }
  return nullptr;
}

namespace {
std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&choose()};
  return slot;
}
}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(); }

const KernelTable& set_active_kernels(const KernelTable& table) {
  return *active_slot().exchange(&table);
}

}  // namespace procaudit::simd
