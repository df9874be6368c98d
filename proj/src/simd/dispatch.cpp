#include <atomic>
#include <cstdlib>
#include <string>

#include "spinwave/simd/kernels.hpp"

namespace spinwave::simd {

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SPINWAVE_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && avx2_kernels()) return avx2_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels() { return *active_table().load(std::memory_order_acquire); }

bool select(Isa isa) {
  const KernelTable* t = isa == Isa::avx2 ? avx2_kernels() : &scalar_kernels();
  if (!t) return false;
  active_table().store(t, std::memory_order_release);
  return true;
}

}  // namespace spinwave::simd
