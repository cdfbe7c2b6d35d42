#include <atomic>
#include <cstdlib>
#include <string>

#include "llmmom/error.hpp"
#include "llmmom/kernels.hpp"

namespace llmmom::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(LLMMOM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("LLMMOM_SIMD")) {
    const std::string v = env;
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && available(Isa::Avx2)) return Isa::Avx2;
  }
  return available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& chosen() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw PreconditionError("kernel ISA not available on this CPU");
#if defined(LLMMOM_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2_table();
#endif
  return scalar_table();
}

Isa active_isa() { return static_cast<Isa>(chosen().load(std::memory_order_relaxed)); }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  if (!available(isa)) throw PreconditionError("kernel ISA not available on this CPU");
  chosen().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const KernelTable& active() { return table(active_isa()); }

}  // namespace llmmom::kernels
