#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense inner loops of the backtest and analytics. Every kernel has a scalar
// reference implementation; SIMD variants are selected at runtime and are
// checked against the reference in tests (they may differ in the last bits
// because lane-wise accumulation reorders the sums).
namespace llmmom::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // w[i] *= 1 + r[i]; returns the new sum of w.
  double (*grow)(double* w, const double* r, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);
  // sum of (x[i] - mean)^2
  double (*sum_sq_dev)(const double* x, std::size_t n, double mean);
  // sum of min(x[i], 0)^2
  double (*sum_sq_neg)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(LLMMOM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool available(Isa isa);
const KernelTable& table(Isa isa);

/// ISA used by the free functions below. Chosen once from CPU features;
/// LLMMOM_SIMD=scalar|avx2 in the environment overrides the choice.
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Test hook: pins the active ISA for the rest of the process.
void force_isa(Isa isa);

const KernelTable& active();

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double grow(std::span<double> w, std::span<const double> r) {
  return active().grow(w.data(), r.data(), w.size());
}
inline void scale(std::span<double> x, double factor) { active().scale(x.data(), x.size(), factor); }
inline double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return active().abs_diff_sum(a.data(), b.data(), a.size());
}
inline double sum_sq_dev(std::span<const double> x, double mean) {
  return active().sum_sq_dev(x.data(), x.size(), mean);
}
inline double sum_sq_neg(std::span<const double> x) { return active().sum_sq_neg(x.data(), x.size()); }

}  // namespace llmmom::kernels
