#include <cmath>

#include "llmmom/kernels.hpp"

namespace llmmom::kernels {

namespace {

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double grow(double* w, const double* r, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] *= 1.0 + r[i];
    s += w[i];
  }
  return s;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum_sq_dev(const double* x, std::size_t n, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

double sum_sq_neg(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] < 0.0 ? x[i] : 0.0;
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{sum, dot, grow, scale, abs_diff_sum, sum_sq_dev, sum_sq_neg};
  return t;
}

}  // namespace llmmom::kernels
