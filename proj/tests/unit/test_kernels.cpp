#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "llmmom/kernels.hpp"

using namespace llmmom::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("scalar reference kernels") {
  const KernelTable& k = scalar_table();
  const std::vector<double> a = {1, -2, 3}, b = {4, 5, -6};
  CHECK(k.sum(a.data(), 3) == 2.0);
  CHECK(k.dot(a.data(), b.data(), 3) == -24.0);
  CHECK(k.abs_diff_sum(a.data(), b.data(), 3) == 3 + 7 + 9);
  CHECK(k.sum_sq_dev(a.data(), 3, 1.0) == 0 + 9 + 4);
  CHECK(k.sum_sq_neg(a.data(), 3) == 4.0);
  std::vector<double> w = {0.5, 0.5};
  const std::vector<double> r = {0.1, -0.1};
  CHECK(k.grow(w.data(), r.data(), 2) == Catch::Approx(1.0));
  CHECK(w[0] == Catch::Approx(0.55));
  k.scale(w.data(), 2, 2.0);
  CHECK(w[1] == Catch::Approx(0.9));
  CHECK(k.sum(nullptr, 0) == 0.0);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
  if (!available(Isa::Avx2)) {
    SKIP("AVX2 not available on this CPU");
  }
  const KernelTable& s = scalar_table();
  const KernelTable& v = table(Isa::Avx2);
  std::mt19937_64 gen(11);
  // Lengths straddle the vector width and the unrolled tail.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 250u, 1001u}) {
    const auto a = random_vec(gen, n), b = random_vec(gen, n);
    CHECK(near(v.sum(a.data(), n), s.sum(a.data(), n)));
    CHECK(near(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)));
    CHECK(near(v.abs_diff_sum(a.data(), b.data(), n), s.abs_diff_sum(a.data(), b.data(), n)));
    CHECK(near(v.sum_sq_dev(a.data(), n, 0.01), s.sum_sq_dev(a.data(), n, 0.01)));
    CHECK(near(v.sum_sq_neg(a.data(), n), s.sum_sq_neg(a.data(), n)));
    auto w1 = a, w2 = a;
    CHECK(near(v.grow(w1.data(), b.data(), n), s.grow(w2.data(), b.data(), n)));
    for (std::size_t i = 0; i < n; ++i) CHECK(w1[i] == w2[i]);  // element-wise ops are exact
    v.scale(w1.data(), n, 1.7);
    s.scale(w2.data(), n, 1.7);
    CHECK(w1 == w2);
  }
}

TEST_CASE("dispatch exposes a usable table") {
  CHECK(available(Isa::Scalar));
  CHECK((isa_name(active_isa()) == "scalar" || isa_name(active_isa()) == "avx2"));
  const std::vector<double> x = {1.0, 2.0};
  CHECK(sum(x) == 3.0);
}
