#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "llmmom/analytics.hpp"
#include "llmmom/error.hpp"
#include "support.hpp"

using namespace llmmom;

namespace {

std::vector<double> noise(std::uint64_t seed, std::size_t n, double mu, double sd) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> out(n);
  for (auto& x : out) x = d(gen);
  return out;
}

std::vector<double> equity_of(const std::vector<double>& r) {
  std::vector<double> eq;
  double level = 1.0;
  for (double x : r) eq.push_back(level *= 1.0 + x);
  return eq;
}

bool close(double a, double b, double tol = 1e-10) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("performance statistics match a textbook re-derivation") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = noise(seed, 300, 0.0004, 0.01);
    const auto rf = noise(seed + 100, 300, 0.0001, 0.00001);
    const auto got = perf_stats(r, rf, 0.3);
    const auto want = testing::oracle_stats(r, rf);
    REQUIRE(got.sharpe);
    REQUIRE(got.sortino);
    CHECK(close(*got.sharpe, *want.sharpe));
    CHECK(close(*got.sortino, *want.sortino));
    CHECK(close(got.ann_return, want.ann_return));
    CHECK(close(got.ann_vol, want.ann_vol));
    CHECK(close(got.mdd, testing::brute_mdd(equity_of(r))));
    CHECK(got.turnover == 0.3);
    CHECK(got.observations == 300);
  }
}

TEST_CASE("a known two-point series") {
  // excess = {0.01, -0.01}: mean 0, so Sharpe is exactly 0.
  const std::vector<double> r = {0.01, -0.01}, rf = {0.0, 0.0};
  const auto s = perf_stats(r, rf);
  REQUIRE(s.sharpe);
  CHECK(*s.sharpe == 0.0);
  CHECK(s.mdd == Catch::Approx(-0.01));
  CHECK(s.ann_vol == Catch::Approx(std::sqrt(2e-4) * std::sqrt(252.0)));
}

TEST_CASE("undefined ratios") {
  const std::vector<double> flat(50, 0.001), rf(50, 0.0);
  const auto s = perf_stats(flat, rf);
  CHECK_FALSE(s.sharpe);
  CHECK_FALSE(s.sortino);  // no downside at all
  CHECK(s.mdd == 0.0);
}

TEST_CASE("drawdown is zero on a monotone curve and bounded below by -1") {
  const std::vector<double> up = {0.01, 0.0, 0.02, 0.005};
  CHECK(max_drawdown_from_returns(up) == 0.0);
  const std::vector<double> wipe = {0.1, -1.0};
  CHECK(max_drawdown_from_returns(wipe) == -1.0);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = noise(gen(), 100, 0.0, 0.03);
    const double mdd = max_drawdown_from_returns(r);
    CHECK(mdd <= 0.0);
    CHECK(mdd >= -1.0);
    CHECK(close(mdd, testing::brute_mdd(equity_of(r))));
  }
}

TEST_CASE("alpha regression matches the normal equations") {
  const auto x = noise(3, 200, 0.0003, 0.01);
  auto y = noise(4, 200, 0.0, 0.004);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.0002 + 0.8 * x[i];
  const auto got = alpha_regression(y, x);
  const auto want = testing::oracle_ols(y, x);
  CHECK(close(got.alpha_daily, want.alpha, 1e-9));
  CHECK(close(got.beta, want.beta, 1e-9));
  CHECK(close(got.alpha_annualized, 252.0 * got.alpha_daily));
  REQUIRE(got.t_stat_alpha);
  CHECK(close(*got.t_stat_alpha, *want.t_alpha, 1e-8));
  CHECK(got.observations == 200);
}

TEST_CASE("alpha regression recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(0.001 * (i % 7) - 0.003);
    y.push_back(0.0005 + 2.0 * x.back());
  }
  const auto got = alpha_regression(y, x);
  CHECK(got.alpha_daily == Catch::Approx(0.0005).margin(1e-15));
  CHECK(got.beta == Catch::Approx(2.0));
}

TEST_CASE("alpha regression preconditions") {
  const auto x = noise(1, 29, 0, 0.01), y = noise(2, 29, 0, 0.01);
  CHECK_THROWS_AS(alpha_regression(y, x), PreconditionError);
  const auto x2 = noise(1, 40, 0, 0.01), y2 = noise(2, 39, 0, 0.01);
  CHECK_THROWS_AS(alpha_regression(y2, x2), PreconditionError);
  const std::vector<double> flat(40, 0.001);
  CHECK_THROWS_AS(alpha_regression(x2, flat), PreconditionError);
}

TEST_CASE("stats table") {
  const std::vector<double> r = {0.01, -0.02, 0.015}, rf(3, 0.0), flat(3, 0.0);
  const std::vector<StatsColumn> cols = {{"baseline", perf_stats(r, rf, 0.25)}, {"enhanced", perf_stats(flat, rf)}};
  testing::TempDir dir;
  write_stats_csv(cols, dir / "stats.csv");
  const std::string csv = testing::read_file(dir / "stats.csv");
  CHECK(csv.rfind("metric,baseline,enhanced\n", 0) == 0);
  for (const char* row : {"\nSharpe,", "\nSortino,", "\nReturn,", "\nVolatility,", "\nMDD,", "\nTurnover,"}) {
    CHECK(csv.find(row) != std::string::npos);
  }
  CHECK(csv.find("undefined") != std::string::npos);
  const std::string text = format_stats_table(cols);
  CHECK(text.find("enhanced") != std::string::npos);
}
