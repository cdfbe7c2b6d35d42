#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace llmmom {

inline constexpr double kTradingDaysPerYear = 252.0;

/// Annualized performance of a daily net return series.
struct PerfStats {
  std::optional<double> sharpe;   // undefined when excess returns have zero dispersion
  std::optional<double> sortino;  // undefined when there is no downside
  double ann_return = 0.0;        // geometric
  double ann_vol = 0.0;           // sample std * sqrt(252)
  double mdd = 0.0;               // in [-1, 0]
  double turnover = 0.0;          // mean one-way per rebalance
  std::size_t observations = 0;
};

/// Sharpe and Sortino use excess = net - rf; Sortino's downside deviation is
/// sqrt(mean(min(excess, 0)^2)). Standard deviations use n - 1.
PerfStats perf_stats(std::span<const double> net_returns, std::span<const double> risk_free, double turnover = 0.0);

/// min_t equity_t / max_{s<=t} equity_s - 1, with an implicit starting level 1.0.
double max_drawdown_from_returns(std::span<const double> net_returns);
/// Same over an explicit equity path.
double max_drawdown(std::span<const double> equity);

struct AlphaReport {
  double alpha_daily = 0.0;
  double alpha_annualized = 0.0;  // alpha_daily * 252
  double beta = 0.0;
  std::optional<double> t_stat_alpha;  // classical OLS standard error; undefined on a perfect fit
  std::size_t observations = 0;
};

/// OLS of enhanced_t = alpha + beta * baseline_t + e_t on excess returns.
/// Requires equal lengths, at least 30 observations and a non-constant regressor.
AlphaReport alpha_regression(std::span<const double> enhanced_excess, std::span<const double> baseline_excess);

/// Named column for the stats table.
struct StatsColumn {
  std::string name;
  PerfStats stats;
};

/// CSV with rows Sharpe, Sortino, Return, Volatility, MDD, Turnover and one
/// column per strategy. Undefined ratios print as "undefined".
void write_stats_csv(const std::vector<StatsColumn>& columns, const std::filesystem::path& path);
/// The same table as aligned text.
std::string format_stats_table(const std::vector<StatsColumn>& columns);

}  // namespace llmmom
