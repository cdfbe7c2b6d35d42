#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llmmom/calendar.hpp"
#include "llmmom/market_data.hpp"
#include "llmmom/portfolio.hpp"

namespace llmmom {

struct BacktestConfig {
  double cost_bps = 2.0;                // one-way, charged on turnover
  std::vector<WeightVector> schedule;   // strictly increasing rebalance dates
  std::optional<Date> end;              // last simulated date; panel end by default
};

struct RebalanceRecord {
  Date date;
  double turnover = 0.0;  // one-way, sum |target - drifted|
  double cost = 0.0;      // return deduction
  bool inception = false;
};

struct LiquidationEvent {
  Date date;
  std::string ticker;
  double weight = 0.0;  // drifted weight redistributed
};

struct BacktestResult {
  // Daily series start the trading day after the inception rebalance.
  std::vector<Date> dates;
  std::vector<double> gross_returns;
  std::vector<double> net_returns;
  std::vector<double> equity;  // relative to 1.0 at inception close
  std::vector<RebalanceRecord> rebalances;
  std::vector<LiquidationEvent> liquidations;

  /// Daily net returns on dates within [from, to].
  std::vector<double> net_between(Date from, Date to) const;
  std::vector<Date> dates_between(Date from, Date to) const;
};

/// Daily simulation with weight drift between rebalances. Costs are charged
/// on the rebalance day's close; the new target earns from the next day. A
/// held name with no return on a day is liquidated at its last value and its
/// weight spread proportionally over the remaining holdings.
BacktestResult run_backtest(const ReturnPanel& panel, const BacktestConfig& config);

/// Mean one-way turnover per rebalance, inception excluded; rebalances
/// restricted to [from, to] when given. 0 when there are none.
double turnover_stat(const BacktestResult& result, std::optional<Date> from = {}, std::optional<Date> to = {});

/// turnover_stat scaled by rebalances per year (52 or 12).
double annualized_turnover(const BacktestResult& result, Frequency frequency, std::optional<Date> from = {},
                           std::optional<Date> to = {});

/// CSV `date,net_return,equity,turnover,cost`.
void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path);

}  // namespace llmmom
