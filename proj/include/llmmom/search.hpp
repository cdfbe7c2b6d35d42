#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "llmmom/strategy.hpp"

namespace llmmom {

/// All 512 configurations, lexicographic over (tau, k, m, pi, c, w, eta) with
/// tau weekly < monthly, k 1 < 5, m 25..100, pi basic < advanced, c off < on,
/// w equal < value, eta 1.25 < 2.5 < 3.75 < 5.
std::vector<HyperParams> enumerate_grid();

struct GridRow {
  HyperParams theta;
  PerfStats stats;
  double pct_sharpe = 0.0;  // share of configurations with Sharpe <= this one
  double pct_mdd = 0.0;     // share with |MDD| <= this one (higher = deeper drawdown)
  double utility = 0.0;     // 0.75 * pct_sharpe - 0.25 * pct_mdd
};

struct GridResult {
  std::vector<GridRow> rows;  // input order
  std::size_t best = 0;       // argmax utility, ties to the smaller configuration
  const GridRow& best_row() const { return rows[best]; }
};

/// Percentile-rank utility over every evaluated configuration. An undefined
/// Sharpe ranks below every defined one. Needs at least 2 rows.
GridResult utility(std::vector<GridRow> rows);

/// Evaluates every configuration on [from, to] with `threads` workers and
/// ranks them. Output does not depend on the thread count.
GridResult run_grid(StrategyContext& ctx, const std::vector<HyperParams>& grid, Date from, Date to, unsigned threads);

/// CSV: all hyperparameters, stats, percentiles and U, sorted by U descending.
void write_grid_csv(const GridResult& result, const std::filesystem::path& path);

/// The seven free hyperparameters.
inline constexpr std::string_view kFreeParams[] = {"tau", "k", "m", "pi", "c", "w", "eta"};

/// Every admissible value of `param` applied to `base`, in grid order.
/// Throws PreconditionError for an unknown name.
std::vector<HyperParams> perturbations(const HyperParams& base, std::string_view param);

struct PerturbRow {
  std::string param;
  std::string value;
  bool is_optimum = false;
  HyperParams theta;
  PerfStats enhanced;
  PerfStats baseline;
};

/// Ceteris-paribus sweep of `param` around `optimum`, evaluated on [from, to].
std::vector<PerturbRow> perturb(StrategyContext& ctx, const HyperParams& optimum, std::string_view param, Date from,
                                Date to, unsigned threads = 1);

/// CSV: param,value,is_optimum,enhanced_sharpe,baseline_sharpe,... per row.
void write_perturb_csv(const std::vector<PerturbRow>& rows, const std::filesystem::path& path);

/// Value of `param` in `theta` as printed in reports ("monthly", "5", "on", ...).
std::string param_value(const HyperParams& theta, std::string_view param);

}  // namespace llmmom
