#include "llmmom/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"
#include "llmmom/kernels.hpp"

namespace llmmom {

double max_drawdown(std::span<const double> equity) {
  double peak = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double e : equity) {
    peak = std::max(peak, e);
    worst = std::min(worst, e / peak - 1.0);
  }
  return worst;
}

double max_drawdown_from_returns(std::span<const double> net_returns) {
  double level = 1.0;
  double peak = 1.0;
  double worst = 0.0;
  for (double r : net_returns) {
    level *= 1.0 + r;
    peak = std::max(peak, level);
    worst = std::min(worst, level / peak - 1.0);
  }
  return worst;
}

namespace {

// Rounding in the mean makes the computed dispersion of a constant series
// slightly positive, so constancy is tested directly.
bool constant(std::span<const double> x) {
  return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
}

}  // namespace

PerfStats perf_stats(std::span<const double> net_returns, std::span<const double> risk_free, double turnover) {
  const std::size_t n = net_returns.size();
  if (n < 2) throw PreconditionError("performance statistics need at least 2 observations");
  if (risk_free.size() != n) throw PreconditionError("risk-free series must align with the return series");

  std::vector<double> excess(n);
  for (std::size_t i = 0; i < n; ++i) excess[i] = net_returns[i] - risk_free[i];
  const double dn = static_cast<double>(n);
  const double annual = std::sqrt(kTradingDaysPerYear);

  PerfStats s;
  s.observations = n;
  s.turnover = turnover;
  const double mean_excess = kernels::sum(excess) / dn;
  const double sd_excess = std::sqrt(kernels::sum_sq_dev(excess, mean_excess) / (dn - 1.0));
  if (sd_excess > 0.0 && !constant(excess)) s.sharpe = mean_excess / sd_excess * annual;
  const double downside = std::sqrt(kernels::sum_sq_neg(excess) / dn);
  if (downside > 0.0) s.sortino = mean_excess / downside * annual;

  const double mean_net = kernels::sum(net_returns) / dn;
  s.ann_vol = std::sqrt(kernels::sum_sq_dev(net_returns, mean_net) / (dn - 1.0)) * annual;

  double growth = 1.0;
  for (double r : net_returns) growth *= 1.0 + r;
  s.ann_return = std::pow(growth, kTradingDaysPerYear / dn) - 1.0;
  s.mdd = max_drawdown_from_returns(net_returns);
  return s;
}

AlphaReport alpha_regression(std::span<const double> enhanced_excess, std::span<const double> baseline_excess) {
  const std::size_t n = enhanced_excess.size();
  if (baseline_excess.size() != n) throw PreconditionError("alpha regression needs series on identical dates");
  if (n < 30) throw PreconditionError("alpha regression needs at least 30 observations");
  const double dn = static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += baseline_excess[i];
    my += enhanced_excess[i];
  }
  mx /= dn;
  my /= dn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = baseline_excess[i] - mx;
    sxx += dx * dx;
    sxy += dx * (enhanced_excess[i] - my);
  }
  if (!(sxx > 0.0) || constant(baseline_excess)) throw PreconditionError("alpha regression regressor has zero variance");

  AlphaReport r;
  r.observations = n;
  r.beta = sxy / sxx;
  r.alpha_daily = my - r.beta * mx;
  r.alpha_annualized = r.alpha_daily * kTradingDaysPerYear;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = enhanced_excess[i] - r.alpha_daily - r.beta * baseline_excess[i];
    ssr += e * e;
  }
  const double s2 = ssr / (dn - 2.0);
  const double se = std::sqrt(s2 * (1.0 / dn + mx * mx / sxx));
  if (se > 0.0) r.t_stat_alpha = r.alpha_daily / se;
  return r;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::fmt(*v) : "undefined"; }

std::string opt_fixed(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

void write_stats_csv(const std::vector<StatsColumn>& columns, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  out << "metric";
  for (const auto& c : columns) out << ',' << csv::quote(c.name);
  out << '\n';
  auto row = [&](const char* name, auto getter) {
    out << name;
    for (const auto& c : columns) out << ',' << getter(c.stats);
    out << '\n';
  };
  row("Sharpe", [](const PerfStats& s) { return opt(s.sharpe); });
  row("Sortino", [](const PerfStats& s) { return opt(s.sortino); });
  row("Return", [](const PerfStats& s) { return csv::fmt(s.ann_return); });
  row("Volatility", [](const PerfStats& s) { return csv::fmt(s.ann_vol); });
  row("MDD", [](const PerfStats& s) { return csv::fmt(s.mdd); });
  row("Turnover", [](const PerfStats& s) { return csv::fmt(s.turnover); });
}

std::string format_stats_table(const std::vector<StatsColumn>& columns) {
  std::size_t width = 12;
  for (const auto& c : columns) width = std::max(width, c.name.size() + 2);
  std::string out;
  auto pad = [&](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out += "Metric    ";
  for (const auto& c : columns) out += pad(c.name, width);
  out += '\n';
  auto row = [&](const char* name, auto getter) {
    std::string line = name;
    line.resize(10, ' ');
    for (const auto& c : columns) line += pad(getter(c.stats), width);
    out += line + '\n';
  };
  row("Sharpe", [](const PerfStats& s) { return opt_fixed(s.sharpe); });
  row("Sortino", [](const PerfStats& s) { return opt_fixed(s.sortino); });
  row("Return", [](const PerfStats& s) { return opt_fixed(s.ann_return); });
  row("Volatility", [](const PerfStats& s) { return opt_fixed(s.ann_vol); });
  row("MDD", [](const PerfStats& s) { return opt_fixed(s.mdd); });
  row("Turnover", [](const PerfStats& s) { return opt_fixed(s.turnover); });
  return out;
}

}  // namespace llmmom
