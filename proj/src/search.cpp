#include "llmmom/search.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"

namespace llmmom {

namespace {

constexpr Frequency kTaus[] = {Frequency::Weekly, Frequency::Monthly};
constexpr int kLookbacks[] = {1, 5};
constexpr int kSizes[] = {25, 50, 75, 100};
constexpr PromptVariant kPrompts[] = {PromptVariant::Basic, PromptVariant::Advanced};
constexpr bool kCaps[] = {false, true};
constexpr WeightScheme kSchemes[] = {WeightScheme::Equal, WeightScheme::Value};
constexpr double kEtas[] = {1.25, 2.5, 3.75, 5.0};

std::string eta_str(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

}  // namespace

std::vector<HyperParams> enumerate_grid() {
  std::vector<HyperParams> grid;
  grid.reserve(512);
  for (auto tau : kTaus)
    for (int k : kLookbacks)
      for (int m : kSizes)
        for (auto pi : kPrompts)
          for (bool c : kCaps)
            for (auto w : kSchemes)
              for (double eta : kEtas) grid.push_back(HyperParams{tau, k, m, pi, c, w, eta});
  return grid;
}

GridResult utility(std::vector<GridRow> rows) {
  const std::size_t n = rows.size();
  if (n < 2) throw PreconditionError("utility needs at least 2 evaluated configurations");
  constexpr double kWorst = -std::numeric_limits<double>::infinity();
  std::vector<double> sharpe(n), depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    sharpe[i] = rows[i].stats.sharpe.value_or(kWorst);
    depth[i] = std::fabs(rows[i].stats.mdd);
  }
  // Sorted copies give the "fraction <=" counts by binary search.
  std::vector<double> sorted_sharpe = sharpe, sorted_depth = depth;
  std::sort(sorted_sharpe.begin(), sorted_sharpe.end());
  std::sort(sorted_depth.begin(), sorted_depth.end());
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ns = std::upper_bound(sorted_sharpe.begin(), sorted_sharpe.end(), sharpe[i]) - sorted_sharpe.begin();
    const auto nd = std::upper_bound(sorted_depth.begin(), sorted_depth.end(), depth[i]) - sorted_depth.begin();
    rows[i].pct_sharpe = static_cast<double>(ns) / dn;
    rows[i].pct_mdd = static_cast<double>(nd) / dn;
    rows[i].utility = 0.75 * rows[i].pct_sharpe - 0.25 * rows[i].pct_mdd;
  }
  GridResult out;
  out.rows = std::move(rows);
  for (std::size_t i = 1; i < n; ++i) {
    const auto& cand = out.rows[i];
    const auto& best = out.rows[out.best];
    if (cand.utility > best.utility || (cand.utility == best.utility && cand.theta < best.theta)) out.best = i;
  }
  return out;
}

GridResult run_grid(StrategyContext& ctx, const std::vector<HyperParams>& grid, Date from, Date to, unsigned threads) {
  ctx.prepare(grid, from, to);
  std::vector<GridRow> rows(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= grid.size()) return;
      try {
        rows[i].theta = grid[i];
        rows[i].stats = ctx.evaluate(grid[i], from, to).enhanced_stats;
      } catch (const std::exception& e) {
        errors[i] = grid[i].str() + ": " + e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("grid evaluation failed: " + e);
  }
  return utility(std::move(rows));
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::fmt(*v) : "undefined"; }

}  // namespace

void write_grid_csv(const GridResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  std::vector<std::size_t> order(result.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = result.rows[a];
    const auto& rb = result.rows[b];
    if (ra.utility != rb.utility) return ra.utility > rb.utility;
    return ra.theta < rb.theta;
  });
  out << "tau,k,l,m,pi,c,w,eta,sharpe,sortino,ann_return,ann_vol,mdd,turnover,pct_sharpe,pct_mdd,U\n";
  for (auto i : order) {
    const auto& r = result.rows[i];
    const auto& t = r.theta;
    out << to_string(t.tau) << ',' << t.k << ',' << t.horizon() << ',' << t.m << ',' << to_string(t.pi) << ','
        << (t.cap ? "on" : "off") << ',' << to_string(t.w) << ',' << eta_str(t.eta) << ',' << opt(r.stats.sharpe)
        << ',' << opt(r.stats.sortino) << ',' << csv::fmt(r.stats.ann_return) << ',' << csv::fmt(r.stats.ann_vol)
        << ',' << csv::fmt(r.stats.mdd) << ',' << csv::fmt(r.stats.turnover) << ',' << csv::fmt(r.pct_sharpe) << ','
        << csv::fmt(r.pct_mdd) << ',' << csv::fmt(r.utility) << '\n';
  }
}

std::string param_value(const HyperParams& theta, std::string_view param) {
  if (param == "tau") return std::string(to_string(theta.tau));
  if (param == "k") return std::to_string(theta.k);
  if (param == "m") return std::to_string(theta.m);
  if (param == "pi") return std::string(to_string(theta.pi));
  if (param == "c") return theta.cap ? "on" : "off";
  if (param == "w") return std::string(to_string(theta.w));
  if (param == "eta") return eta_str(theta.eta);
  throw PreconditionError("unknown hyperparameter '" + std::string(param) + "'; expected one of tau,k,m,pi,c,w,eta");
}

std::vector<HyperParams> perturbations(const HyperParams& base, std::string_view param) {
  std::vector<HyperParams> out;
  auto sweep = [&](const auto& values, auto setter) {
    for (const auto& v : values) {
      HyperParams t = base;
      setter(t, v);
      out.push_back(t);
    }
  };
  if (param == "tau") {
    sweep(kTaus, [](HyperParams& t, Frequency v) { t.tau = v; });
  } else if (param == "k") {
    sweep(kLookbacks, [](HyperParams& t, int v) { t.k = v; });
  } else if (param == "m") {
    sweep(kSizes, [](HyperParams& t, int v) { t.m = v; });
  } else if (param == "pi") {
    sweep(kPrompts, [](HyperParams& t, PromptVariant v) { t.pi = v; });
  } else if (param == "c") {
    sweep(kCaps, [](HyperParams& t, bool v) { t.cap = v; });
  } else if (param == "w") {
    sweep(kSchemes, [](HyperParams& t, WeightScheme v) { t.w = v; });
  } else if (param == "eta") {
    sweep(kEtas, [](HyperParams& t, double v) { t.eta = v; });
  } else {
    throw PreconditionError("unknown hyperparameter '" + std::string(param) + "'; expected one of tau,k,m,pi,c,w,eta");
  }
  return out;
}

std::vector<PerturbRow> perturb(StrategyContext& ctx, const HyperParams& optimum, std::string_view param, Date from,
                                Date to, unsigned threads) {
  const auto thetas = perturbations(optimum, param);
  ctx.prepare(thetas, from, to);
  std::vector<PerturbRow> rows(thetas.size());
  std::vector<std::string> errors(thetas.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= thetas.size()) return;
      try {
        const auto run = ctx.evaluate(thetas[i], from, to);
        rows[i] = PerturbRow{std::string(param), param_value(thetas[i], param), thetas[i] == optimum, thetas[i],
                             run.enhanced_stats, run.baseline_stats};
      } catch (const std::exception& e) {
        errors[i] = thetas[i].str() + ": " + e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("perturbation failed: " + e);
  }
  return rows;
}

void write_perturb_csv(const std::vector<PerturbRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  out << "param,value,is_optimum,enhanced_sharpe,baseline_sharpe,enhanced_sortino,baseline_sortino,"
         "enhanced_return,baseline_return,enhanced_mdd,baseline_mdd\n";
  for (const auto& r : rows) {
    out << r.param << ',' << r.value << ',' << (r.is_optimum ? 1 : 0) << ',' << opt(r.enhanced.sharpe) << ','
        << opt(r.baseline.sharpe) << ',' << opt(r.enhanced.sortino) << ',' << opt(r.baseline.sortino) << ','
        << csv::fmt(r.enhanced.ann_return) << ',' << csv::fmt(r.baseline.ann_return) << ','
        << csv::fmt(r.enhanced.mdd) << ',' << csv::fmt(r.baseline.mdd) << '\n';
  }
}

}  // namespace llmmom
