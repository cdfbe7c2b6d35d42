#include "llmmom/backtest.hpp"

#include <fstream>
#include <map>

#include <spdlog/spdlog.h>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"
#include "llmmom/kernels.hpp"

namespace llmmom {

std::vector<double> BacktestResult::net_between(Date from, Date to) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (dates[i] >= from && dates[i] <= to) out.push_back(net_returns[i]);
  }
  return out;
}

std::vector<Date> BacktestResult::dates_between(Date from, Date to) const {
  std::vector<Date> out;
  for (const auto& d : dates) {
    if (d >= from && d <= to) out.push_back(d);
  }
  return out;
}

namespace {

struct Book {
  std::vector<std::size_t> names;  // panel ticker indices
  std::vector<double> weights;
};

Book to_book(const ReturnPanel& panel, const WeightVector& target) {
  Book b;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto idx = panel.ticker_index(target.tickers[i]);
    if (!idx) throw PreconditionError("schedule on " + target.date.iso() + " holds unknown ticker " + target.tickers[i]);
    if (target.weights[i] < 0.0) throw PreconditionError("negative target weight for " + target.tickers[i]);
    if (target.weights[i] == 0.0) continue;
    b.names.push_back(*idx);
    b.weights.push_back(target.weights[i]);
  }
  return b;
}

}  // namespace

BacktestResult run_backtest(const ReturnPanel& panel, const BacktestConfig& config) {
  if (config.schedule.empty()) throw PreconditionError("backtest needs at least one rebalance");
  std::vector<std::size_t> rebalance_index;
  for (const auto& w : config.schedule) {
    const auto idx = panel.date_index(w.date);
    if (!idx) throw PreconditionError("rebalance date " + w.date.iso() + " is not a trading date");
    if (!rebalance_index.empty() && *idx <= rebalance_index.back()) {
      throw PreconditionError("rebalance dates must be strictly increasing");
    }
    rebalance_index.push_back(*idx);
  }
  std::size_t last = panel.num_dates() - 1;
  if (config.end) {
    auto it = std::upper_bound(panel.dates().begin(), panel.dates().end(), *config.end);
    if (it == panel.dates().begin()) throw PreconditionError("backtest end precedes the panel");
    last = static_cast<std::size_t>(it - panel.dates().begin()) - 1;
  }
  const double cost_rate = config.cost_bps * 1e-4;

  BacktestResult res;
  Book book = to_book(panel, config.schedule.front());
  res.rebalances.push_back({config.schedule.front().date, 0.0, 0.0, true});

  std::vector<double> day_returns;
  std::vector<double> dense_target(panel.num_tickers(), 0.0);
  std::vector<double> dense_drift(panel.num_tickers(), 0.0);
  std::size_t next_rebalance = 1;
  double equity = 1.0;

  for (std::size_t t = rebalance_index.front() + 1; t <= last; ++t) {
    const Date date = panel.dates()[t];
    day_returns.resize(book.names.size());
    bool any_missing = false;
    for (std::size_t j = 0; j < book.names.size(); ++j) {
      const double r = panel.ret(t, book.names[j]);
      any_missing = any_missing || is_missing(r);
      day_returns[j] = is_missing(r) ? 0.0 : r;
    }
    const double gross = kernels::dot(book.weights, day_returns);
    if (!book.names.empty()) {
      const double total = kernels::grow(book.weights, day_returns);
      if (total > 0.0) {
        kernels::scale(book.weights, 1.0 / total);
      } else {
        spdlog::warn("{}: portfolio value wiped out; holding cash until the next rebalance", date.iso());
        book = Book{};
      }
    }

    if (any_missing && !book.names.empty()) {
      Book kept;
      for (std::size_t j = 0; j < book.names.size(); ++j) {
        if (is_missing(panel.ret(t, book.names[j]))) {
          res.liquidations.push_back({date, panel.tickers()[book.names[j]], book.weights[j]});
          spdlog::debug("{}: no return for held {}; liquidated at last value", date.iso(), panel.tickers()[book.names[j]]);
          continue;
        }
        kept.names.push_back(book.names[j]);
        kept.weights.push_back(book.weights[j]);
      }
      const double kept_total = kernels::sum(kept.weights);
      if (kept_total > 0.0) kernels::scale(kept.weights, 1.0 / kept_total);
      book = std::move(kept);
    }

    double net = gross;
    if (next_rebalance < rebalance_index.size() && rebalance_index[next_rebalance] == t) {
      Book target = to_book(panel, config.schedule[next_rebalance]);
      for (std::size_t j = 0; j < book.names.size(); ++j) dense_drift[book.names[j]] = book.weights[j];
      for (std::size_t j = 0; j < target.names.size(); ++j) dense_target[target.names[j]] = target.weights[j];
      const double turnover = kernels::abs_diff_sum(dense_target, dense_drift);
      for (auto n : book.names) dense_drift[n] = 0.0;
      for (auto n : target.names) dense_target[n] = 0.0;
      const double cost = cost_rate * turnover;
      net = gross - cost;
      res.rebalances.push_back({date, turnover, cost, false});
      book = std::move(target);
      ++next_rebalance;
    }

    equity *= 1.0 + net;
    res.dates.push_back(date);
    res.gross_returns.push_back(gross);
    res.net_returns.push_back(net);
    res.equity.push_back(equity);
  }
  return res;
}

double turnover_stat(const BacktestResult& result, std::optional<Date> from, std::optional<Date> to) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : result.rebalances) {
    if (r.inception) continue;
    if (from && r.date < *from) continue;
    if (to && r.date > *to) continue;
    total += r.turnover;
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

double annualized_turnover(const BacktestResult& result, Frequency frequency, std::optional<Date> from,
                           std::optional<Date> to) {
  return turnover_stat(result, from, to) * (frequency == Frequency::Weekly ? 52.0 : 12.0);
}

void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  std::map<Date, const RebalanceRecord*> by_date;
  for (const auto& r : result.rebalances) by_date[r.date] = &r;
  out << "date,net_return,equity,turnover,cost\n";
  for (std::size_t i = 0; i < result.dates.size(); ++i) {
    auto it = by_date.find(result.dates[i]);
    const double turnover = it == by_date.end() ? 0.0 : it->second->turnover;
    const double cost = it == by_date.end() ? 0.0 : it->second->cost;
    out << result.dates[i].iso() << ',' << csv::fmt(result.net_returns[i]) << ',' << csv::fmt(result.equity[i]) << ','
        << csv::fmt(turnover) << ',' << csv::fmt(cost) << '\n';
  }
}

}  // namespace llmmom
