#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "llmmom/analytics.hpp"
#include "llmmom/backtest.hpp"
#include "llmmom/calendar.hpp"
#include "llmmom/market_data.hpp"
#include "llmmom/news_store.hpp"
#include "llmmom/portfolio.hpp"
#include "llmmom/prompt.hpp"
#include "llmmom/scorer.hpp"

namespace llmmom {

/// One point of the hyperparameter grid. The prompt horizon is bound to the
/// rebalance frequency: 5 business days weekly, 21 monthly.
struct HyperParams {
  Frequency tau = Frequency::Monthly;
  int k = 1;                                  // news lookback, business days
  int m = 50;                                 // portfolio size
  PromptVariant pi = PromptVariant::Basic;
  bool cap = true;                            // 15% per-name constraint
  WeightScheme w = WeightScheme::Value;
  double eta = 5.0;                           // tilt multiplier

  int horizon() const { return tau == Frequency::Weekly ? 5 : 21; }
  /// Human-readable "tau=monthly k=1 l=21 m=50 pi=basic c=on w=value eta=5".
  std::string str() const;

  auto order_key() const { return std::tuple(tau, k, m, pi, cap, w, eta); }
  friend bool operator==(const HyperParams& a, const HyperParams& b) { return a.order_key() == b.order_key(); }
  friend bool operator<(const HyperParams& a, const HyperParams& b) { return a.order_key() < b.order_key(); }
};

std::string_view to_string(Frequency f);
Frequency parse_frequency(std::string_view text);

struct SampleSplit {
  Date validation_from{2019, 10, 1};
  Date validation_to{2023, 12, 31};
  Date test_from{2024, 1, 1};
  Date test_to{2025, 3, 31};

  /// Throws PreconditionError unless validation precedes test without overlap.
  void validate() const;
};

/// Candidates and their momentum signal on one rebalance date.
struct RebalanceCandidates {
  Date date;
  std::vector<MomentumEntry> candidates;  // deciles 1-2
  std::vector<MomentumEntry> top_decile;
};

/// Result of running one configuration over a window.
struct StrategyRun {
  HyperParams theta;
  Date from, to;
  std::vector<ScheduleRow> schedule;
  BacktestResult enhanced;
  BacktestResult baseline;
  PerfStats enhanced_stats;
  PerfStats baseline_stats;
  std::vector<Date> window_dates;
};

/// Everything needed to turn hyperparameters into portfolios: the panel,
/// the news, the prompt templates and a scorer. Momentum signals and scores
/// are memoized; after prepare() the context can be evaluated concurrently.
class StrategyContext {
 public:
  StrategyContext(const ReturnPanel& panel, const NewsStore& news, const PromptTemplates& templates, Scorer& scorer,
                  double cost_bps = 2.0);

  const ReturnPanel& panel() const { return panel_; }
  double cost_bps() const { return cost_bps_; }

  /// Rebalance dates covering [from, to]: the last feasible period end before
  /// `from` (the inception trade) followed by every period end in [from, to].
  std::vector<Date> rebalance_dates(Frequency tau, Date from, Date to) const;

  const RebalanceCandidates& candidates(Date date);

  /// The (key, prompt) pairs needed to score every candidate for (k, l, pi) on `dates`.
  std::vector<ScoreRequest> score_requests(const std::vector<Date>& dates, int k, int horizon, PromptVariant pi);

  /// Computes signals and scores for every configuration in `thetas` over
  /// [from, to] in one batch. Returns the number of requests issued.
  std::size_t prepare(const std::vector<HyperParams>& thetas, Date from, Date to);

  /// Normalized scores aligned with candidates(date).candidates.
  const std::vector<double>& normalized_scores(Date date, int k, int horizon, PromptVariant pi);
  /// Raw scores aligned with candidates(date).candidates.
  const std::vector<RawScore>& raw_scores(Date date, int k, int horizon, PromptVariant pi);

  /// Enhanced and baseline targets on one date.
  ScheduleRow build_targets(const HyperParams& theta, Date date);

  /// Full pipeline over [from, to]: signal, scores, selection, weights, backtest, stats.
  StrategyRun evaluate(const HyperParams& theta, Date from, Date to);

  /// The classic top-decile equal-weighted momentum portfolio over the same
  /// rebalance dates, built straight from the momentum deciles.
  BacktestResult classic_top_decile(Frequency tau, Date from, Date to);

  /// Risk-free rates on `dates`.
  std::vector<double> risk_free_on(const std::vector<Date>& dates) const;

 private:
  using ScoreSlot = std::tuple<Date, int, int, PromptVariant>;
  struct ScoreColumn {
    std::vector<RawScore> raw;
    std::vector<double> normalized;
  };
  const ScoreColumn& column(Date date, int k, int horizon, PromptVariant pi);
  std::vector<double> caps_on(Date date, const std::vector<std::string>& tickers) const;

  const ReturnPanel& panel_;
  const NewsStore& news_;
  const PromptTemplates& templates_;
  Scorer& scorer_;
  double cost_bps_;

  std::mutex mu_;
  std::map<Date, std::unique_ptr<RebalanceCandidates>> candidates_;
  std::map<ScoreSlot, std::unique_ptr<ScoreColumn>> scores_;
};

}  // namespace llmmom
