#pragma once

#include <cstdint>
#include <vector>

#include "llmmom/market_data.hpp"
#include "llmmom/news_store.hpp"

namespace llmmom {

/// Parameters for a reproducible synthetic market: weekday calendar, a
/// one-factor return model with persistent drifts (so momentum has something
/// to find), drifting market caps, late index entrants, sparse missing
/// returns, and Poisson-ish news arrivals.
struct SyntheticSpec {
  std::uint64_t seed = 42;
  int tickers = 100;
  Date start{2018, 9, 3};
  Date end{2025, 3, 31};
  double missing_rate = 0.001;       // per (day, ticker)
  double late_entry_share = 0.05;    // share of tickers joining the index mid-sample
  double news_per_day = 0.3;         // expected items per ticker per weekday
  double risk_free_annual = 0.02;
};

ReturnPanel synthetic_panel(const SyntheticSpec& spec);
std::vector<NewsItem> synthetic_news(const SyntheticSpec& spec, const ReturnPanel& panel);

}  // namespace llmmom
