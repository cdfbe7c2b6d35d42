#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llmmom/market_data.hpp"
#include "llmmom/news_store.hpp"
#include "llmmom/scorer.hpp"

namespace llmmom {

struct HistogramBin {
  std::string label;
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive, except the last bin
  std::size_t count = 0;
};

/// News items per calendar year, covering every year of the panel (zero
/// counts included) plus any year that only appears in the news.
std::vector<std::pair<int, std::size_t>> news_per_year(const NewsStore& news, const ReturnPanel& panel);

/// Distribution of news items per (ticker, year) over every panel ticker and
/// panel year, in log2 bins: 0, 1, 2-3, 4-7, 8-15, ...
std::vector<HistogramBin> news_per_firm_year(const NewsStore& news, const ReturnPanel& panel);

/// Histogram of every present member daily return: `bins` equal-width bins on
/// [lo, hi] with values outside clamped into the edge bins. Optionally
/// restricted to dates in [from, to].
std::vector<HistogramBin> return_histogram(const ReturnPanel& panel, double lo = -0.1, double hi = 0.1,
                                           int bins = 40, std::optional<Date> from = {},
                                           std::optional<Date> to = {});

/// Histogram of present raw scores on [0, 1] in `bins` bins; missing scores
/// are excluded.
std::vector<HistogramBin> score_histogram(const std::vector<RawScore>& scores, int bins = 20);

/// Writes <stem>.csv (label,lo,hi,count) and <stem>.svg.
void write_histogram(const std::vector<HistogramBin>& bins, const std::string& title,
                     const std::filesystem::path& stem);

/// Writes news_per_year.csv/svg (year,count).
void write_year_counts(const std::vector<std::pair<int, std::size_t>>& counts, const std::filesystem::path& stem);

}  // namespace llmmom
