#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "llmmom/calendar.hpp"

namespace llmmom {

struct NewsItem {
  std::string ticker;
  Timestamp published_at;  // exchange-local, timezone-naive
  std::string title;
  std::string summary;
  std::string source;
};

/// News cutoff on every window boundary: 15:45 exchange time.
inline constexpr int kNewsCutoffHour = 15;
inline constexpr int kNewsCutoffMinute = 45;

struct NewsWindow {
  std::string ticker;
  Timestamp as_of;  // 15:45 on the query date
  int lookback_days = 0;
  std::vector<NewsItem> items;  // newest first; ties by title
};

/// Immutable, per-ticker index of news items.
class NewsStore {
 public:
  NewsStore() = default;
  /// Canonicalizes `items`: drops duplicates on (ticker, published_at, title)
  /// and sorts per ticker.
  explicit NewsStore(std::vector<NewsItem> items);

  std::size_t size() const { return size_; }
  std::size_t duplicates_dropped() const { return duplicates_; }
  bool empty() const { return size_ == 0; }

  /// Items for one ticker, oldest first (ties by title).
  const std::vector<NewsItem>& items(const std::string& ticker) const;
  const std::map<std::string, std::vector<NewsItem>>& by_ticker() const { return by_ticker_; }

  /// Items with 15:45 on business day t-k < published_at <= 15:45 on t, where
  /// business days come from `calendar`. An empty window is a valid result.
  NewsWindow query_window(const std::string& ticker, Date t, int k, const TradingCalendar& calendar) const;

 private:
  std::map<std::string, std::vector<NewsItem>> by_ticker_;
  std::size_t size_ = 0;
  std::size_t duplicates_ = 0;
};

/// Reads the canonical news JSONL format. Throws DataError with the line number.
NewsStore load_news(const std::filesystem::path& path);

/// Writes the store in canonical order (ticker, then published_at, then title).
void save_news(const NewsStore& store, const std::filesystem::path& path);

/// Maps vendor JSON records onto the canonical NewsItem fields.
struct NewsFieldMapping {
  // JSON pointer (e.g. "/tickers/0") or plain key for each canonical field.
  std::string ticker = "ticker";
  std::string published_at = "published_at";
  std::string title = "title";
  std::string summary = "summary";
  std::string source = "source";
  // strptime-style input format for published_at; canonical "%Y-%m-%d %H:%M" by default.
  std::string time_format = "%Y-%m-%d %H:%M";
  // When the ticker field is an array, emit one record per element.
  bool explode_ticker_arrays = true;

  static NewsFieldMapping from_json_file(const std::filesystem::path& path);
};

/// Converts a vendor JSONL file to canonical NewsItems using `mapping`.
std::vector<NewsItem> adapt_news(const std::filesystem::path& vendor_path, const NewsFieldMapping& mapping);

}  // namespace llmmom
