#include "llmmom/news_store.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "llmmom/error.hpp"

namespace llmmom {

namespace {

bool canonical_less(const NewsItem& a, const NewsItem& b) {
  return std::tie(a.published_at, a.title, a.summary, a.source) < std::tie(b.published_at, b.title, b.summary, b.source);
}

}  // namespace

NewsStore::NewsStore(std::vector<NewsItem> items) {
  for (auto& item : items) by_ticker_[item.ticker].push_back(std::move(item));
  for (auto& [ticker, list] : by_ticker_) {
    std::sort(list.begin(), list.end(), canonical_less);
    // Duplicate key is (ticker, published_at, title); the first record in
    // canonical order wins so the result does not depend on file order.
    auto last = std::unique(list.begin(), list.end(), [](const NewsItem& a, const NewsItem& b) {
      return a.published_at == b.published_at && a.title == b.title;
    });
    duplicates_ += static_cast<std::size_t>(list.end() - last);
    list.erase(last, list.end());
    size_ += list.size();
  }
}

const std::vector<NewsItem>& NewsStore::items(const std::string& ticker) const {
  static const std::vector<NewsItem> kEmpty;
  auto it = by_ticker_.find(ticker);
  return it == by_ticker_.end() ? kEmpty : it->second;
}

NewsWindow NewsStore::query_window(const std::string& ticker, Date t, int k, const TradingCalendar& calendar) const {
  if (k < 1) throw PreconditionError("news lookback must be at least 1 business day");
  NewsWindow w;
  w.ticker = ticker;
  w.as_of = Timestamp{t, kNewsCutoffHour, kNewsCutoffMinute};
  w.lookback_days = k;
  const Timestamp lower{calendar.offset(t, -k), kNewsCutoffHour, kNewsCutoffMinute};

  const auto& list = items(ticker);
  auto first = std::upper_bound(list.begin(), list.end(), lower,
                                [](const Timestamp& ts, const NewsItem& item) { return ts < item.published_at; });
  auto last = std::upper_bound(first, list.end(), w.as_of,
                               [](const Timestamp& ts, const NewsItem& item) { return ts < item.published_at; });
  w.items.assign(first, last);
  std::stable_sort(w.items.begin(), w.items.end(), [](const NewsItem& a, const NewsItem& b) {
    if (a.published_at != b.published_at) return b.published_at < a.published_at;
    return a.title < b.title;
  });
  return w;
}

NewsStore load_news(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(file, 0, "cannot open file");
  std::vector<NewsItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(file, lineno, std::string("malformed JSON: ") + e.what());
    }
    auto field = [&](const char* key, bool required) -> std::string {
      if (!j.is_object() || !j.contains(key)) {
        if (required) throw DataError(file, lineno, std::string("missing key '") + key + "'");
        return {};
      }
      if (!j[key].is_string()) throw DataError(file, lineno, std::string("key '") + key + "' must be a string");
      return j[key].get<std::string>();
    };
    NewsItem item;
    item.ticker = field("ticker", true);
    if (item.ticker.empty()) throw DataError(file, lineno, "empty ticker");
    const std::string ts = field("published_at", true);
    try {
      item.published_at = Timestamp::parse(ts);
    } catch (const std::invalid_argument& e) {
      throw DataError(file, lineno, std::string("unparseable published_at: ") + e.what());
    }
    item.title = field("title", true);
    if (item.title.empty()) throw DataError(file, lineno, "empty title");
    item.summary = field("summary", false);
    item.source = field("source", false);
    items.push_back(std::move(item));
  }
  NewsStore store(std::move(items));
  if (store.duplicates_dropped() > 0) {
    spdlog::warn("{}: dropped {} duplicate news record(s)", file, store.duplicates_dropped());
  }
  return store;
}

void save_news(const NewsStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  for (const auto& [ticker, list] : store.by_ticker()) {
    for (const auto& item : list) {
      nlohmann::ordered_json j;
      j["ticker"] = item.ticker;
      j["published_at"] = item.published_at.str();
      j["title"] = item.title;
      j["summary"] = item.summary;
      j["source"] = item.source;
      out << j.dump() << '\n';
    }
  }
}

}  // namespace llmmom
