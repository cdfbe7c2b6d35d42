#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "llmmom/error.hpp"
#include "llmmom/news_store.hpp"

namespace llmmom {

NewsFieldMapping NewsFieldMapping::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open mapping file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string(), 0, std::string("malformed mapping JSON: ") + e.what());
  }
  NewsFieldMapping m;
  auto get = [&](const char* key, std::string& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::string>();
  };
  get("ticker", m.ticker);
  get("published_at", m.published_at);
  get("title", m.title);
  get("summary", m.summary);
  get("source", m.source);
  get("time_format", m.time_format);
  if (j.contains("explode_ticker_arrays")) m.explode_ticker_arrays = j.at("explode_ticker_arrays").get<bool>();
  return m;
}

namespace {

const nlohmann::json* lookup(const nlohmann::json& record, const std::string& path) {
  if (path.empty()) return nullptr;
  if (path.front() == '/') {
    const nlohmann::json::json_pointer ptr(path);
    return record.contains(ptr) ? &record.at(ptr) : nullptr;
  }
  auto it = record.find(path);
  return it == record.end() ? nullptr : &*it;
}

Timestamp parse_with_format(const std::string& text, const std::string& format) {
  std::tm tm{};
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) throw std::invalid_argument("'" + text + "' does not match format '" + format + "'");
  const Date d(tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1), static_cast<unsigned>(tm.tm_mday));
  if (!d.ymd().ok()) throw std::invalid_argument("invalid date in '" + text + "'");
  return Timestamp{d, tm.tm_hour, tm.tm_min};
}

}  // namespace

std::vector<NewsItem> adapt_news(const std::filesystem::path& vendor_path, const NewsFieldMapping& mapping) {
  const std::string file = vendor_path.string();
  std::ifstream in(vendor_path);
  if (!in) throw DataError(file, 0, "cannot open file");
  std::vector<NewsItem> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(file, lineno, std::string("malformed JSON: ") + e.what());
    }
    auto text = [&](const std::string& path, bool required) -> std::string {
      const auto* v = lookup(rec, path);
      if (v == nullptr || v->is_null()) {
        if (required) throw DataError(file, lineno, "missing field '" + path + "'");
        return {};
      }
      if (!v->is_string()) throw DataError(file, lineno, "field '" + path + "' must be a string");
      return v->get<std::string>();
    };

    NewsItem base;
    try {
      base.published_at = parse_with_format(text(mapping.published_at, true), mapping.time_format);
    } catch (const std::invalid_argument& e) {
      throw DataError(file, lineno, std::string("unparseable timestamp: ") + e.what());
    }
    base.title = text(mapping.title, true);
    if (base.title.empty()) throw DataError(file, lineno, "empty title");
    base.summary = text(mapping.summary, false);
    base.source = text(mapping.source, false);

    const auto* tick = lookup(rec, mapping.ticker);
    if (tick == nullptr) throw DataError(file, lineno, "missing field '" + mapping.ticker + "'");
    std::vector<std::string> tickers;
    if (tick->is_array() && mapping.explode_ticker_arrays) {
      for (const auto& t : *tick) {
        if (!t.is_string()) throw DataError(file, lineno, "ticker array must hold strings");
        tickers.push_back(t.get<std::string>());
      }
    } else if (tick->is_string()) {
      tickers.push_back(tick->get<std::string>());
    } else {
      throw DataError(file, lineno, "ticker field must be a string or array of strings");
    }
    for (auto& t : tickers) {
      if (t.empty()) throw DataError(file, lineno, "empty ticker");
      NewsItem item = base;
      item.ticker = std::move(t);
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace llmmom
