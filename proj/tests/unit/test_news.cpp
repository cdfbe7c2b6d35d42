#include <catch_amalgamated.hpp>

#include "llmmom/error.hpp"
#include "llmmom/news_store.hpp"
#include "support.hpp"

using namespace llmmom;
using testing::TempDir;

namespace {

NewsItem item(const std::string& ticker, const std::string& ts, const std::string& title) {
  return NewsItem{ticker, Timestamp::parse(ts), title, "summary of " + title, "wire"};
}

std::vector<std::string> titles(const NewsWindow& w) {
  std::vector<std::string> out;
  for (const auto& i : w.items) out.push_back(i.title);
  return out;
}

}  // namespace

TEST_CASE("news windows run from 15:45 k business days back to 15:45 on t") {
  // Wed 2024-01-03, k = 1: (Tue 15:45, Wed 15:45].
  const TradingCalendar cal(testing::weekdays(Date(2024, 1, 1), 20));
  const NewsStore store({item("AAPL", "2024-01-02 15:45", "at lower bound"),
                         item("AAPL", "2024-01-02 15:46", "just inside"),
                         item("AAPL", "2024-01-03 15:45", "at upper bound"),
                         item("AAPL", "2024-01-03 15:46", "after cutoff"),
                         item("MSFT", "2024-01-03 10:00", "other ticker")});
  const auto w = store.query_window("AAPL", Date(2024, 1, 3), 1, cal);
  CHECK(w.as_of == Timestamp::parse("2024-01-03 15:45"));
  CHECK(titles(w) == std::vector<std::string>{"at upper bound", "just inside"});
}

TEST_CASE("weekend news falls into the next business day's window") {
  const TradingCalendar cal(testing::weekdays(Date(2024, 1, 1), 20));
  const NewsStore store({item("AAPL", "2024-01-06 12:00", "saturday"), item("AAPL", "2024-01-05 15:50", "friday late")});
  // Monday 2024-01-08, k = 1: (Fri 15:45, Mon 15:45].
  CHECK(titles(store.query_window("AAPL", Date(2024, 1, 8), 1, cal)) ==
        std::vector<std::string>{"saturday", "friday late"});
  CHECK(store.query_window("AAPL", Date(2024, 1, 5), 1, cal).items.empty());
}

TEST_CASE("k = 5 spans five business days and ties sort by title") {
  const TradingCalendar cal(testing::weekdays(Date(2024, 1, 1), 20));
  const NewsStore store({item("AAPL", "2023-12-27 15:45", "too old"), item("AAPL", "2023-12-28 09:00", "b"),
                         item("AAPL", "2023-12-28 09:00", "a"), item("AAPL", "2024-01-03 08:00", "newest")});
  // Business days before Wed 2024-01-03 walk back through the weekday
  // extrapolation: 01-02, 01-01, 12-29, 12-28, 12-27.
  const auto w = store.query_window("AAPL", Date(2024, 1, 3), 5, cal);
  CHECK(titles(w) == std::vector<std::string>{"newest", "a", "b"});
}

TEST_CASE("empty windows and unknown tickers are valid") {
  const TradingCalendar cal(testing::weekdays(Date(2024, 1, 1), 20));
  const NewsStore store;
  CHECK(store.query_window("ZZZ", Date(2024, 1, 3), 1, cal).items.empty());
  CHECK_THROWS_AS(store.query_window("ZZZ", Date(2024, 1, 3), 0, cal), PreconditionError);
}

TEST_CASE("duplicates on (ticker, published_at, title) are dropped deterministically") {
  const NewsStore a({item("AAPL", "2024-01-02 10:00", "x"), item("AAPL", "2024-01-02 10:00", "x"),
                     item("MSFT", "2024-01-02 10:00", "x")});
  CHECK(a.size() == 2);
  CHECK(a.duplicates_dropped() == 1);
}

TEST_CASE("load_news reports line numbers") {
  TempDir dir;
  testing::write_file(dir / "n.jsonl",
                      "{\"ticker\":\"AAPL\",\"published_at\":\"2024-01-02 10:00\",\"title\":\"t\"}\n"
                      "\n"
                      "{\"ticker\":\"AAPL\",\"published_at\":\"2024-01-02T10:00\",\"title\":\"t\"}\n");
  try {
    load_news(dir / "n.jsonl");
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
  }
  testing::write_file(dir / "m.jsonl", "{\"ticker\":\"AAPL\",\"title\":\"t\"}\n");
  CHECK_THROWS_WITH(load_news(dir / "m.jsonl"), Catch::Matchers::ContainsSubstring("published_at"));
}

TEST_CASE("save_news then load_news is the identity on the canonical store") {
  TempDir dir;
  const NewsStore store({item("MSFT", "2024-01-02 10:00", "m"), item("AAPL", "2024-01-03 10:00", "z"),
                         item("AAPL", "2024-01-02 10:00", "a, with comma")});
  save_news(store, dir / "n.jsonl");
  const NewsStore back = load_news(dir / "n.jsonl");
  save_news(back, dir / "n2.jsonl");
  CHECK(testing::read_file(dir / "n.jsonl") == testing::read_file(dir / "n2.jsonl"));
  CHECK(back.size() == 3);
}

TEST_CASE("vendor adapter output matches the committed canonical file") {
  const std::filesystem::path fx = LLMMOM_FIXTURE_DIR "/news";
  const auto mapping = NewsFieldMapping::from_json_file(fx / "mapping.json");
  const NewsStore store(adapt_news(fx / "vendor.jsonl", mapping));
  TempDir dir;
  save_news(store, dir / "out.jsonl");
  CHECK(testing::read_file(dir / "out.jsonl") == testing::read_file(fx / "canonical.golden.jsonl"));
  CHECK(store.duplicates_dropped() == 1);
}

TEST_CASE("vendor adapter rejects records it cannot map") {
  TempDir dir;
  testing::write_file(dir / "v.jsonl", "{\"symbols\":[\"A\"],\"meta\":{\"time\":\"2024/01/02\"},\"headline\":\"h\"}\n");
  NewsFieldMapping m;
  m.ticker = "symbols";
  m.published_at = "/meta/time";
  m.title = "headline";
  try {
    adapt_news(dir / "v.jsonl", m);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 1);
  }
}
