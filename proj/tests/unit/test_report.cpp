#include <catch_amalgamated.hpp>

#include <numeric>

#include "llmmom/report.hpp"
#include "support.hpp"

using namespace llmmom;

namespace {

NewsItem item(const std::string& ticker, const char* when) { return {ticker, Timestamp::parse(when), "t", "", "src"}; }

ReturnPanel two_year_panel() {
  const std::vector<Date> dates = {Date(2023, 12, 28), Date(2023, 12, 29), Date(2024, 1, 2), Date(2024, 1, 3)};
  const double nan = kMissing;
  return testing::make_panel(dates, {"A", "B"}, {{0.01, 0.5}, {-0.02, nan}, {0.0, 0.099}, {-0.5, 0.0}});
}

std::size_t total(const std::vector<HistogramBin>& bins) {
  return std::accumulate(bins.begin(), bins.end(), std::size_t{0},
                         [](std::size_t s, const HistogramBin& b) { return s + b.count; });
}

}  // namespace

TEST_CASE("news counts per year include empty years") {
  const auto panel = two_year_panel();
  CHECK(news_per_year(NewsStore{}, panel) == std::vector<std::pair<int, std::size_t>>{{2023, 0}, {2024, 0}});
  const NewsStore news({item("A", "2024-01-02 09:00"), item("A", "2024-01-02 10:00"), item("B", "2023-05-01 12:00")});
  CHECK(news_per_year(news, panel) == std::vector<std::pair<int, std::size_t>>{{2023, 1}, {2024, 2}});
}

TEST_CASE("news per firm-year bins") {
  const auto panel = two_year_panel();
  const NewsStore news({item("A", "2024-01-02 09:00"), item("A", "2024-01-02 10:00"), item("A", "2024-01-02 11:00"),
                        item("B", "2023-05-01 12:00")});
  const auto bins = news_per_firm_year(news, panel);
  REQUIRE(bins.size() >= 3);
  CHECK(bins[0].label == "0");
  CHECK(bins[0].count == 2);  // A-2023, B-2024
  CHECK(bins[1].label == "1");
  CHECK(bins[1].count == 1);
  CHECK(bins[2].label == "2-3");
  CHECK(bins[2].count == 1);
  CHECK(total(bins) == 4);  // 2 tickers x 2 years
}

TEST_CASE("return histogram counts every present member return once") {
  const auto panel = two_year_panel();
  const auto bins = return_histogram(panel, -0.1, 0.1, 20);
  REQUIRE(bins.size() == 20);
  CHECK(total(bins) == 7);
  CHECK(bins.front().count == 1);  // -0.5 clamped
  CHECK(bins.back().count == 2);   // 0.5 clamped, 0.099
  CHECK(total(return_histogram(panel, -0.1, 0.1, 20, Date(2024, 1, 1))) == 4);
}

TEST_CASE("score histogram conserves present scores") {
  std::vector<RawScore> s;
  for (int u = 0; u <= 10000; u += 7) s.push_back(RawScore::from_units(u));
  s.push_back(RawScore::missing());
  const auto bins = score_histogram(s, 20);
  REQUIRE(bins.size() == 20);
  CHECK(total(bins) == s.size() - 1);
  CHECK(bins.front().lo == 0.0);
  CHECK(bins.back().hi == 1.0);
  const auto edge = score_histogram({RawScore::from_units(10000), RawScore::from_units(500)}, 20);
  CHECK(edge.back().count == 1);
  CHECK(edge[1].count == 1);  // 0.05 opens the second bin
}

TEST_CASE("histogram files") {
  testing::TempDir dir;
  write_histogram(score_histogram({RawScore::from_units(1234)}, 4), "scores", dir / "h");
  const auto csv = testing::read_file(dir / "h.csv");
  CHECK(csv.rfind("label,lo,hi,count\n", 0) == 0);
  CHECK(testing::read_file(dir / "h.svg").find("<svg") != std::string::npos);
}
