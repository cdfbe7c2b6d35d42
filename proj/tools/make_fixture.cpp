// Writes a reproducible synthetic returns panel, risk-free series and news
// file for demos and end-to-end tests.
#include <iostream>

#include <CLI11.hpp>

#include "llmmom/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic market fixture generator", "llmmom_fixture"};
  llmmom::SyntheticSpec spec;
  std::string out_dir = "fixture";
  std::string start = spec.start.iso(), end = spec.end.iso();
  app.add_option("--output", out_dir, "Directory for returns.csv, risk_free.csv and news.jsonl")
      ->capture_default_str();
  app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  app.add_option("--tickers", spec.tickers, "Number of tickers")->capture_default_str();
  app.add_option("--start", start, "First calendar date")->capture_default_str();
  app.add_option("--end", end, "Last calendar date")->capture_default_str();
  app.add_option("--news-per-day", spec.news_per_day, "Expected news items per ticker per weekday")
      ->capture_default_str();
  app.add_option("--missing-rate", spec.missing_rate, "Share of missing returns")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    spec.start = llmmom::Date::parse(start);
    spec.end = llmmom::Date::parse(end);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto panel = llmmom::synthetic_panel(spec);
    llmmom::save_panel(panel, dir / "returns.csv", dir / "risk_free.csv");
    const llmmom::NewsStore news(llmmom::synthetic_news(spec, panel));
    llmmom::save_news(news, dir / "news.jsonl");
    std::cout << panel.num_dates() << " dates, " << panel.num_tickers() << " tickers, " << news.size()
              << " news items -> " << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
