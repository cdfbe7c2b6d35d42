#include "llmmom/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"
#include "llmmom/svg.hpp"

namespace llmmom {

std::vector<std::pair<int, std::size_t>> news_per_year(const NewsStore& news, const ReturnPanel& panel) {
  std::map<int, std::size_t> counts;
  if (panel.num_dates() > 0) {
    for (int y = panel.dates().front().year(); y <= panel.dates().back().year(); ++y) counts[y] = 0;
  }
  for (const auto& [ticker, items] : news.by_ticker()) {
    for (const auto& item : items) ++counts[item.published_at.date().year()];
  }
  return {counts.begin(), counts.end()};
}

std::vector<HistogramBin> news_per_firm_year(const NewsStore& news, const ReturnPanel& panel) {
  std::vector<HistogramBin> bins;
  if (panel.num_dates() == 0) return bins;
  const int y0 = panel.dates().front().year();
  const int y1 = panel.dates().back().year();
  std::vector<std::size_t> firm_year;
  for (const auto& ticker : panel.tickers()) {
    std::map<int, std::size_t> per_year;
    for (int y = y0; y <= y1; ++y) per_year[y] = 0;
    for (const auto& item : news.items(ticker)) {
      const int y = item.published_at.date().year();
      if (y >= y0 && y <= y1) ++per_year[y];
    }
    for (const auto& [y, c] : per_year) firm_year.push_back(c);
  }
  const std::size_t top = firm_year.empty() ? 0 : *std::max_element(firm_year.begin(), firm_year.end());
  bins.push_back({"0", 0, 1, 0});
  for (std::size_t lo = 1; lo <= std::max<std::size_t>(top, 1); lo *= 2) {
    const std::size_t hi = lo * 2;
    const std::string label = lo == 1 ? "1" : std::to_string(lo) + "-" + std::to_string(hi - 1);
    bins.push_back({label, static_cast<double>(lo), static_cast<double>(hi), 0});
  }
  for (std::size_t c : firm_year) {
    for (auto& b : bins) {
      if (static_cast<double>(c) >= b.lo && static_cast<double>(c) < b.hi) {
        ++b.count;
        break;
      }
    }
  }
  return bins;
}

namespace {

std::vector<HistogramBin> equal_bins(double lo, double hi, int n) {
  if (n <= 0 || !(hi > lo)) throw PreconditionError("histogram needs a positive bin count and hi > lo");
  std::vector<HistogramBin> bins(static_cast<std::size_t>(n));
  const double width = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    bins[i].lo = lo + width * i;
    bins[i].hi = i + 1 == n ? hi : lo + width * (i + 1);
    bins[i].label = csv::fmt(bins[i].lo);
  }
  return bins;
}

std::size_t bin_index(double v, double lo, double hi, std::size_t n) {
  if (v <= lo) return 0;
  if (v >= hi) return n - 1;
  const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace

std::vector<HistogramBin> return_histogram(const ReturnPanel& panel, double lo, double hi, int bins,
                                           std::optional<Date> from, std::optional<Date> to) {
  auto out = equal_bins(lo, hi, bins);
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    if ((from && panel.dates()[t] < *from) || (to && *to < panel.dates()[t])) continue;
    for (std::size_t i = 0; i < panel.num_tickers(); ++i) {
      if (!panel.member(t, i) || is_missing(panel.ret(t, i))) continue;
      ++out[bin_index(panel.ret(t, i), lo, hi, out.size())].count;
    }
  }
  return out;
}

std::vector<HistogramBin> score_histogram(const std::vector<RawScore>& scores, int bins) {
  auto out = equal_bins(0.0, 1.0, bins);
  for (const auto& s : scores) {
    if (s.is_missing()) continue;
    // Integer units keep bin edges exact: units * bins / 10000.
    const auto i = static_cast<std::size_t>(s.units()) * out.size() / RawScore::kScale;
    ++out[std::min(i, out.size() - 1)].count;
  }
  return out;
}

void write_histogram(const std::vector<HistogramBin>& bins, const std::string& title,
                     const std::filesystem::path& stem) {
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw DataError(csv_path.string(), 0, "cannot open for writing");
  out << "label,lo,hi,count\n";
  std::vector<std::string> labels;
  svg::Series counts{"count", {}};
  for (const auto& b : bins) {
    out << csv::quote(b.label) << ',' << csv::fmt(b.lo) << ',' << csv::fmt(b.hi) << ',' << b.count << '\n';
    labels.push_back(b.label);
    counts.values.push_back(static_cast<double>(b.count));
  }
  auto svg_path = stem;
  svg_path += ".svg";
  svg::write(svg::bar_chart(title, labels, {counts}), svg_path.string());
}

void write_year_counts(const std::vector<std::pair<int, std::size_t>>& counts, const std::filesystem::path& stem) {
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw DataError(csv_path.string(), 0, "cannot open for writing");
  out << "year,count\n";
  std::vector<std::string> labels;
  svg::Series series{"news items", {}};
  for (const auto& [year, count] : counts) {
    out << year << ',' << count << '\n';
    labels.push_back(std::to_string(year));
    series.values.push_back(static_cast<double>(count));
  }
  auto svg_path = stem;
  svg_path += ".svg";
  svg::write(svg::bar_chart("News items per year", labels, {series}), svg_path.string());
}

}  // namespace llmmom
