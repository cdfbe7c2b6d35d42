#include "llmmom/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "llmmom/error.hpp"

namespace llmmom::svg {

namespace {

constexpr double kWidth = 800, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 70;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0, hi = 1;
};

Range value_range(const std::vector<Series>& series, bool include_zero) {
  double lo = include_zero ? 0.0 : INFINITY, hi = include_zero ? 0.0 : -INFINITY;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {};
  if (hi == lo) {
    hi += 1.0;
    if (!include_zero) lo -= 1.0;
  }
  return {lo, hi};
}

std::string header(const std::string& title) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  return out;
}

std::string axes(Range r) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string out = "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) +
                    "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = r.lo + (r.hi - r.lo) * i / 4.0;
    const double y = y0 - (y0 - y1) * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.4g", v);
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  return out;
}

std::string legend(const std::vector<Series>& series) {
  std::string out;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double x = kLeft + 10 + 160.0 * static_cast<double>(s);
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(kHeight - 22) + "\" width=\"12\" height=\"12\" fill=\"" +
           kColors[s % 4] + "\"/>\n";
    out += "<text x=\"" + num(x + 16) + "\" y=\"" + num(kHeight - 12) + "\">" + escape(series[s].name) + "</text>\n";
  }
  return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::vector<std::string>& labels,
                       const std::vector<Series>& series) {
  const Range r = value_range(series, false);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string out = header(title) + axes(r);
  if (!labels.empty()) {
    out += "<text x=\"" + num(x0) + "\" y=\"" + num(y0 + 18) + "\">" + escape(labels.front()) + "</text>\n";
    out += "<text x=\"" + num(x1) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"end\">" + escape(labels.back()) +
           "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& v = series[s].values;
    if (v.empty()) continue;
    const double step = v.size() > 1 ? (x1 - x0) / static_cast<double>(v.size() - 1) : 0.0;
    std::string points;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) continue;
      const double y = y0 - (v[i] - r.lo) / (r.hi - r.lo) * (y0 - y1);
      if (!points.empty()) points += ' ';
      points += num(x0 + step * static_cast<double>(i)) + "," + num(y);
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[s % 4]) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
  }
  return out + legend(series) + "</svg>\n";
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<Series>& series) {
  const Range r = value_range(series, true);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string out = header(title) + axes(r);
  const std::size_t n = labels.size();
  if (n == 0 || series.empty()) return out + "</svg>\n";
  const double slot = (x1 - x0) / static_cast<double>(n);
  const double bar = slot * 0.8 / static_cast<double>(series.size());
  const double zero_y = y0 - (0.0 - r.lo) / (r.hi - r.lo) * (y0 - y1);
  // Thin out labels so at most ~20 are printed.
  const std::size_t every = std::max<std::size_t>(1, (n + 19) / 20);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = i < series[s].values.size() ? series[s].values[i] : 0.0;
      if (!std::isfinite(v)) continue;
      const double y = y0 - (v - r.lo) / (r.hi - r.lo) * (y0 - y1);
      const double x = x0 + slot * static_cast<double>(i) + slot * 0.1 + bar * static_cast<double>(s);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(std::min(y, zero_y)) + "\" width=\"" + num(bar) +
             "\" height=\"" + num(std::fabs(zero_y - y)) + "\" fill=\"" + kColors[s % 4] + "\"/>\n";
    }
    if (i % every == 0) {
      const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
      out += "<text x=\"" + num(cx) + "\" y=\"" + num(y0 + 14) + "\" text-anchor=\"middle\" font-size=\"10\">" +
             escape(labels[i]) + "</text>\n";
    }
  }
  if (series.size() > 1) out += legend(series);
  return out + "</svg>\n";
}

void write(const std::string& svg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path, 0, "cannot open for writing");
  out << svg;
}

}  // namespace llmmom::svg
