#include "llmmom/market_data.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <tuple>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"

namespace llmmom {

ReturnPanel::ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, std::vector<Cell> cells,
                         std::vector<double> risk_free)
    : calendar_(std::move(dates)),
      tickers_(std::move(tickers)),
      cells_(std::move(cells)),
      risk_free_(std::move(risk_free)) {
  for (std::size_t i = 1; i < tickers_.size(); ++i) {
    if (!(tickers_[i - 1] < tickers_[i])) throw PreconditionError("panel tickers must be sorted and unique");
  }
  if (cells_.size() != calendar_.size() * tickers_.size()) throw PreconditionError("panel cell count mismatch");
  if (risk_free_.size() != calendar_.size()) throw PreconditionError("risk-free series must cover every date");
  for (std::size_t t = 0; t < calendar_.size(); ++t) {
    if (!std::isfinite(risk_free_[t])) {
      throw PreconditionError("risk-free rate missing on " + calendar_[t].iso());
    }
    for (std::size_t i = 0; i < tickers_.size(); ++i) {
      const Cell& c = cell(t, i);
      if (std::isinf(c.ret)) throw PreconditionError("non-finite return for " + tickers_[i]);
      if (c.member && !(c.market_cap > 0.0)) {
        throw PreconditionError("member " + tickers_[i] + " lacks a positive market cap on " + calendar_[t].iso());
      }
    }
  }
}

std::optional<std::size_t> ReturnPanel::ticker_index(const std::string& ticker) const {
  auto it = std::lower_bound(tickers_.begin(), tickers_.end(), ticker);
  if (it == tickers_.end() || *it != ticker) return std::nullopt;
  return static_cast<std::size_t>(it - tickers_.begin());
}

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

bool operator==(const ReturnPanel& a, const ReturnPanel& b) {
  if (a.dates() != b.dates() || a.tickers_ != b.tickers_ || a.cells_.size() != b.cells_.size()) return false;
  for (std::size_t k = 0; k < a.cells_.size(); ++k) {
    const auto& x = a.cells_[k];
    const auto& y = b.cells_[k];
    if (x.member != y.member || !same_bits(x.ret, y.ret) || !same_bits(x.market_cap, y.market_cap)) return false;
  }
  for (std::size_t t = 0; t < a.risk_free_.size(); ++t) {
    if (!same_bits(a.risk_free_[t], b.risk_free_[t])) return false;
  }
  return true;
}

namespace {

struct Row {
  Date date;
  std::string ticker;
  ReturnPanel::Cell cell;
};

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  return in;
}

double parse_field(const std::string& file, std::size_t line, std::string_view text, const char* what) {
  try {
    return csv::parse_double(text);
  } catch (const std::invalid_argument&) {
    throw DataError(file, line, std::string("malformed ") + what + " '" + std::string(text) + "'");
  }
}

Date parse_date_field(const std::string& file, std::size_t line, std::string_view text) {
  try {
    return Date::parse(text);
  } catch (const std::invalid_argument& e) {
    throw DataError(file, line, e.what());
  }
}

}  // namespace

ReturnPanel load_panel(const std::filesystem::path& returns_path, const std::filesystem::path& riskfree_path) {
  const std::string rfile = returns_path.string();
  auto in = open_or_throw(returns_path);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw DataError(rfile, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,ticker,return,market_cap,member") {
    throw DataError(rfile, 1, "expected header 'date,ticker,return,market_cap,member'");
  }

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 5) throw DataError(rfile, lineno, "expected 5 fields, got " + std::to_string(f.size()));
    Row row;
    row.date = parse_date_field(rfile, lineno, f[0]);
    if (f[1].empty()) throw DataError(rfile, lineno, "empty ticker");
    row.ticker = std::string(f[1]);
    if (!f[2].empty()) {
      row.cell.ret = parse_field(rfile, lineno, f[2], "return");
      if (!std::isfinite(row.cell.ret)) throw DataError(rfile, lineno, "non-finite return");
    }
    if (!f[3].empty()) row.cell.market_cap = parse_field(rfile, lineno, f[3], "market_cap");
    if (f[4] == "1") {
      row.cell.member = true;
    } else if (f[4] != "0") {
      throw DataError(rfile, lineno, "member must be 0 or 1");
    }
    if (row.cell.member && !(row.cell.market_cap > 0.0)) {
      throw DataError(rfile, lineno, "member row requires a positive market_cap");
    }
    if (!rows.empty()) {
      const auto prev = std::tie(rows.back().date, rows.back().ticker);
      const auto cur = std::tie(row.date, row.ticker);
      if (cur == prev) {
        throw DataError(rfile, lineno, "duplicate (date, ticker) row " + row.date.iso() + "," + row.ticker);
      }
      if (cur < prev) throw DataError(rfile, lineno, "rows not sorted by date then ticker");
    }
    rows.push_back(std::move(row));
  }

  std::vector<Date> dates;
  std::vector<std::string> tickers;
  for (const auto& r : rows) {
    if (dates.empty() || dates.back() != r.date) dates.push_back(r.date);
    tickers.push_back(r.ticker);
  }
  std::sort(tickers.begin(), tickers.end());
  tickers.erase(std::unique(tickers.begin(), tickers.end()), tickers.end());

  std::vector<ReturnPanel::Cell> cells(dates.size() * tickers.size());
  std::size_t t = 0;
  for (const auto& r : rows) {
    while (dates[t] != r.date) ++t;
    const auto i = static_cast<std::size_t>(std::lower_bound(tickers.begin(), tickers.end(), r.ticker) - tickers.begin());
    cells[t * tickers.size() + i] = r.cell;
  }

  // Risk-free series: must cover every panel date; extra dates are ignored.
  const std::string ffile = riskfree_path.string();
  auto rf_in = open_or_throw(riskfree_path);
  lineno = 1;
  if (!std::getline(rf_in, line)) throw DataError(ffile, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,rf_daily") throw DataError(ffile, 1, "expected header 'date,rf_daily'");
  std::map<Date, double> rf;
  std::optional<Date> last;
  while (std::getline(rf_in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw DataError(ffile, lineno, "expected 2 fields, got " + std::to_string(f.size()));
    const Date d = parse_date_field(ffile, lineno, f[0]);
    if (last && d == *last) throw DataError(ffile, lineno, "duplicate date " + d.iso());
    if (last && d < *last) throw DataError(ffile, lineno, "rows not sorted by date");
    const double v = parse_field(ffile, lineno, f[1], "rf_daily");
    if (!std::isfinite(v)) throw DataError(ffile, lineno, "non-finite rf_daily");
    rf.emplace(d, v);
    last = d;
  }
  std::vector<double> risk_free;
  risk_free.reserve(dates.size());
  for (const auto& d : dates) {
    auto it = rf.find(d);
    if (it == rf.end()) throw DataError(ffile, 0, "risk-free gap: no rate for trading date " + d.iso());
    risk_free.push_back(it->second);
  }

  return ReturnPanel(std::move(dates), std::move(tickers), std::move(cells), std::move(risk_free));
}

void save_panel(const ReturnPanel& panel, const std::filesystem::path& returns_path,
                const std::filesystem::path& riskfree_path) {
  std::ofstream out(returns_path, std::ios::binary);
  if (!out) throw DataError(returns_path.string(), 0, "cannot open for writing");
  out << "date,ticker,return,market_cap,member\n";
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    const std::string date = panel.dates()[t].iso();
    for (std::size_t i = 0; i < panel.num_tickers(); ++i) {
      const auto& c = panel.cell(t, i);
      if (is_missing(c.ret) && is_missing(c.market_cap) && !c.member) continue;
      out << date << ',' << panel.tickers()[i] << ',' << (is_missing(c.ret) ? "" : csv::fmt(c.ret)) << ','
          << (is_missing(c.market_cap) ? "" : csv::fmt(c.market_cap)) << ',' << (c.member ? '1' : '0') << '\n';
    }
  }
  std::ofstream rf(riskfree_path, std::ios::binary);
  if (!rf) throw DataError(riskfree_path.string(), 0, "cannot open for writing");
  rf << "date,rf_daily\n";
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    rf << panel.dates()[t].iso() << ',' << csv::fmt(panel.risk_free(t)) << '\n';
  }
}

const MomentumEntry* MomentumSignal::find(const std::string& ticker) const {
  for (const auto& e : entries) {
    if (e.ticker == ticker) return &e;
  }
  return nullptr;
}

int decile_of(int rank, int n) {
  for (int j = 1; j <= 10; ++j) {
    // ceil(j*n/10) in integers
    if (rank <= (j * n + 9) / 10) return j;
  }
  return 10;
}

MomentumSignal momentum_signal(const ReturnPanel& panel, Date formation_date) {
  const auto f = panel.date_index(formation_date);
  if (!f) throw PreconditionError("formation date " + formation_date.iso() + " is not a trading date");
  if (*f < static_cast<std::size_t>(kSignalLookback)) {
    throw PreconditionError("insufficient history for momentum on " + formation_date.iso() + ": need " +
                            std::to_string(kSignalLookback) + " trading days, have " + std::to_string(*f));
  }
  const std::size_t begin = *f - kSignalLookback;
  const std::size_t end = *f - kSignalSkip;

  MomentumSignal sig;
  sig.formation_date = formation_date;
  for (std::size_t i = 0; i < panel.num_tickers(); ++i) {
    if (!panel.member(*f, i)) continue;
    int present = 0;
    double growth = 1.0;
    for (std::size_t t = begin; t < end; ++t) {
      const double r = panel.ret(t, i);
      if (is_missing(r)) continue;
      ++present;
      growth *= 1.0 + r;
    }
    if (present * 10 < kSignalWindow * 9) continue;
    sig.entries.push_back({i, panel.tickers()[i], growth - 1.0, 0, 0});
  }
  if (sig.entries.empty()) throw PreconditionError("no eligible tickers on " + formation_date.iso());

  // Tickers are already in lexicographic order, so a stable sort on value
  // leaves ties ordered by ticker.
  std::stable_sort(sig.entries.begin(), sig.entries.end(),
                   [](const MomentumEntry& a, const MomentumEntry& b) { return a.value > b.value; });
  const int n = static_cast<int>(sig.entries.size());
  for (int r = 0; r < n; ++r) {
    sig.entries[r].rank = r + 1;
    sig.entries[r].decile = decile_of(r + 1, n);
  }
  return sig;
}

std::vector<MomentumEntry> extended_momentum_set(const MomentumSignal& signal) {
  if (signal.entries.size() < 10) {
    throw PreconditionError("extended momentum set needs at least 10 eligible tickers, have " +
                            std::to_string(signal.entries.size()));
  }
  std::vector<MomentumEntry> out;
  for (const auto& e : signal.entries) {
    if (e.decile > 2) break;
    out.push_back(e);
  }
  return out;
}

}  // namespace llmmom
