#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "llmmom/calendar.hpp"

namespace llmmom {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Point-in-time daily panel of total returns, market caps and index
/// membership. Cells are stored date-major; a missing return or cap is NaN.
class ReturnPanel {
 public:
  struct Cell {
    double ret = kMissing;
    double market_cap = kMissing;
    bool member = false;
  };

  ReturnPanel() = default;
  /// Validates the panel invariants and throws PreconditionError on violation.
  /// `tickers` must be strictly increasing; `cells` is dates.size() x tickers.size().
  ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, std::vector<Cell> cells,
              std::vector<double> risk_free);

  const TradingCalendar& calendar() const { return calendar_; }
  const std::vector<Date>& dates() const { return calendar_.dates(); }
  const std::vector<std::string>& tickers() const { return tickers_; }
  std::size_t num_dates() const { return calendar_.size(); }
  std::size_t num_tickers() const { return tickers_.size(); }

  const Cell& cell(std::size_t t, std::size_t i) const { return cells_[t * tickers_.size() + i]; }
  double ret(std::size_t t, std::size_t i) const { return cell(t, i).ret; }
  double market_cap(std::size_t t, std::size_t i) const { return cell(t, i).market_cap; }
  bool member(std::size_t t, std::size_t i) const { return cell(t, i).member; }
  double risk_free(std::size_t t) const { return risk_free_[t]; }
  const std::vector<double>& risk_free() const { return risk_free_; }

  std::optional<std::size_t> date_index(Date d) const { return calendar_.index_of(d); }
  std::optional<std::size_t> ticker_index(const std::string& ticker) const;

  friend bool operator==(const ReturnPanel& a, const ReturnPanel& b);

 private:
  TradingCalendar calendar_;
  std::vector<std::string> tickers_;
  std::vector<Cell> cells_;
  std::vector<double> risk_free_;
};

/// Loads `date,ticker,return,market_cap,member` and `date,rf_daily` CSVs.
/// Throws DataError with the offending row number.
ReturnPanel load_panel(const std::filesystem::path& returns_path, const std::filesystem::path& riskfree_path);

/// Writes the panel back in the same two formats. Values use shortest
/// round-trip formatting, so load_panel reproduces the panel bit for bit.
void save_panel(const ReturnPanel& panel, const std::filesystem::path& returns_path,
                const std::filesystem::path& riskfree_path);

inline constexpr int kSignalLookback = 252;  // ~12 months of trading days
inline constexpr int kSignalSkip = 21;       // ~1 month, excluded
inline constexpr int kSignalWindow = kSignalLookback - kSignalSkip;

struct MomentumEntry {
  std::size_t ticker_index = 0;
  std::string ticker;
  double value = 0.0;  // compounded return over the signal window
  int rank = 0;        // 1 = highest value
  int decile = 0;      // 1..10
};

struct MomentumSignal {
  Date formation_date;
  std::vector<MomentumEntry> entries;  // ordered by rank

  const MomentumEntry* find(const std::string& ticker) const;
};

/// Decile of rank `rank` among `n` names; decile j ends at ceil(j*n/10).
int decile_of(int rank, int n);

/// 12-1 momentum on `formation_date`: compounded return over trading days
/// [t-252, t-21). Eligible names are members on t with at least 90% of the
/// window's returns present; missing returns compound as 0.
MomentumSignal momentum_signal(const ReturnPanel& panel, Date formation_date);

/// Names in deciles 1 and 2, best rank first. Needs at least 10 names.
std::vector<MomentumEntry> extended_momentum_set(const MomentumSignal& signal);

}  // namespace llmmom
