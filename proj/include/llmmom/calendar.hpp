#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmmom {

/// A calendar date (no time of day), backed by std::chrono::sys_days.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}) {}

  /// Parses "YYYY-MM-DD". Throws std::invalid_argument on malformed or
  /// impossible dates.
  static Date parse(std::string_view text);

  std::string iso() const;

  constexpr std::chrono::sys_days days() const { return days_; }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
  int year() const { return static_cast<int>(ymd().year()); }
  unsigned month() const { return static_cast<unsigned>(ymd().month()); }
  /// ISO weekday, Monday = 1 .. Sunday = 7.
  unsigned iso_weekday() const { return std::chrono::weekday{days_}.iso_encoding(); }
  bool is_weekend() const { return iso_weekday() >= 6; }

  Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Exchange-local, timezone-naive timestamp with minute precision.
class Timestamp {
 public:
  using Minutes = std::chrono::sys_time<std::chrono::minutes>;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(Minutes t) : t_(t) {}
  Timestamp(Date date, int hour, int minute)
      : t_(date.days() + std::chrono::hours{hour} + std::chrono::minutes{minute}) {}

  /// Parses "YYYY-MM-DD HH:MM".
  static Timestamp parse(std::string_view text);

  /// "YYYY-MM-DD HH:MM".
  std::string str() const;
  Date date() const { return Date{std::chrono::floor<std::chrono::days>(t_)}; }
  constexpr Minutes time() const { return t_; }

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

 private:
  Minutes t_{};
};

/// Minutes elapsed from `from` to `to` (negative when `to` precedes `from`).
inline long long minutes_between(Timestamp from, Timestamp to) {
  return (to.time() - from.time()).count();
}


enum class Frequency { Weekly, Monthly };

/// The set of trading dates. Business-day arithmetic walks this list and falls
/// back to weekdays once it runs past either end.
class TradingCalendar {
 public:
  TradingCalendar() = default;
  /// `dates` must be strictly increasing.
  explicit TradingCalendar(std::vector<Date> dates);

  const std::vector<Date>& dates() const { return dates_; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  const Date& operator[](std::size_t i) const { return dates_[i]; }

  std::optional<std::size_t> index_of(Date d) const;
  bool contains(Date d) const { return index_of(d).has_value(); }

  /// The trading date `n` business days after (n > 0) or before (n < 0) `d`.
  /// `d` itself need not be a trading date when n != 0.
  Date offset(Date d, int n) const;

  /// Last trading date of its calendar month / ISO week. The final calendar
  /// date is never a period end because its successor is unknown.
  bool is_period_end(std::size_t index, Frequency f) const;

  /// Period-end dates within [from, to].
  std::vector<Date> period_ends(Frequency f, Date from, Date to) const;

 private:
  std::vector<Date> dates_;
};

}  // namespace llmmom
