#include "llmmom/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "llmmom/error.hpp"

namespace llmmom {

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  auto first = text.data() + pos;
  auto last = first + len;
  for (auto p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') {
      throw std::invalid_argument("malformed date/time '" + std::string(whole) + "'");
    }
  }
  std::from_chars(first, last, value);
  return value;
}

}  // namespace

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const int y = parse_fixed(text, 0, 4, text);
  const int m = parse_fixed(text, 5, 2, text);
  const int d = parse_fixed(text, 8, 2, text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
  }
  return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
  const auto d = ymd();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Timestamp Timestamp::parse(std::string_view text) {
  if (text.size() != 16 || text[10] != ' ' || text[13] != ':') {
    throw std::invalid_argument("malformed timestamp '" + std::string(text) +
                                "', expected YYYY-MM-DD HH:MM");
  }
  const Date date = Date::parse(text.substr(0, 10));
  const int hh = parse_fixed(text, 11, 2, text);
  const int mm = parse_fixed(text, 14, 2, text);
  if (hh > 23 || mm > 59) {
    throw std::invalid_argument("invalid time of day in '" + std::string(text) + "'");
  }
  return Timestamp{date, hh, mm};
}

std::string Timestamp::str() const {
  const auto day = std::chrono::floor<std::chrono::days>(t_);
  const auto tod = std::chrono::hh_mm_ss{t_ - day};
  char buf[8];
  std::snprintf(buf, sizeof buf, " %02d:%02d", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()));
  return Date{day}.iso() + buf;
}

namespace {

Date next_weekday(Date d, int step) {
  do {
    d = d.plus_days(step);
  } while (d.is_weekend());
  return d;
}

// Monday of the ISO week containing `d`.
Date week_start(Date d) { return d.plus_days(-static_cast<int>(d.iso_weekday() - 1)); }

}  // namespace

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw PreconditionError("trading calendar dates must be strictly increasing at " + dates_[i].iso());
    }
  }
}

std::optional<std::size_t> TradingCalendar::index_of(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - dates_.begin());
}

Date TradingCalendar::offset(Date d, int n) const {
  if (n == 0) return d;
  const int step = n > 0 ? 1 : -1;
  int remaining = n > 0 ? n : -n;
  // Position of the first calendar date strictly after / before d.
  auto it = step > 0 ? std::upper_bound(dates_.begin(), dates_.end(), d)
                     : std::lower_bound(dates_.begin(), dates_.end(), d);
  if (step > 0) {
    const auto avail = static_cast<int>(dates_.end() - it);
    if (remaining <= avail) return *(it + (remaining - 1));
    remaining -= avail;
    Date cur = avail > 0 ? dates_.back() : d;
    while (remaining-- > 0) cur = next_weekday(cur, 1);
    return cur;
  }
  const auto avail = static_cast<int>(it - dates_.begin());
  if (remaining <= avail) return *(it - remaining);
  remaining -= avail;
  Date cur = avail > 0 ? dates_.front() : d;
  if (!dates_.empty() && dates_.front() < cur) cur = dates_.front();
  while (remaining-- > 0) cur = next_weekday(cur, -1);
  return cur;
}

bool TradingCalendar::is_period_end(std::size_t index, Frequency f) const {
  if (index + 1 >= dates_.size()) return false;
  const Date cur = dates_[index];
  const Date next = dates_[index + 1];
  if (f == Frequency::Monthly) return cur.year() != next.year() || cur.month() != next.month();
  return week_start(cur) != week_start(next);
}

std::vector<Date> TradingCalendar::period_ends(Frequency f, Date from, Date to) const {
  std::vector<Date> out;
  auto first = std::lower_bound(dates_.begin(), dates_.end(), from);
  for (auto it = first; it != dates_.end() && *it <= to; ++it) {
    if (is_period_end(static_cast<std::size_t>(it - dates_.begin()), f)) out.push_back(*it);
  }
  return out;
}

}  // namespace llmmom
