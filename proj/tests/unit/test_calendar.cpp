#include <catch_amalgamated.hpp>

#include "llmmom/calendar.hpp"
#include "support.hpp"

using llmmom::Date;
using llmmom::Frequency;
using llmmom::Timestamp;
using llmmom::TradingCalendar;

TEST_CASE("dates parse, print and know their weekday") {
  const Date d = Date::parse("2024-01-03");
  CHECK(d.iso() == "2024-01-03");
  CHECK(d.iso_weekday() == 3);
  CHECK(Date::parse("2024-02-29").plus_days(1) == Date(2024, 3, 1));
  CHECK_THROWS_AS(Date::parse("2023-02-29"), std::invalid_argument);
  CHECK_THROWS_AS(Date::parse("2024-1-03"), std::invalid_argument);
  CHECK_THROWS_AS(Date::parse("2024-01-03x"), std::invalid_argument);
}

TEST_CASE("timestamps have minute precision") {
  const Timestamp t = Timestamp::parse("2024-01-03 15:45");
  CHECK(t.str() == "2024-01-03 15:45");
  CHECK(t.date() == Date(2024, 1, 3));
  CHECK(llmmom::minutes_between(t, Timestamp::parse("2024-01-04 15:45")) == 24 * 60);
  CHECK_THROWS(Timestamp::parse("2024-01-03 24:00"));
  CHECK_THROWS(Timestamp::parse("2024-01-03T15:45"));
}

TEST_CASE("business-day offsets walk the calendar and extrapolate weekdays") {
  // Calendar with a holiday on Monday 2024-01-15.
  std::vector<Date> dates = testing::weekdays(Date(2024, 1, 2), 15);
  dates.erase(std::find(dates.begin(), dates.end(), Date(2024, 1, 15)));
  const TradingCalendar cal(dates);
  CHECK(cal.offset(Date(2024, 1, 12), 1) == Date(2024, 1, 16));
  CHECK(cal.offset(Date(2024, 1, 16), -1) == Date(2024, 1, 12));
  // From a weekend: one business day back is the Friday.
  CHECK(cal.offset(Date(2024, 1, 13), -1) == Date(2024, 1, 12));
  // Past the last date (Mon 2024-01-22) the weekday rule takes over.
  CHECK(cal.dates().back() == Date(2024, 1, 22));
  CHECK(cal.offset(Date(2024, 1, 22), 5) == Date(2024, 1, 29));
  CHECK(cal.offset(Date(2024, 1, 2), -1) == Date(2024, 1, 1));
  CHECK(cal.offset(Date(2024, 1, 3), 0) == Date(2024, 1, 3));
}

TEST_CASE("period ends are the last trading day of each week or month") {
  const TradingCalendar cal(testing::weekdays(Date(2024, 1, 22), 30));
  const auto weekly = cal.period_ends(Frequency::Weekly, Date(2024, 1, 1), Date(2024, 12, 31));
  for (const auto& d : weekly) CHECK(d.iso_weekday() == 5);
  CHECK(weekly.front() == Date(2024, 1, 26));
  const auto monthly = cal.period_ends(Frequency::Monthly, Date(2024, 1, 1), Date(2024, 12, 31));
  REQUIRE(monthly.size() == 2);
  CHECK(monthly[0] == Date(2024, 1, 31));
  CHECK(monthly[1] == Date(2024, 2, 29));
  // The final date is never a period end.
  CHECK_FALSE(cal.is_period_end(cal.size() - 1, Frequency::Weekly));
}
