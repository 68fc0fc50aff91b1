#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace varnet {

// Calendar date, no time-of-day. Comparable in calendar order.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

bool is_valid_date(const Date& d);

// Strict ISO-8601 "YYYY-MM-DD". Returns nullopt on any deviation.
std::optional<Date> parse_date(std::string_view text);

std::string to_string(const Date& d);

// Days since 1970-01-01 (proleptic Gregorian) and its inverse.
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);

Date next_day(const Date& d);

}  // namespace varnet
