// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "geohpi/geocode.hpp"

namespace geohpi {

/// Naive calendar date, no time zone.
struct CalendarDate {
  int year = 1970;
  int month = 1;  // 1-12
  int day = 1;    // 1-31

  friend auto operator<=>(const CalendarDate&, const CalendarDate&) = default;
};

/// Parses strict ISO-8601 "YYYY-MM-DD"; std::nullopt on any malformation.
std::optional<CalendarDate> parse_iso_date(std::string_view text);
std::string format_iso_date(const CalendarDate& date);

/// Calendar year-month used to bucket listings.
class MonthKey {
 public:
  constexpr MonthKey() = default;
  constexpr MonthKey(int year, int month) : ordinal_(year * 12 + (month - 1)) {}

  static constexpr MonthKey from_ordinal(std::int32_t ordinal) {
    MonthKey m;
    m.ordinal_ = ordinal;
    return m;
  }
  static MonthKey of(const CalendarDate& date) { return {date.year, date.month}; }

  constexpr int year() const { return ordinal_ >= 0 ? ordinal_ / 12 : (ordinal_ - 11) / 12; }
  constexpr int month() const { return ordinal_ - year() * 12 + 1; }
  constexpr std::int32_t ordinal() const { return ordinal_; }
  constexpr MonthKey next() const { return from_ordinal(ordinal_ + 1); }

  /// "YYYY-MM"
  std::string str() const;
  /// Parses "YYYY-MM"; std::nullopt on malformation.
  static std::optional<MonthKey> parse(std::string_view text);

  friend constexpr auto operator<=>(const MonthKey&, const MonthKey&) = default;

 private:
  std::int32_t ordinal_ = 0;
};

inline constexpr std::int64_t kMinPrice = 10'000;
inline constexpr std::int64_t kMaxPrice = 1'000'000;
inline constexpr int kMaxBedrooms = 6;

/// One listing that passed filtration.
struct ListingRecord {
  std::uint64_t id = 0;
  CalendarDate list_date;
  MonthKey month;
  std::int64_t price = 0;  // euros
  GeoPoint point{0.0, 0.0};
  int bedrooms = 1;
  std::optional<std::string> dwelling_type;
};

}  // namespace geohpi
