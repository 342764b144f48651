// SPDX-License-Identifier: Apache-2.0

/**
 * \file ingestion.hpp
 * \brief Listing CSV parsing and filtration.
 *
 * Filtration rules, evaluated in order; a record is counted under the first
 * rule it fails:
 *   1. missing or invalid coordinates, or missing bedroom count
 *   2. more than six bedrooms
 *   3. missing asking price
 *   4. price below 10,000 or above 1,000,000 euros (both bounds kept)
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geohpi/listing.hpp"

namespace geohpi {

/// Header names for each listing field. `type` is optional in the input.
struct ColumnMapping {
  std::string id = "id";
  std::string date = "date";
  std::string price = "price";
  std::string lat = "lat";
  std::string lng = "lng";
  std::string bedrooms = "bedrooms";
  std::string type = "type";

  /// Overrides defaults from "field=column,field=column". Throws Schema on an
  /// unknown field name or malformed pair.
  static ColumnMapping parse(std::string_view text);
};

/// One parsed data row. Optional fields are empty cells.
struct RawListing {
  std::size_t line = 0;
  std::uint64_t id = 0;
  CalendarDate list_date;
  std::optional<std::int64_t> price;
  std::optional<double> lat;
  std::optional<double> lng;
  std::optional<int> bedrooms;
  std::optional<std::string> dwelling_type;
};

struct ParseError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<RawListing> records;
  std::vector<ParseError> errors;
};

/// Throws Schema when a mapped column (other than type) is missing from the header.
ParseResult parse_listings(std::istream& in, const ColumnMapping& mapping = {});
/// As above; throws Io when the file cannot be opened.
ParseResult parse_listings_file(const std::filesystem::path& path,
                                const ColumnMapping& mapping = {});

struct FiltrationReport {
  std::size_t total = 0;
  std::size_t missing_geo_or_bedrooms = 0;
  std::size_t too_many_bedrooms = 0;
  std::size_t missing_price = 0;
  std::size_t price_out_of_bounds = 0;
  std::size_t surviving = 0;

  double surviving_fraction() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(surviving) / static_cast<double>(total);
  }
  std::size_t rejected() const noexcept {
    return missing_geo_or_bedrooms + too_many_bedrooms + missing_price + price_out_of_bounds;
  }
  /// Flat JSON object of the counts plus "surviving_fraction".
  std::string to_json() const;
};

struct FilterOptions {
  /// Studios (0 bedrooms) are rejected under rule 1 unless enabled.
  bool allow_zero_bedrooms = false;
};

struct FilterResult {
  std::vector<ListingRecord> kept;
  FiltrationReport report;
};

FilterResult filter_listings(std::span<const RawListing> raw, const FilterOptions& options = {});

RawListing to_raw(const ListingRecord& record);

/// Writes records using the default column names, header included.
void write_listings_csv(std::ostream& out, std::span<const ListingRecord> records);

}  // namespace geohpi
