// SPDX-License-Identifier: Apache-2.0

#include "geohpi/ingestion.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "geohpi/csv.hpp"
#include "geohpi/error.hpp"

namespace geohpi {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if constexpr (std::is_integral_v<T>) {
    if (text.front() == '+') text.remove_prefix(1);
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

}  // namespace

std::optional<CalendarDate> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_number<int>(text.substr(0, 4));
  const auto m = parse_number<int>(text.substr(5, 2));
  const auto d = parse_number<int>(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  if (*m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
  return CalendarDate{*y, *m, *d};
}

std::string format_iso_date(const CalendarDate& date) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date.year, date.month, date.day);
  return buf;
}

std::string MonthKey::str() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
  return buf;
}

std::optional<MonthKey> MonthKey::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  const auto y = parse_number<int>(text.substr(0, 4));
  const auto m = parse_number<int>(text.substr(5, 2));
  if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
  return MonthKey(*y, *m);
}

ColumnMapping ColumnMapping::parse(std::string_view text) {
  ColumnMapping mapping;
  std::unordered_map<std::string_view, std::string*> fields = {
      {"id", &mapping.id},       {"date", &mapping.date},         {"price", &mapping.price},
      {"lat", &mapping.lat},     {"lng", &mapping.lng},           {"bedrooms", &mapping.bedrooms},
      {"type", &mapping.type}};
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto pair = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == pair.size()) {
      throw Error(ErrorCode::Schema, "malformed schema entry \"" + std::string(pair) +
                                         "\", expected field=column");
    }
    const auto it = fields.find(pair.substr(0, eq));
    if (it == fields.end()) {
      throw Error(ErrorCode::Schema, "unknown schema field \"" +
                                         std::string(pair.substr(0, eq)) + "\"");
    }
    *it->second = std::string(pair.substr(eq + 1));
  }
  return mapping;
}

ParseResult parse_listings(std::istream& in, const ColumnMapping& mapping) {
  if (!in) throw Error(ErrorCode::Io, "unreadable listing stream");
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw Error(ErrorCode::Schema, "listing input has no header row");

  auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    if (required) throw Error(ErrorCode::Schema, "missing column \"" + name + "\"");
    return std::nullopt;
  };
  const std::size_t c_id = *column(mapping.id, true);
  const std::size_t c_date = *column(mapping.date, true);
  const std::size_t c_price = *column(mapping.price, true);
  const std::size_t c_lat = *column(mapping.lat, true);
  const std::size_t c_lng = *column(mapping.lng, true);
  const std::size_t c_bed = *column(mapping.bedrooms, true);
  const auto c_type = column(mapping.type, false);

  ParseResult result;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::size_t line = reader.line();
    if (row.size() == 1 && blank(row[0])) continue;
    auto fail = [&](std::string message) {
      result.errors.push_back({line, "line " + std::to_string(line) + ": " + std::move(message)});
    };
    if (row.size() != header.size()) {
      fail("expected " + std::to_string(header.size()) + " fields, found " +
           std::to_string(row.size()));
      continue;
    }

    RawListing raw;
    raw.line = line;
    const auto id = parse_number<std::uint64_t>(row[c_id]);
    if (!id) {
      fail("invalid id \"" + row[c_id] + "\"");
      continue;
    }
    raw.id = *id;
    const auto date = parse_iso_date(row[c_date]);
    if (!date) {
      fail("invalid date \"" + row[c_date] + "\"");
      continue;
    }
    raw.list_date = *date;

    bool ok = true;
    auto optional_field = [&]<class T>(std::size_t col, std::optional<T>& out, const char* what) {
      if (!ok || blank(row[col])) return;
      out = parse_number<T>(row[col]);
      if (!out) {
        fail(std::string("non-numeric ") + what + " \"" + row[col] + "\"");
        ok = false;
      }
    };
    optional_field(c_price, raw.price, "price");
    optional_field(c_lat, raw.lat, "lat");
    optional_field(c_lng, raw.lng, "lng");
    optional_field(c_bed, raw.bedrooms, "bedrooms");
    if (!ok) continue;
    if (c_type && !blank(row[*c_type])) raw.dwelling_type = row[*c_type];
    result.records.push_back(std::move(raw));
  }
  return result;
}

ParseResult parse_listings_file(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_listings(in, mapping);
}

std::string FiltrationReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["missing_geo_or_bedrooms"] = missing_geo_or_bedrooms;
  j["too_many_bedrooms"] = too_many_bedrooms;
  j["missing_price"] = missing_price;
  j["price_out_of_bounds"] = price_out_of_bounds;
  j["surviving"] = surviving;
  j["surviving_fraction"] = surviving_fraction();
  return j.dump(2);
}

FilterResult filter_listings(std::span<const RawListing> raw, const FilterOptions& options) {
  FilterResult result;
  auto& report = result.report;
  report.total = raw.size();
  const int min_bedrooms = options.allow_zero_bedrooms ? 0 : 1;
  for (const auto& r : raw) {
    if (!r.lat || !r.lng || !GeoPoint::valid(*r.lat, *r.lng) || !r.bedrooms ||
        *r.bedrooms < min_bedrooms) {
      ++report.missing_geo_or_bedrooms;
    } else if (*r.bedrooms > kMaxBedrooms) {
      ++report.too_many_bedrooms;
    } else if (!r.price) {
      ++report.missing_price;
    } else if (*r.price < kMinPrice || *r.price > kMaxPrice) {
      ++report.price_out_of_bounds;
    } else {
      result.kept.push_back(ListingRecord{r.id, r.list_date, MonthKey::of(r.list_date), *r.price,
                                          GeoPoint(*r.lat, *r.lng), *r.bedrooms,
                                          r.dwelling_type});
    }
  }
  report.surviving = result.kept.size();
  return result;
}

RawListing to_raw(const ListingRecord& record) {
  RawListing raw;
  raw.id = record.id;
  raw.list_date = record.list_date;
  raw.price = record.price;
  raw.lat = record.point.lat();
  raw.lng = record.point.lng();
  raw.bedrooms = record.bedrooms;
  raw.dwelling_type = record.dwelling_type;
  return raw;
}

void write_listings_csv(std::ostream& out, std::span<const ListingRecord> records) {
  out << "id,date,price,lat,lng,bedrooms,type\n";
  for (const auto& r : records) {
    out << r.id << ',' << format_iso_date(r.list_date) << ',' << r.price << ','
        << csv::format_double(r.point.lat()) << ',' << csv::format_double(r.point.lng()) << ','
        << r.bedrooms << ',' << csv::escape(r.dwelling_type.value_or("")) << '\n';
  }
}

}  // namespace geohpi
