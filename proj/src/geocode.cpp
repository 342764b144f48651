// SPDX-License-Identifier: Apache-2.0

#include "geohpi/geocode.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "geohpi/error.hpp"

namespace geohpi {

namespace {

constexpr std::array<signed char, 128> make_decode_table() {
  std::array<signed char, 128> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kGeohashAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kGeohashAlphabet[i])] =
        static_cast<signed char>(i);
  }
  return table;
}

constexpr auto kDecodeTable = make_decode_table();

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

int geohash_char_value(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return u < kDecodeTable.size() ? kDecodeTable[u] : -1;
}

char geohash_char(int value) {
  if (value < 0 || value >= 32) {
    throw Error(ErrorCode::InvalidArgument,
                "geohash digit out of range: " + std::to_string(value));
  }
  return kGeohashAlphabet[static_cast<std::size_t>(value)];
}

bool GeoPoint::valid(double lat, double lng) noexcept {
  // NaN fails both comparisons.
  return lat >= -90.0 && lat <= 90.0 && lng >= -180.0 && lng <= 180.0;
}

GeoPoint::GeoPoint(double lat, double lng) : lat_(lat), lng_(lng) {
  if (!valid(lat, lng)) {
    throw Error(ErrorCode::InvalidArgument,
                "coordinates out of range: (" + std::to_string(lat) + ", " +
                    std::to_string(lng) + ")");
  }
}

Geohash::Geohash(std::string text) : text_(std::move(text)) {
  if (text_.empty()) {
    throw Error(ErrorCode::InvalidGeohash, "empty geohash");
  }
  for (char c : text_) {
    if (geohash_char_value(c) < 0) {
      throw Error(ErrorCode::InvalidGeohash,
                  "invalid geohash character '" + std::string(1, c) + "' in \"" +
                      text_ + "\"");
    }
  }
}

GeohashPlus::GeohashPlus(std::string params, Geohash base)
    : params_(std::move(params)), base_(std::move(base)) {
  for (char c : params_) {
    if (geohash_char_value(c) < 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "invalid parameter character '" + std::string(1, c) + "'");
    }
  }
  text_.reserve(params_.size() + base_.precision());
  text_ = params_;
  text_ += base_.text();
}

bool DecodedGeohash::contains(const GeoPoint& p) const noexcept {
  return p.lat() >= center.lat() - lat_err && p.lat() <= center.lat() + lat_err &&
         p.lng() >= center.lng() - lng_err && p.lng() <= center.lng() + lng_err;
}

Geohash encode_geohash(const GeoPoint& point, int precision) {
  if (precision < 1 || precision > kMaxGeohashPrecision) {
    throw Error(ErrorCode::InvalidArgument,
                "geohash precision must be in [1, 12], got " +
                    std::to_string(precision));
  }
  double lat_lo = -90.0, lat_hi = 90.0;
  double lng_lo = -180.0, lng_hi = 180.0;
  bool lng_bit = true;

  std::string text;
  text.reserve(static_cast<std::size_t>(precision));
  for (int c = 0; c < precision; ++c) {
    int value = 0;
    for (int b = 0; b < 5; ++b) {
      value <<= 1;
      if (lng_bit) {
        const double mid = (lng_lo + lng_hi) / 2;
        if (point.lng() >= mid) {
          value |= 1;
          lng_lo = mid;
        } else {
          lng_hi = mid;
        }
      } else {
        const double mid = (lat_lo + lat_hi) / 2;
        if (point.lat() >= mid) {
          value |= 1;
          lat_lo = mid;
        } else {
          lat_hi = mid;
        }
      }
      lng_bit = !lng_bit;
    }
    text.push_back(kGeohashAlphabet[static_cast<std::size_t>(value)]);
  }
  return Geohash(std::move(text));
}

DecodedGeohash decode_geohash(const Geohash& hash) {
  double lat_lo = -90.0, lat_hi = 90.0;
  double lng_lo = -180.0, lng_hi = 180.0;
  bool lng_bit = true;
  for (char c : hash.text()) {
    const int value = geohash_char_value(c);
    for (int b = 4; b >= 0; --b) {
      const bool set = ((value >> b) & 1) != 0;
      if (lng_bit) {
        const double mid = (lng_lo + lng_hi) / 2;
        (set ? lng_lo : lng_hi) = mid;
      } else {
        const double mid = (lat_lo + lat_hi) / 2;
        (set ? lat_lo : lat_hi) = mid;
      }
      lng_bit = !lng_bit;
    }
  }
  return DecodedGeohash{GeoPoint((lat_lo + lat_hi) / 2, (lng_lo + lng_hi) / 2),
                        (lat_hi - lat_lo) / 2, (lng_hi - lng_lo) / 2};
}

GeohashPlus make_geohash_plus(std::string_view params, const Geohash& base) {
  return GeohashPlus(std::string(params), base);
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = to_radians(a.lat());
  const double phi2 = to_radians(b.lat());
  const double dphi = phi2 - phi1;
  const double dlambda = to_radians(b.lng() - a.lng());
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(h));
}

double cell_diagonal_meters(const Geohash& hash) {
  const auto cell = decode_geohash(hash);
  const double lat_lo = cell.center.lat() - cell.lat_err;
  const double lat_hi = cell.center.lat() + cell.lat_err;
  const double lng_lo = cell.center.lng() - cell.lng_err;
  const double lng_hi = cell.center.lng() + cell.lng_err;
  const double d1 = haversine_distance(GeoPoint(lat_lo, lng_lo), GeoPoint(lat_hi, lng_hi));
  const double d2 = haversine_distance(GeoPoint(lat_lo, lng_hi), GeoPoint(lat_hi, lng_lo));
  return d1 > d2 ? d1 : d2;
}

}  // namespace geohpi
