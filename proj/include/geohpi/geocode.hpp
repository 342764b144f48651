// SPDX-License-Identifier: Apache-2.0

/**
 * \file geocode.hpp
 * \brief Geohash encoding/decoding and parameter-extended geohash keys.
 *
 * A geohash interleaves longitude and latitude bisection bits (longitude
 * first) and packs them five at a time into the base-32 alphabet
 * "0123456789bcdefghjkmnpqrstuvwxyz". Two hashes that share an n-character
 * prefix lie in the same length-n cell.
 *
 * An extended key (GeohashPlus) prepends categorical parameter characters,
 * drawn from the same alphabet, in front of the geohash body so a prefix tree
 * splits on the parameters before it splits on location.
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace geohpi {

inline constexpr std::string_view kGeohashAlphabet =
    "0123456789bcdefghjkmnpqrstuvwxyz";
inline constexpr int kMaxGeohashPrecision = 12;
inline constexpr int kDefaultGeohashPrecision = 7;
inline constexpr double kEarthRadiusMeters = 6371000.0;

/// Index of \p c in the geohash alphabet, or -1.
int geohash_char_value(char c) noexcept;

/// Alphabet character for \p value in [0, 32). Throws InvalidArgument otherwise.
char geohash_char(int value);

class GeoPoint {
 public:
  /// Rejects latitudes outside [-90, 90], longitudes outside [-180, 180] and NaN.
  GeoPoint(double lat, double lng);

  double lat() const noexcept { return lat_; }
  double lng() const noexcept { return lng_; }

  static bool valid(double lat, double lng) noexcept;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_;
  double lng_;
};

class Geohash {
 public:
  /// Throws InvalidGeohash for an empty string or a character outside the alphabet.
  explicit Geohash(std::string text);

  const std::string& text() const noexcept { return text_; }
  std::size_t precision() const noexcept { return text_.size(); }

  friend bool operator==(const Geohash&, const Geohash&) = default;

 private:
  std::string text_;
};

class GeohashPlus {
 public:
  GeohashPlus(std::string params, Geohash base);

  const std::string& params() const noexcept { return params_; }
  const Geohash& base() const noexcept { return base_; }
  /// Parameters followed by the geohash body.
  const std::string& text() const noexcept { return text_; }
  std::size_t size() const noexcept { return text_.size(); }

 private:
  std::string params_;
  Geohash base_;
  std::string text_;
};

struct DecodedGeohash {
  GeoPoint center;
  double lat_err;  ///< half-height of the cell, degrees
  double lng_err;  ///< half-width of the cell, degrees

  bool contains(const GeoPoint& p) const noexcept;
};

/// Throws InvalidArgument when precision is outside [1, 12].
Geohash encode_geohash(const GeoPoint& point, int precision);

DecodedGeohash decode_geohash(const Geohash& hash);

/// Throws InvalidArgument when a parameter character is outside the alphabet.
GeohashPlus make_geohash_plus(std::string_view params, const Geohash& base);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Corner-to-corner great-circle distance across the cell of \p hash, meters.
double cell_diagonal_meters(const Geohash& hash);

}  // namespace geohpi
