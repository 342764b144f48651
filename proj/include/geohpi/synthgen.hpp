// SPDX-License-Identifier: Apache-2.0

/**
 * \file synthgen.hpp
 * \brief Seeded synthetic listings with a known price level.
 *
 * Price of a listing in month m with b bedrooms:
 *   round(base_price * (1 + drift)^m * bedroom_premium[b - 1] * exp(noise * z))
 * with z standard normal. Locations are Gaussian around cluster_count fixed
 * cluster centres. Random numbers come from std::mt19937_64, whose output
 * sequence is fixed by the standard; uniforms and normals are derived from its
 * raw output (53-bit uniforms, Box-Muller) so datasets are identical across
 * standard libraries.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "geohpi/listing.hpp"

namespace geohpi {

using BedroomMix = std::array<double, kMaxBedrooms>;  // P(1 bed) .. P(6 beds)

struct SynthConfig {
  std::size_t months = 24;
  std::size_t records_per_month = 500;
  double drift = 0.0;
  double noise = 0.0;
  /// Month m uses row m % rows; alternating rows produce a mix shift.
  std::vector<BedroomMix> bedroom_mix = {{0.05, 0.20, 0.35, 0.25, 0.10, 0.05}};
  std::array<double, kMaxBedrooms> bedroom_premium = {0.70, 0.85, 1.00, 1.20, 1.40, 1.60};
  std::size_t cluster_count = 20;
  double cluster_radius_m = 400.0;
  double base_price = 300'000.0;
  MonthKey start_month{2015, 1};
  double center_lat = 53.35;
  double center_lng = -6.26;
  double region_radius_deg = 0.25;
  std::uint64_t seed = 42;

  /// Throws InvalidArgument.
  void validate() const;
};

/// Alternating 3-bed-heavy / 4-bed-heavy months with a strong 4-bed premium.
SynthConfig mix_shift_config(std::uint64_t seed);

struct TruthPoint {
  MonthKey month;
  double level = 100.0;  // constant-quality price level, first month = 100
};

struct SynthDataset {
  std::vector<ListingRecord> records;
  std::vector<TruthPoint> truth;
};

SynthDataset generate(const SynthConfig& config);

/// month,true_level
void write_truth_csv(std::ostream& out, const std::vector<TruthPoint>& truth);

}  // namespace geohpi
