// SPDX-License-Identifier: Apache-2.0

// Seeded random listing fixtures shared by the unit and acceptance suites.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "geohpi/listing.hpp"

namespace geohpi::testing {

struct FixtureShape {
  std::size_t records = 200;
  std::size_t months = 6;
  std::size_t clusters = 4;
  double cluster_sigma_deg = 0.01;
  double region_deg = 0.5;
  int max_bedrooms = 6;
};

inline std::vector<ListingRecord> random_listings(std::uint64_t seed, const FixtureShape& shape) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::pair<double, double>> centres;
  for (std::size_t c = 0; c < shape.clusters; ++c) {
    centres.emplace_back(53.3 + (unit(rng) - 0.5) * shape.region_deg,
                         -6.3 + (unit(rng) - 0.5) * shape.region_deg);
  }
  std::vector<ListingRecord> out;
  for (std::size_t i = 0; i < shape.records; ++i) {
    const auto& [clat, clng] = centres[rng() % centres.size()];
    ListingRecord r;
    // Ids are shuffled relative to insertion so tie-breaks are exercised.
    r.id = (i * 7919 + seed) % 1000003;
    const auto m = static_cast<int>(rng() % shape.months);
    r.month = MonthKey::from_ordinal(MonthKey(2018, 1).ordinal() + m);
    r.list_date = CalendarDate{r.month.year(), r.month.month(), 1 + static_cast<int>(rng() % 28)};
    r.price = 50'000 + static_cast<std::int64_t>(rng() % 400'000);
    // Duplicate locations occur on purpose to exercise distance ties.
    if (!out.empty() && unit(rng) < 0.05) {
      r.point = out[rng() % out.size()].point;
    } else {
      r.point = GeoPoint(clat + gauss(rng) * shape.cluster_sigma_deg,
                         clng + gauss(rng) * shape.cluster_sigma_deg);
    }
    r.bedrooms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(shape.max_bedrooms));
    out.push_back(r);
  }
  return out;
}

}  // namespace geohpi::testing
